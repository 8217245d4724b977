#include "suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include "hopnet/analysis.hpp"
#include "hopnet/interconnect.hpp"
#include "oracles.hpp"
#include "random.hpp"

namespace hopnet::selftest {

namespace {

using Rng = detail::SplitMix64;

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

CriterionResult criterion(int id, std::string title) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    return r;
}

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Vector uniform_vector(Rng& rng, std::size_t n, double lo, double hi) {
    Vector v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

HopfieldNetwork random_network(Rng& rng, std::size_t n, double coupling) {
    std::vector<CapacitorModel> caps;
    Vector R(n);
    Matrix T(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        caps.emplace_back(Activation::tanh, rng.uniform(0.5, 2.5), rng.uniform(0.5, 2.0));
        R[i] = rng.uniform(0.5, 2.0);
        for (std::size_t j = 0; j <= i; ++j) T(i, j) = T(j, i) = rng.uniform(-coupling, coupling);
    }
    return HopfieldNetwork(std::move(caps), std::move(R), std::move(T));
}

double rel_inf(const Vector& got, const Vector& want) {
    return distance_inf(got, want) / norm_inf(want);
}

struct Ctx {
    std::uint64_t seed;
    std::size_t workers;
    Rng rng(int id) const { return Rng(seed, static_cast<std::uint64_t>(id)); }
};

// Shared runs for the dissipation criteria and the trajectory artifact.
struct DissipationRuns {
    struct Run {
        Trajectory traj;
        MonotonicityReport report;
        bool sinusoidal = false;
    };
    std::vector<Run> runs;
};

DissipationRuns dissipation_runs(const Ctx& cx) {
    DissipationRuns out;
    Rng rng = cx.rng(6);
    for (int k = 0; k < 25; ++k) {
        const bool sinusoidal = k >= 20;
        const std::size_t n = 2 + rng.below(4);
        const auto net = random_network(rng, n, 1.5);
        const Vector q0 = charges(net, uniform_vector(rng, n, -0.9, 0.9));
        IntegratorConfig cfg;
        cfg.t_end = sinusoidal ? 20.0 : 30.0;
        if (sinusoidal) cfg.equilibrium_tol = 0.0;
        InputSignal input = InputSignal::zero(n);
        if (sinusoidal) {
            input = InputSignal::sinusoid(uniform_vector(rng, n, -0.3, 0.3), uniform_vector(rng, n, 0.0, 0.3),
                                          rng.uniform(0.5, 3.0), rng.uniform(0.0, 6.28));
        } else {
            input = InputSignal::constant(uniform_vector(rng, n, -0.5, 0.5));
        }
        auto traj = integrate_q(net, q0, input, cfg);
        auto rep = monotonicity_report(traj, input, 1e-8, 1e-9, 1e-9);
        out.runs.push_back({std::move(traj), rep, sinusoidal});
    }
    return out;
}

// --- 1 ---------------------------------------------------------------------
CriterionResult conjugate_correctness(const Ctx&) {
    auto r = criterion(1, "conjugate closed form vs golden-section sup");
    double worst = 0.0;
    std::size_t points = 0;
    for (double gain : {0.5, 1.0, 2.0})
        for (double cap : {0.5, 1.0, 2.0}) {
            const CapacitorModel m(Activation::tanh, gain, cap);
            for (int k = 0; k < 200; ++k) {
                const double V = -0.999 + 1.998 * k / 199.0;
                const long double qV = cap / gain * std::atanh(static_cast<long double>(V));
                const long double sup = oracle::golden_max(
                    [&](long double q) { return q * V - oracle::tanh_charge_energy(q, gain, cap); }, qV - 5.0L,
                    qV + 5.0L);
                worst = std::max(worst, std::abs(m.conjugate_energy(V) - static_cast<double>(sup)));
                ++points;
            }
        }
    r.passed = worst <= 1e-8;
    r.detail = fmt("max |H* - sup| = %.3g over %.0f points (tol 1e-8)", worst, double(points));
    r.metrics = {{"max_abs_error", num(worst)}, {"points", points}};
    return r;
}

// --- 2 ---------------------------------------------------------------------
CriterionResult derivative_checks(const Ctx& cx) {
    auto r = criterion(2, "gradients and metric vs central differences");
    Rng rng = cx.rng(2);
    const auto net = random_network(rng, 5, 1.0);
    double wH = 0.0, wP = 0.0, wI = 0.0, wM = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Vector V = uniform_vector(rng, 5, -0.9, 0.9);
        const Vector I = uniform_vector(rng, 5, -1.0, 1.0);
        const Vector q = charges(net, V);

        const auto dH = oracle::gradient([&](const Vector& x) { return total_energy(net, x); }, q, 1e-6);
        wH = std::max(wH, rel_inf(dH, outputs(net, q)));

        const auto dP = oracle::gradient([&](const Vector& x) { return dissipation_potential(net, x, I); }, V, 1e-6);
        wP = std::max(wP, rel_inf(dP, potential_gradient(net, V, I)));

        const auto dI = oracle::gradient([&](const Vector& x) { return dissipation_potential(net, V, x); }, I, 1e-4);
        const auto gI = potential_input_gradient(net, V, I);
        Vector minusV(V.size());
        for (std::size_t i = 0; i < V.size(); ++i) minusV[i] = -V[i];
        wI = std::max({wI, rel_inf(dI, gI), rel_inf(gI, minusV)});

        Vector d2(5);
        for (std::size_t i = 0; i < 5; ++i) {
            const auto& cap = net.capacitor(i);
            d2[i] = oracle::second_difference([&](double x) { return cap.conjugate_energy(x); }, V[i], 1e-4);
        }
        wM = std::max(wM, rel_inf(d2, metric(net, V)));
    }
    const double worst = std::max({wH, wP, wI, wM});
    r.passed = worst <= 1e-5;
    r.detail = fmt("max relative error %.3g over 100 states, n=5 (tol 1e-5)", worst);
    r.metrics = {{"dH_dq", num(wH)}, {"dP_dV", num(wP)}, {"dP_dI", num(wI)}, {"metric", num(wM)}};
    return r;
}

// --- 3 ---------------------------------------------------------------------
CriterionResult relaxation_identity(const Ctx& cx) {
    auto r = criterion(3, "q-dynamics equals minus the potential gradient");
    Rng rng = cx.rng(3);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + rng.below(8);
        const auto net = random_network(rng, n, 1.5);
        const Vector V = uniform_vector(rng, n, -0.95, 0.95);
        const Vector I = uniform_vector(rng, n, -1.0, 1.0);
        const Vector q = charges(net, V);
        const auto qdot = q_dynamics(net, q, I);
        const auto grad = potential_gradient(net, outputs(net, q), I);
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(qdot[i] + grad[i]));
        worst = std::max(worst, dev / (1.0 + norm_inf(qdot)));
    }
    r.passed = worst <= 1e-12;
    r.detail = fmt("max |dq/dt + dP/dV| / (1 + |dq/dt|) = %.3g over 1000 states (tol 1e-12)", worst);
    r.metrics = {{"max_relative_discrepancy", num(worst)}};
    return r;
}

// --- 4 ---------------------------------------------------------------------
CriterionResult energy_balance(const Ctx& cx) {
    auto r = criterion(4, "energy balance identity");
    Rng rng = cx.rng(4);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + rng.below(8);
        const auto net = random_network(rng, n, 1.5);
        const Vector q = charges(net, uniform_vector(rng, n, -0.95, 0.95));
        const Vector I = uniform_vector(rng, n, -1.0, 1.0);
        const Vector Idot = uniform_vector(rng, n, -1.0, 1.0);
        const auto rates = dissipation_rates(net, q, I, Idot);
        const auto V = outputs(net, q);
        double ItV = 0.0;
        for (std::size_t i = 0; i < n; ++i) ItV += I[i] * V[i];
        const double dev = std::abs(rates.energy_rate - ItV + rates.passivity_residual);
        const double scale = std::abs(rates.energy_rate) + std::abs(ItV) + std::abs(rates.passivity_residual);
        worst = std::max(worst, dev / scale);
    }
    r.passed = worst <= 1e-12;
    r.detail = fmt("max relative imbalance %.3g over 1000 states (tol 1e-12)", worst);
    r.metrics = {{"max_relative_imbalance", num(worst)}};
    return r;
}

// --- 5 ---------------------------------------------------------------------
CriterionResult cross_form(const Ctx& cx) {
    auto r = criterion(5, "q-form vs V-form trajectories");
    Rng rng = cx.rng(5);
    const auto net = random_network(rng, 4, 1.5);
    const Vector V0 = uniform_vector(rng, 4, -0.8, 0.8);
    const auto input = InputSignal::constant(uniform_vector(rng, 4, -0.3, 0.3));
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    cfg.output_interval = 0.05;
    cfg.equilibrium_tol = 0.0;
    const auto a = integrate_q(net, charges(net, V0), input, cfg);
    const auto b = integrate_V(net, V0, input, cfg);
    double worst = a.samples.size() == b.samples.size() ? 0.0 : INFINITY;
    for (std::size_t k = 0; k < std::min(a.samples.size(), b.samples.size()); ++k) {
        if (std::abs(a.samples[k].t - b.samples[k].t) > 1e-12) worst = INFINITY;
        worst = std::max(worst, distance_inf(a.samples[k].q, b.samples[k].q));
    }
    r.passed = worst <= 1e-5;
    r.detail = fmt("max |q_q - q_V| = %.3g on %.0f grid points, horizon 20 (tol 1e-5)", worst,
                   double(a.samples.size()));
    r.metrics = {{"max_abs_difference", num(worst)}, {"grid_points", a.samples.size()}};
    return r;
}

// --- 6 ---------------------------------------------------------------------
CriterionResult potential_inequality(const DissipationRuns& runs) {
    auto r = criterion(6, "potential decreases along trajectories");
    double worst_disc = 0.0, worst_rate = -INFINITY;
    bool ok = true;
    std::size_t constant = 0, periodic = 0;
    for (const auto& run : runs.runs) {
        if (run.sinusoidal) {
            ++periodic;
            ok = ok && run.report.rate_ok;
            worst_rate = std::max(worst_rate, run.report.worst_rate_excess);
        } else {
            ++constant;
            ok = ok && run.report.discrete_checked && run.report.discrete_ok;
            worst_disc = std::max(worst_disc, run.report.worst_discrete_increase);
        }
    }
    r.passed = ok && constant == 20 && periodic == 5;
    r.detail = fmt("worst relative P increase %.3g (tol 1e-9); worst dP/dt + V.dI/dt %.3g (tol 1e-8)", worst_disc,
                   worst_rate);
    r.metrics = {{"constant_runs", constant},
                 {"sinusoidal_runs", periodic},
                 {"worst_discrete_increase", num(worst_disc)},
                 {"worst_rate_excess", num(worst_rate)}};
    return r;
}

// --- 7 ---------------------------------------------------------------------
CriterionResult conditional_passivity(const DissipationRuns& runs) {
    auto r = criterion(7, "passive samples satisfy dH/dt <= I.V");
    bool ok = true;
    std::size_t samples = 0, passive = 0;
    double worst = -INFINITY;
    for (const auto& run : runs.runs) {
        ok = ok && run.report.passivity_ok;
        samples += run.traj.samples.size();
        passive += run.report.passive_samples;
        if (run.report.passive_samples > 0) worst = std::max(worst, run.report.worst_passivity_excess);
    }
    r.passed = ok && passive > 0;
    r.detail = fmt("worst dH/dt - I.V on passive samples %.3g (slack 1e-9), passive samples %.0f", worst,
                   double(passive));
    r.metrics = {{"samples", samples}, {"passive_samples", passive}, {"worst_excess", num(worst)}};
    return r;
}

// --- 8 ---------------------------------------------------------------------
CriterionResult semipassivity(const Ctx& cx) {
    auto r = criterion(8, "semi-passivity of the scalar example");
    const auto net = HopfieldNetwork::uniform(Matrix{{2.0}}, 1.0);
    PassivityOptions opts;
    opts.seed = cx.seed;
    opts.workers = cx.workers;
    const auto near = certify_semipassivity(net, 1.0, opts);
    const auto far = certify_semipassivity(net, 2.5, opts);

    // The residual along the ray is even and increasing beyond 2.5.
    bool radial = true;
    double prev = passivity_residual(net, Vector{2.5});
    radial = radial && prev > 0.0;
    for (int k = 1; k <= 10000; ++k) {
        const double v = 2.5 * std::pow(400.0, k / 10000.0);
        const double res = passivity_residual(net, Vector{v});
        radial = radial && res > prev && res == passivity_residual(net, Vector{-v});
        prev = res;
    }

    const double oracle_root = oracle::bisect([](double v) { return v - 2.0 * std::tanh(v); }, 1.0, 3.0);
    const double library_root = oracle::bisect([&](double v) { return passivity_residual(net, Vector{v}); }, 1.0, 3.0);
    const double root_error = std::max(std::abs(library_root - oracle_root), std::abs(library_root - 1.915008048154537));

    const bool falsified = near.mode == PassivityReport::Mode::falsified && !near.counterexamples.empty() &&
                           near.counterexamples.front().residual < -1e-12;
    const bool certified = far.mode == PassivityReport::Mode::certified_outside_radius &&
                           far.counterexamples.empty() && far.samples == 100000 && radial;
    r.passed = falsified && certified && root_error <= 1e-6;
    std::ostringstream d;
    d << "r=1.0 " << to_string(near.mode) << ", r=2.5 " << to_string(far.mode)
      << fmt(", root %.10g (err %.2g)", library_root, root_error);
    r.detail = d.str();
    Json witness = nullptr;
    if (!near.counterexamples.empty())
        witness = {{"v", near.counterexamples.front().v}, {"residual", near.counterexamples.front().residual}};
    r.metrics = {{"radius_1_mode", std::string(to_string(near.mode))},
                 {"radius_1_witness", witness},
                 {"radius_2_5_mode", std::string(to_string(far.mode))},
                 {"radius_2_5_min_residual", num(far.min_sampled_residual)},
                 {"radial_monotone", radial},
                 {"root", library_root},
                 {"root_error", num(root_error)}};
    return r;
}

// --- 9 ---------------------------------------------------------------------
CriterionResult pitchfork(const Ctx& cx) {
    auto r = criterion(9, "pitchfork equilibria");
    const auto net = HopfieldNetwork::uniform(Matrix{{1.0}}, 2.0);
    EquilibriaOptions opts;
    opts.seed = cx.seed;
    opts.workers = cx.workers;
    const auto set = find_equilibria(net, Vector{0.0}, opts);
    const double root = oracle::bisect([](double q) { return q - std::tanh(2.0 * q); }, 0.5, 1.5);
    bool ok = set.equilibria.size() == 3;
    double root_error = INFINITY;
    if (ok) {
        const auto& lo = set.equilibria[0];
        const auto& mid = set.equilibria[1];
        const auto& hi = set.equilibria[2];
        root_error = std::max(std::abs(lo.q[0] + root), std::abs(hi.q[0] - root));
        ok = root_error <= 1e-6 && std::abs(mid.q[0]) <= 1e-9 && mid.kind != CriticalKind::local_min;
        for (const auto* e : {&lo, &hi})
            ok = ok && e->kind == CriticalKind::local_min && e->perturbation_returns.value_or(false);
    }
    r.passed = ok;
    std::ostringstream d;
    d << set.equilibria.size() << " equilibria";
    if (set.equilibria.size() == 3) d << ", origin " << to_string(set.equilibria[1].kind);
    d << fmt(", |q* - root| = %.3g (tol 1e-6)", root_error);
    r.detail = d.str();
    r.metrics = {{"count", set.equilibria.size()}, {"root", root}, {"root_error", num(root_error)},
                 {"equilibria", io::to_json(set)["equilibria"]}};
    return r;
}

// --- 10 --------------------------------------------------------------------
CriterionResult invariance(const Ctx& cx) {
    auto r = criterion(10, "invariant cube and convergence to equilibria");
    Rng rng = cx.rng(10);
    const auto net = random_network(rng, 3, 2.0);
    const Vector I = uniform_vector(rng, 3, -0.2, 0.2);
    InvarianceOptions opts;
    opts.seed = cx.seed;
    opts.workers = cx.workers;
    opts.equilibria.seed = cx.seed ^ 0x5EEDULL;
    opts.equilibria.workers = cx.workers;
    const auto rep = cube_invariance_probe(net, I, 1e-3, opts);
    double worst_distance = 0.0;
    for (const auto& t : rep.trials) worst_distance = std::max(worst_distance, t.equilibrium_distance);
    r.passed = rep.invariant && rep.all_converged && rep.all_match_equilibria && rep.trials.size() == 30;
    r.detail = fmt("max excursion %.3g (tol 1e-9), max distance to an equilibrium %.3g (tol 1e-5)",
                   rep.max_excursion, worst_distance);
    r.metrics = {{"max_excursion", num(rep.max_excursion)},
                 {"max_equilibrium_distance", num(worst_distance)},
                 {"trials", rep.trials.size()},
                 {"equilibria", rep.equilibria.equilibria.size()},
                 {"all_converged", rep.all_converged}};
    return r;
}

// --- 11 --------------------------------------------------------------------
CriterionResult sharpening(const Ctx& cx) {
    auto r = criterion(11, "sharpening sigmoids");
    const auto base = HopfieldNetwork::uniform(Matrix{{0.0, 1.0}, {1.0, 0.0}}, 1.0);
    const Vector I{0.1, -0.05};
    const Vector gains{10.0, 20.0, 40.0, 80.0};
    LambdaSweepOptions opts;
    opts.workers = cx.workers;
    const auto rep = lambda_sweep(base, I, gains, opts);

    double analytic_dev = 0.0;
    for (double x : rep.conjugate_ratios) analytic_dev = std::max(analytic_dev, std::abs(x - 0.5));

    // Same sup through the numeric Legendre transform on a coarser grid.
    const std::size_t m = 21;
    Vector sups;
    for (double g : gains) {
        const auto net = base.with_gain(g);
        double sup = 0.0;
        for (std::size_t k = 0; k < m * m; ++k) {
            const Vector V = sweep_grid_point(2, m, 1e-3, k);
            double term = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                term += net.relaxation_rates()[i] * net.capacitor(i).numeric_conjugate_energy(V[i]);
            sup = std::max(sup, std::abs(term));
        }
        sups.push_back(sup);
    }
    double numeric_dev = 0.0;
    Vector numeric_ratios;
    for (std::size_t k = 1; k < sups.size(); ++k) {
        numeric_ratios.push_back(sups[k] / sups[k - 1]);
        numeric_dev = std::max(numeric_dev, std::abs(numeric_ratios.back() - 0.5));
    }
    r.passed = analytic_dev <= 1e-10 && numeric_dev <= 0.1 && rep.monotone && rep.argmin_agrees_at_largest &&
               rep.entries.size() == 4;
    r.detail = fmt("|ratio - 0.5| closed form %.3g (tol 1e-10), numeric %.3g (tol 0.1)", analytic_dev, numeric_dev) +
               (rep.argmin_agrees_at_largest ? ", argmin agrees" : ", argmin differs");
    r.metrics = {{"closed_form_ratios", rep.conjugate_ratios},
                 {"numeric_ratios", numeric_ratios},
                 {"gap_ratios", rep.gap_ratios},
                 {"grid_per_axis", rep.grid_per_axis},
                 {"argmin_agrees_at_largest", rep.argmin_agrees_at_largest}};
    return r;
}

// --- 12 --------------------------------------------------------------------
CriterionResult interconnection(const Ctx& cx) {
    auto r = criterion(12, "interconnection of two networks");
    Rng rng = cx.rng(12);
    auto a = random_network(rng, 2, 1.0);
    auto b = random_network(rng, 2, 1.0);
    const Matrix S{{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
    const CoupledNetwork c{a, TerminalPartition(2, {0, 1}), b, TerminalPartition(2, {1}), S};
    const Vector qa = charges(a, uniform_vector(rng, 2, -0.8, 0.8));
    const Vector qb = charges(b, uniform_vector(rng, 2, -0.8, 0.8));
    Vector q0 = qa;
    q0.insert(q0.end(), qb.begin(), qb.end());

    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    cfg.output_interval = 0.25;
    cfg.equilibrium_tol = 0.0;

    // S = 0 decouples. Fixed RK4 steps keep the step sequences identical.
    auto free = c;
    free.S = Matrix(1, 2);
    IntegratorConfig fixed = cfg;
    fixed.method = Method::rk4;
    fixed.dt = 1e-3;
    const auto joint = integrate_q(compose(free), q0, InputSignal::zero(4), fixed);
    const auto ja = integrate_q(a, qa, InputSignal::zero(2), fixed);
    const auto jb = integrate_q(b, qb, InputSignal::zero(2), fixed);
    double decoupling = joint.samples.size() == ja.samples.size() && ja.samples.size() == jb.samples.size() ? 0.0 : INFINITY;
    for (std::size_t k = 0; k < std::min({joint.samples.size(), ja.samples.size(), jb.samples.size()}); ++k) {
        Vector cat = ja.samples[k].q;
        cat.insert(cat.end(), jb.samples[k].q.begin(), jb.samples[k].q.end());
        decoupling = std::max(decoupling, distance_inf(joint.samples[k].q, cat));
    }
    {
        const Vector zero2(2, 0.0);
        Vector cat = q_dynamics(a, qa, zero2);
        const Vector rb = q_dynamics(b, qb, zero2);
        cat.insert(cat.end(), rb.begin(), rb.end());
        decoupling = std::max(decoupling, distance_inf(q_dynamics(compose(free), q0, Vector(4, 0.0)), cat));
    }

    // -dP/dV of the composed potential reproduces the composed dynamics.
    const auto net = compose(c);
    double gradient = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Vector V = uniform_vector(rng, 4, -0.8, 0.8);
        const auto fd = oracle::gradient5(
            [&](const Vector& x) {
                return composed_potential(c, Vector(x.begin(), x.begin() + 2), Vector(x.begin() + 2, x.end()));
            },
            V, 1e-4);
        const auto qdot = q_dynamics(net, charges(net, V), Vector(4, 0.0));
        for (std::size_t i = 0; i < 4; ++i) gradient = std::max(gradient, std::abs(fd[i] + qdot[i]));
    }

    const auto co = cosimulate(c, qa, qb, cfg);
    const auto full = integrate_q(net, q0, InputSignal::zero(4), cfg);
    double cosim = co.states.size() == full.samples.size() ? 0.0 : INFINITY;
    for (std::size_t k = 0; k < std::min(co.states.size(), full.samples.size()); ++k)
        cosim = std::max(cosim, distance_inf(co.states[k], full.samples[k].q));

    const auto rep = interconnection_consistency(c, qa, qb, 20.0);
    r.passed = decoupling <= 1e-10 && gradient <= 1e-10 && cosim <= 1e-6 && rep.potential_nonincreasing && rep.ok();
    r.detail = fmt("decoupling %.3g, gradient %.3g", decoupling, gradient) +
               fmt(", co-simulation %.3g, worst P increase %.3g", cosim, rep.worst_potential_increase);
    r.metrics = {{"decoupling_error", num(decoupling)},
                 {"gradient_error", num(gradient)},
                 {"cosimulation_error", num(cosim)},
                 {"worst_potential_increase", num(rep.worst_potential_increase)},
                 {"consistency", io::to_json(rep)}};
    return r;
}

// --- 13 --------------------------------------------------------------------
CriterionResult hebbian(const Ctx& cx) {
    auto r = criterion(13, "Hebbian recall");
    Rng rng = cx.rng(13);
    Pattern p(8);
    for (int& x : p) x = rng.coin() ? 1 : -1;
    const std::vector<Pattern> patterns{p};
    const auto net = hebbian_network(patterns, 4.0, 2.0);
    RecallOptions opts;
    opts.seed = cx.seed;
    opts.corruption = 1;
    const auto rep = hebbian_recall(net, patterns, opts);
    const auto& res = rep.results.front();

    EquilibriaOptions eo;
    eo.seed = cx.seed;
    eo.workers = cx.workers;
    const auto set = find_equilibria(net, Vector(8, 0.0), eo);
    const auto [idx, dist] = set.nearest(res.final_q);
    const bool basin = dist <= 1e-5 && set.equilibria[idx].kind == CriticalKind::local_min &&
                       res.clean_converged && res.clean_sign_matches == 8 &&
                       res.clean_kind == CriticalKind::local_min;
    r.passed = res.sign_matches == 8 && res.converged && basin;
    r.detail = fmt("recall %.0f/8 from 1-bit corruption, distance to local minimum %.3g", double(res.sign_matches), dist);
    r.metrics = {{"pattern", p},
                 {"flipped", res.flipped},
                 {"sign_matches", res.sign_matches},
                 {"final_classification", std::string(to_string(res.final_kind))},
                 {"clean_sign_matches", res.clean_sign_matches},
                 {"minimum_distance", num(dist)}};
    return r;
}

// --- 15 --------------------------------------------------------------------
CriterionResult rk4_order(const Ctx&) {
    auto r = criterion(15, "RK4 convergence order");
    const auto net = HopfieldNetwork::uniform(Matrix(1, 1), 1.0);
    const auto error = [&](double dt) {
        IntegratorConfig cfg;
        cfg.method = Method::rk4;
        cfg.dt = dt;
        cfg.t_end = 1.0;
        cfg.equilibrium_tol = 0.0;
        return std::abs(integrate_q(net, Vector{1.0}, InputSignal::zero(1), cfg).back().q[0] - std::exp(-1.0));
    };
    const double e1 = error(0.1), e2 = error(0.05);
    const double ratio = e1 / e2;
    r.passed = ratio >= 12.0 && ratio <= 20.0;
    r.detail = fmt("error ratio %.4g under dt 0.1 -> 0.05 (band [12, 20])", ratio);
    r.metrics = {{"error_dt_0_1", num(e1)}, {"error_dt_0_05", num(e2)}, {"ratio", num(ratio)}};
    return r;
}

template <class F>
CriterionResult timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = f();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

SuiteResult single_pass(const SuiteOptions& opts) {
    const Ctx cx{opts.seed, opts.workers};
    SuiteResult out;
    auto& c = out.criteria;
    c.push_back(timed([&] { return conjugate_correctness(cx); }));
    c.push_back(timed([&] { return derivative_checks(cx); }));
    c.push_back(timed([&] { return relaxation_identity(cx); }));
    c.push_back(timed([&] { return energy_balance(cx); }));
    c.push_back(timed([&] { return cross_form(cx); }));
    const auto t0 = std::chrono::steady_clock::now();
    const auto runs = dissipation_runs(cx);
    const double shared = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.push_back(timed([&] { return potential_inequality(runs); }));
    c.back().seconds += shared;
    c.push_back(timed([&] { return conditional_passivity(runs); }));
    c.push_back(timed([&] { return semipassivity(cx); }));
    c.push_back(timed([&] { return pitchfork(cx); }));
    c.push_back(timed([&] { return invariance(cx); }));
    c.push_back(timed([&] { return sharpening(cx); }));
    c.push_back(timed([&] { return interconnection(cx); }));
    c.push_back(timed([&] { return hebbian(cx); }));
    c.push_back(timed([&] { return rk4_order(cx); }));

    Json doc;
    doc["seed"] = opts.seed;
    Json list = Json::array();
    for (const auto& r : c)
        list.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail},
                        {"metrics", r.metrics}});
    doc["criteria"] = std::move(list);
    out.artifacts["selftest_report.json"] = io::dump(doc);
    std::ostringstream csv;
    io::write_trajectory_csv(csv, runs.runs.front().traj);
    out.artifacts["selftest_trajectory.csv"] = csv.str();
    return out;
}

}  // namespace

bool SuiteResult::passed() const {
    for (const auto& c : criteria)
        if (!c.passed) return false;
    return !criteria.empty();
}

SuiteResult run_suite(const SuiteOptions& opts) {
    SuiteResult out = single_pass(opts);
    if (opts.determinism_check) {
        const auto t0 = std::chrono::steady_clock::now();
        SuiteOptions other = opts;
        other.workers = opts.workers == 1 ? 3 : 1;
        const SuiteResult again = single_pass(other);
        auto r = criterion(14, "deterministic artifacts across worker counts");
        r.passed = again.artifacts == out.artifacts;
        std::size_t bytes = 0;
        for (const auto& [_, content] : out.artifacts) bytes += content.size();
        std::ostringstream d;
        d << (r.passed ? "byte-identical" : "DIFFERENT") << " artifacts with --workers " << opts.workers << " and "
          << other.workers << " (" << bytes << " bytes)";
        r.detail = d.str();
        r.metrics = {{"workers", {opts.workers, other.workers}}, {"bytes", bytes}};
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        auto pos = out.criteria.begin();
        while (pos != out.criteria.end() && pos->id < 14) ++pos;
        out.criteria.insert(pos, std::move(r));
    }
    return out;
}

void print_table(std::ostream& os, const SuiteResult& result) {
    std::size_t passed = 0;
    for (const auto& c : result.criteria) {
        char head[96];
        std::snprintf(head, sizeof head, "[%s] %2d  %-46s", c.passed ? "PASS" : "FAIL", c.id, c.title.c_str());
        char tail[32];
        std::snprintf(tail, sizeof tail, "  (%.2fs)", c.seconds);
        os << head << "  " << c.detail << tail << "\n";
        if (c.passed) ++passed;
    }
    os << passed << "/" << result.criteria.size() << " criteria passed\n";
}

}  // namespace hopnet::selftest
