#include "hopnet/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hopnet/error.hpp"
#include "hopnet/kernels.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace hopnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

Vector symmetric_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return Vector(ev.data(), ev.data() + ev.size());
}

// d^2P/dV^2 written through the charges: the metric weight 1 / h'(q) is
// finite even where V itself rounds to +-1.
Matrix potential_hessian_at_charge(const HopfieldNetwork& net, std::span<const double> q) {
    const Vector slope = energy_hessian_diagonal(net, q);
    const std::size_t n = net.size();
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = -net.coupling()(i, j);
    for (std::size_t i = 0; i < n; ++i) h(i, i) += net.relaxation_rates()[i] / slope[i];
    return h;
}

CriticalKind classify_eigenvalues(std::span<const double> ev, double threshold) {
    bool pos = false, neg = false;
    for (double e : ev) {
        if (std::abs(e) <= threshold || !std::isfinite(e)) return CriticalKind::degenerate;
        (e > 0 ? pos : neg) = true;
    }
    if (pos && !neg) return CriticalKind::local_min;
    if (neg && !pos) return CriticalKind::local_max;
    return CriticalKind::saddle;
}

bool lexicographic_less(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(PassivityReport::Mode m) noexcept {
    switch (m) {
        case PassivityReport::Mode::certified_outside_radius: return "certified-outside-radius";
        case PassivityReport::Mode::falsified: return "falsified";
        case PassivityReport::Mode::inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::string_view to_string(CriticalKind k) noexcept {
    switch (k) {
        case CriticalKind::local_min: return "local-min";
        case CriticalKind::saddle: return "saddle";
        case CriticalKind::local_max: return "local-max";
        case CriticalKind::degenerate: return "degenerate";
    }
    return "unknown";
}

double passivity_residual(const HopfieldNetwork& net, std::span<const double> v) {
    if (v.size() != net.size()) throw DimensionError("passivity_residual: v has wrong size");
    Vector V(v.size());
    double dissipated = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        V[i] = net.capacitor(i).activation(v[i]);
        dissipated += V[i] * v[i] / net.resistances()[i];
    }
    return dissipated - kernels::quadratic_form(net.coupling().data(), V);
}

PassivityReport certify_semipassivity(const HopfieldNetwork& net, double radius,
                                      const PassivityOptions& opts) {
    if (!(std::isfinite(radius) && radius > 0.0))
        throw ValidationError("certify_semipassivity: radius must be > 0");
    if (!(opts.max_scale >= 1.0)) throw ValidationError("certify_semipassivity: max_scale < 1");
    const std::size_t n = net.size();

    PassivityReport rep;
    rep.radius = radius;
    rep.samples = opts.samples;

    // Some coordinate has |v_i| >= r and every term V_i v_i / R_i is >= 0,
    // so V^T R^{-1} v >= min_i g_i(r) r / R_i. Also V^T T V <= n lambda_max^+.
    double lhs = kInf;
    for (std::size_t i = 0; i < n; ++i)
        lhs = std::min(lhs, net.capacitor(i).activation(radius) * radius / net.resistances()[i]);
    const Vector ev = symmetric_eigenvalues(net.coupling());
    const double rhs = static_cast<double>(n) * std::max(ev.back(), 0.0);
    rep.certificate_lhs = lhs;
    rep.certificate_rhs = rhs;
    rep.analytic_certificate = lhs > rhs || (rhs == 0.0 && lhs > 0.0);

    const auto point = [&](std::size_t k) {
        detail::SplitMix64 rng(opts.seed, k);
        Vector v(n);
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        const std::size_t face = rng.below(n);
        v[face] = rng.coin() ? 1.0 : -1.0;
        // Every fourth sample sits exactly on the sphere.
        const double s = (k % 4 == 0) ? 1.0 : rng.uniform(1.0, opts.max_scale);
        for (auto& x : v) x *= radius * s;
        return v;
    };

    Vector residuals(opts.samples);
    detail::parallel_for(opts.samples, opts.workers,
                         [&](std::size_t k) { residuals[k] = passivity_residual(net, point(k)); });

    rep.min_sampled_residual = opts.samples ? kInf : 0.0;
    std::vector<std::size_t> negative;
    for (std::size_t k = 0; k < opts.samples; ++k) {
        rep.min_sampled_residual = std::min(rep.min_sampled_residual, residuals[k]);
        if (residuals[k] < -1e-12) negative.push_back(k);
    }
    std::stable_sort(negative.begin(), negative.end(),
                     [&](std::size_t a, std::size_t b) { return residuals[a] < residuals[b]; });
    if (negative.size() > opts.max_witnesses) negative.resize(opts.max_witnesses);
    for (std::size_t k : negative) {
        PassivityWitness w;
        w.v = point(k);
        w.V.resize(n);
        for (std::size_t i = 0; i < n; ++i) w.V[i] = net.capacitor(i).activation(w.v[i]);
        w.residual = residuals[k];
        rep.counterexamples.push_back(std::move(w));
    }

    if (!rep.counterexamples.empty())
        rep.mode = PassivityReport::Mode::falsified;
    else if (rep.analytic_certificate)
        rep.mode = PassivityReport::Mode::certified_outside_radius;
    else
        rep.mode = PassivityReport::Mode::inconclusive;
    return rep;
}

// ---------------------------------------------------------------------------

Vector potential_hessian_eigenvalues(const HopfieldNetwork& net, std::span<const double> V) {
    return symmetric_eigenvalues(potential_hessian(net, V));
}

CriticalKind classify_critical_point(const HopfieldNetwork& net, std::span<const double> V,
                                     double degeneracy_threshold) {
    const Vector ev = potential_hessian_eigenvalues(net, V);
    return classify_eigenvalues(ev, degeneracy_threshold);
}

std::pair<std::size_t, double> EquilibriumSet::nearest(std::span<const double> q) const {
    std::pair<std::size_t, double> best{0, kInf};
    for (std::size_t i = 0; i < equilibria.size(); ++i) {
        const double d = distance_inf(q, equilibria[i].q);
        if (d < best.second) best = {i, d};
    }
    return best;
}

std::optional<Vector> refine_equilibrium(const HopfieldNetwork& net, std::span<const double> q0,
                                         std::span<const double> current, double tolerance,
                                         std::size_t max_iterations) {
    const std::size_t n = net.size();
    Vector q(q0.begin(), q0.end());
    Vector f = q_dynamics(net, q, current);
    double norm = norm_inf(f);
    const auto l2 = [](const Vector& x) { return std::sqrt(kernels::dot(x, x)); };

    for (std::size_t it = 0; it < max_iterations && norm > tolerance; ++it) {
        // J = T diag(h'(q)) - diag(1 / (R C))
        const Vector slope = energy_hessian_diagonal(net, q);
        Eigen::MatrixXd J(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) J(i, j) = net.coupling()(i, j) * slope[j];
        for (std::size_t i = 0; i < n; ++i) J(i, i) -= net.relaxation_rates()[i];
        Eigen::VectorXd rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs(i) = -f[i];
        const Eigen::VectorXd step = J.fullPivLu().solve(rhs);
        if (!step.allFinite()) return std::nullopt;

        // Backtracking on ||f||_2.
        const double base = l2(f);
        double alpha = 1.0;
        bool improved = false;
        Vector trial(n), ft;
        for (int k = 0; k < 40; ++k, alpha *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = q[i] + alpha * step(i);
            ft = q_dynamics(net, trial, current);
            if (l2(ft) < base) {
                improved = true;
                break;
            }
        }
        if (!improved) break;
        q = trial;
        f = ft;
        norm = norm_inf(f);
    }
    if (norm <= tolerance) return q;
    return std::nullopt;
}

EquilibriumSet find_equilibria(const HopfieldNetwork& net, std::span<const double> current,
                               const EquilibriaOptions& opts) {
    const std::size_t n = net.size();
    if (current.size() != n) throw DimensionError("find_equilibria: current has wrong size");
    const std::size_t seeds = opts.seeds ? opts.seeds : std::max<std::size_t>(50, 10 * n);

    // Every equilibrium has |q_i| <= R_i C_i (sum_j |T_ij| + |I_i|).
    double spread = opts.spread;
    if (spread <= 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            double row = std::abs(current[i]);
            for (std::size_t j = 0; j < n; ++j) row += std::abs(net.coupling()(i, j));
            spread = std::max(spread, 1.1 * row / net.relaxation_rates()[i]);
        }
        spread = std::max(spread, 1.0);
    }

    const InputSignal input = InputSignal::constant(Vector(current.begin(), current.end()));
    const auto start = [&](std::size_t k) {
        detail::SplitMix64 rng(opts.seed, k);
        Vector q0(n);
        for (auto& x : q0) x = rng.uniform(-spread, spread);
        return q0;
    };

    struct SeedResult {
        std::optional<Vector> attractor;  // from integration
        std::optional<Vector> newton;     // from Newton on the seed itself
    };
    std::vector<SeedResult> results(seeds);
    detail::parallel_for(seeds, opts.workers, [&](std::size_t k) {
        const Vector q0 = start(k);
        const OdeSolution sol = [&] {
            OdeProblem p;
            p.dim = n;
            p.rhs = [&](double, std::span<const double> q, std::span<double> dq) {
                const Vector r = q_dynamics(net, q, current);
                std::copy(r.begin(), r.end(), dq.begin());
            };
            return solve_ode(p, q0, opts.integrator);
        }();
        if (sol.termination == Termination::converged) {
            const Vector& end = sol.states.back();
            auto refined = refine_equilibrium(net, end, current);
            results[k].attractor =
                refined && distance_inf(*refined, end) < opts.cluster_tolerance ? *refined : end;
        }
        results[k].newton = refine_equilibrium(net, q0, current);
    });

    EquilibriumSet set;
    set.seeds = seeds;
    set.cluster_tolerance = opts.cluster_tolerance;

    const auto add = [&](const Vector& q, bool from_attractor) {
        for (auto& e : set.equilibria) {
            if (distance_inf(e.q, q) <= opts.cluster_tolerance) {
                if (from_attractor) ++e.basin_count;
                return;
            }
        }
        Equilibrium e;
        e.q = q;
        e.basin_count = from_attractor ? 1 : 0;
        set.equilibria.push_back(std::move(e));
    };
    for (std::size_t k = 0; k < seeds; ++k) {
        if (results[k].attractor)
            add(*results[k].attractor, true);
        else
            set.unconverged_seeds.push_back(start(k));
    }
    for (std::size_t k = 0; k < seeds; ++k)
        if (results[k].newton) add(*results[k].newton, false);
    if (auto origin = refine_equilibrium(net, Vector(n, 0.0), current)) add(*origin, false);

    std::sort(set.equilibria.begin(), set.equilibria.end(),
              [](const Equilibrium& a, const Equilibrium& b) { return lexicographic_less(a.q, b.q); });

    for (auto& e : set.equilibria) {
        e.V = outputs(net, e.q);
        e.residual = norm_inf(q_dynamics(net, e.q, current));
        e.potential = dissipation_potential_at_charge(net, e.q, current);
        e.hessian_eigenvalues = symmetric_eigenvalues(potential_hessian_at_charge(net, e.q));
        e.kind = classify_eigenvalues(e.hessian_eigenvalues, opts.degeneracy_threshold);
        try {
            e.gradient_residual = norm_inf(potential_gradient(net, e.V, current));
        } catch (const DomainError&) {
            e.gradient_residual = kInf;
        }
    }

    if (opts.stability_check) {
        std::vector<std::size_t> minima;
        for (std::size_t i = 0; i < set.equilibria.size(); ++i)
            if (set.equilibria[i].kind == CriticalKind::local_min) minima.push_back(i);
        const std::size_t jobs = minima.size() * 2 * n;
        std::vector<char> returned(jobs, 0);
        detail::parallel_for(jobs, opts.workers, [&](std::size_t job) {
            const Equilibrium& e = set.equilibria[minima[job / (2 * n)]];
            const std::size_t axis = (job % (2 * n)) / 2;
            const double sign = (job % 2 == 0) ? 1.0 : -1.0;
            Vector q0 = e.q;
            q0[axis] += sign * opts.perturbation;
            const Trajectory tr = integrate_q(net, q0, input, opts.integrator);
            returned[job] = tr.converged() &&
                            distance_inf(tr.back().q, e.q) <= opts.return_tolerance;
        });
        for (std::size_t m = 0; m < minima.size(); ++m) {
            bool all = true;
            for (std::size_t j = 0; j < 2 * n; ++j) all = all && returned[m * 2 * n + j];
            set.equilibria[minima[m]].perturbation_returns = all;
        }
    }
    return set;
}

std::vector<Vector> potential_descent_minima(const HopfieldNetwork& net,
                                             std::span<const double> current,
                                             std::size_t grid_per_axis, double margin,
                                             double gradient_tolerance) {
    const std::size_t n = net.size();
    if (grid_per_axis < 2) throw ValidationError("potential_descent_minima: grid needs >= 2 points");
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= grid_per_axis;

    const auto inside = [&](const Vector& V) {
        for (std::size_t i = 0; i < n; ++i)
            if (!net.capacitor(i).in_range(V[i])) return false;
        return true;
    };

    std::vector<Vector> found;
    for (std::size_t k = 0; k < total; ++k) {
        Vector V = sweep_grid_point(n, grid_per_axis, margin, k);
        double P = dissipation_potential(net, V, current);
        Vector g = potential_gradient(net, V, current);
        double step = 0.1;
        for (int it = 0; it < 200000 && norm_inf(g) > 1e-7; ++it) {
            // Armijo backtracking along -g, staying in the open cube.
            const double gg = kernels::dot(g, g);
            Vector trial(n);
            bool moved = false;
            for (int b = 0; b < 60; ++b, step *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = V[i] - step * g[i];
                if (!inside(trial)) continue;
                const double Pt = dissipation_potential(net, trial, current);
                if (Pt <= P - 1e-4 * step * gg) {
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
            V = trial;
            P = dissipation_potential(net, V, current);
            g = potential_gradient(net, V, current);
            step *= 2.0;
        }
        // Newton polish on dP/dV = 0 with the analytic Hessian.
        for (int it = 0; it < 50 && norm_inf(g) > gradient_tolerance; ++it) {
            const Eigen::MatrixXd Hm = to_eigen(potential_hessian(net, V));
            Eigen::VectorXd rhs(n);
            for (std::size_t i = 0; i < n; ++i) rhs(i) = -g[i];
            const Eigen::VectorXd d = Hm.ldlt().solve(rhs);
            Vector trial(n);
            double alpha = 1.0;
            bool ok = false;
            for (int b = 0; b < 40; ++b, alpha *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = V[i] + alpha * d(i);
                if (inside(trial) && norm_inf(potential_gradient(net, trial, current)) < norm_inf(g)) {
                    ok = true;
                    break;
                }
            }
            if (!ok) break;
            V = trial;
            g = potential_gradient(net, V, current);
        }
        if (norm_inf(g) > gradient_tolerance) continue;
        const bool seen = std::any_of(found.begin(), found.end(),
                                      [&](const Vector& f) { return distance_inf(f, V) <= 1e-6; });
        if (!seen) found.push_back(V);
    }
    std::sort(found.begin(), found.end(), lexicographic_less);
    return found;
}

// ---------------------------------------------------------------------------

InvarianceReport cube_invariance_probe(const HopfieldNetwork& net, std::span<const double> current,
                                       double epsilon, const InvarianceOptions& opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ValidationError("cube_invariance_probe: epsilon must lie in (0, 1)");
    const std::size_t n = net.size();
    if (current.size() != n) throw DimensionError("cube_invariance_probe: current has wrong size");
    const double edge = 1.0 - epsilon;
    const InputSignal input = InputSignal::constant(Vector(current.begin(), current.end()));

    InvarianceReport rep;
    rep.epsilon = epsilon;
    rep.excursion_tolerance = opts.excursion_tolerance;
    rep.match_tolerance = opts.match_tolerance;

    EquilibriaOptions eq_opts = opts.equilibria;
    eq_opts.workers = opts.workers;
    if (eq_opts.seed == 0) eq_opts.seed = opts.seed ^ 0x5EEDull;
    rep.equilibria = find_equilibria(net, current, eq_opts);

    const std::size_t face_trials =
        static_cast<std::size_t>(std::llround(opts.face_fraction * static_cast<double>(opts.trials)));
    rep.trials.resize(opts.trials);
    detail::parallel_for(opts.trials, opts.workers, [&](std::size_t k) {
        detail::SplitMix64 rng(opts.seed, k);
        InvarianceTrial& trial = rep.trials[k];
        trial.on_face = k < face_trials;
        trial.V0.resize(n);
        for (auto& x : trial.V0) x = rng.uniform(-edge, edge);
        if (trial.on_face) {
            bool any = false;
            for (auto& x : trial.V0)
                if (rng.coin()) {
                    x = rng.coin() ? edge : -edge;
                    any = true;
                }
            if (!any) trial.V0[rng.below(n)] = rng.coin() ? edge : -edge;
        }
        const Vector q0 = charges(net, trial.V0);
        const Trajectory tr = integrate_q(net, q0, input, opts.integrator);
        double excursion = -kInf;
        for (const auto& s : tr.samples)
            for (double v : s.V) excursion = std::max(excursion, std::abs(v) - edge);
        trial.max_excursion = excursion;
        trial.converged = tr.converged();
        trial.final_q = tr.back().q;
        const auto [idx, dist] = rep.equilibria.nearest(trial.final_q);
        trial.nearest_equilibrium = idx;
        trial.equilibrium_distance = dist;
    });

    rep.max_excursion = -kInf;
    for (const auto& t : rep.trials) {
        rep.max_excursion = std::max(rep.max_excursion, t.max_excursion);
        rep.all_converged = rep.all_converged && t.converged;
        rep.all_match_equilibria =
            rep.all_match_equilibria && t.equilibrium_distance <= opts.match_tolerance;
    }
    rep.invariant = rep.max_excursion <= opts.excursion_tolerance;
    return rep;
}

// ---------------------------------------------------------------------------

Vector sweep_grid_point(std::size_t n, std::size_t grid_per_axis, double epsilon, std::size_t k) {
    const double edge = 1.0 - epsilon;
    Vector V(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = k % grid_per_axis;
        k /= grid_per_axis;
        // Symmetric placement keeps the midpoint exactly at zero.
        const double u = static_cast<double>(2 * d) / static_cast<double>(grid_per_axis - 1) - 1.0;
        V[i] = edge * u;
    }
    return V;
}

LambdaSweepReport lambda_sweep(const HopfieldNetwork& base, std::span<const double> current,
                               std::span<const double> gains, const LambdaSweepOptions& opts) {
    const std::size_t n = base.size();
    if (current.size() != n) throw DimensionError("lambda_sweep: current has wrong size");
    if (gains.empty()) throw ValidationError("lambda_sweep: no gains given");
    for (std::size_t k = 0; k < gains.size(); ++k) {
        if (!(gains[k] > 0.0)) throw ValidationError("lambda_sweep: gains must be > 0");
        if (k > 0 && !(gains[k] > gains[k - 1]))
            throw ValidationError("lambda_sweep: gains must be strictly increasing");
    }
    if (!(opts.epsilon > 0.0 && opts.epsilon < 1.0))
        throw ValidationError("lambda_sweep: epsilon must lie in (0, 1)");

    std::size_t m = opts.grid_per_axis;
    if (m == 0) {
        m = static_cast<std::size_t>(std::floor(std::pow(2e5, 1.0 / static_cast<double>(n))));
        m = std::clamp<std::size_t>(m, 3, 201);
    }
    if (m % 2 == 0) --m;  // odd, so V = 0 is a grid point
    if (m < 3) m = 3;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= m;

    LambdaSweepReport rep;
    rep.epsilon = opts.epsilon;
    rep.grid_per_axis = m;

    const Matrix& T = base.coupling();
    const auto limit = [&](const Vector& V) {
        return -0.5 * kernels::quadratic_form(T.data(), V) - kernels::dot(V, current);
    };

    // Fixed-size chunks reduced in order keep the result independent of
    // the worker count.
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (total + kChunk - 1) / kChunk;

    {
        std::vector<std::pair<double, std::size_t>> best(chunks, {kInf, 0});
        detail::parallel_for(chunks, opts.workers, [&](std::size_t c) {
            for (std::size_t k = c * kChunk; k < std::min(total, (c + 1) * kChunk); ++k) {
                const double L = limit(sweep_grid_point(n, m, opts.epsilon, k));
                if (L < best[c].first) best[c] = {L, k};
            }
        });
        double v = kInf;
        for (const auto& [val, k] : best)
            if (val < v) {
                v = val;
                rep.limit_argmin_index = k;
            }
        rep.limit_argmin = sweep_grid_point(n, m, opts.epsilon, rep.limit_argmin_index);
    }

    for (double gain : gains) {
        const HopfieldNetwork net = base.with_gain(gain);
        struct Partial {
            double conj = 0.0, gap = 0.0, pmin = kInf;
            std::size_t arg = 0;
        };
        std::vector<Partial> parts(chunks);
        detail::parallel_for(chunks, opts.workers, [&](std::size_t c) {
            Partial& p = parts[c];
            for (std::size_t k = c * kChunk; k < std::min(total, (c + 1) * kChunk); ++k) {
                const Vector V = sweep_grid_point(n, m, opts.epsilon, k);
                double conj = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    conj += net.relaxation_rates()[i] * net.capacitor(i).conjugate_energy(V[i]);
                const double P = dissipation_potential(net, V, current);
                p.conj = std::max(p.conj, std::abs(conj));
                p.gap = std::max(p.gap, std::abs(P - limit(V)));
                if (P < p.pmin) {
                    p.pmin = P;
                    p.arg = k;
                }
            }
        });
        LambdaSweepEntry e;
        e.gain = gain;
        double pmin = kInf;
        for (const auto& p : parts) {
            e.conjugate_sup = std::max(e.conjugate_sup, p.conj);
            e.gap_sup = std::max(e.gap_sup, p.gap);
            if (p.pmin < pmin) {
                pmin = p.pmin;
                e.argmin_index = p.arg;
            }
        }
        e.argmin_matches_limit = e.argmin_index == rep.limit_argmin_index;
        rep.entries.push_back(e);
    }

    for (std::size_t k = 1; k < rep.entries.size(); ++k) {
        const auto& a = rep.entries[k - 1];
        const auto& b = rep.entries[k];
        const double cr = b.conjugate_sup / a.conjugate_sup;
        const double gr = b.gap_sup / a.gap_sup;
        const double g = b.gain / a.gain;
        rep.conjugate_ratios.push_back(cr);
        rep.gap_ratios.push_back(gr);
        rep.scaled_conjugate_ratios.push_back(cr * g);
        rep.monotone = rep.monotone && b.conjugate_sup < a.conjugate_sup && b.gap_sup < a.gap_sup;
        const bool doubling = std::abs(g - 2.0) <= 1e-12;
        const bool in_band = doubling ? (cr >= 0.4 && cr <= 0.6 && gr >= 0.4 && gr <= 0.6)
                                      : (cr * g >= 0.8 && cr * g <= 1.2 && gr * g >= 0.8 && gr * g <= 1.2);
        rep.ratios_in_band = rep.ratios_in_band && in_band;
    }
    const std::size_t count = rep.entries.size();
    for (std::size_t k = count >= 2 ? count - 2 : 0; k < count; ++k)
        rep.argmin_agrees_at_largest = rep.argmin_agrees_at_largest && rep.entries[k].argmin_matches_limit;
    return rep;
}

// ---------------------------------------------------------------------------

HopfieldNetwork hebbian_network(std::span<const Pattern> patterns, double gain, double scale) {
    if (patterns.empty()) throw ValidationError("hebbian_network: no patterns");
    const std::size_t n = patterns.front().size();
    if (n == 0) throw ValidationError("hebbian_network: empty pattern");
    for (const auto& p : patterns) {
        if (p.size() != n) throw ValidationError("hebbian_network: patterns differ in length");
        for (int x : p)
            if (x != 1 && x != -1) throw ValidationError("hebbian_network: entries must be +-1");
    }
    if (!(std::isfinite(scale))) throw ValidationError("hebbian_network: scale must be finite");
    Matrix T(n, n);
    const double w = scale / static_cast<double>(n);
    for (const auto& p : patterns)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) T(i, j) += w * p[i] * p[j];
    return HopfieldNetwork::uniform(std::move(T), gain);
}

RecallReport hebbian_recall(const HopfieldNetwork& net, std::span<const Pattern> patterns,
                            const RecallOptions& opts) {
    const std::size_t n = net.size();
    RecallReport rep;
    rep.n = n;
    rep.corruption = opts.corruption.value_or(n / 8);
    if (rep.corruption > n) throw ValidationError("hebbian_recall: corruption exceeds n");
    if (!(opts.start_amplitude > 0.0 && opts.start_amplitude < 1.0))
        throw ValidationError("hebbian_recall: start_amplitude must lie in (0, 1)");
    const InputSignal input = InputSignal::zero(n);

    const auto run = [&](const Pattern& start, const Pattern& target, std::size_t& matches,
                         CriticalKind& kind, Vector* final_q) {
        Vector V0(n);
        for (std::size_t i = 0; i < n; ++i) V0[i] = opts.start_amplitude * start[i];
        const Trajectory tr = integrate_q(net, charges(net, V0), input, opts.integrator);
        const auto& end = tr.back();
        matches = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((end.V[i] > 0.0 ? 1 : -1) == target[i] && end.V[i] != 0.0) ++matches;
        kind = classify_eigenvalues(symmetric_eigenvalues(potential_hessian_at_charge(net, end.q)),
                                    1e-8);
        if (final_q) *final_q = end.q;
        return tr.converged();
    };

    for (std::size_t p = 0; p < patterns.size(); ++p) {
        const Pattern& xi = patterns[p];
        if (xi.size() != n) throw DimensionError("hebbian_recall: pattern has wrong length");
        RecallResult r;
        r.pattern = xi;

        // Positions flipped without replacement (partial Fisher-Yates).
        detail::SplitMix64 rng(opts.seed, p);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t k = 0; k < rep.corruption; ++k)
            std::swap(idx[k], idx[k + rng.below(n - k)]);
        r.flipped.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(rep.corruption));
        std::sort(r.flipped.begin(), r.flipped.end());

        Pattern corrupted = xi;
        for (std::size_t k : r.flipped) corrupted[k] = -corrupted[k];

        r.converged = run(corrupted, xi, r.sign_matches, r.final_kind, &r.final_q);
        r.clean_converged = run(xi, xi, r.clean_sign_matches, r.clean_kind, nullptr);
        if (r.final_kind != CriticalKind::local_min) ++rep.saddle_endings;
        rep.results.push_back(std::move(r));
    }
    return rep;
}

// ---------------------------------------------------------------------------

PassivityWindowReport passivity_window_check(const Trajectory& traj, double slack) {
    PassivityWindowReport rep;
    rep.worst_excess = -kInf;
    const auto& s = traj.samples;
    std::size_t k = 0;
    while (k < s.size()) {
        if (s[k].rates.passivity_residual < 0.0) {
            ++k;
            continue;
        }
        ++rep.windows;
        const std::size_t begin = k;
        // D_j = H_j - H_begin - int I^T V; passivity makes D nonincreasing.
        double integral = 0.0;
        double running_max = 0.0;
        for (++k; k < s.size() && s[k].rates.passivity_residual >= 0.0; ++k) {
            integral += 0.5 * (s[k].t - s[k - 1].t) * (s[k].input_power + s[k - 1].input_power);
            const double D = s[k].H - s[begin].H - integral;
            rep.worst_excess = std::max(rep.worst_excess, D - running_max);
            running_max = std::max(running_max, D);
        }
    }
    if (rep.worst_excess == -kInf) rep.worst_excess = 0.0;
    rep.ok = rep.worst_excess <= slack;
    return rep;
}

}  // namespace hopnet
