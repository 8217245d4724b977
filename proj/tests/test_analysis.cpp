#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "hopnet/analysis.hpp"
#include "hopnet/error.hpp"
#include "oracles.hpp"

using namespace hopnet;

namespace {

double passivity_oracle_1d(double v) { return v * std::tanh(v) - 2.0 * std::tanh(v) * std::tanh(v); }

HopfieldNetwork random_network(std::mt19937_64& rng, std::size_t n, double coupling) {
    std::uniform_real_distribution<double> u(-coupling, coupling), pos(0.5, 2.0);
    std::vector<CapacitorModel> caps;
    Vector R(n);
    Matrix T(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        caps.emplace_back(Activation::tanh, pos(rng), pos(rng));
        R[i] = pos(rng);
        for (std::size_t j = 0; j <= i; ++j) T(i, j) = T(j, i) = u(rng);
    }
    return HopfieldNetwork(std::move(caps), std::move(R), std::move(T));
}

EquilibriaOptions quick_equilibria(std::uint64_t seed) {
    EquilibriaOptions o;
    o.seed = seed;
    o.seeds = 20;
    return o;
}

}  // namespace

TEST_CASE("passivity residual hand cases", "[analysis][passivity]") {
    const auto net = HopfieldNetwork::uniform(Matrix{{2.0}}, 1.0);
    CHECK(passivity_residual(net, Vector{0.0}) == 0.0);
    for (double v : {-3.0, -0.4, 1.0, 2.5})
        CHECK(std::abs(passivity_residual(net, Vector{v}) - passivity_oracle_1d(v)) <= 1e-14);
    CHECK(passivity_residual(net, Vector{2.5}) > 0.0);
    CHECK(passivity_residual(net, Vector{1.0}) < 0.0);

    const double root = oracle::bisect([](double v) { return v - 2.0 * std::tanh(v); }, 1.0, 3.0);
    CHECK(std::abs(root - 1.915008048154537) <= 1e-12);  // mpmath
    CHECK(std::abs(passivity_residual(net, Vector{root})) <= 1e-14);

    // Negative semidefinite coupling keeps the residual positive.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const auto dissipative = HopfieldNetwork::uniform(Matrix{{-1.0, 0.5}, {0.5, -1.0}}, 1.3);
    for (int k = 0; k < 500; ++k) CHECK(passivity_residual(dissipative, Vector{u(rng), u(rng)}) > 0.0);
}

TEST_CASE("semi-passivity on the scalar example", "[analysis][passivity]") {
    const auto net = HopfieldNetwork::uniform(Matrix{{2.0}}, 1.0);
    PassivityOptions opts;
    opts.seed = 17;
    opts.samples = 20'000;

    const auto near = certify_semipassivity(net, 1.0, opts);
    CHECK(near.mode == PassivityReport::Mode::falsified);
    REQUIRE_FALSE(near.counterexamples.empty());
    for (const auto& w : near.counterexamples) {
        CHECK(w.residual < -1e-12);
        CHECK(std::abs(w.residual - passivity_oracle_1d(w.v[0])) <= 1e-14);
        CHECK(std::abs(w.v[0]) >= 1.0);
    }
    for (std::size_t k = 1; k < near.counterexamples.size(); ++k)
        CHECK(near.counterexamples[k - 1].residual <= near.counterexamples[k].residual);

    const auto far = certify_semipassivity(net, 2.5, opts);
    CHECK(far.mode == PassivityReport::Mode::certified_outside_radius);
    CHECK(far.counterexamples.empty());
    CHECK(far.analytic_certificate);
    CHECK(far.min_sampled_residual > 0.0);
}

TEST_CASE("uncoupled networks are certified at any radius", "[analysis][passivity]") {
    const auto net = HopfieldNetwork::uniform(Matrix(3, 3), 2.0);
    PassivityOptions opts;
    opts.samples = 2000;
    for (double r : {1e-3, 0.5, 10.0}) {
        const auto rep = certify_semipassivity(net, r, opts);
        CHECK(rep.mode == PassivityReport::Mode::certified_outside_radius);
    }
}

TEST_CASE("strong mutual coupling is not certified at small radius", "[analysis][passivity]") {
    const auto net = HopfieldNetwork::uniform(Matrix{{0.0, 3.0}, {3.0, 0.0}}, 1.0);

    // Dense scan of the boundary square and a few outer shells.
    bool oracle_negative = false;
    for (double shell : {0.5, 1.0, 1.5, 2.0})
        for (int k = 0; k < 2500; ++k) {
            const double s = -shell + 2.0 * shell * k / 2499.0;
            for (const Vector& v : {Vector{shell, s}, Vector{-shell, s}, Vector{s, shell}, Vector{s, -shell}}) {
                const double V0 = std::tanh(v[0]), V1 = std::tanh(v[1]);
                if (V0 * v[0] + V1 * v[1] - 6.0 * V0 * V1 < -1e-12) oracle_negative = true;
            }
        }
    REQUIRE(oracle_negative);

    PassivityOptions opts;
    opts.samples = 10'000;
    opts.seed = 5;
    const auto rep = certify_semipassivity(net, 0.5, opts);
    CHECK(rep.mode == PassivityReport::Mode::falsified);
    REQUIRE_FALSE(rep.counterexamples.empty());
    CHECK(rep.counterexamples.front().residual < -1e-12);
}

TEST_CASE("semi-passivity sampling is worker independent", "[analysis][passivity]") {
    std::mt19937_64 rng(8);
    const auto net = random_network(rng, 4, 1.5);
    PassivityOptions a;
    a.samples = 5000;
    a.seed = 99;
    auto b = a;
    b.workers = 3;
    const auto ra = certify_semipassivity(net, 0.7, a);
    const auto rb = certify_semipassivity(net, 0.7, b);
    CHECK(ra.mode == rb.mode);
    CHECK(ra.min_sampled_residual == rb.min_sampled_residual);
    REQUIRE(ra.counterexamples.size() == rb.counterexamples.size());
    for (std::size_t k = 0; k < ra.counterexamples.size(); ++k) CHECK(ra.counterexamples[k].v == rb.counterexamples[k].v);
}

TEST_CASE("pitchfork equilibria", "[analysis][equilibria]") {
    const auto net = HopfieldNetwork::uniform(Matrix{{1.0}}, 2.0);
    const double root = oracle::bisect([](double q) { return q - std::tanh(2.0 * q); }, 0.5, 1.5);

    EquilibriaOptions opts;
    opts.seed = 1;
    const auto set = find_equilibria(net, Vector{0.0}, opts);
    REQUIRE(set.equilibria.size() == 3);
    CHECK(set.unconverged_seeds.empty());
    CHECK(set.seeds == 50);

    const auto& lo = set.equilibria[0];
    const auto& mid = set.equilibria[1];
    const auto& hi = set.equilibria[2];
    CHECK(std::abs(lo.q[0] + root) <= 1e-6);
    CHECK(std::abs(hi.q[0] - root) <= 1e-6);
    CHECK(std::abs(mid.q[0]) <= 1e-9);
    CHECK(mid.kind != CriticalKind::local_min);
    CHECK(mid.kind == CriticalKind::local_max);
    for (const auto* e : {&lo, &hi}) {
        CHECK(e->kind == CriticalKind::local_min);
        REQUIRE(e->perturbation_returns.has_value());
        CHECK(*e->perturbation_returns);
        CHECK(e->basin_count > 0);
    }
    CHECK(lo.basin_count + hi.basin_count == set.seeds);
    for (const auto& e : set.equilibria) {
        CHECK(e.residual <= 1e-9);
        CHECK(e.gradient_residual <= 1e-8);
    }

    const auto [idx, dist] = set.nearest(Vector{0.9});
    CHECK(idx == 2);
    CHECK(std::abs(dist - (root - 0.9)) <= 1e-6);
}

TEST_CASE("uncoupled network has the origin as unique minimum", "[analysis][equilibria]") {
    const auto net = HopfieldNetwork::uniform(Matrix(3, 3), 1.5);
    const auto set = find_equilibria(net, Vector(3, 0.0), quick_equilibria(2));
    REQUIRE(set.equilibria.size() == 1);
    CHECK(set.equilibria[0].kind == CriticalKind::local_min);
    CHECK(norm_inf(set.equilibria[0].q) <= 1e-9);
}

TEST_CASE("critical-point correspondence on seeded networks", "[analysis][equilibria][property]") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int trial = 0; trial < 4; ++trial) {
        const auto net = random_network(rng, 2, 2.0);
        const Vector I{u(rng), u(rng)};
        const auto set = find_equilibria(net, I, quick_equilibria(trial));
        INFO("trial " << trial);
        REQUIRE_FALSE(set.equilibria.empty());
        for (const auto& e : set.equilibria) {
            CHECK(norm_inf(q_dynamics(net, e.q, I)) <= 1e-9);
            CHECK(norm_inf(potential_gradient(net, e.V, I)) <= 1e-8);
            CHECK(e.kind == classify_critical_point(net, e.V));
            if (e.kind == CriticalKind::local_min) CHECK(e.perturbation_returns.value_or(false));
        }
        for (std::size_t k = 1; k < set.equilibria.size(); ++k)
            CHECK(set.equilibria[k - 1].q < set.equilibria[k].q);

        // Minima of P found by plain descent are equilibria of the dynamics.
        for (const auto& V : potential_descent_minima(net, I)) {
            const auto q = charges(net, V);
            CHECK(norm_inf(q_dynamics(net, q, I)) <= 1e-8);
            const auto [idx, dist] = set.nearest(q);
            CHECK(dist <= 1e-6);
            CHECK(set.equilibria[idx].kind == CriticalKind::local_min);
        }
    }
}

TEST_CASE("Hessian classification", "[analysis][equilibria]") {
    const auto net = HopfieldNetwork::uniform(Matrix{{0.0, 2.0}, {2.0, 0.0}}, 1.0);
    // -T + I has eigenvalues -1 and 3 at the origin.
    const auto eig = potential_hessian_eigenvalues(net, Vector{0.0, 0.0});
    CHECK(std::abs(eig[0] + 1.0) <= 1e-12);
    CHECK(std::abs(eig[1] - 3.0) <= 1e-12);
    CHECK(classify_critical_point(net, Vector{0.0, 0.0}) == CriticalKind::saddle);

    const auto flat = HopfieldNetwork::uniform(Matrix{{1.0}}, 1.0);
    CHECK(classify_critical_point(flat, Vector{0.0}) == CriticalKind::degenerate);
    const auto hill = HopfieldNetwork::uniform(Matrix{{3.0}}, 1.0);
    CHECK(classify_critical_point(hill, Vector{0.0}) == CriticalKind::local_max);
}

TEST_CASE("refinement reaches the fixed point", "[analysis][equilibria]") {
    const auto net = HopfieldNetwork::uniform(Matrix{{1.0}}, 2.0);
    const auto q = refine_equilibrium(net, Vector{0.8}, Vector{0.0});
    REQUIRE(q.has_value());
    CHECK(std::abs((*q)[0] - 0.957504024077269) <= 1e-12);
}

TEST_CASE("cube invariance probe", "[analysis][invariance]") {
    InvarianceOptions opts;
    opts.trials = 8;
    opts.seed = 4;
    opts.equilibria = quick_equilibria(4);

    const auto decoupled = HopfieldNetwork::uniform(Matrix(2, 2), 1.0);
    for (double eps : {1e-3, 0.5, 0.9}) {
        const auto rep = cube_invariance_probe(decoupled, Vector{0.0, 0.0}, eps, opts);
        CHECK(rep.invariant);
        CHECK(rep.all_converged);
        CHECK(rep.all_match_equilibria);
        CHECK(rep.max_excursion <= 0.0);
    }

    std::mt19937_64 rng(12);
    const auto net = random_network(rng, 3, 1.5);
    const Vector I{0.1, -0.2, 0.05};
    const auto rep = cube_invariance_probe(net, I, 1e-3, opts);
    CHECK(rep.invariant);
    CHECK(rep.all_converged);
    CHECK(rep.all_match_equilibria);
    CHECK(rep.trials.size() == 8);
    std::size_t faces = 0;
    for (const auto& t : rep.trials) {
        if (t.on_face) ++faces;
        CHECK(t.equilibrium_distance <= 1e-5);
    }
    CHECK(faces == 4);

    // A large epsilon shrinks the cube below the saturated equilibria.
    const auto strong = HopfieldNetwork::uniform(Matrix{{3.0}}, 3.0);
    const auto loose = cube_invariance_probe(strong, Vector{0.0}, 0.9, opts);
    CHECK_FALSE(loose.invariant);
}

TEST_CASE("lambda sweep scaling", "[analysis][sweep]") {
    const auto base = HopfieldNetwork::uniform(Matrix{{0.0, 1.0}, {1.0, 0.0}}, 1.0);
    const Vector I{0.1, -0.05};
    const Vector gains{10.0, 20.0, 40.0, 80.0};
    LambdaSweepOptions opts;
    opts.grid_per_axis = 41;
    const auto rep = lambda_sweep(base, I, gains, opts);
    REQUIRE(rep.entries.size() == 4);
    CHECK(rep.monotone);
    CHECK(rep.ratios_in_band);
    CHECK(rep.argmin_agrees_at_largest);
    for (double r : rep.conjugate_ratios) CHECK(std::abs(r - 0.5) <= 1e-10);
    for (double r : rep.gap_ratios) {
        CHECK(r >= 0.4);
        CHECK(r <= 0.6);
    }

    // Closed-form sup of the conjugate term on the grid.
    const double V = 1.0 - 1e-3;
    const double unit = V * std::atanh(V) + 0.5 * std::log1p(-V * V);
    CHECK(std::abs(rep.entries[0].conjugate_sup - 2.0 * unit / 10.0) <= 1e-12);

    const auto big = lambda_sweep(base, I, Vector{1e4}, opts);
    CHECK(big.entries[0].gap_sup <= 1e-3 * 2.0 * unit);

    // The centre of an odd grid is V = 0.
    const auto centre = sweep_grid_point(2, 41, 1e-3, 20 * 41 + 20);
    CHECK(centre == Vector{0.0, 0.0});
}

TEST_CASE("lambda sweep is worker independent", "[analysis][sweep]") {
    const auto base = HopfieldNetwork::uniform(Matrix{{0.0, 0.5, -0.3}, {0.5, 0.0, 0.2}, {-0.3, 0.2, 0.0}}, 1.0);
    LambdaSweepOptions a;
    auto b = a;
    b.workers = 4;
    const Vector gains{5.0, 10.0};
    const auto ra = lambda_sweep(base, Vector{0.0, 0.1, 0.0}, gains, a);
    const auto rb = lambda_sweep(base, Vector{0.0, 0.1, 0.0}, gains, b);
    for (std::size_t k = 0; k < ra.entries.size(); ++k) {
        CHECK(ra.entries[k].conjugate_sup == rb.entries[k].conjugate_sup);
        CHECK(ra.entries[k].gap_sup == rb.entries[k].gap_sup);
        CHECK(ra.entries[k].argmin_index == rb.entries[k].argmin_index);
    }
}

TEST_CASE("Hebbian recall", "[analysis][memory]") {
    const std::vector<Pattern> one{{1, -1, 1, 1, -1, -1, 1, -1}};
    const auto net = hebbian_network(one, 4.0, 2.0);
    CHECK(net.coupling()(0, 0) == 0.0);
    CHECK(net.coupling()(0, 1) == -0.25);

    RecallOptions opts;
    opts.seed = 6;
    const auto rep = hebbian_recall(net, one, opts);
    CHECK(rep.corruption == 1);
    REQUIRE(rep.results.size() == 1);
    const auto& r = rep.results[0];
    CHECK(r.flipped.size() == 1);
    CHECK(r.converged);
    CHECK(r.sign_matches == 8);
    CHECK(r.final_kind == CriticalKind::local_min);
    CHECK(r.clean_converged);
    CHECK(r.clean_sign_matches == 8);
    CHECK(rep.saddle_endings == 0);

    // The corner lies in the basin of a local minimum found independently.
    EquilibriaOptions eo = quick_equilibria(1);
    const auto set = find_equilibria(net, Vector(8, 0.0), eo);
    const auto [idx, dist] = set.nearest(r.final_q);
    CHECK(dist <= 1e-5);
    CHECK(set.equilibria[idx].kind == CriticalKind::local_min);

    std::vector<Pattern> neg{one[0]};
    for (int& x : neg[0]) x = -x;
    CHECK(hebbian_network(neg, 4.0, 2.0).coupling() == net.coupling());

    const std::vector<Pattern> bad{{1, 0, 1}};
    CHECK_THROWS_AS(hebbian_network(bad, 1.0, 1.0), ValidationError);
    const std::vector<Pattern> ragged{{1, 1}, {1, -1, 1}};
    CHECK_THROWS_AS(hebbian_network(ragged, 1.0, 1.0), ValidationError);
}

TEST_CASE("energy balance over passive windows", "[analysis][passivity]") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        const auto net = random_network(rng, 3, 1.2);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const auto input = InputSignal::sinusoid({u(rng), u(rng), u(rng)}, {0.2, 0.1, 0.0}, 1.3);
        IntegratorConfig cfg;
        cfg.t_end = 15.0;
        cfg.output_interval = 1e-3;
        cfg.equilibrium_tol = 0.0;
        const auto traj = integrate_q(net, Vector{2.0 * u(rng), 2.0 * u(rng), 2.0 * u(rng)}, input, cfg);
        const auto rep = passivity_window_check(traj);
        INFO("trial " << trial);
        CHECK(rep.ok);
    }
}
