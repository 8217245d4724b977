#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "hopnet/error.hpp"
#include "hopnet/integrator.hpp"
#include "oracles.hpp"

using namespace hopnet;

namespace {

const Matrix kSwap{{0.0, 1.0}, {1.0, 0.0}};

IntegratorConfig rk4(double dt, double t_end) {
    IntegratorConfig cfg;
    cfg.method = Method::rk4;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.equilibrium_tol = 0.0;
    return cfg;
}

double decay_error(double dt) {
    const auto net = HopfieldNetwork::uniform(Matrix(1, 1), 1.0);
    const auto traj = integrate_q(net, Vector{1.0}, InputSignal::zero(1), rk4(dt, 1.0));
    return std::abs(traj.back().q[0] - std::exp(-1.0));
}

HopfieldNetwork random_network(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.5, 2.0);
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

Vector random_vector(std::mt19937_64& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vector v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("linear decay matches the exponential", "[integrator]") {
    CHECK(decay_error(1e-3) <= 1e-6);

    const auto net = HopfieldNetwork::uniform(Matrix(1, 1), 1.0);
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.equilibrium_tol = 0.0;
    const auto traj = integrate_q(net, Vector{1.0}, InputSignal::zero(1), cfg);
    CHECK(traj.termination == Termination::horizon);
    CHECK(traj.back().t == 1.0);
    CHECK(std::abs(traj.back().q[0] - std::exp(-1.0)) <= 1e-8);
}

TEST_CASE("RK4 is fourth order on the decay problem", "[integrator]") {
    const double ratio = decay_error(0.1) / decay_error(0.05);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("first-order lag converges to the input", "[integrator]") {
    const auto net = HopfieldNetwork::uniform(Matrix(1, 1), 1.0);
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-14;
    cfg.t_end = 100.0;
    const auto traj = integrate_q(net, Vector{0.0}, InputSignal::constant({0.5}), cfg);
    REQUIRE(traj.converged());
    CHECK(std::abs(traj.back().q[0] - 0.5) <= 1e-6);
}

TEST_CASE("symmetric pair settles on the fixed point of q = tanh(2q)", "[integrator]") {
    const double root = oracle::bisect([](double q) { return q - std::tanh(2.0 * q); }, 0.5, 1.5);
    CHECK(std::abs(root - 0.957504024077269) <= 1e-12);  // mpmath

    const auto net = HopfieldNetwork::uniform(kSwap, 2.0);
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-14;
    cfg.t_end = 200.0;
    const auto traj = integrate_q(net, Vector{0.1, 0.1}, InputSignal::zero(2), cfg);
    REQUIRE(traj.converged());
    CHECK(std::abs(traj.back().q[0] - root) <= 1e-6);
    CHECK(std::abs(traj.back().q[1] - root) <= 1e-6);
    CHECK(traj.back().V[0] == traj.back().V[1]);
}

TEST_CASE("V-form decay matches the transformed solution", "[integrator]") {
    const auto net = HopfieldNetwork::uniform(Matrix(1, 1), 1.0);
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.equilibrium_tol = 0.0;
    const auto traj = integrate_V(net, Vector{std::tanh(1.0)}, InputSignal::zero(1), cfg);
    CHECK(std::abs(traj.back().V[0] - std::tanh(std::exp(-1.0))) <= 1e-6);
    CHECK(std::abs(traj.back().q[0] - std::exp(-1.0)) <= 1e-6);

    IntegratorConfig still;
    still.t_end = 5.0;
    still.equilibrium_tol = 0.0;
    const auto rest = integrate_V(HopfieldNetwork::uniform(kSwap, 2.0), Vector{0.0, 0.0}, InputSignal::zero(2), still);
    for (const auto& s : rest.samples) {
        CHECK(s.V[0] == 0.0);
        CHECK(s.V[1] == 0.0);
    }
}

TEST_CASE("q-form and V-form agree on a common grid", "[integrator]") {
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.output_interval = 0.1;
    cfg.equilibrium_tol = 0.0;

    const auto check = [&](const HopfieldNetwork& net, const Vector& q0, const InputSignal& input) {
        const auto a = integrate_q(net, q0, input, cfg);
        const auto b = integrate_V(net, outputs(net, q0), input, cfg);
        REQUIRE(a.samples.size() == b.samples.size());
        REQUIRE(a.samples.size() == 101);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            REQUIRE(std::abs(a.samples[k].t - b.samples[k].t) <= 1e-12);
            worst = std::max(worst, distance_inf(a.samples[k].q, b.samples[k].q));
        }
        CHECK(worst <= 1e-5);
    };

    check(HopfieldNetwork::uniform(kSwap, 2.0), Vector{0.1, 0.1}, InputSignal::zero(2));

    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const auto net = random_network(rng, 3);
        check(net, random_vector(rng, 3, 1.0), InputSignal::constant(random_vector(rng, 3, 0.3)));
    }
}

TEST_CASE("output grid and sample invariants", "[integrator]") {
    const auto net = HopfieldNetwork::uniform(kSwap, 1.5);
    IntegratorConfig cfg;
    cfg.t0 = 2.0;
    cfg.t_end = 4.5;
    cfg.output_interval = 0.25;
    cfg.equilibrium_tol = 0.0;
    const auto traj = integrate_q(net, Vector{0.3, -0.8}, InputSignal::zero(2), cfg);
    REQUIRE(traj.samples.size() == 11);
    CHECK(traj.samples.front().t == 2.0);
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        CHECK(std::abs(traj.samples[k].t - (2.0 + 0.25 * k)) <= 1e-12);
        if (k > 0) CHECK(traj.samples[k].t > traj.samples[k - 1].t);
        for (double V : traj.samples[k].V) CHECK(std::abs(V) < 1.0);
    }

    cfg.output_interval = 0.0;
    const auto dense = integrate_q(net, Vector{0.3, -0.8}, InputSignal::zero(2), cfg);
    CHECK(dense.samples.size() == dense.steps + 1);
}

TEST_CASE("P is monotone along constant-input runs", "[integrator][property]") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + trial % 4;
        const auto net = random_network(rng, n);
        const auto input = InputSignal::constant(random_vector(rng, n, 0.5));
        IntegratorConfig cfg;
        cfg.t_end = 30.0;
        const auto traj = integrate_q(net, random_vector(rng, n, 2.0), input, cfg);
        const auto rep = monotonicity_report(traj, input);
        INFO("trial " << trial);
        CHECK(rep.discrete_checked);
        CHECK(rep.worst_discrete_increase <= 1e-9);
        CHECK(rep.ok());
    }
}

TEST_CASE("sinusoidal input respects the rate inequality", "[integrator]") {
    const auto net = HopfieldNetwork::uniform(kSwap, 2.0);
    const auto input = InputSignal::sinusoid({0.0, 0.0}, {0.1, 0.0}, 1.0);
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    cfg.equilibrium_tol = 0.0;
    const auto traj = integrate_q(net, Vector{0.4, -0.2}, input, cfg);
    const auto rep = monotonicity_report(traj, input);
    CHECK_FALSE(rep.discrete_checked);
    CHECK(rep.rate_ok);
    CHECK(rep.worst_rate_excess <= 1e-8);
    CHECK(rep.passivity_ok);
    for (const auto& s : traj.samples)
        CHECK(s.rates.potential_rate <= -s.input_rate_power + 1e-8);
}

TEST_CASE("equilibrium start gives a clean report", "[integrator]") {
    const auto net = HopfieldNetwork::uniform(kSwap, 2.0);
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    const auto traj = integrate_q(net, Vector{0.0, 0.0}, InputSignal::zero(2), cfg);
    CHECK(traj.converged());
    CHECK(traj.samples.size() == 1);
    const auto rep = monotonicity_report(traj, InputSignal::zero(2));
    CHECK(rep.ok());
    CHECK(rep.worst_rate_excess == 0.0);
}

TEST_CASE("monotonicity report flags a manufactured increase", "[integrator]") {
    const auto net = HopfieldNetwork::uniform(Matrix(1, 1), 1.0);
    auto traj = integrate_q(net, Vector{1.0}, InputSignal::zero(1), rk4(0.1, 1.0));
    traj.samples[5].P += 1.0;
    const auto rep = monotonicity_report(traj, InputSignal::zero(1));
    CHECK_FALSE(rep.discrete_ok);
    CHECK(std::abs(rep.worst_discrete_time - traj.samples[5].t) <= 1e-12);
}

TEST_CASE("integration failures are reported", "[integrator][errors]") {
    const auto net = HopfieldNetwork::uniform(Matrix(1, 1), 1.0);

    auto cfg = rk4(1e-3, 10.0);
    cfg.max_steps = 10;
    const auto cut = integrate_q(net, Vector{1.0}, InputSignal::zero(1), cfg);
    CHECK(cut.termination == Termination::max_steps);
    CHECK(cut.steps == 10);

    OdeProblem poisoned;
    poisoned.dim = 1;
    poisoned.rhs = [](double t, std::span<const double>, std::span<double> d) {
        d[0] = t > 0.5 ? std::nan("") : 1.0;
    };
    try {
        solve_ode(poisoned, Vector{0.0}, rk4(0.1, 1.0));
        FAIL("expected divergence");
    } catch (const IntegrationError& e) {
        CHECK(e.kind() == IntegrationError::Kind::diverged);
        CHECK(e.time() <= 0.5 + 1e-12);
    }

    // A steep gain drives V to within rounding of 1; the V-form reports it
    // instead of integrating a frozen state.
    const auto stiff = HopfieldNetwork::uniform(Matrix{{2.0}}, 20.0);
    IntegratorConfig vcfg;
    vcfg.t_end = 50.0;
    try {
        integrate_V(stiff, Vector{0.5}, InputSignal::zero(1), vcfg);
        FAIL("expected boundary proximity");
    } catch (const IntegrationError& e) {
        CHECK(e.kind() == IntegrationError::Kind::boundary);
    }

    CHECK_THROWS_AS(integrate_V(net, Vector{1.0}, InputSignal::zero(1), vcfg), DomainError);
    CHECK_THROWS_AS(integrate_q(net, Vector{1.0, 2.0}, InputSignal::zero(1), vcfg), DimensionError);
    CHECK_THROWS_AS(integrate_q(net, Vector{1.0}, InputSignal::zero(2), vcfg), DimensionError);

    IntegratorConfig bad;
    bad.rtol = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = rk4(-1.0, 1.0);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = IntegratorConfig{};
    bad.t_end = bad.t0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("inputs carry exact derivatives", "[integrator]") {
    const auto s = InputSignal::sinusoid({1.0}, {0.5}, 2.0, 0.3);
    for (double t : {0.0, 0.7, 3.1}) {
        CHECK(std::abs(s.current(t)[0] - (1.0 + 0.5 * std::sin(2.0 * t + 0.3))) <= 1e-15);
        const double fd = oracle::central_difference([&](double x) { return s.current(x)[0]; }, t, 1e-5);
        CHECK(std::abs(s.rate(t)[0] - fd) <= 1e-9);
    }
    CHECK(InputSignal::zero(3).is_constant());
    CHECK_FALSE(s.is_constant());
    CHECK(InputSignal::constant({1.0, 2.0}).rate(5.0) == Vector{0.0, 0.0});
}
