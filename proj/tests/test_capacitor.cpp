#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hopnet/capacitor.hpp"
#include "hopnet/error.hpp"
#include "oracles.hpp"

using namespace hopnet;

namespace {

const Activation kFamilies[] = {Activation::tanh, Activation::algebraic};

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> g;
    for (int k = 0; k < points; ++k) g.push_back(lo + (hi - lo) * k / (points - 1));
    return g;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST_CASE("tanh activation values", "[capacitor]") {
    const CapacitorModel unit(Activation::tanh, 1.0, 1.0);
    CHECK(unit.activation(0.0) == 0.0);

    const CapacitorModel steep(Activation::tanh, 2.0, 1.0);
    const double sat = steep.activation(10.0);
    CHECK(sat > 0.999999);
    CHECK(sat <= 1.0);

    const long double ref = oracle::tanh_continued_fraction(0.5L);
    CHECK(std::abs(unit.activation(0.5) - static_cast<double>(ref)) <= 1e-12);
}

TEST_CASE("charge energy is the normalized antiderivative of h", "[capacitor]") {
    const CapacitorModel unit(Activation::tanh, 1.0, 1.0);
    CHECK(unit.charge_energy(0.0) == 0.0);

    const double quad = oracle::integrate([&](double s) { return unit.output_at_charge(s); }, 0.0, 2.0);
    CHECK(std::abs(unit.charge_energy(2.0) - quad) <= 1e-8);
    // mpmath: ln cosh 2 = 1.32500274735786443...
    CHECK(std::abs(unit.charge_energy(2.0) - 1.3250027473578644) <= 1e-14);

    for (double q : {0.1, 1.0, 5.0}) CHECK(unit.charge_energy(q) == unit.charge_energy(-q));

    for (auto kind : kFamilies) {
        const CapacitorModel m(kind, 1.7, 0.6);
        for (double q : {-3.0, -0.4, 0.9, 2.5}) {
            const double ref = oracle::integrate([&](double s) { return m.output_at_charge(s); }, 0.0, q);
            CHECK(std::abs(m.charge_energy(q) - ref) <= 1e-9);
        }
    }
}

TEST_CASE("charge energy stays finite for large charges", "[capacitor]") {
    const CapacitorModel m(Activation::tanh, 3.0, 0.5);
    for (double q : {10.0, 1e3, 1e8, -1e8}) {
        const double x = 3.0 * q / 0.5;
        const double H = m.charge_energy(q);
        REQUIRE(std::isfinite(H));
        CHECK(rel_err(H, (0.5 / 3.0) * (std::abs(x) - std::log(2.0))) <= 1e-14);
        CHECK(std::isfinite(m.conjugate_energy_at_charge(q)));
        CHECK(m.output_slope_at_charge(q) >= 0.0);
    }
    // Both branches of ln cosh agree at the switch.
    CHECK(rel_err(m.charge_energy(20.0 * 0.5 / 3.0 * (1 - 1e-12)),
                  m.charge_energy(20.0 * 0.5 / 3.0 * (1 + 1e-12))) <= 1e-11);
}

TEST_CASE("closed-form conjugate matches the numeric supremum", "[capacitor]") {
    const CapacitorModel unit(Activation::tanh, 1.0, 1.0);
    CHECK(unit.conjugate_energy(0.0) == 0.0);

    // Golden-section sup first, then the closed form.
    const double sup = unit.numeric_conjugate_energy(0.5);
    CHECK(std::abs(sup - 0.13081203594113696) <= 1e-8);  // mpmath reference
    CHECK(std::abs(unit.conjugate_energy(0.5) - sup) <= 1e-8);

    for (auto kind : kFamilies)
        for (double lam : {0.5, 1.0, 2.0})
            for (double cap : {0.5, 1.0, 2.0}) {
                const CapacitorModel m(kind, lam, cap);
                for (double V : grid(-0.999, 0.999, 41)) {
                    INFO("kind " << to_string(kind) << " lambda " << lam << " C " << cap << " V " << V);
                    CHECK(std::abs(m.conjugate_energy(V) - m.numeric_conjugate_energy(V)) <= 1e-8);
                }
            }
}

TEST_CASE("Fenchel equality holds on the graph", "[capacitor]") {
    for (auto kind : kFamilies) {
        const CapacitorModel m(kind, 1.0, 1.0);
        const double q = 1.3;
        const double V = m.output_at_charge(q);
        CHECK(std::abs(m.conjugate_energy(V) + m.charge_energy(q) - q * V) <= 1e-10);
        CHECK(std::abs(m.conjugate_energy_at_charge(q) - m.conjugate_energy(V)) <= 1e-12);
    }
}

TEST_CASE("inverse charge inverts h and is the slope of the conjugate", "[capacitor]") {
    const CapacitorModel unit(Activation::tanh, 1.0, 1.0);
    CHECK(unit.inverse_charge(0.0) == 0.0);
    for (double q : {-3.0, -0.2, 0.7, 4.0})
        CHECK(std::abs(unit.inverse_charge(unit.output_at_charge(q)) - q) <= 1e-10);

    const double fd = oracle::central_difference([&](double V) { return unit.conjugate_energy(V); }, 0.5, 1e-5);
    CHECK(std::abs(unit.inverse_charge(0.5) - fd) <= 1e-6);
}

TEST_CASE("metric weight is the inverse energy curvature", "[capacitor]") {
    const CapacitorModel unit(Activation::tanh, 1.0, 1.0);
    CHECK(unit.metric_weight(0.0) == 1.0);
    for (double V : {-0.9, 0.9, 0.3})
        CHECK(std::abs(unit.metric_weight(V) * unit.output_slope_at_charge(unit.inverse_charge(V)) - 1.0) <= 1e-10);

    const CapacitorModel m(Activation::tanh, 2.0, 0.5);
    const double fd = oracle::second_difference([&](double V) { return m.conjugate_energy(V); }, 0.6, 1e-4);
    CHECK(std::abs(m.metric_weight(0.6) - fd) <= 1e-5);
}

TEST_CASE("capacitor invariants over a grid", "[capacitor][property]") {
    for (auto kind : kFamilies)
        for (double lam : {0.5, 1.0, 3.0})
            for (double cap : {0.5, 2.0}) {
                const CapacitorModel m(kind, lam, cap);
                INFO("kind " << to_string(kind) << " lambda " << lam << " C " << cap);

                // Strictly increasing g and h, odd g, range (-1, 1). The grid
                // stops where tanh rounds to +-1 in double.
                const auto vs = grid(-15.0 / lam, 15.0 / lam, 121);
                for (std::size_t k = 0; k < vs.size(); ++k) {
                    CHECK(m.activation_slope(vs[k]) > 0.0);
                    CHECK(std::abs(m.activation(vs[k])) < 1.0);
                    CHECK(m.activation(-vs[k]) == -m.activation(vs[k]));
                    if (k > 0) CHECK(m.output_at_charge(cap * vs[k - 1]) < m.output_at_charge(cap * vs[k]));
                }

                // Convexity: positive second differences of H.
                const double h = 0.05 * cap / lam;
                for (double q : grid(-8.0 * cap / lam, 8.0 * cap / lam, 81))
                    CHECK(m.charge_energy(q + h) - 2.0 * m.charge_energy(q) + m.charge_energy(q - h) > 0.0);

                // Derivative chain against finite differences.
                for (double V : grid(-0.95, 0.95, 39)) {
                    const double dconj = oracle::central_difference(
                        [&](double x) { return m.conjugate_energy(x); }, V, 1e-6);
                    CHECK(std::abs(dconj - m.inverse_charge(V)) <= 1e-5 * std::max(1.0, std::abs(dconj)));
                    const double dinv = oracle::central_difference(
                        [&](double x) { return m.inverse_charge(x); }, V, 1e-6);
                    CHECK(std::abs(dinv - m.metric_weight(V)) <= 1e-5 * std::max(1.0, std::abs(dinv)));
                }

                // Nonnegative, finite up to 1 - 1e-6, increasing in |V|.
                double prev = -1.0;
                for (double V : grid(0.0, 1.0 - 1e-6, 200)) {
                    const double c = m.conjugate_energy(V);
                    CHECK(std::isfinite(c));
                    CHECK(c >= 0.0);
                    CHECK(c > prev);
                    CHECK(m.conjugate_energy(-V) == c);
                    prev = c;
                }
            }
}

TEST_CASE("out-of-range outputs are domain errors", "[capacitor][errors]") {
    for (auto kind : kFamilies) {
        const CapacitorModel m(kind, 1.0, 1.0);
        for (double V : {1.0, -1.0, 1.5, -7.0, std::nan("")}) {
            CHECK_THROWS_AS(m.conjugate_energy(V), DomainError);
            CHECK_THROWS_AS(m.inverse_charge(V), DomainError);
            CHECK_THROWS_AS(m.metric_weight(V), DomainError);
            CHECK_THROWS_AS(m.numeric_conjugate_energy(V), DomainError);
        }
    }
}

TEST_CASE("model parameters are validated", "[capacitor][errors]") {
    CHECK_THROWS_AS(CapacitorModel(Activation::tanh, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(CapacitorModel(Activation::tanh, 1.0, -1.0), ValidationError);
    CHECK_THROWS_AS(CapacitorModel(Activation::tanh, INFINITY, 1.0), ValidationError);
    CHECK_THROWS_AS(activation_from_string("relu"), ValidationError);
    CHECK(activation_from_string("algebraic") == Activation::algebraic);
}
