#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hopnet/input.hpp"
#include "hopnet/integrator.hpp"
#include "hopnet/linalg.hpp"
#include "hopnet/network.hpp"

namespace hopnet {

// ---------------------------------------------------------------------------
// Semi-passivity

// V^T R^{-1} v - V^T T V with V_i = g_i(v_i). Non-negative where the node
// dissipation covers the power exchanged through T.
double passivity_residual(const HopfieldNetwork& net, std::span<const double> v);

struct PassivityWitness {
    Vector v;
    Vector V;
    double residual = 0.0;
};

struct PassivityReport {
    enum class Mode { certified_outside_radius, falsified, inconclusive };

    Mode mode = Mode::inconclusive;
    double radius = 0.0;
    std::size_t samples = 0;
    // Analytic bound: min_i g_i(r) r / R_i >= n * max(lambda_max(T), 0).
    bool analytic_certificate = false;
    double certificate_lhs = 0.0;
    double certificate_rhs = 0.0;
    double min_sampled_residual = 0.0;
    std::vector<PassivityWitness> counterexamples;  // most negative first
};

std::string_view to_string(PassivityReport::Mode m) noexcept;

struct PassivityOptions {
    std::size_t samples = 100'000;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::size_t max_witnesses = 16;
    // Sampled points lie at s * u with u on the inf-sphere of the given
    // radius and s uniform in [1, max_scale].
    double max_scale = 4.0;
};

// The region tested is {v : ||v||_inf >= radius}. Sampling always runs: any
// negative residual falsifies; no violation plus the analytic bound
// certifies; otherwise the result is inconclusive.
PassivityReport certify_semipassivity(const HopfieldNetwork& net, double radius,
                                      const PassivityOptions& opts = {});

// ---------------------------------------------------------------------------
// Equilibria

enum class CriticalKind { local_min, saddle, local_max, degenerate };

std::string_view to_string(CriticalKind k) noexcept;

// Sign pattern of the eigenvalues of d^2P/dV^2, with |lambda| <= threshold
// counted as degenerate.
CriticalKind classify_critical_point(const HopfieldNetwork& net, std::span<const double> V,
                                     double degeneracy_threshold = 1e-8);

// Ascending eigenvalues of d^2P/dV^2 at V.
Vector potential_hessian_eigenvalues(const HopfieldNetwork& net, std::span<const double> V);

struct Equilibrium {
    Vector q;
    Vector V;
    double potential = 0.0;
    CriticalKind kind = CriticalKind::degenerate;
    Vector hessian_eigenvalues;
    double residual = 0.0;           // ||dq/dt||_inf at q
    double gradient_residual = 0.0;  // ||dP/dV||_inf at V, inf when V rounds to +-1
    std::size_t basin_count = 0;     // multistart integrations that converged here
    // Set for local minima by stability_check: every +-perturbation along
    // the axes returned within return_tolerance.
    std::optional<bool> perturbation_returns;
};

struct EquilibriumSet {
    std::vector<Equilibrium> equilibria;  // ordered lexicographically by q
    std::size_t seeds = 0;
    std::vector<Vector> unconverged_seeds;  // integration starts that did not settle
    double cluster_tolerance = 0.0;

    // Index of the nearest equilibrium and its distance (inf-norm in q).
    std::pair<std::size_t, double> nearest(std::span<const double> q) const;
};

struct EquilibriaOptions {
    std::size_t seeds = 0;  // 0: max(50, 10 n)
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double cluster_tolerance = 1e-6;
    double residual_tolerance = 1e-9;
    double degeneracy_threshold = 1e-8;
    // Multistart charges are drawn uniformly from [-spread, spread]^n, with
    // spread defaulting (<= 0) to the largest possible |q*|.
    double spread = 0.0;
    IntegratorConfig integrator = [] {
        IntegratorConfig c;
        c.t_end = 1e4;
        c.rtol = 1e-12;
        c.atol = 1e-14;
        c.equilibrium_tol = 1e-11;
        return c;
    }();
    bool stability_check = true;
    double perturbation = 1e-3;
    double return_tolerance = 1e-5;
};

// Multistart integration from seeded charges (finds attractors) combined
// with damped Newton on dq/dt = 0 from the same seeds and from the origin
// (finds saddles and maxima too). Equilibria are refined, clustered,
// classified by the Hessian of P(., I) and, for local minima, checked by
// perturbation and re-integration.
EquilibriumSet find_equilibria(const HopfieldNetwork& net, std::span<const double> current,
                               const EquilibriaOptions& opts = {});

// Newton refinement of dq/dt = 0 near q. Returns nullopt if it does not
// reach the tolerance.
std::optional<Vector> refine_equilibrium(const HopfieldNetwork& net, std::span<const double> q,
                                         std::span<const double> current,
                                         double tolerance = 1e-13, std::size_t max_iterations = 100);

// Euclidean gradient descent on P(., I) from every point of a uniform grid
// in the cube |V_i| <= 1 - margin; returns the distinct minimizers found.
// Independent of the q-dynamics, for the critical-point correspondence.
std::vector<Vector> potential_descent_minima(const HopfieldNetwork& net,
                                             std::span<const double> current,
                                             std::size_t grid_per_axis = 5,
                                             double margin = 1e-3,
                                             double gradient_tolerance = 1e-11);

// ---------------------------------------------------------------------------
// Invariant cube

struct InvarianceTrial {
    Vector V0;
    bool on_face = false;
    double max_excursion = 0.0;  // max_t max_i |V_i(t)| - (1 - epsilon)
    bool converged = false;
    Vector final_q;
    std::size_t nearest_equilibrium = 0;
    double equilibrium_distance = 0.0;
};

struct InvarianceReport {
    double epsilon = 0.0;
    double max_excursion = 0.0;
    bool invariant = true;           // max_excursion <= excursion_tolerance
    bool all_converged = true;
    bool all_match_equilibria = true;  // equilibrium_distance <= match_tolerance
    double excursion_tolerance = 0.0;
    double match_tolerance = 0.0;
    std::vector<InvarianceTrial> trials;
    EquilibriumSet equilibria;
};

struct InvarianceOptions {
    std::size_t trials = 30;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double excursion_tolerance = 1e-9;
    double match_tolerance = 1e-5;
    // Fraction of trials started on a face of K_eps; the rest start inside.
    double face_fraction = 0.5;
    IntegratorConfig integrator = [] {
        IntegratorConfig c;
        c.t_end = 1e3;
        c.rtol = 1e-12;
        c.atol = 1e-14;
        c.equilibrium_tol = 1e-11;
        return c;
    }();
    EquilibriaOptions equilibria;
};

InvarianceReport cube_invariance_probe(const HopfieldNetwork& net, std::span<const double> current,
                                       double epsilon, const InvarianceOptions& opts = {});

// ---------------------------------------------------------------------------
// Sharpening sigmoids

struct LambdaSweepEntry {
    double gain = 0.0;
    double conjugate_sup = 0.0;  // sup over the grid of |sum_i H_i*(V_i) / (R_i C_i)|
    double gap_sup = 0.0;        // sup over the grid of |P(V, I) - (-1/2 V^T T V - V^T I)|
    std::size_t argmin_index = 0;  // grid argmin of P(., I)
    bool argmin_matches_limit = false;
};

struct LambdaSweepReport {
    double epsilon = 0.0;
    std::size_t grid_per_axis = 0;
    std::size_t limit_argmin_index = 0;
    Vector limit_argmin;
    std::vector<LambdaSweepEntry> entries;
    // Successive ratios sup_{k+1} / sup_k, and the same scaled by
    // gain_{k+1} / gain_k (exactly 1 under 1/lambda scaling).
    Vector conjugate_ratios;
    Vector gap_ratios;
    Vector scaled_conjugate_ratios;
    bool monotone = true;
    bool ratios_in_band = true;  // for doublings: ratio in [0.4, 0.6]
    bool argmin_agrees_at_largest = true;  // at the two largest gains
};

struct LambdaSweepOptions {
    double epsilon = 1e-3;
    std::size_t grid_per_axis = 0;  // 0: chosen so the grid stays <= ~2e5 points
    std::size_t workers = 1;
};

// Grid point k has coordinates from the mixed-radix digits of k.
Vector sweep_grid_point(std::size_t n, std::size_t grid_per_axis, double epsilon, std::size_t k);

LambdaSweepReport lambda_sweep(const HopfieldNetwork& base, std::span<const double> current,
                               std::span<const double> gains, const LambdaSweepOptions& opts = {});

// ---------------------------------------------------------------------------
// Associative memory demonstration

using Pattern = std::vector<int>;

// T = (scale / n) sum_p xi^p xi^p^T with zero diagonal, unit C and R, tanh
// activation with the given gain. Throws ValidationError on entries other
// than +-1 or ragged patterns.
HopfieldNetwork hebbian_network(std::span<const Pattern> patterns, double gain, double scale);

struct RecallResult {
    Pattern pattern;
    std::vector<std::size_t> flipped;
    std::size_t sign_matches = 0;
    bool converged = false;
    Vector final_q;
    CriticalKind final_kind = CriticalKind::degenerate;
    // Same data for the start on the uncorrupted pattern.
    std::size_t clean_sign_matches = 0;
    CriticalKind clean_kind = CriticalKind::degenerate;
    bool clean_converged = false;
};

struct RecallReport {
    std::size_t n = 0;
    std::size_t corruption = 0;
    std::vector<RecallResult> results;
    std::size_t saddle_endings = 0;  // endings not classified local-min
};

struct RecallOptions {
    std::uint64_t seed = 0;
    // Flipped positions per pattern; nullopt means floor(n / 8).
    std::optional<std::size_t> corruption;
    // Starts at V0 = start_amplitude * (corrupted pattern).
    double start_amplitude = 0.5;
    IntegratorConfig integrator = [] {
        IntegratorConfig c;
        c.t_end = 1e3;
        c.rtol = 1e-12;
        c.atol = 1e-14;
        c.equilibrium_tol = 1e-11;
        return c;
    }();
};

RecallReport hebbian_recall(const HopfieldNetwork& net, std::span<const Pattern> patterns,
                            const RecallOptions& opts = {});

// ---------------------------------------------------------------------------
// Passivity along trajectories

struct PassivityWindowReport {
    std::size_t windows = 0;  // maximal runs of samples with non-negative residual
    bool ok = true;
    double worst_excess = 0.0;  // max of H(t2) - H(t1) - int I^T V dt
};

// On every maximal window of samples with non-negative passivity residual,
// H(t_end) - H(t_start) <= trapezoid integral of I^T V + slack.
PassivityWindowReport passivity_window_check(const Trajectory& traj, double slack = 1e-8);

}  // namespace hopnet
