#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evp/curve.hpp"
#include "evp/metrics.hpp"

namespace evp {

enum class GridStrategy { Uniform, Adaptive };

// Ordered epsilon grid driving a budget sweep and the quadrature.
// Starts at 0, strictly increasing, ends exactly at max_epsilon.
struct SamplingPlan {
    std::vector<double> epsilons;
    GridStrategy strategy = GridStrategy::Uniform;
    double delta = 0.0;  // requested spacing for Uniform plans
    double max_epsilon = 0.0;

    double min_spacing() const;
};

// {0, delta, 2*delta, ...} with the final point pinned to max_epsilon even
// when the last interval comes up short.
SamplingPlan uniform_grid(double max_epsilon, double delta);

// Refine a pilot curve's grid: extra points go to segments in proportion to
// |delta accuracy| plus a +1 bonus when the segment's accuracy range touches
// [tau - 0.05, tau + 0.05]. budget_points counts the total plan size.
SamplingPlan adaptive_grid(const PerturbationCurve& curve, ViabilityThreshold tau,
                           int budget_points);

struct ConvergenceRow {
    double delta_eps = 0.0;
    double evp = 0.0;
    std::optional<double> relative_change;  // versus the previous (coarser) row
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    // Coarsest delta from which every further refinement changes EVP by less
    // than the tolerance. Absent when the tail never settles.
    std::optional<double> stable_at;

    // CSV `delta_eps,evp,relative_change` (first row's change left empty).
    std::string to_csv() const;
};

using SweepFn = std::function<PerturbationCurve(const SamplingPlan&)>;

// Run the sweep at each delta, compute the paper's trapezoid EVP, and report
// row-to-row relative change. `attack_step` is the PGD step size of the sweep;
// every delta must stay above it (pass 0 for analytic sweeps).
ConvergenceReport convergence_study(const SweepFn& sweep, ViabilityThreshold tau,
                                    double max_epsilon, const std::vector<double>& deltas,
                                    double tolerance, double attack_step = 0.0);

}  // namespace evp
