#include "evp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evp/numformat.hpp"

namespace evp {

double SamplingPlan::min_spacing() const {
    double spacing = max_epsilon;
    for (std::size_t i = 1; i < epsilons.size(); ++i)
        spacing = std::min(spacing, epsilons[i] - epsilons[i - 1]);
    return spacing;
}

SamplingPlan uniform_grid(double max_epsilon, double delta) {
    if (!(max_epsilon > 0.0))
        fail(errc::invalid_delta, "max_epsilon must be > 0, got " + format_double(max_epsilon));
    if (!(delta > 0.0) || delta > max_epsilon)
        fail(errc::invalid_delta, "delta " + format_double(delta) +
                                      " must satisfy 0 < delta <= max_epsilon = " +
                                      format_double(max_epsilon));
    SamplingPlan plan;
    plan.strategy = GridStrategy::Uniform;
    plan.delta = delta;
    plan.max_epsilon = max_epsilon;
    // i * delta, not accumulation, so grid points carry no drift. A final
    // point within ulp-scale distance of max_epsilon is snapped onto it.
    double tol = delta * 1e-9;
    for (std::size_t i = 0;; ++i) {
        double eps = static_cast<double>(i) * delta;
        if (eps >= max_epsilon - tol) break;
        plan.epsilons.push_back(eps);
    }
    plan.epsilons.push_back(max_epsilon);
    return plan;
}

SamplingPlan adaptive_grid(const PerturbationCurve& curve, ViabilityThreshold tau,
                           int budget_points) {
    const auto& pts = curve.points();
    int pilot_size = static_cast<int>(pts.size());
    if (budget_points < pilot_size)
        fail(errc::budget_too_small, "budget " + std::to_string(budget_points) +
                                         " below pilot size " + std::to_string(pilot_size));
    int extra = budget_points - pilot_size;
    std::size_t n_segments = pts.size() - 1;

    // Per-segment priority: accuracy change plus a bonus near the threshold.
    std::vector<double> priority(n_segments);
    double total = 0.0;
    for (std::size_t i = 0; i < n_segments; ++i) {
        double a_lo = std::min(pts[i].accuracy, pts[i + 1].accuracy);
        double a_hi = std::max(pts[i].accuracy, pts[i + 1].accuracy);
        double score = a_hi - a_lo;
        if (a_lo <= tau.tau + 0.05 && a_hi >= tau.tau - 0.05) score += 1.0;
        priority[i] = score;
        total += score;
    }
    if (total == 0.0) {
        // Flat pilot away from tau: every segment equally deserving.
        std::fill(priority.begin(), priority.end(), 1.0);
        total = static_cast<double>(n_segments);
    }

    // Largest-remainder apportionment of the extra points; ties go to the
    // earlier segment so plans are deterministic.
    std::vector<int> alloc(n_segments, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t i = 0; i < n_segments; ++i) {
        double share = extra * priority[i] / total;
        alloc[i] = static_cast<int>(std::floor(share));
        assigned += alloc[i];
        remainders.push_back({share - alloc[i], i});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < extra - assigned; ++k) alloc[remainders[k].second] += 1;

    SamplingPlan plan;
    plan.strategy = GridStrategy::Adaptive;
    plan.max_epsilon = curve.max_epsilon();
    for (std::size_t i = 0; i < n_segments; ++i) {
        plan.epsilons.push_back(pts[i].epsilon);
        double width = pts[i + 1].epsilon - pts[i].epsilon;
        for (int j = 1; j <= alloc[i]; ++j)
            plan.epsilons.push_back(pts[i].epsilon + width * j / (alloc[i] + 1));
    }
    plan.epsilons.push_back(pts.back().epsilon);
    return plan;
}

std::string ConvergenceReport::to_csv() const {
    std::string out = "delta_eps,evp,relative_change\n";
    for (const ConvergenceRow& row : rows) {
        out += format_double(row.delta_eps);
        out += ',';
        out += format_double(row.evp);
        out += ',';
        if (row.relative_change) out += format_double(*row.relative_change);
        out += '\n';
    }
    return out;
}

ConvergenceReport convergence_study(const SweepFn& sweep, ViabilityThreshold tau,
                                    double max_epsilon, const std::vector<double>& deltas,
                                    double tolerance, double attack_step) {
    if (deltas.empty()) fail(errc::invalid_argument, "need at least one delta");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            fail(errc::invalid_argument, "deltas must be strictly decreasing");
    for (double delta : deltas)
        if (delta <= attack_step)
            fail(errc::step_size_violation, "sampling interval " + format_double(delta) +
                                                " must exceed the PGD step " +
                                                format_double(attack_step));

    ConvergenceReport report;
    for (double delta : deltas) {
        PerturbationCurve curve = sweep(uniform_grid(max_epsilon, delta));
        double evp = evp_trapezoid(curve, tau).value;
        ConvergenceRow row;
        row.delta_eps = delta;
        row.evp = evp;
        if (!report.rows.empty()) {
            double prev = report.rows.back().evp;
            if (prev != 0.0)
                row.relative_change = std::abs(evp - prev) / std::abs(prev);
            else
                row.relative_change = evp == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        report.rows.push_back(row);
    }

    // Coarsest row such that every finer refinement stays inside the tolerance.
    // Needs at least one refinement past the row to count as evidence.
    for (std::size_t j = 0; j + 1 < report.rows.size(); ++j) {
        bool settled = true;
        for (std::size_t k = j + 1; k < report.rows.size(); ++k) {
            if (!(*report.rows[k].relative_change < tolerance)) {
                settled = false;
                break;
            }
        }
        if (settled) {
            report.stable_at = report.rows[j].delta_eps;
            break;
        }
    }
    return report;
}

}  // namespace evp
