#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "evp/curve.hpp"

namespace evp {

enum class MetricName { EVP, IntervalSum, ARA, ROBY, AdvAccuracy, MeanMinPerturbation };

const char* metric_name(MetricName metric);

// One metric value plus everything that produced it, so comparison runs are
// self-describing. Serialized as {metric, value, params, curve_source}.
struct MetricReport {
    MetricName metric = MetricName::EVP;
    double value = 0.0;
    std::map<std::string, std::variant<double, std::int64_t, std::string>> params;
    std::string curve_source;

    std::string to_json() const;
};

// Row of a batch comparison: CSV `model,metric,tau,value`.
struct BatchRow {
    std::string model;
    MetricName metric;
    double tau;
    double value;
};

std::string batch_csv(const std::vector<BatchRow>& rows);

// The paper's trapezoid sum over the sampled grid: f(eps_i) = a_i when
// a_i >= tau else 0, summed as (f_i + f_{i-1})/2 * (eps_i - eps_{i-1}).
// No interpolation; a sub-threshold endpoint halves the last trapezoid to zero.
MetricReport evp_trapezoid(const PerturbationCurve& curve, ViabilityThreshold tau);

// Exact area under the piecewise-linear interpolant on [0, D_tau(Interpolated)].
// Differs from evp_trapezoid only in the crossing segment.
MetricReport evp_refined(const PerturbationCurve& curve, ViabilityThreshold tau);

// Interval-sum form: sum over intervals of a(s, eps_i) * 1[a >= tau] * |interval|,
// where a(s, eps_i) is the sample taken closest to (not past) sup of the interval.
MetricReport interval_sum_robustness(const PerturbationCurve& curve, ViabilityThreshold tau,
                                     const std::vector<std::pair<double, double>>& intervals);

// Default threshold from a target Cohen's d: tau = 1/C + d*sqrt((1/C)(1-1/C)).
ViabilityThreshold cohens_d_threshold(int classes, double d);

// Area between the curve and the chance baseline 1/C over the full sampled
// range, integrand clipped at zero, with refinement at baseline crossings.
MetricReport ara(const PerturbationCurve& curve, int classes);

// Fraction of the plausible-alteration interval [0, b] where the interpolated
// accuracy stays >= tau, first-crossing semantics (min(D_tau, b) / b).
MetricReport roby(const PerturbationCurve& curve, ViabilityThreshold tau, double plausible_bound);

// Stored accuracy at one sampled budget; defined only at sampled budgets.
double adversarial_accuracy(const PerturbationCurve& curve, double epsilon);

MetricReport adversarial_accuracy_report(const PerturbationCurve& curve, double epsilon);

}  // namespace evp
