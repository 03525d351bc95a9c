#include "evp/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "evp/numformat.hpp"

namespace evp {

using nlohmann::json;

const char* metric_name(MetricName metric) {
    switch (metric) {
        case MetricName::EVP: return "EVP";
        case MetricName::IntervalSum: return "IntervalSum";
        case MetricName::ARA: return "ARA";
        case MetricName::ROBY: return "ROBY";
        case MetricName::AdvAccuracy: return "AdvAccuracy";
        case MetricName::MeanMinPerturbation: return "MeanMinPerturbation";
    }
    return "Unknown";
}

std::string MetricReport::to_json() const {
    json params_json = json::object();
    for (const auto& [key, val] : params) {
        if (std::holds_alternative<double>(val))
            params_json[key] = std::get<double>(val);
        else if (std::holds_alternative<std::int64_t>(val))
            params_json[key] = std::get<std::int64_t>(val);
        else
            params_json[key] = std::get<std::string>(val);
    }
    json report = {{"metric", metric_name(metric)},
                   {"value", value},
                   {"params", params_json},
                   {"curve_source", curve_source}};
    return report.dump(2) + "\n";
}

std::string batch_csv(const std::vector<BatchRow>& rows) {
    std::string out = "model,metric,tau,value\n";
    for (const BatchRow& r : rows) {
        out += r.model;
        out += ',';
        out += metric_name(r.metric);
        out += ',';
        out += format_double(r.tau);
        out += ',';
        out += format_double(r.value);
        out += '\n';
    }
    return out;
}

namespace {

double thresholded(double accuracy, double tau) { return accuracy >= tau ? accuracy : 0.0; }

MetricReport make_report(MetricName metric, double value, const PerturbationCurve& curve) {
    MetricReport report;
    report.metric = metric;
    report.value = value;
    report.curve_source = curve.source();
    return report;
}

}  // namespace

MetricReport evp_trapezoid(const PerturbationCurve& curve, ViabilityThreshold tau) {
    const auto& pts = curve.points();
    double sum = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double f_prev = thresholded(pts[i - 1].accuracy, tau.tau);
        double f_here = thresholded(pts[i].accuracy, tau.tau);
        sum += 0.5 * (f_here + f_prev) * (pts[i].epsilon - pts[i - 1].epsilon);
    }
    MetricReport report = make_report(MetricName::EVP, sum, curve);
    report.params["tau"] = tau.tau;
    report.params["variant"] = std::string("trapezoid");
    return report;
}

MetricReport evp_refined(const PerturbationCurve& curve, ViabilityThreshold tau) {
    ViableRegion region = viability_frontier(curve, tau, CrossingMode::Interpolated);
    const auto& pts = curve.points();
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size() && pts[i - 1].epsilon < region.d_tau; ++i) {
        if (pts[i].epsilon <= region.d_tau) {
            area += 0.5 * (pts[i].accuracy + pts[i - 1].accuracy) *
                    (pts[i].epsilon - pts[i - 1].epsilon);
        } else {
            // Crossing segment: the interpolant equals tau exactly at d_tau.
            area += 0.5 * (pts[i - 1].accuracy + tau.tau) * (region.d_tau - pts[i - 1].epsilon);
        }
    }
    MetricReport report = make_report(MetricName::EVP, area, curve);
    report.params["tau"] = tau.tau;
    report.params["variant"] = std::string("refined");
    report.params["d_tau"] = region.d_tau;
    report.params["crossing_mode"] = std::string(crossing_mode_name(CrossingMode::Interpolated));
    if (region.discarded_viable_island) report.params["discarded_viable_island"] = std::int64_t(1);
    return report;
}

MetricReport interval_sum_robustness(const PerturbationCurve& curve, ViabilityThreshold tau,
                                     const std::vector<std::pair<double, double>>& intervals) {
    const auto& pts = curve.points();
    double prev_sup = -1.0;
    double sum = 0.0;
    for (const auto& [inf, sup] : intervals) {
        if (!(sup > inf))
            fail(errc::empty_interval,
                 "interval [" + format_double(inf) + ", " + format_double(sup) + "] is degenerate");
        if (inf < prev_sup)
            fail(errc::invalid_argument, "intervals must be disjoint and ordered");
        prev_sup = sup;

        // Sample with the largest epsilon not exceeding sup and not below inf.
        const CurvePoint* chosen = nullptr;
        for (const CurvePoint& p : pts) {
            if (p.epsilon > sup) break;
            if (p.epsilon >= inf) chosen = &p;
        }
        if (!chosen)
            fail(errc::no_sample_in_interval, "no curve sample inside [" + format_double(inf) +
                                                  ", " + format_double(sup) + "]");
        if (chosen->accuracy >= tau.tau) sum += chosen->accuracy * (sup - inf);
    }
    MetricReport report = make_report(MetricName::IntervalSum, sum, curve);
    report.params["tau"] = tau.tau;
    report.params["intervals"] = static_cast<std::int64_t>(intervals.size());
    return report;
}

ViabilityThreshold cohens_d_threshold(int classes, double d) {
    if (classes < 2) fail(errc::invalid_argument, "classes must be >= 2");
    if (d < 0.0) fail(errc::invalid_argument, "target Cohen's d must be >= 0");
    double chance = 1.0 / classes;
    double tau = chance + d * std::sqrt(chance * (1.0 - chance));
    if (tau > 1.0)
        fail(errc::threshold_exceeds_one, "tau = " + format_double(tau) + " for C = " +
                                              std::to_string(classes) + ", d = " + format_double(d));
    return ViabilityThreshold(tau);
}

MetricReport ara(const PerturbationCurve& curve, int classes) {
    if (classes < 2) fail(errc::invalid_argument, "classes must be >= 2");
    double baseline = 1.0 / classes;
    const auto& pts = curve.points();
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double width = pts[i].epsilon - pts[i - 1].epsilon;
        double lo = pts[i - 1].accuracy - baseline;
        double hi = pts[i].accuracy - baseline;
        if (lo >= 0.0 && hi >= 0.0) {
            area += 0.5 * (lo + hi) * width;
        } else if (lo <= 0.0 && hi <= 0.0) {
            // fully below chance, clipped away
        } else {
            // Baseline crossing inside the segment: only the triangle above it counts.
            double positive = lo > 0.0 ? lo : hi;
            double crossing_width = width * positive / (lo > 0.0 ? lo - hi : hi - lo);
            area += 0.5 * positive * crossing_width;
        }
    }
    MetricReport report = make_report(MetricName::ARA, area, curve);
    report.params["classes"] = static_cast<std::int64_t>(classes);
    report.params["baseline"] = baseline;
    return report;
}

MetricReport roby(const PerturbationCurve& curve, ViabilityThreshold tau, double plausible_bound) {
    if (!(plausible_bound > 0.0)) fail(errc::invalid_argument, "plausible bound must be > 0");
    if (plausible_bound > curve.max_epsilon())
        fail(errc::bound_exceeds_curve, "bound " + format_double(plausible_bound) +
                                            " exceeds sampled range " +
                                            format_double(curve.max_epsilon()));
    ViableRegion region = viability_frontier(curve, tau, CrossingMode::Interpolated);
    double viable_length = std::min(region.d_tau, plausible_bound);
    MetricReport report = make_report(MetricName::ROBY, viable_length / plausible_bound, curve);
    report.params["tau"] = tau.tau;
    report.params["plausible_bound"] = plausible_bound;
    return report;
}

double adversarial_accuracy(const PerturbationCurve& curve, double epsilon) {
    for (const CurvePoint& p : curve.points())
        if (p.epsilon == epsilon) return p.accuracy;
    fail(errc::budget_not_sampled,
         "budget " + format_double(epsilon) + " is not one of the curve's sampled budgets");
}

MetricReport adversarial_accuracy_report(const PerturbationCurve& curve, double epsilon) {
    MetricReport report =
        make_report(MetricName::AdvAccuracy, adversarial_accuracy(curve, epsilon), curve);
    report.params["epsilon"] = epsilon;
    return report;
}

}  // namespace evp
