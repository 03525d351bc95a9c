#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evp/errors.hpp"

namespace evp {

enum class NormKind { L2, Linf };

const char* norm_name(NormKind norm);
NormKind parse_norm(const std::string& text);

enum class CrossingMode { LastSample, Interpolated };

const char* crossing_mode_name(CrossingMode mode);

// Minimum performance for the system to count as functional. In (0, 1].
struct ViabilityThreshold {
    double tau;

    explicit ViabilityThreshold(double t) : tau(t) {
        if (!(t > 0.0) || !(t <= 1.0)) fail(errc::invalid_argument, "tau must be in (0, 1]");
    }
};

// One sample of the accuracy-perturbation curve. n_samples is the test-set
// size behind the estimate; mean_actual_norm is the mean attained perturbation
// norm at this budget (attacks may stop short of the bound).
struct CurvePoint {
    double epsilon = 0.0;
    double accuracy = 0.0;
    std::optional<std::int64_t> n_samples;
    std::optional<double> mean_actual_norm;
};

// The empirical accuracy-perturbation curve. Immutable once built; construct
// through validate() so the invariants (epsilon strictly increasing, first
// epsilon 0, accuracies in [0,1], >= 2 points) always hold. Piecewise-linear
// between samples.
class PerturbationCurve {
  public:
    static PerturbationCurve validate(std::vector<CurvePoint> points,
                                      NormKind norm = NormKind::L2,
                                      std::string source = "external",
                                      std::string scale_note = "");

    static PerturbationCurve validate(const std::vector<std::pair<double, double>>& raw_points,
                                      NormKind norm = NormKind::L2,
                                      std::string source = "external");

    const std::vector<CurvePoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double max_epsilon() const { return points_.back().epsilon; }
    double clean_accuracy() const { return points_.front().accuracy; }
    NormKind norm() const { return norm_; }
    const std::string& source() const { return source_; }
    const std::string& scale_note() const { return scale_note_; }

    // Piecewise-linear accuracy at epsilon in [0, max_epsilon()]; exact sample
    // values at grid points. Throws OutOfDomain outside the sampled range.
    double interpolate(double epsilon) const;

    // CSV: header "epsilon,accuracy" (+ ",n_samples" when counts are carried),
    // shortest round-trip decimals, rows ascending in epsilon.
    std::string to_csv() const;
    static PerturbationCurve from_csv(const std::string& text,
                                      NormKind norm = NormKind::L2,
                                      std::string source = "external");

    // JSON envelope {norm_label, source, points}; points keep the optional
    // per-sample fields, which CSV cannot carry.
    std::string to_json() const;
    static PerturbationCurve from_json(const std::string& text);

  private:
    PerturbationCurve() = default;

    std::vector<CurvePoint> points_;
    NormKind norm_ = NormKind::L2;
    std::string source_;
    std::string scale_note_;
};

// Viability frontier D_tau: smallest budget at which accuracy first drops
// below tau (first crossing; later viable islands are discarded and flagged).
struct ViableRegion {
    double d_tau = 0.0;
    CrossingMode crossing_mode = CrossingMode::LastSample;
    // True when some sample past the first crossing is viable again; such
    // mass is outside [0, d_tau] and does not count.
    bool discarded_viable_island = false;
};

ViableRegion viability_frontier(const PerturbationCurve& curve, ViabilityThreshold tau,
                                CrossingMode mode);

PerturbationCurve load_curve_file(const std::string& path);
void write_text_file_atomic(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace evp
