#pragma once

// Shared generators and independent oracles for the test suites. Everything
// here recomputes expected values from first principles; nothing calls into
// the implementation paths under test except where a check is explicitly
// about the interpolant itself.

#include <cmath>
#include <functional>
#include <vector>

#include "evp/curve.hpp"
#include "evp/rng.hpp"

namespace evp::testing {

// Random valid curve: wobbly, mostly decaying accuracy over 2..12 samples.
inline PerturbationCurve random_curve(Rng& rng) {
    int n = 2 + static_cast<int>(rng.below(11));
    std::vector<std::pair<double, double>> pts;
    double eps = 0.0;
    double acc = rng.uniform(0.5, 1.0);
    for (int i = 0; i < n; ++i) {
        pts.push_back({eps, acc});
        eps += rng.uniform(0.05, 0.8);
        acc += rng.uniform(-0.35, 0.12);
        acc = std::min(1.0, std::max(0.0, acc));
    }
    return PerturbationCurve::validate(pts);
}

// Strictly single-crossing curve versus the level `level`: strictly above it
// up to some segment, strictly below after, never touching. Guarantees the
// refined-EVP and ARA bridge preconditions.
inline PerturbationCurve single_crossing_curve(Rng& rng, double level) {
    int above = 1 + static_cast<int>(rng.below(5));
    int below = 1 + static_cast<int>(rng.below(4));
    std::vector<std::pair<double, double>> pts;
    double eps = 0.0;
    double acc = rng.uniform(level + 0.2 * (1.0 - level), 1.0);
    for (int i = 0; i < above; ++i) {
        pts.push_back({eps, acc});
        eps += rng.uniform(0.1, 0.7);
        // stay strictly above the level while drifting down
        acc = level + (acc - level) * rng.uniform(0.55, 0.95);
    }
    double low = rng.uniform(0.0, 0.8 * level);
    for (int i = 0; i < below; ++i) {
        pts.push_back({eps, low});
        eps += rng.uniform(0.1, 0.7);
        low *= rng.uniform(0.3, 0.9);
    }
    return PerturbationCurve::validate(pts);
}

// Composite-trapezoid quadrature on a dense uniform grid.
inline double fine_grid_integral(const std::function<double(double)>& f, double lo, double hi,
                                 int n_points) {
    if (hi <= lo) return 0.0;
    double h = (hi - lo) / (n_points - 1);
    double sum = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < n_points - 1; ++i) sum += f(lo + i * h);
    return sum * h;
}

// The paper's thresholded trapezoid sum, written independently and naively.
inline double naive_thresholded_trapezoid(const std::vector<std::pair<double, double>>& pts,
                                          double tau) {
    auto f = [&](double a) { return a >= tau ? a : 0.0; };
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        total += (f(pts[i].second) + f(pts[i - 1].second)) / 2.0 *
                 (pts[i].first - pts[i - 1].first);
    return total;
}

inline std::vector<std::pair<double, double>> as_pairs(const PerturbationCurve& curve) {
    std::vector<std::pair<double, double>> pts;
    for (const CurvePoint& p : curve.points()) pts.push_back({p.epsilon, p.accuracy});
    return pts;
}

}  // namespace evp::testing
