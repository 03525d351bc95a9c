#include "evp/pgd.hpp"

#include <algorithm>
#include <cmath>

#include "evp/numformat.hpp"
#include "evp/rng.hpp"

namespace evp {

void PgdConfig::check() const {
    if (epsilon < 0.0) fail(errc::invalid_argument, "budget epsilon must be >= 0");
    if (!(step > 0.0)) fail(errc::invalid_argument, "PGD step must be > 0");
    if (epsilon > 0.0 && !(step < epsilon))
        fail(errc::invalid_argument, "PGD step " + format_double(step) +
                                         " must be smaller than the budget " +
                                         format_double(epsilon));
    if (iterations < 0) fail(errc::invalid_argument, "iterations must be >= 0");
}

int default_pgd_iterations(double epsilon, double step) {
    return static_cast<int>(std::ceil(2.0 * epsilon / step));
}

double norm_of(NormKind norm, const std::vector<double>& v) {
    if (norm == NormKind::Linf) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

namespace {

void project(NormKind norm, std::vector<double>& delta, double epsilon) {
    if (norm == NormKind::Linf) {
        for (double& d : delta) d = std::clamp(d, -epsilon, epsilon);
        return;
    }
    double n = norm_of(NormKind::L2, delta);
    if (n > epsilon) {
        double scale = epsilon / n;
        for (double& d : delta) d *= scale;
    }
}

void rescale_to(NormKind norm, std::vector<double>& delta, double target) {
    double n = norm_of(norm, delta);
    if (n <= 0.0) return;
    double scale = target / n;
    for (double& d : delta) d *= scale;
}

}  // namespace

std::vector<double> pgd_attack(const MlpModel& model, const std::vector<double>& input, int label,
                               const PgdConfig& cfg) {
    cfg.check();
    if (cfg.epsilon == 0.0) return input;

    const std::size_t dim = input.size();
    std::vector<double> delta(dim, 0.0);

    if (cfg.random_start) {
        Rng rng(mix_seed(cfg.seed, 0x5745));
        if (cfg.norm == NormKind::Linf) {
            for (double& d : delta) d = rng.uniform(-cfg.epsilon, cfg.epsilon);
        } else {
            // Uniform in the L2 ball: gaussian direction, radius ~ eps * u^(1/d).
            double n2 = 0.0;
            for (double& d : delta) {
                d = rng.gaussian();
                n2 += d * d;
            }
            double n = std::sqrt(n2);
            if (n > 0.0) {
                double radius =
                    cfg.epsilon * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
                for (double& d : delta) d *= radius / n;
            }
        }
        project(cfg.norm, delta, cfg.epsilon);
    }

    int iterations = cfg.iterations > 0 ? cfg.iterations
                                        : default_pgd_iterations(cfg.epsilon, cfg.step);
    std::vector<double> point(dim);
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t k = 0; k < dim; ++k) point[k] = input[k] + delta[k];
        std::vector<double> grad = model.input_gradient(point, label);
        if (cfg.norm == NormKind::Linf) {
            for (std::size_t k = 0; k < dim; ++k) {
                double sign = grad[k] > 0.0 ? 1.0 : (grad[k] < 0.0 ? -1.0 : 0.0);
                delta[k] += cfg.step * sign;
            }
        } else {
            double n = norm_of(NormKind::L2, grad);
            if (n < 1e-12) break;  // saturated loss, nowhere to ascend
            for (std::size_t k = 0; k < dim; ++k) delta[k] += cfg.step * grad[k] / n;
        }
        project(cfg.norm, delta, cfg.epsilon);
    }

    for (std::size_t k = 0; k < dim; ++k) point[k] = input[k] + delta[k];

    // Sample near the bound: if the attack failed while strictly inside the
    // ball, push the perturbation out to just under the budget.
    double attained = norm_of(cfg.norm, delta);
    double near_bound = cfg.epsilon * (1.0 - 1e-6);
    if (attained > 0.0 && attained < near_bound && model.predict(point) == label) {
        rescale_to(cfg.norm, delta, near_bound);
        for (std::size_t k = 0; k < dim; ++k) point[k] = input[k] + delta[k];
    }
    return point;
}

}  // namespace evp
