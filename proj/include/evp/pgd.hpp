#pragma once

#include <cstdint>
#include <vector>

#include "evp/curve.hpp"
#include "evp/mlp.hpp"

namespace evp {

// Plain PGD: fixed step, projection onto the epsilon-ball after every step,
// optional uniform random start, no momentum.
struct PgdConfig {
    NormKind norm = NormKind::L2;
    double epsilon = 0.0;
    double step = 0.005;
    int iterations = 0;  // 0 means default_pgd_iterations(epsilon, step)
    std::uint64_t seed = 0;
    bool random_start = false;

    void check() const;
};

// Enough fixed-size steps to cross the ball and back.
int default_pgd_iterations(double epsilon, double step);

double norm_of(NormKind norm, const std::vector<double>& v);

// Ascend the loss within the budget ball around `input`. The returned point
// satisfies ||adv - input|| <= epsilon * (1 + 1e-9); when the attack ends
// strictly inside the ball with the prediction still correct, the final
// iterate is pushed out to norm epsilon * (1 - 1e-6) so samples sit close to
// the bound. Deterministic given cfg.seed; epsilon = 0 returns input as-is.
std::vector<double> pgd_attack(const MlpModel& model, const std::vector<double>& input, int label,
                               const PgdConfig& cfg);

}  // namespace evp
