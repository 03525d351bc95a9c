#pragma once

#include <cstdint>
#include <optional>

#include "evp/dataset.hpp"
#include "evp/mlp.hpp"
#include "evp/pgd.hpp"

namespace evp {

// Seeded minibatch SGD. When `adversarial` is set, every batch is replaced by
// PGD examples at the training budget (cfg.adversarial->epsilon) against the
// current model before the gradient step.
struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
    int hidden = 16;
    std::optional<PgdConfig> adversarial;

    void check() const;
};

MlpModel train(std::uint64_t model_init_seed, const Dataset& data, const TrainConfig& cfg);

double accuracy(const MlpModel& model, const Dataset& data);

}  // namespace evp
