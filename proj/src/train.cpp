#include "evp/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evp/rng.hpp"

namespace evp {

void TrainConfig::check() const {
    if (epochs < 0) fail(errc::invalid_argument, "epochs must be >= 0");
    if (batch_size < 1) fail(errc::invalid_argument, "batch size must be >= 1");
    if (!(learning_rate > 0.0)) fail(errc::invalid_argument, "learning rate must be > 0");
    if (hidden < 1) fail(errc::invalid_argument, "hidden width must be >= 1");
    if (adversarial) adversarial->check();
}

MlpModel train(std::uint64_t model_init_seed, const Dataset& data, const TrainConfig& cfg) {
    cfg.check();
    if (data.size() == 0) fail(errc::invalid_spec, "empty training set");

    MlpModel model = MlpModel::random_init(data.dim(), cfg.hidden, data.classes, model_init_seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(cfg.seed, 0xE000 + static_cast<std::uint64_t>(epoch)));
        shuffle(order, shuffle_rng);

        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(order.size(), start + cfg.batch_size);
            ParamGradients batch_grad = model.zero_gradients();
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                std::size_t idx = order[i];
                std::vector<double> x = data.inputs[idx];
                if (cfg.adversarial) {
                    PgdConfig attack = *cfg.adversarial;
                    attack.seed = mix_seed(mix_seed(cfg.seed, 0xA000 + epoch), idx);
                    x = pgd_attack(model, x, data.labels[idx], attack);
                }
                batch_grad.add_scaled(model.param_gradients(x, data.labels[idx]), 1.0);
                batch_loss += model.loss(x, data.labels[idx]);
            }
            double inv = 1.0 / static_cast<double>(end - start);
            if (!std::isfinite(batch_loss))
                fail(errc::diverged_loss, "non-finite loss at epoch " + std::to_string(epoch));
            model.apply_update(batch_grad, -cfg.learning_rate * inv);
        }
    }
    return model;
}

double accuracy(const MlpModel& model, const Dataset& data) {
    if (data.size() == 0) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (model.predict(data.inputs[i]) == data.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace evp
