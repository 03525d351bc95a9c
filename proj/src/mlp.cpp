#include "evp/mlp.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "evp/curve.hpp"
#include "evp/rng.hpp"

namespace evp {

using nlohmann::json;

const char* activation_name(Activation act) {
    return act == Activation::Tanh ? "tanh" : "identity";
}

void ParamGradients::add_scaled(const ParamGradients& other, double scale) {
    for (std::size_t i = 0; i < w1.size(); ++i) w1[i] += scale * other.w1[i];
    for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += scale * other.b1[i];
    for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += scale * other.w2[i];
    for (std::size_t i = 0; i < b2.size(); ++i) b2[i] += scale * other.b2[i];
}

MlpModel::MlpModel(int input_dim, int hidden, int classes, Activation activation)
    : input_dim_(input_dim), hidden_(hidden), classes_(classes), activation_(activation) {
    if (input_dim < 1 || hidden < 1 || classes < 2)
        fail(errc::invalid_spec, "layer sizes must be [d >= 1, h >= 1, C >= 2]");
    w1_.assign(static_cast<std::size_t>(hidden_) * input_dim_, 0.0);
    b1_.assign(hidden_, 0.0);
    w2_.assign(static_cast<std::size_t>(classes_) * hidden_, 0.0);
    b2_.assign(classes_, 0.0);
}

MlpModel MlpModel::random_init(int input_dim, int hidden, int classes, std::uint64_t seed,
                               Activation activation) {
    MlpModel model(input_dim, hidden, classes, activation);
    Rng rng(mix_seed(seed, 0x11));
    double scale1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    double scale2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& w : model.w1_) w = scale1 * rng.gaussian();
    for (double& w : model.w2_) w = scale2 * rng.gaussian();
    return model;
}

MlpModel::Forward MlpModel::forward(const std::vector<double>& input, int label) const {
    Forward f;
    f.hidden_pre.resize(hidden_);
    f.hidden_act.resize(hidden_);
    for (int j = 0; j < hidden_; ++j) {
        double z = b1_[j];
        const double* row = &w1_[static_cast<std::size_t>(j) * input_dim_];
        for (int k = 0; k < input_dim_; ++k) z += row[k] * input[k];
        f.hidden_pre[j] = z;
        f.hidden_act[j] = activation_ == Activation::Tanh ? std::tanh(z) : z;
    }
    f.logits.resize(classes_);
    for (int c = 0; c < classes_; ++c) {
        double z = b2_[c];
        const double* row = &w2_[static_cast<std::size_t>(c) * hidden_];
        for (int j = 0; j < hidden_; ++j) z += row[j] * f.hidden_act[j];
        f.logits[c] = z;
    }
    double z_max = *std::max_element(f.logits.begin(), f.logits.end());
    double sum_exp = 0.0;
    f.probs.resize(classes_);
    for (int c = 0; c < classes_; ++c) {
        f.probs[c] = std::exp(f.logits[c] - z_max);
        sum_exp += f.probs[c];
    }
    for (double& p : f.probs) p /= sum_exp;
    if (label >= 0) f.loss = std::log(sum_exp) + z_max - f.logits[label];
    return f;
}

std::vector<double> MlpModel::logits(const std::vector<double>& input) const {
    return forward(input, -1).logits;
}

int MlpModel::predict(const std::vector<double>& input) const {
    auto z = logits(input);
    return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double MlpModel::loss(const std::vector<double>& input, int label) const {
    return forward(input, label).loss;
}

std::vector<double> MlpModel::input_gradient(const std::vector<double>& input, int label) const {
    Forward f = forward(input, label);
    // dL/dlogits = probs - onehot(label)
    std::vector<double> dlogits = f.probs;
    dlogits[label] -= 1.0;
    // dL/dhidden_act = w2^T dlogits, then through the activation
    std::vector<double> dhidden(hidden_, 0.0);
    for (int c = 0; c < classes_; ++c) {
        const double* row = &w2_[static_cast<std::size_t>(c) * hidden_];
        for (int j = 0; j < hidden_; ++j) dhidden[j] += dlogits[c] * row[j];
    }
    if (activation_ == Activation::Tanh)
        for (int j = 0; j < hidden_; ++j) dhidden[j] *= 1.0 - f.hidden_act[j] * f.hidden_act[j];
    // dL/dinput = w1^T dhidden
    std::vector<double> dinput(input_dim_, 0.0);
    for (int j = 0; j < hidden_; ++j) {
        const double* row = &w1_[static_cast<std::size_t>(j) * input_dim_];
        for (int k = 0; k < input_dim_; ++k) dinput[k] += dhidden[j] * row[k];
    }
    return dinput;
}

ParamGradients MlpModel::param_gradients(const std::vector<double>& input, int label) const {
    Forward f = forward(input, label);
    ParamGradients g = zero_gradients();
    std::vector<double> dlogits = f.probs;
    dlogits[label] -= 1.0;
    for (int c = 0; c < classes_; ++c) {
        double* row = &g.w2[static_cast<std::size_t>(c) * hidden_];
        for (int j = 0; j < hidden_; ++j) row[j] = dlogits[c] * f.hidden_act[j];
        g.b2[c] = dlogits[c];
    }
    std::vector<double> dhidden(hidden_, 0.0);
    for (int c = 0; c < classes_; ++c) {
        const double* row = &w2_[static_cast<std::size_t>(c) * hidden_];
        for (int j = 0; j < hidden_; ++j) dhidden[j] += dlogits[c] * row[j];
    }
    if (activation_ == Activation::Tanh)
        for (int j = 0; j < hidden_; ++j) dhidden[j] *= 1.0 - f.hidden_act[j] * f.hidden_act[j];
    for (int j = 0; j < hidden_; ++j) {
        double* row = &g.w1[static_cast<std::size_t>(j) * input_dim_];
        for (int k = 0; k < input_dim_; ++k) row[k] = dhidden[j] * input[k];
        g.b1[j] = dhidden[j];
    }
    return g;
}

ParamGradients MlpModel::zero_gradients() const {
    ParamGradients g;
    g.w1.assign(w1_.size(), 0.0);
    g.b1.assign(b1_.size(), 0.0);
    g.w2.assign(w2_.size(), 0.0);
    g.b2.assign(b2_.size(), 0.0);
    return g;
}

void MlpModel::apply_update(const ParamGradients& grad, double scale) {
    for (std::size_t i = 0; i < w1_.size(); ++i) w1_[i] += scale * grad.w1[i];
    for (std::size_t i = 0; i < b1_.size(); ++i) b1_[i] += scale * grad.b1[i];
    for (std::size_t i = 0; i < w2_.size(); ++i) w2_[i] += scale * grad.w2[i];
    for (std::size_t i = 0; i < b2_.size(); ++i) b2_[i] += scale * grad.b2[i];
}

std::string MlpModel::to_json() const {
    json checkpoint = {{"layer_sizes", {input_dim_, hidden_, classes_}},
                       {"activation", activation_name(activation_)},
                       {"w1", w1_},
                       {"b1", b1_},
                       {"w2", w2_},
                       {"b2", b2_}};
    return checkpoint.dump(2) + "\n";
}

MlpModel MlpModel::from_json(const std::string& text) {
    json checkpoint = json::parse(text, nullptr, false);
    if (checkpoint.is_discarded()) fail(errc::parse_error, "model checkpoint does not parse");
    try {
        auto sizes = checkpoint.at("layer_sizes").get<std::vector<int>>();
        if (sizes.size() != 3)
            fail(errc::parse_error, "layer_sizes must be [input, hidden, classes]");
        std::string act = checkpoint.at("activation").get<std::string>();
        Activation activation;
        if (act == "tanh")
            activation = Activation::Tanh;
        else if (act == "identity")
            activation = Activation::Identity;
        else
            fail(errc::parse_error, "unknown activation '" + act + "'");
        MlpModel model(sizes[0], sizes[1], sizes[2], activation);
        model.w1_ = checkpoint.at("w1").get<std::vector<double>>();
        model.b1_ = checkpoint.at("b1").get<std::vector<double>>();
        model.w2_ = checkpoint.at("w2").get<std::vector<double>>();
        model.b2_ = checkpoint.at("b2").get<std::vector<double>>();
        if (model.w1_.size() != static_cast<std::size_t>(sizes[0]) * sizes[1] ||
            model.b1_.size() != static_cast<std::size_t>(sizes[1]) ||
            model.w2_.size() != static_cast<std::size_t>(sizes[1]) * sizes[2] ||
            model.b2_.size() != static_cast<std::size_t>(sizes[2]))
            fail(errc::parse_error, "parameter array sizes disagree with layer_sizes");
        return model;
    } catch (const json::exception& e) {
        fail(errc::parse_error, std::string("model checkpoint: ") + e.what());
    }
}

MlpModel MlpModel::load(const std::string& path) { return from_json(read_text_file(path)); }

}  // namespace evp
