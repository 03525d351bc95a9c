#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evp/errors.hpp"

namespace evp {

enum class Activation { Tanh, Identity };

const char* activation_name(Activation act);

// Gradients of the cross-entropy loss with respect to every parameter,
// in the same shapes as the model's parameter arrays.
struct ParamGradients {
    std::vector<double> w1, b1, w2, b2;

    void add_scaled(const ParamGradients& other, double scale);
};

// Single-hidden-layer classifier [d, h, C]: hidden tanh (Identity turns the
// whole net linear, used by the margin-oracle tests), softmax cross-entropy
// output. Parameters are explicit row-major arrays; all gradients analytic.
class MlpModel {
  public:
    MlpModel(int input_dim, int hidden, int classes, Activation activation = Activation::Tanh);

    static MlpModel random_init(int input_dim, int hidden, int classes, std::uint64_t seed,
                                Activation activation = Activation::Tanh);

    int input_dim() const { return input_dim_; }
    int hidden() const { return hidden_; }
    int classes() const { return classes_; }
    Activation activation() const { return activation_; }

    std::vector<double>& w1() { return w1_; }
    std::vector<double>& b1() { return b1_; }
    std::vector<double>& w2() { return w2_; }
    std::vector<double>& b2() { return b2_; }
    const std::vector<double>& w1() const { return w1_; }
    const std::vector<double>& b1() const { return b1_; }
    const std::vector<double>& w2() const { return w2_; }
    const std::vector<double>& b2() const { return b2_; }

    std::vector<double> logits(const std::vector<double>& input) const;
    int predict(const std::vector<double>& input) const;

    // -log softmax(logits)[label], computed via logsumexp.
    double loss(const std::vector<double>& input, int label) const;

    // d loss / d input; what PGD ascends on.
    std::vector<double> input_gradient(const std::vector<double>& input, int label) const;

    ParamGradients param_gradients(const std::vector<double>& input, int label) const;
    ParamGradients zero_gradients() const;
    void apply_update(const ParamGradients& grad, double scale);

    bool operator==(const MlpModel& other) const = default;

    // Checkpoint: layer sizes + activation + row-major parameter arrays.
    std::string to_json() const;
    static MlpModel from_json(const std::string& text);
    static MlpModel load(const std::string& path);

  private:
    struct Forward {
        std::vector<double> hidden_pre, hidden_act, logits, probs;
        double loss = 0.0;
    };
    Forward forward(const std::vector<double>& input, int label) const;

    int input_dim_, hidden_, classes_;
    Activation activation_;
    std::vector<double> w1_;  // hidden_ x input_dim_
    std::vector<double> b1_;  // hidden_
    std::vector<double> w2_;  // classes_ x hidden_
    std::vector<double> b2_;  // classes_
};

}  // namespace evp
