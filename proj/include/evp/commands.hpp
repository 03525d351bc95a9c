#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evp/curve.hpp"

namespace evp::cli {

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct DatasetArgs {
    std::string kind = "gaussian_blobs";
    int classes = 2;
    int per_class = 100;
    double center_scale = 1.0;
    double noise = 0.3;
    std::uint64_t seed = 0;
    std::string out;
};

struct TrainArgs {
    std::string data_path;
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 0.1;
    int hidden = 16;
    std::uint64_t seed = 0;
    std::uint64_t init_seed = 0;
    // adversarial training is active when adv_epsilon > 0
    double adv_epsilon = 0.0;
    double adv_step = 0.0;  // 0 means adv_epsilon / 10
    int adv_iterations = 0;
    std::string out;
};

struct AttackArgs {
    std::string model_path;
    std::string data_path;
    std::string norm = "l2";
    double max_epsilon = 1.0;
    double delta = 0.1;
    double step = 0.005;
    int iterations = 0;
    std::uint64_t seed = 0;
    bool random_start = false;
    std::string out;
};

struct MetricArgs {
    std::string metric;  // evp | evp-refined | interval-sum | ara | roby | adv-accuracy
    std::string curve_path;
    std::optional<double> tau;
    bool tau_from_cohens_d = false;
    double cohens_d = 0.5;
    int classes = 0;
    double bound = 0.0;
    std::optional<double> epsilon;
    std::vector<std::string> intervals;  // "inf:sup" pairs for interval-sum
    std::string out;  // optional; report JSON always goes to stdout
};

struct CompareArgs {
    std::vector<std::string> curve_paths;
    double tau_min = 0.05;
    double tau_max = 0.99;
    double tau_step = 0.01;
    std::string out;
};

struct ConvergeArgs {
    std::string model_path;
    std::string data_path;
    std::string norm = "l2";
    double max_epsilon = 2.0;
    std::vector<double> deltas;
    double tau = 0.5;
    double tolerance = 0.01;
    double step = 0.005;
    int iterations = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_dataset(const DatasetArgs& args, std::ostream& log);
int cmd_train(const TrainArgs& args, std::ostream& log);
int cmd_attack(const AttackArgs& args, std::ostream& log);
int cmd_metric(const MetricArgs& args, std::ostream& out, std::ostream& log);
int cmd_compare(const CompareArgs& args, std::ostream& log);
int cmd_converge(const ConvergeArgs& args, std::ostream& log);

// Re-run a command from its manifest; outputs are reproduced bit-exactly.
int cmd_rerun(const std::string& manifest_path, std::ostream& out, std::ostream& log);

}  // namespace evp::cli
