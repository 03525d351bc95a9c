#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evp/errors.hpp"

namespace evp {

enum class DataKind { GaussianBlobs, ConcentricRings };
enum class Split { Train, Test };

const char* data_kind_name(DataKind kind);
const char* split_name(Split split);

// Everything needed to regenerate a dataset deterministically. Train and test
// splits derive independent streams from the one seed.
struct GeneratorSpec {
    DataKind kind = DataKind::GaussianBlobs;
    std::uint64_t seed = 0;
    int classes = 2;
    int per_class = 100;
    // Blobs: class centers sit on a circle of this radius (C=2 gives (+-s, 0)).
    // Rings: class c has mean radius center_scale * (c + 1).
    double center_scale = 1.0;
    double noise = 0.3;

    void check() const;

    std::string to_json() const;
    static GeneratorSpec from_json(const std::string& text);
};

// 2-D labelled point cloud, the desk-scale stand-in for an image test set.
struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
    int classes = 2;
    Split split = Split::Train;
    GeneratorSpec spec;

    std::size_t size() const { return inputs.size(); }
    int dim() const { return inputs.empty() ? 0 : static_cast<int>(inputs.front().size()); }
};

Dataset generate_dataset(const GeneratorSpec& spec, Split split);

GeneratorSpec load_generator_spec(const std::string& path);

}  // namespace evp
