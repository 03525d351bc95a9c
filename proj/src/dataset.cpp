#include "evp/dataset.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "evp/curve.hpp"
#include "evp/rng.hpp"

namespace evp {

using nlohmann::json;

const char* data_kind_name(DataKind kind) {
    return kind == DataKind::GaussianBlobs ? "gaussian_blobs" : "concentric_rings";
}

const char* split_name(Split split) { return split == Split::Train ? "train" : "test"; }

void GeneratorSpec::check() const {
    if (classes < 2) fail(errc::invalid_spec, "need at least 2 classes");
    if (per_class < 1) fail(errc::invalid_spec, "need at least 1 sample per class");
    if (!(center_scale > 0.0)) fail(errc::invalid_spec, "center_scale must be > 0");
    if (noise < 0.0) fail(errc::invalid_spec, "noise must be >= 0");
}

std::string GeneratorSpec::to_json() const {
    json spec = {{"kind", data_kind_name(kind)}, {"seed", seed},
                 {"classes", classes},           {"per_class", per_class},
                 {"center_scale", center_scale}, {"noise", noise}};
    return spec.dump(2) + "\n";
}

GeneratorSpec GeneratorSpec::from_json(const std::string& text) {
    json spec = json::parse(text, nullptr, false);
    if (spec.is_discarded()) fail(errc::parse_error, "generator spec JSON does not parse");
    GeneratorSpec out;
    try {
        std::string kind = spec.at("kind").get<std::string>();
        if (kind == "gaussian_blobs")
            out.kind = DataKind::GaussianBlobs;
        else if (kind == "concentric_rings")
            out.kind = DataKind::ConcentricRings;
        else
            fail(errc::invalid_spec, "unknown dataset kind '" + kind + "'");
        out.seed = spec.at("seed").get<std::uint64_t>();
        out.classes = spec.at("classes").get<int>();
        out.per_class = spec.at("per_class").get<int>();
        out.center_scale = spec.at("center_scale").get<double>();
        out.noise = spec.at("noise").get<double>();
    } catch (const json::exception& e) {
        fail(errc::parse_error, std::string("generator spec: ") + e.what());
    }
    out.check();
    return out;
}

Dataset generate_dataset(const GeneratorSpec& spec, Split split) {
    spec.check();
    Dataset data;
    data.classes = spec.classes;
    data.split = split;
    data.spec = spec;
    data.inputs.reserve(static_cast<std::size_t>(spec.classes) * spec.per_class);
    data.labels.reserve(data.inputs.capacity());

    Rng rng(mix_seed(spec.seed, split == Split::Train ? 1 : 2));
    const double two_pi = 6.283185307179586476925286766559;

    for (int c = 0; c < spec.classes; ++c) {
        double angle = two_pi * c / spec.classes;
        double cx = spec.center_scale * std::cos(angle);
        double cy = spec.center_scale * std::sin(angle);
        for (int i = 0; i < spec.per_class; ++i) {
            std::vector<double> x(2);
            if (spec.kind == DataKind::GaussianBlobs) {
                x[0] = cx + spec.noise * rng.gaussian();
                x[1] = cy + spec.noise * rng.gaussian();
            } else {
                double radius = spec.center_scale * (c + 1) + spec.noise * rng.gaussian();
                double theta = rng.uniform(0.0, two_pi);
                x[0] = radius * std::cos(theta);
                x[1] = radius * std::sin(theta);
            }
            data.inputs.push_back(std::move(x));
            data.labels.push_back(c);
        }
    }
    return data;
}

GeneratorSpec load_generator_spec(const std::string& path) {
    return GeneratorSpec::from_json(read_text_file(path));
}

}  // namespace evp
