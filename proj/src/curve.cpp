#include "evp/curve.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evp/numformat.hpp"

namespace evp {

using nlohmann::json;

const char* errc_name(errc code) {
    switch (code) {
        case errc::non_monotone_epsilon: return "NonMonotoneEpsilon";
        case errc::accuracy_out_of_range: return "AccuracyOutOfRange";
        case errc::missing_clean_point: return "MissingCleanPoint";
        case errc::too_few_points: return "TooFewPoints";
        case errc::out_of_domain: return "OutOfDomain";
        case errc::empty_interval: return "EmptyInterval";
        case errc::no_sample_in_interval: return "NoSampleInInterval";
        case errc::threshold_exceeds_one: return "ThresholdExceedsOne";
        case errc::bound_exceeds_curve: return "BoundExceedsCurve";
        case errc::budget_not_sampled: return "BudgetNotSampled";
        case errc::invalid_delta: return "InvalidDelta";
        case errc::budget_too_small: return "BudgetTooSmall";
        case errc::step_size_violation: return "StepSizeViolation";
        case errc::invalid_spec: return "InvalidSpec";
        case errc::diverged_loss: return "DivergedLoss";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::io_error: return "IoError";
        case errc::parse_error: return "ParseError";
    }
    return "UnknownError";
}

const char* norm_name(NormKind norm) { return norm == NormKind::L2 ? "L2" : "Linf"; }

NormKind parse_norm(const std::string& text) {
    if (text == "L2" || text == "l2") return NormKind::L2;
    if (text == "Linf" || text == "linf") return NormKind::Linf;
    fail(errc::parse_error, "unknown norm label '" + text + "' (expected L2 or Linf)");
}

const char* crossing_mode_name(CrossingMode mode) {
    return mode == CrossingMode::LastSample ? "LastSample" : "Interpolated";
}

PerturbationCurve PerturbationCurve::validate(std::vector<CurvePoint> points, NormKind norm,
                                              std::string source, std::string scale_note) {
    for (const CurvePoint& p : points) {
        if (!(p.accuracy >= 0.0) || !(p.accuracy <= 1.0))
            fail(errc::accuracy_out_of_range,
                 "accuracy " + format_double(p.accuracy) + " at epsilon " +
                     format_double(p.epsilon) + " outside [0, 1]");
        if (p.n_samples && *p.n_samples <= 0)
            fail(errc::accuracy_out_of_range,
                 "n_samples must be positive at epsilon " + format_double(p.epsilon));
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].epsilon > points[i - 1].epsilon))
            fail(errc::non_monotone_epsilon,
                 "epsilon " + format_double(points[i].epsilon) + " at row " + std::to_string(i) +
                     " does not increase past " + format_double(points[i - 1].epsilon));
    }
    if (points.empty() || points.front().epsilon != 0.0)
        fail(errc::missing_clean_point, "first point must sample the clean budget epsilon = 0");
    if (points.size() < 2)
        fail(errc::too_few_points, "a curve needs at least 2 points, got " +
                                       std::to_string(points.size()));

    PerturbationCurve curve;
    curve.points_ = std::move(points);
    curve.norm_ = norm;
    curve.source_ = std::move(source);
    curve.scale_note_ = std::move(scale_note);
    return curve;
}

PerturbationCurve PerturbationCurve::validate(
    const std::vector<std::pair<double, double>>& raw_points, NormKind norm, std::string source) {
    std::vector<CurvePoint> points;
    points.reserve(raw_points.size());
    for (auto [eps, acc] : raw_points) points.push_back({eps, acc, std::nullopt, std::nullopt});
    return validate(std::move(points), norm, std::move(source));
}

double PerturbationCurve::interpolate(double epsilon) const {
    if (epsilon < 0.0 || epsilon > max_epsilon())
        fail(errc::out_of_domain, "epsilon " + format_double(epsilon) +
                                      " outside sampled range [0, " +
                                      format_double(max_epsilon()) + "]");
    auto it = std::lower_bound(points_.begin(), points_.end(), epsilon,
                               [](const CurvePoint& p, double e) { return p.epsilon < e; });
    if (it != points_.end() && it->epsilon == epsilon) return it->accuracy;
    const CurvePoint& hi = *it;
    const CurvePoint& lo = *(it - 1);
    double t = (epsilon - lo.epsilon) / (hi.epsilon - lo.epsilon);
    return lo.accuracy + t * (hi.accuracy - lo.accuracy);
}

ViableRegion viability_frontier(const PerturbationCurve& curve, ViabilityThreshold tau,
                                CrossingMode mode) {
    const auto& pts = curve.points();
    ViableRegion region;
    region.crossing_mode = mode;

    // Index of the first sample below tau; ties (a == tau) count as viable.
    std::size_t first_below = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].accuracy < tau.tau) {
            first_below = i;
            break;
        }
    }
    for (std::size_t i = first_below; i < pts.size(); ++i) {
        if (pts[i].accuracy >= tau.tau) {
            region.discarded_viable_island = true;
            break;
        }
    }

    if (first_below == pts.size()) {
        region.d_tau = curve.max_epsilon();
        return region;
    }
    if (first_below == 0) {
        region.d_tau = 0.0;  // clean accuracy already below tau
        return region;
    }
    const CurvePoint& lo = pts[first_below - 1];
    const CurvePoint& hi = pts[first_below];
    if (mode == CrossingMode::LastSample) {
        region.d_tau = lo.epsilon;
    } else {
        // Solve a(x) = tau on the crossing segment; exact when tau hits a sample.
        double t = (lo.accuracy - tau.tau) / (lo.accuracy - hi.accuracy);
        region.d_tau = lo.epsilon + t * (hi.epsilon - lo.epsilon);
    }
    return region;
}

std::string PerturbationCurve::to_csv() const {
    bool with_counts =
        std::any_of(points_.begin(), points_.end(), [](const CurvePoint& p) { return bool(p.n_samples); });
    std::string out = with_counts ? "epsilon,accuracy,n_samples\n" : "epsilon,accuracy\n";
    for (const CurvePoint& p : points_) {
        out += format_double(p.epsilon);
        out += ',';
        out += format_double(p.accuracy);
        if (with_counts) {
            out += ',';
            out += p.n_samples ? std::to_string(*p.n_samples) : "";
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

PerturbationCurve PerturbationCurve::from_csv(const std::string& text, NormKind norm,
                                              std::string source) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(errc::parse_error, "empty curve CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool with_counts = false;
    if (line == "epsilon,accuracy,n_samples")
        with_counts = true;
    else if (line != "epsilon,accuracy")
        fail(errc::parse_error, "bad curve CSV header '" + line + "'");

    std::vector<CurvePoint> points;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != (with_counts ? 3u : 2u))
            fail(errc::parse_error, "row " + std::to_string(row) + ": wrong field count");
        auto eps = parse_double(fields[0]);
        auto acc = parse_double(fields[1]);
        if (!eps || !acc)
            fail(errc::parse_error, "row " + std::to_string(row) + ": unparseable real");
        CurvePoint p{*eps, *acc, std::nullopt, std::nullopt};
        if (with_counts && !fields[2].empty()) {
            auto n = parse_int(fields[2]);
            if (!n) fail(errc::parse_error, "row " + std::to_string(row) + ": bad n_samples");
            p.n_samples = *n;
        }
        points.push_back(p);
    }
    return validate(std::move(points), norm, std::move(source));
}

std::string PerturbationCurve::to_json() const {
    json points = json::array();
    for (const CurvePoint& p : points_) {
        json jp = {{"epsilon", p.epsilon}, {"accuracy", p.accuracy}};
        if (p.n_samples) jp["n_samples"] = *p.n_samples;
        if (p.mean_actual_norm) jp["mean_actual_norm"] = *p.mean_actual_norm;
        points.push_back(std::move(jp));
    }
    json envelope = {{"norm_label", norm_name(norm_)}, {"source", source_}, {"points", points}};
    if (!scale_note_.empty()) envelope["scale_note"] = scale_note_;
    return envelope.dump(2) + "\n";
}

PerturbationCurve PerturbationCurve::from_json(const std::string& text) {
    json envelope = json::parse(text, nullptr, false);
    if (envelope.is_discarded()) fail(errc::parse_error, "curve JSON does not parse");
    try {
        std::vector<CurvePoint> points;
        for (const json& jp : envelope.at("points")) {
            CurvePoint p;
            p.epsilon = jp.at("epsilon").get<double>();
            p.accuracy = jp.at("accuracy").get<double>();
            if (jp.contains("n_samples")) p.n_samples = jp["n_samples"].get<std::int64_t>();
            if (jp.contains("mean_actual_norm"))
                p.mean_actual_norm = jp["mean_actual_norm"].get<double>();
            points.push_back(p);
        }
        return validate(std::move(points), parse_norm(envelope.at("norm_label").get<std::string>()),
                        envelope.at("source").get<std::string>(),
                        envelope.value("scale_note", ""));
    } catch (const json::exception& e) {
        fail(errc::parse_error, std::string("curve JSON envelope: ") + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io_error, "cannot write " + tmp);
        out << content;
        if (!out.flush()) fail(errc::io_error, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(errc::io_error, "rename " + tmp + " -> " + path + ": " + ec.message());
}

PerturbationCurve load_curve_file(const std::string& path) {
    std::string text = read_text_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return PerturbationCurve::from_json(text);
    return PerturbationCurve::from_csv(text);
}

}  // namespace evp
