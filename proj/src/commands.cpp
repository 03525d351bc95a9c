#include "evp/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>

#include <nlohmann/json.hpp>

#include "evp/attacklab.hpp"
#include "evp/metrics.hpp"
#include "evp/numformat.hpp"
#include "evp/sampling.hpp"
#include "evp/version.hpp"

namespace evp::cli {

using nlohmann::json;

namespace {

class Stopwatch {
  public:
    std::int64_t elapsed_ms() const {
        auto now = std::chrono::steady_clock::now();
        return std::chrono::duration_cast<std::chrono::milliseconds>(now - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_manifest(const std::string& command, const json& params,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, std::uint64_t seed,
                    const Stopwatch& watch, const json& extra = json::object()) {
    json manifest = {{"command", command},
                     {"params", params},
                     {"inputs", inputs},
                     {"outputs", outputs},
                     {"seed", seed},
                     {"toolkit_version", kToolkitVersion},
                     {"duration_ms", watch.elapsed_ms()}};
    if (!extra.empty()) manifest["extra"] = extra;
    if (outputs.empty()) return;
    write_text_file_atomic(outputs.front() + ".manifest.json", manifest.dump(2) + "\n");
}

int report_error(const Error& e, std::ostream& log) {
    log << "error: " << e.what() << "\n";
    return e.code() == errc::diverged_loss ? kExitNumeric : kExitConfig;
}

std::string curve_label(const std::string& path) {
    std::filesystem::path p(path);
    return p.stem().string();
}

PgdConfig attack_template(NormKind norm, double step, int iterations, std::uint64_t seed,
                          bool random_start) {
    PgdConfig cfg;
    cfg.norm = norm;
    cfg.step = step;
    cfg.iterations = iterations;
    cfg.seed = seed;
    cfg.random_start = random_start;
    return cfg;
}

}  // namespace

int cmd_dataset(const DatasetArgs& args, std::ostream& log) {
    Stopwatch watch;
    try {
        GeneratorSpec spec;
        if (args.kind == "gaussian_blobs" || args.kind == "blobs")
            spec.kind = DataKind::GaussianBlobs;
        else if (args.kind == "concentric_rings" || args.kind == "rings")
            spec.kind = DataKind::ConcentricRings;
        else
            fail(errc::invalid_spec, "unknown dataset kind '" + args.kind + "'");
        spec.classes = args.classes;
        spec.per_class = args.per_class;
        spec.center_scale = args.center_scale;
        spec.noise = args.noise;
        spec.seed = args.seed;
        spec.check();
        write_text_file_atomic(args.out, spec.to_json());
        json params = {{"kind", data_kind_name(spec.kind)}, {"classes", spec.classes},
                       {"per_class", spec.per_class},       {"center_scale", spec.center_scale},
                       {"noise", spec.noise},               {"seed", spec.seed},
                       {"out", args.out}};
        write_manifest("dataset", params, {}, {args.out}, args.seed, watch);
        log << "wrote " << args.out << "\n";
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, log);
    }
}

int cmd_train(const TrainArgs& args, std::ostream& log) {
    Stopwatch watch;
    try {
        GeneratorSpec spec = load_generator_spec(args.data_path);
        Dataset data = generate_dataset(spec, Split::Train);

        TrainConfig cfg;
        cfg.epochs = args.epochs;
        cfg.batch_size = args.batch_size;
        cfg.learning_rate = args.learning_rate;
        cfg.hidden = args.hidden;
        cfg.seed = args.seed;
        if (args.adv_epsilon > 0.0) {
            PgdConfig adv;
            adv.norm = NormKind::L2;
            adv.epsilon = args.adv_epsilon;
            adv.step = args.adv_step > 0.0 ? args.adv_step : args.adv_epsilon / 10.0;
            adv.iterations = args.adv_iterations;
            cfg.adversarial = adv;
        }
        MlpModel model = train(args.init_seed, data, cfg);
        write_text_file_atomic(args.out, model.to_json());

        json params = {{"data", args.data_path},
                       {"epochs", args.epochs},
                       {"batch_size", args.batch_size},
                       {"learning_rate", args.learning_rate},
                       {"hidden", args.hidden},
                       {"seed", args.seed},
                       {"init_seed", args.init_seed},
                       {"adv_epsilon", args.adv_epsilon},
                       {"adv_step", args.adv_step},
                       {"adv_iterations", args.adv_iterations},
                       {"out", args.out}};
        json extra = {{"train_accuracy", accuracy(model, data)}};
        write_manifest("train", params, {args.data_path}, {args.out}, args.seed, watch, extra);
        log << "wrote " << args.out << " (train accuracy "
            << format_double(accuracy(model, data)) << ")\n";
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, log);
    }
}

int cmd_attack(const AttackArgs& args, std::ostream& log) {
    Stopwatch watch;
    try {
        // step < grid spacing is checked before any model or data loading.
        if (!(args.step < args.delta))
            fail(errc::step_size_violation,
                 "PGD step " + format_double(args.step) +
                     " must be smaller than the sampling interval " + format_double(args.delta));
        MlpModel model = MlpModel::load(args.model_path);
        GeneratorSpec spec = load_generator_spec(args.data_path);
        Dataset test_data = generate_dataset(spec, Split::Test);
        SamplingPlan plan = uniform_grid(args.max_epsilon, args.delta);
        PgdConfig tmpl = attack_template(parse_norm(args.norm), args.step, args.iterations,
                                         args.seed, args.random_start);
        PerturbationCurve curve =
            budget_sweep(model, test_data, plan, tmpl, curve_label(args.model_path));
        write_text_file_atomic(args.out, curve.to_csv());

        json params = {{"model", args.model_path},
                       {"data", args.data_path},
                       {"norm", norm_name(tmpl.norm)},
                       {"max_epsilon", args.max_epsilon},
                       {"delta", args.delta},
                       {"step", args.step},
                       {"iterations", args.iterations},
                       {"seed", args.seed},
                       {"random_start", args.random_start},
                       {"out", args.out}};
        // The CSV contract has no column for attained norms; they ride here.
        json norms = json::array();
        for (const CurvePoint& p : curve.points())
            norms.push_back(p.mean_actual_norm ? json(*p.mean_actual_norm) : json());
        json extra = {{"mean_actual_norms", norms}};
        write_manifest("attack", params, {args.model_path, args.data_path}, {args.out}, args.seed,
                       watch, extra);
        log << "wrote " << args.out << " (" << curve.size() << " budgets)\n";
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, log);
    }
}

namespace {

std::vector<std::pair<double, double>> parse_intervals(const std::vector<std::string>& specs) {
    std::vector<std::pair<double, double>> intervals;
    for (const std::string& s : specs) {
        auto colon = s.find(':');
        if (colon == std::string::npos)
            fail(errc::parse_error, "interval '" + s + "' must be inf:sup");
        auto inf = parse_double(s.substr(0, colon));
        auto sup = parse_double(s.substr(colon + 1));
        if (!inf || !sup) fail(errc::parse_error, "interval '" + s + "' has unparseable bounds");
        intervals.push_back({*inf, *sup});
    }
    return intervals;
}

}  // namespace

int cmd_metric(const MetricArgs& args, std::ostream& out, std::ostream& log) {
    Stopwatch watch;
    try {
        PerturbationCurve curve = load_curve_file(args.curve_path);

        std::optional<ViabilityThreshold> tau;
        if (args.tau_from_cohens_d) {
            if (args.classes < 2)
                fail(errc::invalid_argument, "--tau-from-cohens-d needs --classes");
            tau = cohens_d_threshold(args.classes, args.cohens_d);
        } else if (args.tau) {
            tau = ViabilityThreshold(*args.tau);
        }
        auto need_tau = [&]() -> ViabilityThreshold {
            if (!tau) fail(errc::invalid_argument, "metric '" + args.metric + "' needs --tau");
            return *tau;
        };

        MetricReport report;
        if (args.metric == "evp") {
            report = evp_trapezoid(curve, need_tau());
        } else if (args.metric == "evp-refined") {
            report = evp_refined(curve, need_tau());
        } else if (args.metric == "interval-sum") {
            report = interval_sum_robustness(curve, need_tau(), parse_intervals(args.intervals));
        } else if (args.metric == "ara") {
            if (args.classes < 2) fail(errc::invalid_argument, "ara needs --classes");
            report = ara(curve, args.classes);
        } else if (args.metric == "roby") {
            if (!(args.bound > 0.0)) fail(errc::invalid_argument, "roby needs --bound");
            report = roby(curve, need_tau(), args.bound);
        } else if (args.metric == "adv-accuracy") {
            if (!args.epsilon) fail(errc::invalid_argument, "adv-accuracy needs --epsilon");
            report = adversarial_accuracy_report(curve, *args.epsilon);
        } else {
            fail(errc::invalid_argument, "unknown metric '" + args.metric + "'");
        }
        if (args.tau_from_cohens_d) {
            report.params["cohens_d"] = args.cohens_d;
            report.params["classes"] = static_cast<std::int64_t>(args.classes);
        }

        std::string text = report.to_json();
        out << text;
        if (!args.out.empty()) {
            write_text_file_atomic(args.out, text);
            json params = {{"metric", args.metric},
                           {"curve", args.curve_path},
                           {"tau", tau ? json(tau->tau) : json()},
                           {"tau_from_cohens_d", args.tau_from_cohens_d},
                           {"cohens_d", args.cohens_d},
                           {"classes", args.classes},
                           {"bound", args.bound},
                           {"epsilon", args.epsilon ? json(*args.epsilon) : json()},
                           {"intervals", args.intervals},
                           {"out", args.out}};
            write_manifest("metric", params, {args.curve_path}, {args.out}, 0, watch);
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, log);
    }
}

int cmd_compare(const CompareArgs& args, std::ostream& log) {
    Stopwatch watch;
    try {
        if (args.curve_paths.empty()) fail(errc::invalid_argument, "need at least one curve");
        if (!(args.tau_step > 0.0)) fail(errc::invalid_argument, "tau step must be > 0");
        if (!(args.tau_min > 0.0) || args.tau_max > 1.0 || args.tau_min > args.tau_max)
            fail(errc::invalid_argument, "tau range must satisfy 0 < min <= max <= 1");

        std::vector<PerturbationCurve> curves;
        std::vector<std::string> labels;
        for (const std::string& path : args.curve_paths) {
            curves.push_back(load_curve_file(path));
            labels.push_back(curve_label(path));
        }

        std::string csv = "model,metric,tau,value,best_model\n";
        int steps = static_cast<int>(std::floor((args.tau_max - args.tau_min) / args.tau_step +
                                                1e-9));
        for (int i = 0; i <= steps; ++i) {
            double tau = args.tau_min + i * args.tau_step;
            std::vector<double> values;
            for (const PerturbationCurve& curve : curves)
                values.push_back(evp_trapezoid(curve, ViabilityThreshold(tau)).value);
            std::size_t best = 0;
            for (std::size_t c = 1; c < values.size(); ++c)
                if (values[c] > values[best]) best = c;
            for (std::size_t c = 0; c < curves.size(); ++c) {
                csv += labels[c];
                csv += ",EVP,";
                csv += format_double(tau);
                csv += ',';
                csv += format_double(values[c]);
                csv += ',';
                csv += labels[best];
                csv += '\n';
            }
        }
        write_text_file_atomic(args.out, csv);
        json params = {{"curves", args.curve_paths},
                       {"tau_min", args.tau_min},
                       {"tau_max", args.tau_max},
                       {"tau_step", args.tau_step},
                       {"out", args.out}};
        write_manifest("compare", params, args.curve_paths, {args.out}, 0, watch);
        log << "wrote " << args.out << "\n";
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, log);
    }
}

int cmd_converge(const ConvergeArgs& args, std::ostream& log) {
    Stopwatch watch;
    try {
        if (args.deltas.empty()) fail(errc::invalid_argument, "need --deltas");
        MlpModel model = MlpModel::load(args.model_path);
        GeneratorSpec spec = load_generator_spec(args.data_path);
        Dataset test_data = generate_dataset(spec, Split::Test);
        PgdConfig tmpl =
            attack_template(parse_norm(args.norm), args.step, args.iterations, args.seed, false);

        SweepFn sweep = [&](const SamplingPlan& plan) {
            return budget_sweep(model, test_data, plan, tmpl, curve_label(args.model_path));
        };
        ConvergenceReport report =
            convergence_study(sweep, ViabilityThreshold(args.tau), args.max_epsilon, args.deltas,
                              args.tolerance, args.step);
        write_text_file_atomic(args.out, report.to_csv());

        json params = {{"model", args.model_path},
                       {"data", args.data_path},
                       {"norm", args.norm},
                       {"max_epsilon", args.max_epsilon},
                       {"deltas", args.deltas},
                       {"tau", args.tau},
                       {"tolerance", args.tolerance},
                       {"step", args.step},
                       {"iterations", args.iterations},
                       {"seed", args.seed},
                       {"out", args.out}};
        json extra = {{"stable_at", report.stable_at ? json(*report.stable_at) : json()}};
        write_manifest("converge", params, {args.model_path, args.data_path}, {args.out},
                       args.seed, watch, extra);
        if (report.stable_at)
            log << "stable_at " << format_double(*report.stable_at) << "\n";
        else
            log << "no stable delta within tolerance\n";
        log << "wrote " << args.out << "\n";
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, log);
    }
}

int cmd_rerun(const std::string& manifest_path, std::ostream& out, std::ostream& log) {
    try {
        json manifest = json::parse(read_text_file(manifest_path), nullptr, false);
        if (manifest.is_discarded()) fail(errc::parse_error, "manifest does not parse");
        std::string command = manifest.at("command").get<std::string>();
        const json& p = manifest.at("params");

        if (command == "dataset") {
            DatasetArgs args;
            args.kind = p.at("kind").get<std::string>();
            args.classes = p.at("classes").get<int>();
            args.per_class = p.at("per_class").get<int>();
            args.center_scale = p.at("center_scale").get<double>();
            args.noise = p.at("noise").get<double>();
            args.seed = p.at("seed").get<std::uint64_t>();
            args.out = p.at("out").get<std::string>();
            return cmd_dataset(args, log);
        }
        if (command == "train") {
            TrainArgs args;
            args.data_path = p.at("data").get<std::string>();
            args.epochs = p.at("epochs").get<int>();
            args.batch_size = p.at("batch_size").get<int>();
            args.learning_rate = p.at("learning_rate").get<double>();
            args.hidden = p.at("hidden").get<int>();
            args.seed = p.at("seed").get<std::uint64_t>();
            args.init_seed = p.at("init_seed").get<std::uint64_t>();
            args.adv_epsilon = p.at("adv_epsilon").get<double>();
            args.adv_step = p.at("adv_step").get<double>();
            args.adv_iterations = p.at("adv_iterations").get<int>();
            args.out = p.at("out").get<std::string>();
            return cmd_train(args, log);
        }
        if (command == "attack") {
            AttackArgs args;
            args.model_path = p.at("model").get<std::string>();
            args.data_path = p.at("data").get<std::string>();
            args.norm = p.at("norm").get<std::string>();
            args.max_epsilon = p.at("max_epsilon").get<double>();
            args.delta = p.at("delta").get<double>();
            args.step = p.at("step").get<double>();
            args.iterations = p.at("iterations").get<int>();
            args.seed = p.at("seed").get<std::uint64_t>();
            args.random_start = p.at("random_start").get<bool>();
            args.out = p.at("out").get<std::string>();
            return cmd_attack(args, log);
        }
        if (command == "metric") {
            MetricArgs args;
            args.metric = p.at("metric").get<std::string>();
            args.curve_path = p.at("curve").get<std::string>();
            if (!p.at("tau").is_null()) args.tau = p.at("tau").get<double>();
            args.tau_from_cohens_d = p.at("tau_from_cohens_d").get<bool>();
            args.cohens_d = p.at("cohens_d").get<double>();
            args.classes = p.at("classes").get<int>();
            args.bound = p.at("bound").get<double>();
            if (!p.at("epsilon").is_null()) args.epsilon = p.at("epsilon").get<double>();
            args.intervals = p.at("intervals").get<std::vector<std::string>>();
            args.out = p.at("out").get<std::string>();
            if (args.tau_from_cohens_d) args.tau.reset();
            return cmd_metric(args, out, log);
        }
        if (command == "compare") {
            CompareArgs args;
            args.curve_paths = p.at("curves").get<std::vector<std::string>>();
            args.tau_min = p.at("tau_min").get<double>();
            args.tau_max = p.at("tau_max").get<double>();
            args.tau_step = p.at("tau_step").get<double>();
            args.out = p.at("out").get<std::string>();
            return cmd_compare(args, log);
        }
        if (command == "converge") {
            ConvergeArgs args;
            args.model_path = p.at("model").get<std::string>();
            args.data_path = p.at("data").get<std::string>();
            args.norm = p.at("norm").get<std::string>();
            args.max_epsilon = p.at("max_epsilon").get<double>();
            args.deltas = p.at("deltas").get<std::vector<double>>();
            args.tau = p.at("tau").get<double>();
            args.tolerance = p.at("tolerance").get<double>();
            args.step = p.at("step").get<double>();
            args.iterations = p.at("iterations").get<int>();
            args.seed = p.at("seed").get<std::uint64_t>();
            args.out = p.at("out").get<std::string>();
            return cmd_converge(args, log);
        }
        fail(errc::parse_error, "manifest command '" + command + "' is not replayable");
    } catch (const Error& e) {
        return report_error(e, log);
    } catch (const json::exception& e) {
        log << "error: manifest: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace evp::cli
