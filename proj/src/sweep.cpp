#include "evp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

#include "evp/numformat.hpp"
#include "evp/rng.hpp"

namespace evp {

namespace {

// Parallel map over [0, n) in fixed-size chunks, reduced in chunk order.
// Chunk boundaries do not depend on the thread count, so the reduction is
// bit-identical no matter how the chunks get scheduled.
template <typename Partial, typename ChunkFn>
std::vector<Partial> run_chunks(std::size_t n, const ChunkFn& fn) {
    constexpr std::size_t kChunk = 64;
    std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<Partial> partials(n_chunks);
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers <= 1 || n_chunks <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            partials[c] = fn(c * kChunk, std::min(n, (c + 1) * kChunk));
        return partials;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            partials[c] = fn(c * kChunk, std::min(n, (c + 1) * kChunk));
        }
    };
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < workers; ++w)
        futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) f.get();
    return partials;
}

struct BudgetPartial {
    std::size_t correct = 0;
    double norm_sum = 0.0;
};

}  // namespace

PerturbationCurve budget_sweep(const MlpModel& model, const Dataset& test_data,
                               const SamplingPlan& plan, const PgdConfig& pgd_template,
                               const std::string& source) {
    if (test_data.size() == 0) fail(errc::invalid_spec, "empty test set");
    double spacing = plan.min_spacing();
    if (!(pgd_template.step < spacing))
        fail(errc::step_size_violation,
             "PGD step " + format_double(pgd_template.step) +
                 " must be smaller than the plan's grid spacing " + format_double(spacing));

    const std::size_t n = test_data.size();
    std::vector<CurvePoint> points;
    points.reserve(plan.epsilons.size());

    for (std::size_t b = 0; b < plan.epsilons.size(); ++b) {
        double epsilon = plan.epsilons[b];
        auto partials = run_chunks<BudgetPartial>(n, [&](std::size_t begin, std::size_t end) {
            BudgetPartial part;
            for (std::size_t i = begin; i < end; ++i) {
                const auto& x = test_data.inputs[i];
                int label = test_data.labels[i];
                if (epsilon == 0.0) {
                    if (model.predict(x) == label) ++part.correct;
                    continue;
                }
                PgdConfig attack = pgd_template;
                attack.epsilon = epsilon;
                attack.seed = mix_seed(mix_seed(pgd_template.seed, 0xB000 + b), i);
                std::vector<double> adv = pgd_attack(model, x, label, attack);
                if (model.predict(adv) == label) ++part.correct;
                std::vector<double> delta(x.size());
                for (std::size_t k = 0; k < x.size(); ++k) delta[k] = adv[k] - x[k];
                part.norm_sum += norm_of(pgd_template.norm, delta);
            }
            return part;
        });
        BudgetPartial total;
        for (const BudgetPartial& part : partials) {
            total.correct += part.correct;
            total.norm_sum += part.norm_sum;
        }
        CurvePoint point;
        point.epsilon = epsilon;
        point.accuracy = static_cast<double>(total.correct) / static_cast<double>(n);
        point.n_samples = static_cast<std::int64_t>(n);
        point.mean_actual_norm = epsilon == 0.0 ? 0.0 : total.norm_sum / static_cast<double>(n);
        points.push_back(point);
    }
    return PerturbationCurve::validate(std::move(points), pgd_template.norm, source);
}

void MinPerturbationConfig::check() const {
    if (!(step > 0.0)) fail(errc::invalid_argument, "search step must be > 0");
    if (!(max_budget > 0.0)) fail(errc::invalid_argument, "max budget must be > 0");
    if (pgd_step < 0.0) fail(errc::invalid_argument, "pgd_step must be >= 0");
    if (pgd_step > 0.0 && !(pgd_step < step))
        fail(errc::invalid_argument, "pgd_step must stay below the first search budget");
}

MetricReport mean_min_perturbation(const MlpModel& model, const Dataset& test_data,
                                   const MinPerturbationConfig& cfg, const std::string& source) {
    cfg.check();
    if (test_data.size() == 0) fail(errc::invalid_spec, "empty test set");
    double attack_step = cfg.pgd_step > 0.0 ? cfg.pgd_step : cfg.step / 4.0;

    struct Partial {
        double distance_sum = 0.0;
        std::size_t evaluated = 0;
        std::size_t censored = 0;
        std::size_t excluded = 0;
    };
    auto partials = run_chunks<Partial>(test_data.size(), [&](std::size_t begin, std::size_t end) {
        Partial part;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& x = test_data.inputs[i];
            int label = test_data.labels[i];
            if (model.predict(x) != label) {
                // distance undefined at 0; excluded from the mean
                ++part.excluded;
                continue;
            }
            ++part.evaluated;
            bool flipped = false;
            for (std::size_t k = 1;; ++k) {
                double budget = cfg.step * static_cast<double>(k);
                bool last = budget >= cfg.max_budget;
                if (last) budget = cfg.max_budget;
                PgdConfig attack;
                attack.norm = cfg.norm;
                attack.epsilon = budget;
                attack.step = attack_step;
                attack.iterations = cfg.iterations;
                attack.seed = mix_seed(mix_seed(cfg.seed, 0xD000 + i), k);
                std::vector<double> adv = pgd_attack(model, x, label, attack);
                if (model.predict(adv) != label) {
                    part.distance_sum += budget;
                    flipped = true;
                    break;
                }
                if (last) break;
            }
            if (!flipped) {
                part.distance_sum += cfg.max_budget;
                ++part.censored;
            }
        }
        return part;
    });
    Partial total;
    for (const Partial& part : partials) {
        total.distance_sum += part.distance_sum;
        total.evaluated += part.evaluated;
        total.censored += part.censored;
        total.excluded += part.excluded;
    }

    MetricReport report;
    report.metric = MetricName::MeanMinPerturbation;
    report.value = total.evaluated == 0
                       ? 0.0
                       : total.distance_sum / static_cast<double>(total.evaluated);
    report.curve_source = source;
    report.params["norm"] = std::string(norm_name(cfg.norm));
    report.params["step"] = cfg.step;
    report.params["max_budget"] = cfg.max_budget;
    report.params["evaluated"] = static_cast<std::int64_t>(total.evaluated);
    report.params["censored"] = static_cast<std::int64_t>(total.censored);
    report.params["excluded_misclassified"] = static_cast<std::int64_t>(total.excluded);
    return report;
}

}  // namespace evp
