#pragma once

#include <string>

#include "evp/dataset.hpp"
#include "evp/metrics.hpp"
#include "evp/mlp.hpp"
#include "evp/pgd.hpp"
#include "evp/sampling.hpp"

namespace evp {

// Attack the full test split at every budget of the plan. The epsilon = 0
// point is clean accuracy; every curve point carries the test-set size and the
// mean attained perturbation norm. Per-sample attacks run in parallel over
// fixed chunks with an ordered reduction, so results are bit-reproducible.
PerturbationCurve budget_sweep(const MlpModel& model, const Dataset& test_data,
                               const SamplingPlan& plan, const PgdConfig& pgd_template,
                               const std::string& source = "attacklab");

struct MinPerturbationConfig {
    NormKind norm = NormKind::L2;
    double step = 0.05;        // budget increment of the search
    double max_budget = 2.0;
    double pgd_step = 0.0;     // 0 means step / 4
    int iterations = 0;        // 0 means the PGD default per budget
    std::uint64_t seed = 0;

    void check() const;
};

// Grow the budget per point until the prediction flips; the first flipping
// budget is the recorded distance. Cleanly misclassified points are excluded;
// searches that exhaust max_budget record max_budget and count as censored.
MetricReport mean_min_perturbation(const MlpModel& model, const Dataset& test_data,
                                   const MinPerturbationConfig& cfg,
                                   const std::string& source = "attacklab");

}  // namespace evp
