// evplab: train tiny classifiers, run PGD budget sweeps, and score the
// resulting accuracy-perturbation curves with viability-aware metrics.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evp/commands.hpp"
#include "evp/version.hpp"

int main(int argc, char** argv) {
    using namespace evp::cli;

    CLI::App app{"expected-viable-performance robustness toolkit"};
    app.set_version_flag("--version", evp::kToolkitVersion);
    app.require_subcommand(1);

    DatasetArgs dataset_args;
    auto* dataset = app.add_subcommand("dataset", "write a synthetic dataset generator spec");
    dataset->add_option("--kind", dataset_args.kind, "gaussian_blobs or concentric_rings");
    dataset->add_option("--classes", dataset_args.classes, "number of classes");
    dataset->add_option("--per-class", dataset_args.per_class, "samples per class per split");
    dataset->add_option("--center-scale", dataset_args.center_scale, "class center radius");
    dataset->add_option("--noise", dataset_args.noise, "noise scale");
    dataset->add_option("--seed", dataset_args.seed, "generator seed")->envname("EVPLAB_SEED");
    dataset->add_option("--out", dataset_args.out, "output spec path")->required();

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train an MLP on a dataset spec");
    train->add_option("--data", train_args.data_path, "dataset spec JSON")->required();
    train->add_option("--epochs", train_args.epochs, "SGD epochs");
    train->add_option("--batch", train_args.batch_size, "batch size");
    train->add_option("--lr", train_args.learning_rate, "learning rate");
    train->add_option("--hidden", train_args.hidden, "hidden layer width");
    train->add_option("--seed", train_args.seed, "shuffle/attack seed")->envname("EVPLAB_SEED");
    train->add_option("--init-seed", train_args.init_seed, "weight init seed");
    train->add_option("--adv-eps", train_args.adv_epsilon,
                      "adversarial training budget (L2); 0 trains naturally");
    train->add_option("--adv-step", train_args.adv_step, "PGD step during training");
    train->add_option("--adv-iters", train_args.adv_iterations, "PGD iterations during training");
    train->add_option("--out", train_args.out, "model checkpoint path")->required();

    AttackArgs attack_args;
    auto* attack = app.add_subcommand("attack", "budget sweep producing a curve CSV");
    attack->add_option("--model", attack_args.model_path, "model checkpoint")->required();
    attack->add_option("--data", attack_args.data_path, "dataset spec JSON")->required();
    attack->add_option("--norm", attack_args.norm, "l2 or linf");
    attack->add_option("--max-eps", attack_args.max_epsilon, "largest budget");
    attack->add_option("--delta", attack_args.delta, "sampling interval");
    attack->add_option("--step", attack_args.step, "PGD step size");
    attack->add_option("--iters", attack_args.iterations, "PGD iterations (0 = auto)");
    attack->add_option("--seed", attack_args.seed, "attack seed")->envname("EVPLAB_SEED");
    attack->add_flag("--random-start", attack_args.random_start, "random start inside the ball");
    attack->add_option("--out", attack_args.out, "curve CSV path")->required();

    MetricArgs metric_args;
    auto* metric = app.add_subcommand("metric", "score a curve with one metric");
    metric->add_option("name", metric_args.metric,
                       "evp | evp-refined | interval-sum | ara | roby | adv-accuracy")
        ->required();
    metric->add_option("--curve", metric_args.curve_path, "curve CSV or JSON")->required();
    metric->add_option("--tau", metric_args.tau, "viability threshold in (0, 1]");
    metric->add_flag("--tau-from-cohens-d", metric_args.tau_from_cohens_d,
                     "derive tau from --classes and --cohens-d");
    metric->add_option("--cohens-d", metric_args.cohens_d, "target effect size");
    metric->add_option("--classes", metric_args.classes, "number of classes");
    metric->add_option("--bound", metric_args.bound, "plausible bound b for roby");
    metric->add_option("--epsilon", metric_args.epsilon, "sampled budget for adv-accuracy");
    metric->add_option("--interval", metric_args.intervals,
                       "inf:sup interval for interval-sum (repeatable)");
    metric->add_option("--out", metric_args.out, "also write the report JSON here");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "EVP per (curve, tau) with best-model column");
    compare->add_option("--curves", compare_args.curve_paths, "curve files")
        ->required()
        ->expected(-1);
    compare->add_option("--tau-min", compare_args.tau_min, "sweep start");
    compare->add_option("--tau-max", compare_args.tau_max, "sweep end");
    compare->add_option("--tau-step", compare_args.tau_step, "sweep step");
    compare->add_option("--out", compare_args.out, "comparison CSV path")->required();

    ConvergeArgs converge_args;
    auto* converge = app.add_subcommand("converge", "trapezoid convergence study over deltas");
    converge->add_option("--model", converge_args.model_path, "model checkpoint")->required();
    converge->add_option("--data", converge_args.data_path, "dataset spec JSON")->required();
    converge->add_option("--norm", converge_args.norm, "l2 or linf");
    converge->add_option("--max-eps", converge_args.max_epsilon, "largest budget");
    converge->add_option("--deltas", converge_args.deltas, "decreasing sampling intervals")
        ->required()
        ->delimiter(',');
    converge->add_option("--tau", converge_args.tau, "viability threshold");
    converge->add_option("--tolerance", converge_args.tolerance, "relative-change tolerance");
    converge->add_option("--step", converge_args.step, "PGD step size");
    converge->add_option("--iters", converge_args.iterations, "PGD iterations (0 = auto)");
    converge->add_option("--seed", converge_args.seed, "attack seed")->envname("EVPLAB_SEED");
    converge->add_option("--out", converge_args.out, "report CSV path")->required();

    std::string manifest_path;
    auto* rerun = app.add_subcommand("rerun", "replay a command from its manifest");
    rerun->add_option("manifest", manifest_path, "manifest JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (dataset->parsed()) return cmd_dataset(dataset_args, std::cerr);
    if (train->parsed()) return cmd_train(train_args, std::cerr);
    if (attack->parsed()) return cmd_attack(attack_args, std::cerr);
    if (metric->parsed()) return cmd_metric(metric_args, std::cout, std::cerr);
    if (compare->parsed()) return cmd_compare(compare_args, std::cerr);
    if (converge->parsed()) return cmd_converge(converge_args, std::cerr);
    if (rerun->parsed()) return cmd_rerun(manifest_path, std::cout, std::cerr);
    return kExitConfig;
}
