#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpdfs/errors.hpp"
#include "cpdfs/experiment.hpp"
#include "cpdfs/serialize.hpp"
#include "cpdfs/verify.hpp"

namespace {

using namespace cpdfs;
using nlohmann::json;

struct Options {
    std::string data, schema, model, out, tsv_out, selection;
    int rank = 5;
    std::vector<int> ranks;
    int budget = 10;
    int bins = 5;
    int folds = 5;
    int runs = 10;
    int max_iterations = 500;
    double tolerance = 1e-6;
    double train_fraction = 0.70;
    std::string strategy = "greedy";
    std::string entropy = "auto";
    std::string metric = "hamming";
    std::size_t samples = 5000;
    std::uint64_t seed = 0;
    int threads = 1;
    bool strict_deterministic = false;
    int verify_trials = 20;
};

EntropyMode parse_entropy(const std::string& s) {
    if (s == "exact") return EntropyMode::Exact;
    if (s == "mc") return EntropyMode::MonteCarlo;
    if (s == "auto") return EntropyMode::Auto;
    throw CLI::ValidationError("--entropy must be exact|mc|auto");
}

Strategy parse_strategy(const std::string& s) {
    if (s == "greedy") return Strategy::Greedy;
    if (s == "lazy") return Strategy::LazyGreedy;
    if (s == "remodel") return Strategy::Remodeling;
    throw CLI::ValidationError("--strategy must be greedy|lazy|remodel");
}

DiscreteDataset load_full_dataset(const Options& opt) {
    Schema schema = Schema::from_json_file(opt.schema);
    RawTable table = ingest_csv(opt.data, schema);
    std::vector<std::size_t> all_rows(table.rows);
    for (std::size_t i = 0; i < table.rows; ++i) all_rows[i] = i;
    return discretize_equal_width(table, opt.bins, all_rows);
}

void emit(const Options& opt, const json& doc) {
    std::string text = doc.dump(2) + "\n";
    if (opt.out.empty())
        std::cout << text;
    else
        write_text_file(opt.out, text);
}

int cmd_fit(const Options& opt) {
    DiscreteDataset dataset = load_full_dataset(opt);
    FitConfig cfg;
    cfg.rank = opt.rank;
    cfg.max_iterations = opt.max_iterations;
    cfg.relative_kl_tolerance = opt.tolerance;
    cfg.seed = opt.seed;
    auto [model, report] = em_fit(build_empirical_pmf(dataset), cfg);
    emit(opt, model_to_json(model, report));
    return 0;
}

int cmd_select(const Options& opt) {
    SelectionOptions sel;
    sel.entropy = parse_entropy(opt.entropy);
    sel.mc_samples = opt.samples;
    sel.seed = opt.seed;
    Strategy strategy = parse_strategy(opt.strategy);

    SelectionResult result;
    if (strategy == Strategy::Remodeling) {
        if (opt.data.empty() || opt.schema.empty())
            throw CLI::ValidationError("remodel strategy needs --data and --schema");
        DiscreteDataset dataset = load_full_dataset(opt);
        FitConfig cfg;
        cfg.max_iterations = opt.max_iterations;
        cfg.relative_kl_tolerance = opt.tolerance;
        result = remodeling_select(dataset, opt.budget, opt.rank, cfg, opt.seed, sel);
    } else {
        if (opt.model.empty()) throw CLI::ValidationError("--model is required");
        auto [model, report] = model_from_json(json::parse(read_text_file(opt.model)));
        model.validate(1e-9);
        result = strategy == Strategy::LazyGreedy ? lazy_greedy_select(model, opt.budget, sel)
                                                  : greedy_select(model, opt.budget, sel);
    }
    emit(opt, selection_to_json(result));
    return 0;
}

int cmd_cv_rank(const Options& opt) {
    DiscreteDataset dataset = load_full_dataset(opt);
    FitConfig base;
    base.max_iterations = opt.max_iterations;
    base.relative_kl_tolerance = opt.tolerance;
    std::vector<int> ranks = opt.ranks.empty() ? std::vector<int>{5, 10, 15, 20, 30} : opt.ranks;
    emit(opt, rank_cv_to_json(cross_validate_rank(dataset, ranks, opt.folds, opt.seed, base)));
    return 0;
}

int cmd_evaluate(const Options& opt) {
    Schema schema = Schema::from_json_file(opt.schema);
    RawTable table = ingest_csv(opt.data, schema);
    SelectionResult sel = selection_from_json(json::parse(read_text_file(opt.selection)));

    SplitSpec split_spec{opt.train_fraction, opt.runs, opt.seed};
    json runs = json::array();
    for (int r = 0; r < opt.runs; ++r) {
        auto [train_idx, test_idx] = split_indices(table.rows, split_spec, r);
        DiscreteDataset coded = discretize_equal_width(table, opt.bins, train_idx);
        DiscreteDataset train = coded.select_rows(train_idx);
        DiscreteDataset test = coded.select_rows(test_idx);
        FeatureSubset subset;
        int k = std::min<int>(opt.budget, static_cast<int>(sel.order.size()));
        subset.indices.assign(sel.order.begin(), sel.order.begin() + k);
        KnnMetric metric = opt.metric == "manhattan" ? KnnMetric::Manhattan : KnnMetric::Hamming;
        double acc = accuracy(knn_classify(train, test, subset, metric), test.labels);
        runs.push_back({{"run", r}, {"accuracy", acc}});
    }
    double mean = 0.0;
    for (const auto& r : runs) mean += r["accuracy"].get<double>();
    emit(opt, json{{"per_run", runs}, {"mean_accuracy", mean / opt.runs}});
    return 0;
}

int cmd_experiment(const Options& opt) {
    Schema schema = Schema::from_json_file(opt.schema);
    RawTable table = ingest_csv(opt.data, schema);
    ExperimentConfig cfg;
    cfg.split = SplitSpec{opt.train_fraction, opt.runs, opt.seed};
    cfg.ranks = opt.ranks.empty() ? std::vector<int>{opt.rank} : opt.ranks;
    cfg.cv_folds = opt.folds;
    cfg.k_max = opt.budget;
    cfg.strategy = parse_strategy(opt.strategy);
    cfg.entropy = parse_entropy(opt.entropy);
    cfg.mc_samples = opt.samples;
    cfg.bins = opt.bins;
    cfg.fit.max_iterations = opt.max_iterations;
    cfg.fit.relative_kl_tolerance = opt.tolerance;
    cfg.metric = opt.metric == "manhattan" ? KnnMetric::Manhattan : KnnMetric::Hamming;
    cfg.seed = opt.seed;
    cfg.threads = opt.strict_deterministic ? 1 : opt.threads;
    ExperimentReport report = run_experiment(table, cfg);
    emit(opt, experiment_to_json(report));
    if (!opt.tsv_out.empty()) write_text_file(opt.tsv_out, experiment_to_tsv(report));
    return 0;
}

int cmd_verify(const Options& opt) {
    VerifyOptions vopt;
    vopt.seed = opt.seed;
    vopt.trials = opt.verify_trials;
    std::vector<VerifyCheck> checks;
    if (!opt.model.empty()) {
        auto [model, report] = model_from_json(json::parse(read_text_file(opt.model)));
        checks = verify_model(model, vopt);
    } else {
        checks = verify_random_models(vopt);
    }
    json doc = json::array();
    bool all_pass = true;
    for (const auto& c : checks) {
        doc.push_back({{"check", c.name}, {"pass", c.passed}, {"detail", c.detail}});
        all_pass = all_pass && c.passed;
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name
                  << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    }
    emit(opt, json{{"checks", doc}, {"all_pass", all_pass}});
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank joint-PMF feature selection toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", opt.seed, "root RNG seed");
        cmd->add_option("--out", opt.out, "output JSON path (stdout when omitted)");
        cmd->add_option("--threads", opt.threads, "worker cap for parallel sections");
        cmd->add_flag("--strict-deterministic", opt.strict_deterministic,
                      "force sequential execution and summation order");
    };
    auto add_data = [&](CLI::App* cmd, bool required) {
        auto* d = cmd->add_option("--data", opt.data, "input CSV with header row");
        auto* s = cmd->add_option("--schema", opt.schema, "JSON column-kind schema");
        if (required) {
            d->required();
            s->required();
        }
        cmd->add_option("--bins", opt.bins, "equal-width bins for continuous columns");
    };

    CLI::App* fit = app.add_subcommand("fit", "fit a CPD model to a dataset");
    add_data(fit, true);
    fit->add_option("--rank", opt.rank, "CPD rank F");
    fit->add_option("--max-iters", opt.max_iterations, "EM iteration cap");
    fit->add_option("--tol", opt.tolerance, "relative KL tolerance");
    add_common(fit);

    CLI::App* select = app.add_subcommand("select", "greedy feature selection");
    select->add_option("--model", opt.model, "fitted model JSON");
    add_data(select, false);
    select->add_option("--rank", opt.rank, "refit rank (remodel strategy)");
    select->add_option("--budget", opt.budget, "number of features K")->required();
    select->add_option("--strategy", opt.strategy, "greedy|lazy|remodel");
    select->add_option("--entropy", opt.entropy, "exact|mc|auto");
    select->add_option("--samples", opt.samples, "Monte-Carlo sample count T");
    add_common(select);

    CLI::App* cv = app.add_subcommand("cv-rank", "cross-validate the CPD rank");
    add_data(cv, true);
    cv->add_option("--ranks", opt.ranks, "candidate ranks")->delimiter(',');
    cv->add_option("--folds", opt.folds, "CV folds");
    cv->add_option("--max-iters", opt.max_iterations, "EM iteration cap");
    add_common(cv);

    CLI::App* evaluate = app.add_subcommand("evaluate", "1-NN accuracy of a selection");
    add_data(evaluate, true);
    evaluate->add_option("--selection", opt.selection, "selection JSON")->required();
    evaluate->add_option("--budget", opt.budget, "prefix length K to evaluate");
    evaluate->add_option("--runs", opt.runs, "Monte-Carlo split runs");
    evaluate->add_option("--train-fraction", opt.train_fraction, "train split fraction");
    evaluate->add_option("--metric", opt.metric, "hamming|manhattan");
    add_common(evaluate);

    CLI::App* experiment = app.add_subcommand("experiment", "full selection protocol");
    add_data(experiment, true);
    experiment->add_option("--ranks", opt.ranks, "candidate ranks (CV when several)")
        ->delimiter(',');
    experiment->add_option("--rank", opt.rank, "fixed rank when --ranks is omitted");
    experiment->add_option("--folds", opt.folds, "CV folds");
    experiment->add_option("--budget", opt.budget, "maximum K");
    experiment->add_option("--strategy", opt.strategy, "greedy|lazy|remodel");
    experiment->add_option("--entropy", opt.entropy, "exact|mc|auto");
    experiment->add_option("--samples", opt.samples, "Monte-Carlo sample count T");
    experiment->add_option("--runs", opt.runs, "Monte-Carlo split runs");
    experiment->add_option("--train-fraction", opt.train_fraction, "train split fraction");
    experiment->add_option("--metric", opt.metric, "hamming|manhattan");
    experiment->add_option("--max-iters", opt.max_iterations, "EM iteration cap");
    experiment->add_option("--tsv", opt.tsv_out, "flat TSV output path");
    add_common(experiment);

    CLI::App* verify = app.add_subcommand("verify", "run the structural check suite");
    verify->add_option("--model", opt.model, "model JSON to check (random models otherwise)");
    verify->add_option("--trials", opt.verify_trials, "random models to test");
    verify->add_option("--samples", opt.samples, "Monte-Carlo sample count T");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage / configuration error
    }

    try {
        if (fit->parsed()) return cmd_fit(opt);
        if (select->parsed()) return cmd_select(opt);
        if (cv->parsed()) return cmd_cv_rank(opt);
        if (evaluate->parsed()) return cmd_evaluate(opt);
        if (experiment->parsed()) return cmd_experiment(opt);
        if (verify->parsed()) return cmd_verify(opt);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;  // runtime / numerical failure
    }
    return 0;
}
