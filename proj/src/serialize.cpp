#include "cpdfs/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpdfs {

using nlohmann::json;

json model_to_json(const CpdModel& model, const FitReport& report) {
    json doc;
    doc["rank"] = model.rank;
    doc["lambda"] = model.lambda;
    doc["factors"] = model.factors;  // row-major per factor
    doc["dims"] = model.dims;
    doc["label_index"] = model.label_index;
    doc["seed"] = report.seed;
    doc["fit_report"] = {
        {"kl_trace", report.kl_trace},
        {"iterations_run", report.iterations_run},
        {"termination_reason", report.termination_reason},
        {"seed", report.seed},
        {"clamp_events", report.clamp_events},
    };
    return doc;
}

std::pair<CpdModel, FitReport> model_from_json(const json& doc) {
    CpdModel m;
    m.rank = doc.at("rank").get<int>();
    m.lambda = doc.at("lambda").get<std::vector<double>>();
    m.factors = doc.at("factors").get<std::vector<std::vector<double>>>();
    m.dims = doc.at("dims").get<std::vector<int>>();
    m.label_index = doc.at("label_index").get<int>();
    FitReport r;
    if (doc.contains("fit_report")) {
        const json& fr = doc["fit_report"];
        r.kl_trace = fr.value("kl_trace", std::vector<double>{});
        r.iterations_run = fr.value("iterations_run", 0);
        r.termination_reason = fr.value("termination_reason", "");
        r.seed = fr.value("seed", std::uint64_t{0});
        r.clamp_events = fr.value("clamp_events", 0L);
    }
    return {std::move(m), std::move(r)};
}

json selection_to_json(const SelectionResult& result) {
    json steps = json::array();
    for (const auto& s : result.per_step)
        steps.push_back({{"candidates_evaluated", s.candidates_evaluated},
                         {"switch_mode", s.mode}});
    return json{{"order", result.order},
                {"gains", result.gains},
                {"final_value", result.final_value},
                {"strategy", result.strategy},
                {"entropy_mode", result.entropy_mode},
                {"seed", result.seed},
                {"evaluations", result.evaluations},
                {"per_step", steps}};
}

SelectionResult selection_from_json(const json& doc) {
    SelectionResult r;
    r.order = doc.at("order").get<std::vector<int>>();
    r.gains = doc.at("gains").get<std::vector<double>>();
    r.final_value = doc.at("final_value").get<double>();
    r.strategy = doc.value("strategy", "");
    r.entropy_mode = doc.value("entropy_mode", "");
    r.seed = doc.value("seed", std::uint64_t{0});
    r.evaluations = doc.value("evaluations", 0L);
    for (const auto& s : doc.value("per_step", json::array()))
        r.per_step.push_back({s.value("candidates_evaluated", 0), s.value("switch_mode", "")});
    return r;
}

json rank_cv_to_json(const RankCvResult& result) {
    json table = json::array();
    for (const auto& e : result.table)
        table.push_back({{"rank", e.rank},
                         {"mean_error", e.mean_error},
                         {"per_fold_errors", e.fold_errors}});
    return json{{"best_rank", result.best_rank}, {"table", table}};
}

json experiment_to_json(const ExperimentReport& report) {
    const auto& c = report.config;
    json runs = json::array();
    for (const auto& rec : report.per_run)
        runs.push_back({{"run", rec.run_index},
                        {"rank", rec.rank},
                        {"selection", selection_to_json(rec.selection)},
                        {"accuracy_by_K", rec.accuracy_by_k},
                        {"control_by_K", rec.control_by_k}});
    return json{{"config",
                 {{"train_fraction", c.split.train_fraction},
                  {"monte_carlo_runs", c.split.monte_carlo_runs},
                  {"ranks", c.ranks},
                  {"cv_folds", c.cv_folds},
                  {"K_max", c.k_max},
                  {"strategy", c.strategy == Strategy::Greedy      ? "greedy"
                               : c.strategy == Strategy::LazyGreedy ? "lazy"
                                                                    : "remodel"},
                  {"bins", c.bins},
                  {"mc_samples", c.mc_samples},
                  {"seed", c.seed}}},
                {"per_run", runs},
                {"mean_accuracy_by_K", report.mean_accuracy_by_k},
                {"std_by_K", report.std_by_k},
                {"random_control_by_K", report.mean_control_by_k}};
}

std::string experiment_to_tsv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "K\tmean_acc\tstd\tcontrol_acc\n";
    out.precision(17);
    for (std::size_t k = 0; k < report.mean_accuracy_by_k.size(); ++k)
        out << (k + 1) << '\t' << report.mean_accuracy_by_k[k] << '\t' << report.std_by_k[k]
            << '\t' << report.mean_control_by_k[k] << '\n';
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace cpdfs
