#pragma once

#include <string>

#include "cpdfs/em.hpp"
#include "cpdfs/experiment.hpp"
#include "cpdfs/model.hpp"
#include "cpdfs/selection.hpp"

#include "json.hpp"

namespace cpdfs {

nlohmann::json model_to_json(const CpdModel& model, const FitReport& report);
std::pair<CpdModel, FitReport> model_from_json(const nlohmann::json& doc);

nlohmann::json selection_to_json(const SelectionResult& result);
SelectionResult selection_from_json(const nlohmann::json& doc);

nlohmann::json rank_cv_to_json(const RankCvResult& result);
nlohmann::json experiment_to_json(const ExperimentReport& report);
std::string experiment_to_tsv(const ExperimentReport& report);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace cpdfs
