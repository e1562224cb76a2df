#pragma once

#include <json.hpp>

#include "lemll/lemll.hpp"
#include "lemll/metrics.hpp"

namespace lemll {

// Flat snake_case objects. Undefined metrics serialize as null.
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const ReconstructionReport& report);
nlohmann::json to_json(const LemllConfig& config);
nlohmann::json to_json(const TrainingReport& report);

// Inverse of to_json(LemllConfig); absent keys keep their defaults.
LemllConfig config_from_json(const nlohmann::json& j);

}  // namespace lemll
