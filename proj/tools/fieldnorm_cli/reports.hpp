#pragma once

// JSON renderings of the core result types. Reals pass through round_real
// so reports diff cleanly; NaN becomes null.

#include <map>
#include <string>

#include <json.hpp>

#include "fieldnorm/bias_eval.hpp"
#include "fieldnorm/corpus.hpp"
#include "fieldnorm/diagnostics.hpp"
#include "fieldnorm/source_norm.hpp"
#include "fieldnorm/synthgen.hpp"
#include "fieldnorm/target_norm.hpp"

namespace fieldnorm::cli {

nlohmann::json real(double value);
nlohmann::json real(const std::optional<double>& value);

nlohmann::json to_json(const LoadDiagnostics& d);
nlohmann::json to_json(const BuildReport& r);
nlohmann::json to_json(const CitingStats& s);
nlohmann::json to_json(const FieldStatsResult& r);
nlohmann::json to_json(const NullModel& m);
nlohmann::json to_json(const BiasReport& r);
nlohmann::json to_json(const Rq1Report& r);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const SynthReport& r);

}  // namespace fieldnorm::cli
