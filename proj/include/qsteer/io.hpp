#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qsteer/disperse.hpp"
#include "qsteer/engine.hpp"
#include "qsteer/findim.hpp"
#include "qsteer/ladder.hpp"
#include "qsteer/model.hpp"
#include "qsteer/pipeline.hpp"

namespace qsteer::io {

using nlohmann::json;

// Complex values serialize as [re, im] pairs; doubles print with enough
// digits to round-trip exactly.

json to_json(const model::ModelSpec& spec);
model::ModelSpec model_from_json(const json& j);

json to_json(const model::QuantumState& psi);
model::QuantumState state_from_json(const json& j);

/// Ordered blocks of {u, dt} records with a repeat count; a flat
/// {"segments": [...]} form is accepted on input as a single block.
json to_json(const engine::ControlSchedule& sched);
engine::ControlSchedule schedule_from_json(const json& j);

json to_json(const ladder::SteeringReport& rep);
json to_json(const disperse::DispersalResult& res);
json to_json(const pipeline::SmallTimePlan& plan);
json to_json(const pipeline::VerifiedRun& run);
json to_json(const pipeline::DiameterSweepResult& res);
json to_json(const model::BNormReport& rep);
json to_json(const findim::MatrixPair& pair);
findim::MatrixPair matrix_pair_from_json(const json& j);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

/// %.17g formatting for CSV bodies (byte-stable across runs).
std::string format_double(double x);

}  // namespace qsteer::io
