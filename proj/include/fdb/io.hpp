// Serialization: CSV path ensembles, JSONL lift records, a binary rough-path
// container with a JSON header, and deterministic formatting helpers.
#pragma once

#include "fdb/grid_path.hpp"
#include "fdb/lift.hpp"
#include "fdb/rough_path.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace fdb {

// %.17g formatting; round-trips doubles exactly and keeps output byte-stable.
std::string fmt_double(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const nlohmann::json& config);

// One row per grid time; columns t, p<i>_c<j>.
void write_ensemble_csv(const std::string& path, const std::vector<GridPath>& paths);
std::vector<GridPath> read_ensemble_csv(const std::string& path, double horizon, int level,
                                        int dim, int n_paths);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

nlohmann::json lift_record_to_json(const LiftRecord& rec, int path_index);
void write_lift_records_jsonl(const std::string& path, const std::vector<LiftRecord>& records);

// Binary container: magic "FDBR", u32 version, u32 header length, JSON header
// {dim, degree, level, horizon}, then the per-interval blocks as raw doubles.
void write_rough_path(const std::string& path, const RoughPathGrid& x);
RoughPathGrid read_rough_path(const std::string& path);

}  // namespace fdb
