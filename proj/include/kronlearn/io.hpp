#pragma once

#include "kronlearn/solver.hpp"
#include "kronlearn/synth.hpp"
#include "kronlearn/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace kronlearn::io {

using json = nlohmann::json;

// Shortest exact round-trip decimal form of a double ("%.17g" trimmed).
std::string format_double(double v);

// --- graph files ---------------------------------------------------------
// CSV with header "i,j,weight", one row per pair with weight > 0, 1-based,
// i > j, plus a JSON sidecar {"p": <int>} next to it (same path with the
// .csv suffix replaced by .json).

void write_graph(const std::string& csv_path, const WeightVector& wv);
WeightVector read_graph(const std::string& csv_path);

// --- dataset files -------------------------------------------------------
// CSV matrix, one row per sample, p1*p2 columns, no header; JSON sidecar
// {"p1","p2","n","seed","model1","model2","kind"}.

struct DatasetMeta {
    int p1 = 0;
    int p2 = 0;
    int n = 0;
    std::uint64_t seed = 0;
    std::string model1;
    std::string model2;
    ProductKind kind = ProductKind::Kronecker;
};

void write_dataset(const std::string& csv_path, const Dataset& ds,
                   const std::string& model1, const std::string& model2);
Dataset read_dataset(const std::string& csv_path, DatasetMeta* meta_out = nullptr);

// --- solver config / state ----------------------------------------------

json solver_config_to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const json& j);
json solver_state_to_json(const SolverState& state);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

// Replaces a trailing ".csv" with ".json" (appends ".json" otherwise).
std::string sidecar_path(const std::string& csv_path);

// Throws IoError if `path` exists and `force` is false.
void refuse_overwrite(const std::string& path, bool force);

bool file_exists(const std::string& path);

}  // namespace kronlearn::io
