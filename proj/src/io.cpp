#include "kronlearn/io.hpp"

#include "kronlearn/graphrep.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace kronlearn::io {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("malformed number '" + s + "' in " + where);
    }
}

long parse_long(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("malformed integer '" + s + "' in " + where);
    }
}

}  // namespace

std::string format_double(double v) {
    // 15 digits suffice for most values and keep files readable; 17 always
    // round-trips
    for (int prec : {15, 16}) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_graph(const std::string& csv_path, const WeightVector& wv) {
    wv.validate();
    std::ofstream out = open_output(csv_path);
    out << "i,j,weight\n";
    std::int64_t m = 0;
    for (int j = 1; j <= wv.p; ++j) {
        for (int i = j + 1; i <= wv.p; ++i, ++m) {
            if (wv.w[m] > 0.0) {
                out << i << ',' << j << ',' << format_double(wv.w[m]) << '\n';
            }
        }
    }
    if (!out) throw IoError("failed writing '" + csv_path + "'");
    json sidecar;
    sidecar["p"] = wv.p;
    write_json_file(sidecar_path(csv_path), sidecar);
}

WeightVector read_graph(const std::string& csv_path) {
    const json sidecar = read_json_file(sidecar_path(csv_path));
    if (!sidecar.contains("p") || !sidecar["p"].is_number_integer()) {
        throw ValidationError("graph sidecar " + sidecar_path(csv_path) +
                              ": missing integer field 'p'");
    }
    const int p = sidecar["p"].get<int>();
    if (p < 2) throw ValidationError("graph sidecar: p must be >= 2");

    std::ifstream in = open_input(csv_path);
    std::string line;
    if (!std::getline(in, line) || line != "i,j,weight") {
        throw ValidationError("graph file " + csv_path + ": expected header 'i,j,weight'");
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(num_pairs(p));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = csv_path + ":" + std::to_string(line_no);
        if (fields.size() != 3) throw ValidationError(where + ": expected 3 fields");
        const long i = parse_long(fields[0], where);
        const long j = parse_long(fields[1], where);
        const double weight = parse_double(fields[2], where);
        if (i <= j) throw ValidationError(where + ": requires i > j");
        if (j < 1 || i > p) throw ValidationError(where + ": node index out of range");
        if (!(weight > 0.0)) throw ValidationError(where + ": weight must be > 0");
        const std::int64_t m = pair_index(static_cast<int>(i), static_cast<int>(j), p) - 1;
        if (w[m] != 0.0) {
            throw ValidationError(where + ": duplicate pair (" + fields[0] + "," + fields[1] + ")");
        }
        w[m] = weight;
    }
    return WeightVector(p, std::move(w));
}

void write_dataset(const std::string& csv_path, const Dataset& ds,
                   const std::string& model1, const std::string& model2) {
    ds.validate();
    std::ofstream out = open_output(csv_path);
    const int p = ds.spec.p();
    for (int k = 0; k < ds.n; ++k) {
        for (int c = 0; c < p; ++c) {
            if (c) out << ',';
            out << format_double(ds.samples(k, c));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing '" + csv_path + "'");
    json sidecar;
    sidecar["p1"] = ds.spec.p1;
    sidecar["p2"] = ds.spec.p2;
    sidecar["n"] = ds.n;
    sidecar["seed"] = ds.seed;
    sidecar["model1"] = model1;
    sidecar["model2"] = model2;
    sidecar["kind"] = to_string(ds.spec.kind);
    write_json_file(sidecar_path(csv_path), sidecar);
}

Dataset read_dataset(const std::string& csv_path, DatasetMeta* meta_out) {
    const std::string sc_path = sidecar_path(csv_path);
    const json sidecar = read_json_file(sc_path);
    DatasetMeta meta;
    try {
        meta.p1 = sidecar.at("p1").get<int>();
        meta.p2 = sidecar.at("p2").get<int>();
        meta.n = sidecar.at("n").get<int>();
        meta.seed = sidecar.at("seed").get<std::uint64_t>();
        meta.model1 = sidecar.at("model1").get<std::string>();
        meta.model2 = sidecar.at("model2").get<std::string>();
        meta.kind = product_kind_from_string(sidecar.at("kind").get<std::string>());
    } catch (const json::exception& e) {
        throw ValidationError("dataset sidecar " + sc_path + ": " + e.what());
    }
    Dataset ds;
    ds.spec.p1 = meta.p1;
    ds.spec.p2 = meta.p2;
    ds.spec.kind = meta.kind;
    ds.spec.validate();
    ds.n = meta.n;
    ds.seed = meta.seed;
    const int p = ds.spec.p();
    ds.samples.resize(meta.n, p);

    std::ifstream in = open_input(csv_path);
    std::string line;
    int row = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (row >= meta.n) {
            throw ValidationError(csv_path + ": more rows than sidecar n=" +
                                  std::to_string(meta.n));
        }
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != p) {
            throw ValidationError(csv_path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(p) + " columns, got " +
                                  std::to_string(fields.size()));
        }
        for (int c = 0; c < p; ++c) {
            ds.samples(row, c) =
                parse_double(fields[c], csv_path + ":" + std::to_string(line_no));
        }
        ++row;
    }
    if (row != meta.n) {
        throw ValidationError(csv_path + ": found " + std::to_string(row) +
                              " rows but sidecar says n=" + std::to_string(meta.n));
    }
    if (meta_out) *meta_out = meta;
    return ds;
}

json solver_config_to_json(const SolverConfig& config) {
    json j;
    j["alpha1"] = config.alpha1;
    j["alpha2"] = config.alpha2;
    j["eta0"] = config.eta0;
    j["backtrack"] = config.backtrack;
    j["tol_inner"] = config.tol_inner;
    j["tol_outer"] = config.tol_outer;
    j["max_inner"] = config.max_inner;
    j["max_outer"] = config.max_outer;
    j["kind"] = to_string(config.kind);
    return j;
}

SolverConfig solver_config_from_json(const json& j) {
    SolverConfig c;
    try {
        if (j.contains("alpha1")) c.alpha1 = j["alpha1"].get<double>();
        if (j.contains("alpha2")) c.alpha2 = j["alpha2"].get<double>();
        if (j.contains("eta0")) c.eta0 = j["eta0"].get<double>();
        if (j.contains("backtrack")) c.backtrack = j["backtrack"].get<double>();
        if (j.contains("tol_inner")) c.tol_inner = j["tol_inner"].get<double>();
        if (j.contains("tol_outer")) c.tol_outer = j["tol_outer"].get<double>();
        if (j.contains("max_inner")) c.max_inner = j["max_inner"].get<int>();
        if (j.contains("max_outer")) c.max_outer = j["max_outer"].get<int>();
        if (j.contains("kind")) c.kind = product_kind_from_string(j["kind"].get<std::string>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("solver config: ") + e.what());
    }
    c.validate();
    return c;
}

json solver_state_to_json(const SolverState& state) {
    json j;
    j["p1"] = state.w1.p;
    j["p2"] = state.w2.p;
    j["w1"] = std::vector<double>(state.w1.w.data(), state.w1.w.data() + state.w1.w.size());
    j["w2"] = std::vector<double>(state.w2.w.data(), state.w2.w.data() + state.w2.w.size());
    j["objective_trace"] = state.objective_trace;
    j["outer_sweeps"] = state.outer_sweeps;
    j["converged"] = state.converged;
    j["termination_reason"] = to_string(state.termination_reason);
    j["message"] = state.message;
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in = open_input(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse JSON file '" + path + "': " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string sidecar_path(const std::string& csv_path) {
    if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv") {
        return csv_path.substr(0, csv_path.size() - 4) + ".json";
    }
    return csv_path + ".json";
}

void refuse_overwrite(const std::string& path, bool force) {
    if (!force && file_exists(path)) {
        throw IoError("refusing to overwrite existing '" + path + "' (use --force)");
    }
}

bool file_exists(const std::string& path) {
    std::error_code ec;
    return std::filesystem::exists(path, ec);
}

}  // namespace kronlearn::io
