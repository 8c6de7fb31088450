#include "fdb/io.hpp"

#include "fdb/errors.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fdb {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const nlohmann::json& config) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)fnv1a64(config.dump()));
    return buf;
}

void write_ensemble_csv(const std::string& path, const std::vector<GridPath>& paths) {
    if (paths.empty()) throw std::invalid_argument("write_ensemble_csv: empty ensemble");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "t";
    for (size_t p = 0; p < paths.size(); ++p)
        for (int c = 0; c < paths[p].dim; ++c) out << ",p" << p << "_c" << c;
    out << "\n";
    const GridPath& first = paths.front();
    for (int i = 0; i <= first.intervals(); ++i) {
        out << fmt_double(first.time(i));
        for (const auto& w : paths)
            for (int c = 0; c < w.dim; ++c) out << "," << fmt_double(w.values(i, c));
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<GridPath> read_ensemble_csv(const std::string& path, double horizon, int level,
                                        int dim, int n_paths) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty ensemble file: " + path);
    std::vector<GridPath> paths(n_paths, GridPath(dim, horizon, level));
    for (int i = 0; i <= (1 << level); ++i) {
        if (!std::getline(in, line)) throw IoError("truncated ensemble file: " + path);
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // time column
        for (int p = 0; p < n_paths; ++p)
            for (int c = 0; c < dim; ++c) {
                if (!std::getline(ss, cell, ','))
                    throw IoError("short row in ensemble file: " + path);
                paths[p].values(i, c) = std::stod(cell);
            }
    }
    return paths;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

nlohmann::json lift_record_to_json(const LiftRecord& rec, int path_index) {
    nlohmann::json j;
    j["path_index"] = path_index;
    j["levels"] = rec.levels;
    j["distances"] = rec.distances;
    j["c_hat"] = rec.c_hat;
    j["kappa_hat"] = rec.kappa_hat;
    j["fit_r2"] = rec.fit_r2;
    j["fit_valid"] = rec.fit_valid;
    j["converged"] = rec.converged;
    j["exact"] = rec.exact;
    j["final_level"] = rec.final_level;
    return j;
}

void write_lift_records_jsonl(const std::string& path, const std::vector<LiftRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (size_t i = 0; i < records.size(); ++i)
        out << lift_record_to_json(records[i], (int)i).dump() << "\n";
    if (!out) throw IoError("write failed: " + path);
}

namespace {
constexpr std::uint32_t kMagic = 0x52424446;  // "FDBR"
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t get_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
}  // namespace

void write_rough_path(const std::string& path, const RoughPathGrid& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    nlohmann::json header;
    header["dim"] = x.dim();
    header["degree"] = x.degree();
    header["level"] = x.level();
    header["horizon"] = x.horizon();
    std::string hs = header.dump();
    put_u32(out, kMagic);
    put_u32(out, kVersion);
    put_u32(out, (std::uint32_t)hs.size());
    out.write(hs.data(), (std::streamsize)hs.size());
    for (const auto& b : x.increments()) {
        out.write(reinterpret_cast<const char*>(b.level1.data()),
                  (std::streamsize)(sizeof(double) * b.level1.size()));
        if (b.degree >= 2)
            out.write(reinterpret_cast<const char*>(b.level2.data()),
                      (std::streamsize)(sizeof(double) * b.level2.size()));
        if (b.degree >= 3)
            out.write(reinterpret_cast<const char*>(b.level3.data()),
                      (std::streamsize)(sizeof(double) * b.level3.size()));
    }
    if (!out) throw IoError("write failed: " + path);
}

RoughPathGrid read_rough_path(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    if (get_u32(in) != kMagic) throw IoError("not a rough-path container: " + path);
    if (get_u32(in) != kVersion) throw IoError("unsupported container version: " + path);
    std::uint32_t hlen = get_u32(in);
    std::string hs(hlen, '\0');
    in.read(hs.data(), hlen);
    nlohmann::json header = nlohmann::json::parse(hs);
    const int dim = header.at("dim"), degree = header.at("degree"), level = header.at("level");
    const double horizon = header.at("horizon");
    std::vector<GroupTensorD> blocks;
    blocks.reserve(1u << level);
    for (int i = 0; i < (1 << level); ++i) {
        GroupTensorD b(dim, degree);
        in.read(reinterpret_cast<char*>(b.level1.data()),
                (std::streamsize)(sizeof(double) * b.level1.size()));
        if (degree >= 2)
            in.read(reinterpret_cast<char*>(b.level2.data()),
                    (std::streamsize)(sizeof(double) * b.level2.size()));
        if (degree >= 3)
            in.read(reinterpret_cast<char*>(b.level3.data()),
                    (std::streamsize)(sizeof(double) * b.level3.size()));
        blocks.push_back(std::move(b));
    }
    if (!in) throw IoError("truncated rough-path container: " + path);
    return RoughPathGrid(dim, degree, level, horizon, std::move(blocks));
}

}  // namespace fdb
