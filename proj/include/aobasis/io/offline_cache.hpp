#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aobasis/reference.hpp"

namespace aobasis::io {

// On-disk container for OfflineConfigData:
//
//   line 1   "AOBASIS-OFFLINE\n"
//   line 2   one-line JSON header (schema_version, grid, a, n_funcs, metric, key)
//   payload  little-endian IEEE doubles: lambda1, lambda2, then m_a, s_a_b,
//            m_e, s_b as (int64 rows, int64 cols, column-major data)
//
// Doubles are written raw, so a load reproduces the stored values bit for bit.
inline constexpr const char* kOfflineMagic = "AOBASIS-OFFLINE";
inline constexpr int kOfflineSchemaVersion = 1;

inline std::string hex_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string offline_key(const Grid& grid, double a, int n_funcs, Metric metric) {
    std::ostringstream canon;
    canon << "v" << kOfflineSchemaVersion << "|xmax=" << hex_double(grid.x_max()) << "|ng=" << grid.size()
          << "|a=" << hex_double(a) << "|N=" << n_funcs << "|metric=" << to_string(metric);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(canon.str())));
    return buf;
}

namespace detail {

inline void write_raw(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void read_raw(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw NumericalFailure("offline cache: truncated payload");
}

inline void write_matrix(std::ostream& os, const Matrix& m) {
    const std::int64_t dims[2] = {m.rows(), m.cols()};
    write_raw(os, dims, sizeof(dims));
    write_raw(os, m.data(), sizeof(double) * m.size());
}

inline Matrix read_matrix(std::istream& is) {
    std::int64_t dims[2];
    read_raw(is, dims, sizeof(dims));
    if (dims[0] < 0 || dims[1] < 0 || dims[0] > 100000 || dims[1] > 100000)
        throw NumericalFailure("offline cache: corrupt matrix header");
    Matrix m(dims[0], dims[1]);
    read_raw(is, m.data(), sizeof(double) * m.size());
    return m;
}

}  // namespace detail

inline void write_offline(std::ostream& os, const Grid& grid, const OfflineConfigData& d) {
    nlohmann::json header = {
        {"schema_version", kOfflineSchemaVersion},
        {"x_max", grid.x_max()},
        {"n_points", grid.size()},
        {"a", d.a},
        {"a_hex", hex_double(d.a)},
        {"n_funcs", d.n_funcs},
        {"metric", std::string(to_string(d.metric))},
        {"key", offline_key(grid, d.a, d.n_funcs, d.metric)},
    };
    os << kOfflineMagic << '\n' << header.dump() << '\n';
    detail::write_raw(os, &d.lambda1, sizeof(double));
    detail::write_raw(os, &d.lambda2, sizeof(double));
    for (const Matrix* m : {&d.m_a, &d.s_a_b, &d.m_e, &d.s_b}) detail::write_matrix(os, *m);
}

struct OfflineHeader {
    double x_max = 0.0;
    int n_points = 0;
    double a = 0.0;
    int n_funcs = 0;
    Metric metric = Metric::L2;
    std::string key;
};

inline OfflineConfigData read_offline(std::istream& is, OfflineHeader* header_out = nullptr) {
    std::string magic;
    std::getline(is, magic);
    if (magic != kOfflineMagic) throw NumericalFailure("offline cache: bad magic");
    std::string line;
    std::getline(is, line);
    const auto header = nlohmann::json::parse(line);
    if (header.at("schema_version").get<int>() != kOfflineSchemaVersion)
        throw NumericalFailure("offline cache: unsupported schema version");
    OfflineConfigData d;
    d.a = std::strtod(header.at("a_hex").get<std::string>().c_str(), nullptr);
    d.n_funcs = header.at("n_funcs").get<int>();
    d.metric = metric_from_string(header.at("metric").get<std::string>());
    detail::read_raw(is, &d.lambda1, sizeof(double));
    detail::read_raw(is, &d.lambda2, sizeof(double));
    d.m_a = detail::read_matrix(is);
    d.s_a_b = detail::read_matrix(is);
    d.m_e = detail::read_matrix(is);
    d.s_b = detail::read_matrix(is);
    if (header_out) {
        header_out->x_max = header.at("x_max").get<double>();
        header_out->n_points = header.at("n_points").get<int>();
        header_out->a = d.a;
        header_out->n_funcs = d.n_funcs;
        header_out->metric = d.metric;
        header_out->key = header.at("key").get<std::string>();
    }
    return d;
}

// Directory of offline entries, one file per (grid, a, N, metric).
class OfflineCache {
public:
    explicit OfflineCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const noexcept { return dir_; }

    std::filesystem::path path_for(const Grid& grid, double a, int n_funcs, Metric metric) const {
        return dir_ / ("offline_" + offline_key(grid, a, n_funcs, metric) + ".bin");
    }

    // Creates the directory and checks that it is writable.
    void ensure_writable() const {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
            throw InvalidArgument("cache directory " + dir_.string() + " cannot be created");
        const auto probe = dir_ / ".write_probe";
        {
            std::ofstream f(probe);
            if (!f) throw InvalidArgument("cache directory " + dir_.string() + " is not writable");
        }
        std::filesystem::remove(probe, ec);
    }

    bool contains(const Grid& grid, double a, int n_funcs, Metric metric) const {
        return std::filesystem::exists(path_for(grid, a, n_funcs, metric));
    }

    // Returns the cached entry, computing and storing it on a miss. The
    // weight is not part of the entry and is set from the argument.
    OfflineConfigData load_or_build(const Grid& grid, double a, int n_funcs, Metric metric, double weight,
                                    bool* computed = nullptr) {
        const auto path = path_for(grid, a, n_funcs, metric);
        if (std::filesystem::exists(path)) {
            std::ifstream f(path, std::ios::binary);
            OfflineHeader h;
            OfflineConfigData d = read_offline(f, &h);
            if (h.key == offline_key(grid, a, n_funcs, metric) && h.n_points == grid.size()) {
                d.weight = weight;
                if (computed) *computed = false;
                return d;
            }
        }
        OfflineConfigData d = build_offline_config(grid, a, n_funcs, metric, weight);
        store(grid, d, path);
        ++built_;
        if (computed) *computed = true;
        return d;
    }

    std::vector<OfflineConfigData> load_or_build(const Grid& grid, const Measure& measure, int n_funcs,
                                                 Metric metric) {
        measure.validate();
        std::vector<OfflineConfigData> out;
        for (const auto& p : measure.points)
            out.push_back(load_or_build(grid, p.a, n_funcs, metric, measure.mass * p.w));
        return out;
    }

    int built() const noexcept { return built_; }

private:
    void store(const Grid& grid, const OfflineConfigData& d, const std::filesystem::path& path) const {
        ensure_writable();
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw InvalidArgument("cannot write cache file " + tmp.string());
            write_offline(f, grid, d);
            if (!f) throw InvalidArgument("failed writing cache file " + tmp.string());
        }
        std::filesystem::rename(tmp, path);
    }

    std::filesystem::path dir_;
    int built_ = 0;
};

}  // namespace aobasis::io
