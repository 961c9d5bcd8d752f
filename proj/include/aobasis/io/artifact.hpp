#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

#include "aobasis/criteria.hpp"
#include "aobasis/reference.hpp"

namespace aobasis::io {

inline constexpr const char* kToolVersion = "aobasis 0.1.0";
inline constexpr int kArtifactSchemaVersion = 1;

// An optimized (or Hermite baseline) basis together with everything needed
// to re-evaluate it.
struct BasisArtifact {
    Matrix r;
    int n_funcs = 0;
    int n_basis = 0;
    std::optional<CriterionKind> criterion;  // empty: Hermite baseline
    Measure measure;
    double x_max = 20.0;
    int n_points = 1999;
    double final_value = 0.0;
    int iterations = 0;
    bool converged = true;
    std::string tool_version = kToolVersion;

    Grid grid() const { return Grid(x_max, n_points); }

    std::string label() const {
        if (!criterion) return "HBS";
        switch (*criterion) {
            case CriterionKind::JA_L2: return "L2-OBS";
            case CriterionKind::JA_H1: return "H1-OBS";
            case CriterionKind::JE: return "E-OBS";
        }
        return "OBS";
    }
};

inline BasisArtifact hbs_artifact(int n_funcs, int n_basis, const Measure& measure, const Grid& grid) {
    BasisArtifact art;
    art.r = hbs_coefficients(n_funcs, n_basis);
    art.n_funcs = n_funcs;
    art.n_basis = n_basis;
    art.measure = measure;
    art.x_max = grid.x_max();
    art.n_points = grid.size();
    art.iterations = 0;
    return art;
}

inline nlohmann::json to_json(const BasisArtifact& art) {
    nlohmann::json j;
    j["schema_version"] = kArtifactSchemaVersion;
    j["tool_version"] = art.tool_version;
    j["label"] = art.label();
    j["criterion"] = art.criterion ? nlohmann::json(std::string(to_string(*art.criterion))) : nlohmann::json(nullptr);
    j["n_funcs"] = art.n_funcs;
    j["n_basis"] = art.n_basis;
    j["grid"] = {{"x_max", art.x_max}, {"n_points", art.n_points}};
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : art.measure.points) pts.push_back({p.a, p.w});
    j["measure"] = {{"points", pts}, {"mass", art.measure.mass}};
    j["final_value"] = art.final_value;
    j["iterations"] = art.iterations;
    j["converged"] = art.converged;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < art.r.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < art.r.cols(); ++k) row.push_back(art.r(i, k));
        rows.push_back(row);
    }
    j["R"] = rows;
    return j;
}

inline BasisArtifact artifact_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kArtifactSchemaVersion)
        throw InvalidArgument("artifact: unsupported schema_version");
    BasisArtifact art;
    art.tool_version = j.value("tool_version", "");
    if (!j.at("criterion").is_null()) art.criterion = criterion_from_string(j.at("criterion").get<std::string>());
    art.n_funcs = j.at("n_funcs").get<int>();
    art.n_basis = j.at("n_basis").get<int>();
    art.x_max = j.at("grid").at("x_max").get<double>();
    art.n_points = j.at("grid").at("n_points").get<int>();
    for (const auto& p : j.at("measure").at("points")) art.measure.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    art.measure.mass = j.at("measure").at("mass").get<double>();
    art.measure.validate();
    art.final_value = j.at("final_value").get<double>();
    art.iterations = j.at("iterations").get<int>();
    art.converged = j.at("converged").get<bool>();
    const auto& rows = j.at("R");
    if (static_cast<int>(rows.size()) != art.n_funcs) throw InvalidArgument("artifact: R has the wrong number of rows");
    art.r.resize(art.n_funcs, art.n_basis);
    for (int i = 0; i < art.n_funcs; ++i) {
        if (static_cast<int>(rows[i].size()) != art.n_basis)
            throw InvalidArgument("artifact: R has the wrong number of columns");
        for (int k = 0; k < art.n_basis; ++k) art.r(i, k) = rows[i][k].get<double>();
    }
    return art;
}

inline void save_artifact(const BasisArtifact& art, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw InvalidArgument("cannot write artifact " + path.string());
    f << to_json(art).dump(2) << '\n';
}

inline BasisArtifact load_artifact(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot read artifact " + path.string());
    try {
        return artifact_from_json(nlohmann::json::parse(f));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("malformed artifact " + path.string() + ": " + e.what());
    }
}

}  // namespace aobasis::io
