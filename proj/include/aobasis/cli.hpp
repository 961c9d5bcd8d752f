#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aobasis/aobasis.hpp"
#include "aobasis/io/artifact.hpp"
#include "aobasis/io/config.hpp"
#include "aobasis/io/csv.hpp"
#include "aobasis/io/offline_cache.hpp"

namespace aobasis::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 2, kNumerical = 3, kNotConverged = 4 };

struct GlobalOptions {
    std::string config_path;
    std::string cache_dir;
    std::string out_dir;
    std::optional<unsigned long long> seed;
    bool strict = false;
    std::vector<std::string> artifacts;
};

namespace detail {

inline io::RunConfig resolve_config(const GlobalOptions& opts) {
    io::RunConfig cfg = opts.config_path.empty() ? io::RunConfig{} : io::load_config(opts.config_path);
    if (!opts.cache_dir.empty()) cfg.cache_dir = opts.cache_dir;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.seed) cfg.seed = *opts.seed;
    cfg.validate();
    return cfg;
}

inline void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw InvalidArgument("output directory " + dir.string() + " cannot be created");
}

inline std::string artifact_stem(const io::BasisArtifact& art) {
    return art.label() + "_Nb" + std::to_string(art.n_basis);
}

// Artifacts named on the command line, or the HBS baseline of the config.
inline std::vector<io::BasisArtifact> collect_artifacts(const GlobalOptions& opts, const io::RunConfig& cfg) {
    std::vector<io::BasisArtifact> arts;
    for (const auto& p : opts.artifacts) arts.push_back(io::load_artifact(p));
    if (arts.empty()) arts.push_back(io::hbs_artifact(cfg.n_funcs, cfg.n_basis, cfg.measure, cfg.grid()));
    return arts;
}

inline void check_compatible(const std::vector<io::BasisArtifact>& arts) {
    for (const auto& art : arts) {
        if (art.n_funcs != arts.front().n_funcs || art.x_max != arts.front().x_max ||
            art.n_points != arts.front().n_points)
            throw InvalidArgument("artifacts disagree on the grid or on N; cannot report them together");
    }
}

inline std::vector<std::string> unique_labels(const std::vector<io::BasisArtifact>& arts) {
    std::vector<std::string> labels;
    std::map<std::string, int> seen;
    for (const auto& art : arts) {
        std::string l = artifact_stem(art);
        const int k = seen[l]++;
        labels.push_back(k == 0 ? l : l + "_" + std::to_string(k + 1));
    }
    return labels;
}

}  // namespace detail

inline int cmd_reference(const GlobalOptions& opts, std::ostream& out) {
    const io::RunConfig cfg = detail::resolve_config(opts);
    const Grid grid = cfg.grid();
    io::OfflineCache cache(cfg.cache_dir);
    cache.ensure_writable();
    const Metric metric = metric_for(cfg.criterion);
    for (const auto& p : cfg.measure.points) {
        bool computed = false;
        const auto d = cache.load_or_build(grid, p.a, cfg.n_funcs, metric, cfg.measure.mass * p.w, &computed);
        out << "a=" << io::format_double(p.a) << " E_ref=" << io::format_double(d.e_ref())
            << " metric=" << to_string(metric) << (computed ? " computed" : " cached") << '\n';
    }
    out << "reference: " << cfg.measure.size() << " entries, " << cache.built() << " computed\n";
    return kSuccess;
}

inline int cmd_optimize(const GlobalOptions& opts, std::ostream& out) {
    const io::RunConfig cfg = detail::resolve_config(opts);
    const Grid grid = cfg.grid();
    io::OfflineCache cache(cfg.cache_dir);
    cache.ensure_writable();
    const auto offline = cache.load_or_build(grid, cfg.measure, cfg.n_funcs, metric_for(cfg.criterion));

    const Matrix r0 = starting_point(cfg.n_funcs, cfg.n_basis, cfg.random_start, cfg.seed);
    const OptimReport rep = optimize_criterion(cfg.criterion, offline, r0, cfg.optimizer, cfg.cond_limit);

    io::BasisArtifact art;
    art.r = rep.r_opt;
    art.n_funcs = cfg.n_funcs;
    art.n_basis = cfg.n_basis;
    art.criterion = cfg.criterion;
    art.measure = cfg.measure;
    art.x_max = grid.x_max();
    art.n_points = grid.size();
    art.final_value = rep.final_value();
    art.iterations = rep.iterations;
    art.converged = rep.converged;

    detail::ensure_dir(cfg.out_dir);
    const std::string stem = detail::artifact_stem(art);
    const auto art_path = cfg.out_dir / (stem + ".json");
    io::save_artifact(art, art_path);

    nlohmann::json report = {
        {"schema_version", io::kArtifactSchemaVersion},
        {"criterion", std::string(to_string(cfg.criterion))},
        {"n_basis", cfg.n_basis},
        {"n_funcs", cfg.n_funcs},
        {"random_start", cfg.random_start},
        {"seed", cfg.seed},
        {"iterations", rep.iterations},
        {"evaluations", rep.evaluations},
        {"converged", rep.converged},
        {"stalled", rep.stalled},
        {"status", rep.status},
        {"grad_norm", rep.grad_norm},
        {"initial_value", rep.trajectory.front()},
        {"final_value", rep.final_value()},
        {"trajectory", rep.trajectory},
        {"artifact", art_path.filename().string()},
    };
    const auto rep_path = cfg.out_dir / (stem + "_report.json");
    {
        std::ofstream f(rep_path);
        if (!f) throw InvalidArgument("cannot write " + rep_path.string());
        f << report.dump(2) << '\n';
    }
    out << to_string(cfg.criterion) << " N_b=" << cfg.n_basis << " value=" << io::format_double(rep.final_value())
        << " iterations=" << rep.iterations << " converged=" << (rep.converged ? "true" : "false") << " ("
        << rep.status << ")\n"
        << "wrote " << art_path.string() << '\n';
    if (!rep.converged && opts.strict) return kNotConverged;
    return kSuccess;
}

// Criterion values of every artifact on the configured measure.
inline int cmd_evaluate(const GlobalOptions& opts, std::ostream& out) {
    const io::RunConfig cfg = detail::resolve_config(opts);
    const auto arts = detail::collect_artifacts(opts, cfg);
    detail::check_compatible(arts);
    const Grid grid = arts.front().grid();
    io::OfflineCache cache(cfg.cache_dir);
    cache.ensure_writable();
    const int n_funcs = arts.front().n_funcs;
    const auto off_l2 = cache.load_or_build(grid, cfg.measure, n_funcs, Metric::L2);
    const auto off_h1 = cache.load_or_build(grid, cfg.measure, n_funcs, Metric::H1);

    io::CsvTable table({"basis", "n_basis", "JA_L2", "JA_H1", "JE"});
    const auto labels = detail::unique_labels(arts);
    for (std::size_t i = 0; i < arts.size(); ++i) {
        const auto& r = arts[i].r;
        const double jl = eval_ja(r, off_l2);
        const double jh = eval_ja(r, off_h1);
        const double je = eval_je(r, off_l2);
        table.add_row({labels[i], std::to_string(arts[i].n_basis), io::format_double(jl), io::format_double(jh),
                       io::format_double(je)});
    }
    detail::ensure_dir(cfg.out_dir);
    table.write(cfg.out_dir / "criteria.csv");
    out << table.str();
    return kSuccess;
}

inline int cmd_report(const GlobalOptions& opts, std::ostream& out) {
    const io::RunConfig cfg = detail::resolve_config(opts);
    auto arts = detail::collect_artifacts(opts, cfg);
    detail::check_compatible(arts);
    // HBS baseline rows for every basis size present.
    std::set<int> sizes, hbs_sizes;
    for (const auto& a : arts) (a.criterion ? sizes : hbs_sizes).insert(a.n_basis);
    for (int nb : sizes)
        if (!hbs_sizes.count(nb))
            arts.push_back(io::hbs_artifact(arts.front().n_funcs, nb, cfg.measure, arts.front().grid()));

    const Grid grid = arts.front().grid();
    const int n_funcs = arts.front().n_funcs;
    const auto labels = detail::unique_labels(arts);
    detail::ensure_dir(cfg.out_dir);

    // Energy curve.
    const auto a_curve = linspace(cfg.curve_a_min, cfg.curve_a_max, cfg.curve_count);
    std::vector<std::vector<CurvePoint>> curves;
    for (const auto& art : arts) curves.push_back(energy_curve(art.r, a_curve, grid, n_funcs, cfg.cond_limit));
    {
        std::vector<std::string> header = {"a", "E_ref"};
        for (const auto& l : labels) {
            header.push_back(l + "_E");
            header.push_back(l + "_error");
        }
        io::CsvTable t(header);
        for (std::size_t k = 0; k < a_curve.size(); ++k) {
            std::vector<double> row = {a_curve[k], curves.front()[k].e_ref};
            for (const auto& c : curves) {
                row.push_back(c[k].e_basis);
                row.push_back(c[k].abs_error);
            }
            t.add_row(row);
        }
        t.write(cfg.out_dir / "energy_curve.csv");
    }

    // Density errors.
    {
        std::vector<std::string> header = {"a"};
        for (const auto& l : labels)
            for (const char* n : {"_l1", "_h1", "_vw"}) header.push_back(l + n);
        io::CsvTable t(header);
        for (double a : cfg.density_a) {
            std::vector<double> row = {a};
            for (const auto& art : arts) {
                try {
                    const DensityError e = density_error(art.r, a, grid, n_funcs, cfg.cond_limit);
                    row.insert(row.end(), {e.l1, e.h1, e.vw});
                } catch (const OvercompletenessFailure&) {
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    row.insert(row.end(), {nan, nan, nan});
                }
            }
            t.add_row(row);
        }
        t.write(cfg.out_dir / "density_error.csv");
    }

    // HBS overlap conditioning.
    {
        const auto a_cond = linspace(cfg.cond_a_min, cfg.cond_a_max, cfg.cond_count);
        std::vector<std::string> header = {"a"};
        std::vector<std::vector<ConditionPoint>> sweeps;
        for (int nb : cfg.cond_n_basis) {
            header.push_back("cond_Nb" + std::to_string(nb));
            sweeps.push_back(overlap_condition_sweep(nb, a_cond, cfg.grid()));
        }
        io::CsvTable t(header);
        for (std::size_t k = 0; k < a_cond.size(); ++k) {
            std::vector<double> row = {a_cond[k]};
            for (const auto& s : sweeps) row.push_back(s[k].condition);
            t.add_row(row);
        }
        t.write(cfg.out_dir / "condition.csv");
    }

    // Basis functions chi_mu(x) = sum_n R_{n mu} h_n(x), centred at 0.
    {
        std::vector<std::string> header = {"x"};
        for (std::size_t i = 0; i < arts.size(); ++i)
            for (int mu = 1; mu <= arts[i].n_basis; ++mu) header.push_back(labels[i] + "_chi" + std::to_string(mu));
        io::CsvTable t(header);
        const Matrix h = hermite_columns(grid, 0.0, n_funcs).columns / std::sqrt(grid.dx());
        std::vector<Matrix> chis;
        for (const auto& art : arts) chis.push_back(h * art.r);
        for (int j = 0; j < grid.size(); ++j) {
            if (std::abs(grid[j]) > 10.0) continue;
            std::vector<double> row = {grid[j]};
            for (const auto& c : chis)
                for (Eigen::Index mu = 0; mu < c.cols(); ++mu) row.push_back(c(j, mu));
            t.add_row(row);
        }
        t.write(cfg.out_dir / "basis_functions.csv");
    }

    // Criterion table: one block per criterion, one row per basis family.
    {
        io::OfflineCache cache(cfg.cache_dir);
        cache.ensure_writable();
        const auto off_l2 = cache.load_or_build(grid, cfg.measure, n_funcs, Metric::L2);
        const auto off_h1 = cache.load_or_build(grid, cfg.measure, n_funcs, Metric::H1);
        int max_nb = 0;
        for (const auto& a : arts) max_nb = std::max(max_nb, a.n_basis);
        std::vector<std::string> header = {"criterion", "basis"};
        for (int nb = 1; nb <= max_nb; ++nb) header.push_back("N_b=" + std::to_string(nb));
        io::CsvTable t(header);
        const std::vector<std::string> families = {"HBS", "L2-OBS", "H1-OBS", "E-OBS"};
        for (CriterionKind kind : {CriterionKind::JA_L2, CriterionKind::JA_H1, CriterionKind::JE}) {
            const auto& off = kind == CriterionKind::JA_H1 ? off_h1 : off_l2;
            for (const auto& fam : families) {
                std::vector<std::string> row = {std::string(to_string(kind)), fam};
                bool any = false;
                for (int nb = 1; nb <= max_nb; ++nb) {
                    std::string cell;
                    for (const auto& art : arts) {
                        if (art.label() == fam && art.n_basis == nb) {
                            cell = io::format_double(evaluate_criterion(kind, art.r, off, false, cfg.cond_limit).value);
                            any = true;
                            break;
                        }
                    }
                    row.push_back(cell);
                }
                if (any) t.add_row(std::move(row));
            }
        }
        t.write(cfg.out_dir / "criteria_table.csv");
        out << t.str();
    }
    out << "wrote energy_curve.csv, density_error.csv, condition.csv, basis_functions.csv, criteria_table.csv to "
        << cfg.out_dir.string() << '\n';
    return kSuccess;
}

// Entry point shared by the executable and the tests.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"Optimal atom-centred basis sets for a 1D diatomic model", "aobasis"};
    app.require_subcommand(1);
    GlobalOptions opts;
    unsigned long long seed = 0;
    auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Run configuration (INI)");
        sub->add_option("--cache", opts.cache_dir, "Offline cache directory");
        sub->add_option("--out", opts.out_dir, "Output directory");
        sub->add_option("--seed", seed, "Seed for random starting points");
        sub->add_flag("--strict", opts.strict, "Exit with code 4 when the optimizer does not converge");
    };
    auto* ref = app.add_subcommand("reference", "Compute and cache the offline reference data");
    auto* opt = app.add_subcommand("optimize", "Optimize a basis for the configured criterion");
    auto* eval = app.add_subcommand("evaluate", "Evaluate every criterion for the given artifacts");
    auto* rep = app.add_subcommand("report", "Write CSV data series for the given artifacts");
    for (auto* sub : {ref, opt, eval, rep}) add_globals(sub);
    eval->add_option("artifacts", opts.artifacts, "Basis artifact files");
    rep->add_option("artifacts", opts.artifacts, "Basis artifact files");

    std::vector<std::string> argv_store = args;
    std::reverse(argv_store.begin(), argv_store.end());
    try {
        app.parse(argv_store);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    for (auto* sub : {ref, opt, eval, rep})
        if (sub->count("--seed")) opts.seed = seed;

    try {
        if (*ref) return cmd_reference(opts, out);
        if (*opt) return cmd_optimize(opts, out);
        if (*eval) return cmd_evaluate(opts, out);
        if (*rep) return cmd_report(opts, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace aobasis::cli
