// fvgoal command-line driver.
//
//   fvgoal run <config> [--out DIR] [--case CASE] [--tol TOL]
//   fvgoal amr <config> [--out DIR] [--tol TOL]
//   fvgoal duality-check
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 AMR or baseline did not converge.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fvgoal/fvgoal.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_not_converged = 4;

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::string> case_name;
    std::optional<double> tol;
};

fvgoal::ExperimentConfig load(const std::string& path, const Overrides& o) {
    std::ifstream in(path);
    if (!in) throw fvgoal::ConfigError("cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw fvgoal::ConfigError("config " + path + ": " + e.what());
    }
    if (o.case_name) j["case"] = *o.case_name;
    if (o.tol) {
        if (!j.contains("amr")) j["amr"] = nlohmann::json::object();
        j["amr"]["tol"] = *o.tol;
    }
    if (o.out) j["output_directory"] = *o.out;
    return fvgoal::parse_config(j);
}

void print_rows(const std::vector<fvgoal::ResultRow>& rows) {
    std::printf("%8s %8s %10s %14s %14s %12s\n", "M", "M_adj", "scheme", "true_error", "estimate", "effectivity");
    for (const auto& r : rows) {
        if (r.failure) {
            std::printf("%8zu %8zu %10s  failed: %s\n", r.M, r.M_adj, fvgoal::to_string(r.scheme), r.failure->c_str());
            continue;
        }
        std::printf("%8zu %8zu %10s %14.6e %14.6e", r.M, r.M_adj, fvgoal::to_string(r.scheme), r.true_error,
                    r.estimated_error);
        if (r.effectivity) std::printf(" %12.6f", *r.effectivity);
        std::printf("\n");
    }
}

void print_amr(const fvgoal::AmrStudyReport& rep) {
    if (rep.uniform) {
        std::printf("uniform: %zu cells%s\n", rep.uniform->cells, rep.uniform->converged ? "" : " (not converged)");
    }
    auto show = [](const char* name, const fvgoal::AmrTrace& t) {
        const auto& f = t.final();
        std::printf("%s: %zu iterations, |E| = %.4e, cells", name, t.iterations.size(), std::abs(f.total_error));
        for (auto c : f.cell_counts) std::printf(" %zu", c);
        std::printf(" (average %.1f)%s\n", t.average_cells(), t.converged ? "" : " (not converged)");
    };
    if (rep.type1) show("type1", *rep.type1);
    if (rep.type2) show("type2", *rep.type2);
}

int run_convergence(const fvgoal::ExperimentConfig& c) {
    auto rows = fvgoal::run_convergence_study(c);
    auto files = fvgoal::write_convergence_outputs(c, rows, c.output_directory);
    print_rows(rows);
    for (const auto& f : files.files) std::printf("wrote %s\n", f.string().c_str());
    for (const auto& r : rows) {
        if (r.failure) return exit_numerical;
    }
    return exit_ok;
}

int run_amr(const fvgoal::ExperimentConfig& c) {
    auto rep = fvgoal::run_amr_study(c);
    auto files = fvgoal::write_amr_outputs(c, rep, c.output_directory);
    print_amr(rep);
    for (const auto& f : files.files) std::printf("wrote %s\n", f.string().c_str());
    return rep.all_converged() ? exit_ok : exit_not_converged;
}

int duality_check() {
    double rt = fvgoal::standard_transport_duality_residual();
    double rs = fvgoal::standard_swe_duality_residual();
    std::printf("transport duality residual %.3e\n", rt);
    std::printf("swe duality residual       %.3e\n", rs);
    return rt < 1e-8 && rs < 1e-8 ? exit_ok : exit_numerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Goal-oriented error estimation for explicit finite volume schemes"};
    app.require_subcommand(1);

    std::string config;
    Overrides o;
    std::string out, case_name;
    double tol = 0.0;

    auto* run = app.add_subcommand("run", "run the studies described by a config");
    run->add_option("config", config, "JSON experiment config")->required();
    auto* run_out = run->add_option("--out", out, "output directory");
    auto* run_case = run->add_option("--case", case_name, "override the case (transport_sine, swe_pulse)");
    auto* run_tol = run->add_option("--tol", tol, "override the AMR tolerance");

    std::string amr_config, amr_out;
    double amr_tol = 0.0;
    auto* amr = app.add_subcommand("amr", "run only the AMR study of a config");
    amr->add_option("config", amr_config, "JSON experiment config")->required();
    auto* amr_out_opt = amr->add_option("--out", amr_out, "output directory");
    auto* amr_tol_opt = amr->add_option("--tol", amr_tol, "override the AMR tolerance");

    auto* dual = app.add_subcommand("duality-check", "discrete duality self-test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        if (*dual) return duality_check();
        if (*run) {
            if (*run_out) o.out = out;
            if (*run_case) o.case_name = case_name;
            if (*run_tol) o.tol = tol;
            auto c = load(config, o);
            if (c.primal_cells.empty() && !c.amr) {
                throw fvgoal::ConfigError("config has neither grids nor an amr section");
            }
            int rc = exit_ok;
            if (!c.primal_cells.empty()) rc = run_convergence(c);
            if (c.amr && rc == exit_ok) rc = run_amr(c);
            return rc;
        }
        if (*amr) {
            if (*amr_out_opt) o.out = amr_out;
            if (*amr_tol_opt) o.tol = amr_tol;
            auto c = load(amr_config, o);
            if (!c.amr) throw fvgoal::ConfigError("config has no amr section");
            return run_amr(c);
        }
    } catch (const fvgoal::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_config;
    } catch (const fvgoal::InvalidArgument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_config;
    } catch (const fvgoal::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_numerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
    return exit_ok;
}
