#pragma once
// Experiment manifests (JSON) and the two study drivers: error tables over
// (M, M_adj) pairs and AMR strategy comparisons.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fvgoal/amr.hpp"
#include "fvgoal/error.hpp"
#include "fvgoal/estimator.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/qoi.hpp"
#include "fvgoal/swe.hpp"
#include "fvgoal/swe_adjoint.hpp"
#include "fvgoal/transport.hpp"
#include "fvgoal/transport_adjoint.hpp"

namespace fvgoal {

enum class CaseKind { transport_sine, swe_pulse };

inline const char* to_string(CaseKind c) { return c == CaseKind::transport_sine ? "transport_sine" : "swe_pulse"; }

struct AmrStudyConfig {
    bool run_uniform = true;
    bool run_type1 = true;
    bool run_type2 = true;
    AmrConfig base{};  // tol, initial cells, max iterations, cfl, ...
    std::size_t type2_intervals = 3;
};

struct ExperimentConfig {
    std::string name = "study";
    CaseKind case_kind = CaseKind::transport_sine;
    double a = 1.0;
    double final_time = 0.5;
    double epsilon_ic = 0.05;
    std::vector<std::size_t> primal_cells;
    std::vector<std::size_t> adjoint_cells;
    AdjointScheme adjoint_scheme = AdjointScheme::upwind1;
    KernelSpec kernel{};
    double cfl = 0.9;
    double adjoint_cfl = 0.9;
    QuadratureSpec quadrature{};
    std::optional<AmrStudyConfig> amr;
    std::string output_directory = "out";

    TransportProblem transport_problem() const { return transport_sine_case(a, final_time); }

    SweProblem swe_problem() const {
        SweProblem p;
        p.epsilon_ic = epsilon_ic;
        p.final_time = final_time;
        return p;
    }
};

namespace detail {

inline std::vector<std::size_t> parse_cells(const nlohmann::json& j, const char* key) {
    std::vector<std::size_t> out;
    if (!j.contains(key)) return out;
    const auto& v = j.at(key);
    if (v.is_array()) {
        for (const auto& e : v) {
            if (!e.is_number_integer() || e.get<long long>() < 2) {
                throw ConfigError(std::string(key) + ": entries must be integers >= 2");
            }
            out.push_back(e.get<std::size_t>());
        }
    } else if (v.is_object()) {
        // dyadic family base * 2^q for q in [min_q, max_q]
        auto base = v.at("base").get<std::size_t>();
        auto lo = v.value("min_q", 0), hi = v.at("max_q").get<int>();
        if (base < 2 || lo < 0 || hi < lo) throw ConfigError(std::string(key) + ": bad dyadic family");
        for (int q = lo; q <= hi; ++q) out.push_back(base << q);
    } else {
        throw ConfigError(std::string(key) + ": expected an array or {base, min_q, max_q}");
    }
    if (out.empty()) throw ConfigError(std::string(key) + ": grid list must be nonempty");
    return out;
}

inline KernelKind parse_kernel_kind(const std::string& s) {
    if (s == "constant") return KernelKind::constant;
    if (s == "gaussian") return KernelKind::gaussian;
    if (s == "kinetic_energy") return KernelKind::kinetic_energy;
    throw ConfigError("unknown kernel kind '" + s + "'");
}

inline AdjointScheme parse_scheme(const std::string& s) {
    if (s == "upwind1") return AdjointScheme::upwind1;
    if (s == "leapfrog2") return AdjointScheme::leapfrog2;
    throw ConfigError("unknown adjoint scheme '" + s + "'");
}

inline CaseKind parse_case(const std::string& s) {
    if (s == "transport_sine") return CaseKind::transport_sine;
    if (s == "swe_pulse") return CaseKind::swe_pulse;
    throw ConfigError("unknown case '" + s + "'");
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    try {
        ExperimentConfig c;
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        c.name = j.value("name", c.name);
        c.case_kind = detail::parse_case(j.value("case", std::string("transport_sine")));
        const bool swe = c.case_kind == CaseKind::swe_pulse;
        c.final_time = j.value("final_time", swe ? 0.3 : 0.5);
        c.a = j.value("a", 1.0);
        c.epsilon_ic = j.value("epsilon_ic", 0.05);
        c.primal_cells = detail::parse_cells(j, "primal_cells");
        c.adjoint_cells = detail::parse_cells(j, "adjoint_cells");
        c.adjoint_scheme = detail::parse_scheme(j.value("adjoint_scheme", std::string("upwind1")));
        c.cfl = j.value("cfl", 0.9);
        c.adjoint_cfl = j.value("adjoint_cfl", swe ? 1.0 : 0.9);
        c.quadrature.points = j.value("quadrature_points", std::size_t{3});
        if (c.quadrature.points < 1 || c.quadrature.points > max_gauss_points) {
            throw ConfigError("quadrature_points out of range");
        }
        c.kernel.kind = swe ? KernelKind::kinetic_energy : KernelKind::constant;
        c.kernel.center_x = 0.5;
        c.kernel.center_t = 0.5 * c.final_time;
        if (j.contains("kernel")) {
            const auto& k = j.at("kernel");
            c.kernel.kind = detail::parse_kernel_kind(k.value("kind", std::string(to_string(c.kernel.kind))));
            c.kernel.value = k.value("value", 1.0);
            c.kernel.epsilon = k.value("epsilon", 0.1);
            c.kernel.center_x = k.value("center_x", 0.5);
            c.kernel.center_t = k.value("center_t", 0.5 * c.final_time);
            if (!(c.kernel.epsilon > 0.0)) throw ConfigError("kernel.epsilon must be positive");
        }
        if (swe != (c.kernel.kind == KernelKind::kinetic_energy)) {
            throw ConfigError("the kinetic-energy kernel goes with the swe_pulse case and only there");
        }
        if (!(c.cfl > 0.0 && c.cfl <= 1.0) || !(c.adjoint_cfl > 0.0 && c.adjoint_cfl <= 1.0)) {
            throw ConfigError("CFL numbers must lie in (0, 1]");
        }
        if (!c.primal_cells.empty() && c.adjoint_cells.empty()) {
            throw ConfigError("adjoint_cells required with primal_cells");
        }
        if (j.contains("amr")) {
            const auto& a = j.at("amr");
            AmrStudyConfig s;
            s.base.tol = a.value("tol", 4.0e-4);
            s.base.initial_cells = a.value("initial_cells", std::size_t{40});
            s.base.max_iterations = a.value("max_iterations", std::size_t{20});
            s.type2_intervals = a.value("intervals", std::size_t{3});
            s.base.cfl = c.cfl;
            s.base.adjoint_cfl = c.adjoint_cfl;
            s.base.adjoint_scheme = c.adjoint_scheme;
            s.base.kernel = c.kernel;
            s.base.quadrature = c.quadrature;
            if (a.contains("strategies")) {
                s.run_uniform = s.run_type1 = s.run_type2 = false;
                for (const auto& e : a.at("strategies")) {
                    auto name = e.get<std::string>();
                    if (name == "uniform") s.run_uniform = true;
                    else if (name == "type1") s.run_type1 = true;
                    else if (name == "type2") s.run_type2 = true;
                    else throw ConfigError("unknown amr strategy '" + name + "'");
                }
            }
            if (s.type2_intervals < 1) throw ConfigError("amr.intervals must be >= 1");
            s.base.validate();
            c.amr = s;
        }
        c.output_directory = j.value("output_directory", c.output_directory);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

struct ResultRow {
    std::size_t M = 0;
    std::size_t M_adj = 0;
    AdjointScheme scheme = AdjointScheme::upwind1;
    double true_error = 0.0;
    double estimated_error = 0.0;
    std::optional<double> effectivity;
    std::optional<std::string> failure;
};

/// Q(u) for the configured case and kernel.
inline QoIValue reference_qoi(const ExperimentConfig& c) {
    if (c.case_kind == CaseKind::swe_pulse) return qoi_reference(c.swe_problem());
    return qoi_reference(c.transport_problem(), Kernel::from_spec(c.kernel));
}

/// Every (M, M_adj) pair, in config order.
inline std::vector<ResultRow> run_convergence_study(const ExperimentConfig& c) {
    if (c.primal_cells.empty()) throw ConfigError("run_convergence_study: no primal_cells given");
    std::vector<ResultRow> rows;
    const double q_exact = reference_qoi(c).value;
    EstimatorOptions opts;
    opts.quadrature = c.quadrature;
    for (std::size_t M : c.primal_cells) {
        if (c.case_kind == CaseKind::transport_sine) {
            const auto problem = c.transport_problem();
            const Kernel kernel = Kernel::from_spec(c.kernel);
            std::optional<SpaceTimeField> u;
            std::optional<std::string> primal_failure;
            double true_error = 0.0;
            try {
                auto g = uniform_grid(problem.domain_length, M);
                auto tg = TimeGrid::for_cfl(0.0, problem.final_time, problem.a, g.min_width(), c.cfl);
                u = upwind_solve(problem, g, tg);
                true_error = q_exact - qoi_discrete(*u, kernel, c.quadrature).value;
            } catch (const Error& e) {
                primal_failure = e.what();
            }
            for (std::size_t Ma : c.adjoint_cells) {
                ResultRow r{M, Ma, c.adjoint_scheme, true_error, 0.0, std::nullopt, primal_failure};
                if (!primal_failure) {
                    try {
                        auto adj = adjoint_solve(TransportAdjointProblem::for_primal(problem, kernel), Ma,
                                                 c.adjoint_scheme, c.adjoint_cfl);
                        r.estimated_error = estimate_transport(*u, adj, problem, kernel, opts).total;
                        r.effectivity = effectivity(r.estimated_error, true_error).effectivity;
                    } catch (const Error& e) {
                        r.failure = e.what();
                    }
                }
                rows.push_back(r);
            }
        } else {
            const auto problem = c.swe_problem();
            for (std::size_t Ma : c.adjoint_cells) {
                ResultRow r{M, Ma, c.adjoint_scheme, 0.0, 0.0, std::nullopt, std::nullopt};
                try {
                    if (c.adjoint_scheme != AdjointScheme::upwind1) {
                        throw ConfigError("the SWE adjoint is first-order upwind only");
                    }
                    auto g = uniform_grid(problem.domain_length, M);
                    auto tg = TimeGrid::for_cfl(0.0, problem.final_time, swe_max_speed(), g.min_width(), c.cfl);
                    auto u = swe_upwind_solve(problem, g, tg);
                    r.true_error = q_exact - qoi_discrete(u.physical, Kernel::kinetic_energy()).value;
                    Kernel kernel =
                        Kernel::kinetic_energy(std::make_shared<const std::vector<SpaceTimeField>>(u.physical));
                    auto adj = swe_adjoint_solve(SweAdjointProblem::for_primal(problem, kernel),
                                                 uniform_grid(problem.domain_length, Ma), c.adjoint_cfl);
                    r.estimated_error = estimate_swe(u, adj, problem, kernel, opts).total;
                    r.effectivity = effectivity(r.estimated_error, r.true_error).effectivity;
                } catch (const ConfigError&) {
                    throw;
                } catch (const Error& e) {
                    r.failure = e.what();
                }
                rows.push_back(r);
            }
        }
    }
    return rows;
}

inline std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Header M,M_adj,scheme,true_error,estimated_error,effectivity. Failed rows
/// keep M, M_adj and scheme and leave the numeric fields empty.
inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << "M,M_adj,scheme,true_error,estimated_error,effectivity\n";
    for (const auto& r : rows) {
        os << r.M << ',' << r.M_adj << ',' << to_string(r.scheme) << ',';
        if (r.failure) {
            os << ",,\n";
            continue;
        }
        os << format_g12(r.true_error) << ',' << format_g12(r.estimated_error) << ',';
        if (r.effectivity) os << format_g12(*r.effectivity);
        os << '\n';
    }
}

inline nlohmann::json trace_to_json(const AmrTrace& t, const AmrConfig& cfg) {
    nlohmann::json j;
    j["strategy"] = to_string(cfg.strategy);
    j["intervals"] = cfg.intervals;
    j["tol"] = cfg.tol;
    j["converged"] = t.converged;
    auto& its = j["iterations"] = nlohmann::json::array();
    for (std::size_t k = 0; k < t.iterations.size(); ++k) {
        const auto& it = t.iterations[k];
        its.push_back({{"iteration", k},
                       {"total_error", it.total_error},
                       {"abs_error_sum", it.abs_error_sum},
                       {"cell_counts", it.cell_counts},
                       {"flagged", it.flagged},
                       {"adjoint_cells", it.adjoint_cells}});
    }
    return j;
}

struct AmrStudyReport {
    std::optional<UniformBaseline> uniform;
    std::optional<AmrTrace> type1;
    std::optional<AmrTrace> type2;
    AmrConfig type1_config{};
    AmrConfig type2_config{};

    bool all_converged() const {
        return (!uniform || uniform->converged) && (!type1 || type1->converged) && (!type2 || type2->converged);
    }
};

inline AmrStudyReport run_amr_study(const ExperimentConfig& c) {
    if (!c.amr) throw ConfigError("run_amr_study: config has no amr section");
    AmrStudyReport rep;
    rep.type1_config = c.amr->base;
    rep.type1_config.strategy = AmrStrategy::type1;
    rep.type1_config.intervals = 1;
    rep.type2_config = c.amr->base;
    rep.type2_config.strategy = AmrStrategy::type2;
    rep.type2_config.intervals = c.amr->type2_intervals;
    auto run = [&](const auto& problem) {
        if (c.amr->run_uniform) rep.uniform = uniform_baseline(problem, rep.type1_config);
        if (c.amr->run_type1) rep.type1 = amr_run(problem, rep.type1_config);
        if (c.amr->run_type2) rep.type2 = amr_run(problem, rep.type2_config);
    };
    if (c.case_kind == CaseKind::transport_sine) run(c.transport_problem());
    else run(c.swe_problem());
    return rep;
}

/// strategy,interval,cells,converged,total_error with 1-based intervals.
inline void write_amr_summary_csv(std::ostream& os, const AmrStudyReport& rep) {
    os << "strategy,interval,cells,converged,total_error\n";
    if (rep.uniform) {
        double e = rep.uniform->history.empty() ? 0.0 : rep.uniform->history.back().second;
        os << "uniform,1," << rep.uniform->cells << ',' << (rep.uniform->converged ? 1 : 0) << ','
           << format_g12(e) << '\n';
    }
    auto trace_rows = [&](const char* name, const AmrTrace& t) {
        const auto& f = t.final();
        for (std::size_t j = 0; j < f.cell_counts.size(); ++j) {
            os << name << ',' << j + 1 << ',' << f.cell_counts[j] << ',' << (t.converged ? 1 : 0) << ','
               << format_g12(f.total_error) << '\n';
        }
    };
    if (rep.type1) trace_rows("type1", *rep.type1);
    if (rep.type2) trace_rows("type2", *rep.type2);
}

/// Files written by one study; paths are relative to the output directory.
struct StudyOutputs {
    std::vector<std::filesystem::path> files;
};

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << s;
}

inline StudyOutputs write_convergence_outputs(const ExperimentConfig& c, const std::vector<ResultRow>& rows,
                                              const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ostringstream os;
    write_results_csv(os, rows);
    auto p = dir / (c.name + "_convergence.csv");
    write_text(p, os.str());
    return {{p}};
}

inline StudyOutputs write_amr_outputs(const ExperimentConfig& c, const AmrStudyReport& rep,
                                      const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    StudyOutputs out;
    {
        std::ostringstream os;
        write_amr_summary_csv(os, rep);
        out.files.push_back(dir / (c.name + "_amr_summary.csv"));
        write_text(out.files.back(), os.str());
    }
    if (rep.uniform) {
        nlohmann::json j;
        j["strategy"] = "uniform";
        j["tol"] = rep.type1_config.tol;
        j["converged"] = rep.uniform->converged;
        j["cells"] = rep.uniform->cells;
        auto& h = j["history"] = nlohmann::json::array();
        for (const auto& [m, e] : rep.uniform->history) h.push_back({{"cells", m}, {"total_error", e}});
        out.files.push_back(dir / (c.name + "_uniform_trace.json"));
        write_text(out.files.back(), j.dump(2) + "\n");
    }
    auto dump = [&](const char* name, const AmrTrace& t, const AmrConfig& cfg) {
        out.files.push_back(dir / (c.name + "_" + name + "_trace.json"));
        write_text(out.files.back(), trace_to_json(t, cfg).dump(2) + "\n");
        const auto& p = t.final_partition();
        for (std::size_t j = 0; j < p.interval_count(); ++j) {
            std::ostringstream os;
            write_grid_nodes(os, p.grid(j));
            out.files.push_back(dir / (c.name + "_" + name + "_grid_j" + std::to_string(j + 1) + ".txt"));
            write_text(out.files.back(), os.str());
        }
    };
    if (rep.type1) dump("type1", *rep.type1, rep.type1_config);
    if (rep.type2) dump("type2", *rep.type2, rep.type2_config);
    return out;
}

}  // namespace fvgoal
