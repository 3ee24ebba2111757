#pragma once
// Flag-and-refine loop: solve, estimate E_ij, stop when |sum E_ij| < TOL,
// otherwise bisect every cell whose |E_ij| >= TOL / M (M = total slab count).

#include <cmath>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fvgoal/error.hpp"
#include "fvgoal/estimator.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/qoi.hpp"
#include "fvgoal/swe.hpp"
#include "fvgoal/swe_adjoint.hpp"
#include "fvgoal/transport.hpp"
#include "fvgoal/transport_adjoint.hpp"

namespace fvgoal {

enum class AmrStrategy { type1, type2 };

inline const char* to_string(AmrStrategy s) { return s == AmrStrategy::type1 ? "type1" : "type2"; }

struct AmrConfig {
    double tol = 4.0e-4;
    AmrStrategy strategy = AmrStrategy::type1;
    std::size_t intervals = 1;
    std::size_t initial_cells = 40;
    std::size_t max_iterations = 20;
    double cfl = 0.9;
    AdjointScheme adjoint_scheme = AdjointScheme::upwind1;
    /// Transport adjoint CFL; the SWE adjoint steps each characteristic at this
    /// CFL for its own speed.
    double adjoint_cfl = 0.9;
    KernelSpec kernel{};
    QuadratureSpec quadrature{};

    void validate() const {
        if (!(tol > 0.0)) throw ConfigError("amr: TOL must be positive");
        if (intervals < 1) throw ConfigError("amr: need at least one time interval");
        if (strategy == AmrStrategy::type1 && intervals != 1) {
            throw ConfigError("amr: type1 uses a single time interval");
        }
        if (initial_cells < 2) throw ConfigError("amr: need at least 2 initial cells");
        if (!(cfl > 0.0 && cfl <= 1.0) || !(adjoint_cfl > 0.0 && adjoint_cfl <= 1.0)) {
            throw ConfigError("amr: CFL numbers must lie in (0, 1]");
        }
    }
};

struct AmrIteration {
    SlabPartition partition;
    double total_error = 0.0;
    double abs_error_sum = 0.0;
    std::vector<std::size_t> cell_counts;  // per time interval
    std::size_t flagged = 0;
    std::size_t adjoint_cells = 0;
};

struct AmrTrace {
    std::vector<AmrIteration> iterations;
    bool converged = false;

    const AmrIteration& final() const { return iterations.back(); }
    const SlabPartition& final_partition() const { return iterations.back().partition; }

    /// Cells per interval averaged over the intervals of the final partition.
    double average_cells() const {
        const auto& c = final().cell_counts;
        double s = 0.0;
        for (auto n : c) s += static_cast<double>(n);
        return s / static_cast<double>(c.size());
    }
};

/// Uniform adjoint grid matched to the finest primal cell.
inline std::size_t matched_adjoint_cells(const SlabPartition& p) {
    return static_cast<std::size_t>(std::llround(p.domain_length() / p.min_width()));
}

inline ErrorBreakdown estimate_on(const TransportProblem& problem, const SlabPartition& partition,
                                  const AmrConfig& cfg, std::size_t* adjoint_cells = nullptr) {
    if (cfg.kernel.kind == KernelKind::kinetic_energy) {
        throw ConfigError("amr: kinetic-energy kernel applies to the SWE case");
    }
    Kernel kernel = Kernel::from_spec(cfg.kernel);
    auto u = upwind_solve(problem, partition, cfg.cfl);
    std::size_t m_adj = matched_adjoint_cells(partition);
    if (adjoint_cells) *adjoint_cells = m_adj;
    auto adj = adjoint_solve(TransportAdjointProblem::for_primal(problem, kernel), m_adj, cfg.adjoint_scheme,
                             cfg.adjoint_cfl);
    EstimatorOptions opts;
    opts.quadrature = cfg.quadrature;
    opts.compute_global = false;
    return estimate_transport(u, adj, problem, kernel, opts);
}

inline ErrorBreakdown estimate_on(const SweProblem& problem, const SlabPartition& partition, const AmrConfig& cfg,
                                  std::size_t* adjoint_cells = nullptr) {
    if (cfg.kernel.kind != KernelKind::kinetic_energy) {
        throw ConfigError("amr: the SWE case uses the kinetic-energy kernel");
    }
    if (cfg.adjoint_scheme != AdjointScheme::upwind1) {
        throw ConfigError("amr: the SWE adjoint is first-order upwind only");
    }
    auto u = swe_upwind_solve(problem, partition, cfg.cfl);
    auto lin = std::make_shared<const std::vector<SpaceTimeField>>(u.physical);
    Kernel kernel = Kernel::kinetic_energy(lin);
    std::size_t m_adj = matched_adjoint_cells(partition);
    if (adjoint_cells) *adjoint_cells = m_adj;
    auto adj = swe_adjoint_solve(SweAdjointProblem::for_primal(problem, kernel),
                                 uniform_grid(problem.domain_length, m_adj), cfg.adjoint_cfl);
    EstimatorOptions opts;
    opts.quadrature = cfg.quadrature;
    opts.compute_global = false;
    return estimate_swe(u, adj, problem, kernel, opts);
}

/// Slabs with |E_ij| >= TOL / M; type 1 first sums each cell over time.
inline std::set<SlabIndex> flag_slabs(const ErrorBreakdown& b, const AmrConfig& cfg) {
    const double threshold = cfg.tol / static_cast<double>(b.partition.slab_count());
    std::set<SlabIndex> flags;
    if (cfg.strategy == AmrStrategy::type1) {
        auto totals = b.cell_totals();
        for (std::size_t i = 0; i < totals.size(); ++i) {
            if (std::abs(totals[i]) >= threshold) flags.insert({0, i});
        }
    } else {
        for (const auto& [k, e] : b.slabs) {
            if (std::abs(e) >= threshold) flags.insert(k);
        }
    }
    return flags;
}

template <class Problem>
AmrTrace amr_run(const Problem& problem, const AmrConfig& cfg) {
    cfg.validate();
    AmrTrace trace;
    SlabPartition partition =
        SlabPartition::uniform(problem.domain_length, problem.final_time, cfg.intervals, cfg.initial_cells);
    for (std::size_t it = 0;; ++it) {
        AmrIteration rec{partition, 0.0, 0.0, {}, 0, 0};
        ErrorBreakdown b = estimate_on(problem, partition, cfg, &rec.adjoint_cells);
        rec.total_error = b.total;
        rec.abs_error_sum = b.abs_sum();
        for (const auto& g : partition.grids()) rec.cell_counts.push_back(g.cell_count());
        if (std::abs(b.total) < cfg.tol) {
            trace.iterations.push_back(std::move(rec));
            trace.converged = true;
            return trace;
        }
        auto flags = flag_slabs(b, cfg);
        rec.flagged = flags.size();
        trace.iterations.push_back(std::move(rec));
        if (it + 1 >= cfg.max_iterations || flags.empty()) return trace;
        partition = plan_refinement(partition, std::move(flags)).refined_partition;
    }
}

struct UniformBaseline {
    std::size_t cells = 0;
    bool converged = false;
    std::vector<std::pair<std::size_t, double>> history;  // (M, estimated error)
};

/// Doubles a uniform single-interval grid until |estimate| < TOL.
template <class Problem>
UniformBaseline uniform_baseline(const Problem& problem, const AmrConfig& cfg) {
    AmrConfig c = cfg;
    c.strategy = AmrStrategy::type1;
    c.intervals = 1;
    c.validate();
    UniformBaseline out;
    std::size_t m = c.initial_cells;
    for (std::size_t it = 0; it < c.max_iterations; ++it, m *= 2) {
        auto p = SlabPartition::uniform(problem.domain_length, problem.final_time, 1, m);
        double e = estimate_on(problem, p, c).total;
        out.history.emplace_back(m, e);
        out.cells = m;
        if (std::abs(e) < c.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace fvgoal
