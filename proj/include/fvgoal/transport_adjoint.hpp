#pragma once
// Adjoint of the transport problem: -v_t - a v_x = phi, v(x, T) = 0,
// v(L, t) = 0. With tau = T - t it becomes v_tau - a v_x = phi, an
// initial-value problem with inflow at x = L, which is what gets stepped.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fvgoal/error.hpp"
#include "fvgoal/fields.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/qoi.hpp"
#include "fvgoal/transport.hpp"

namespace fvgoal {

enum class AdjointScheme { upwind1, leapfrog2 };

inline const char* to_string(AdjointScheme s) { return s == AdjointScheme::upwind1 ? "upwind1" : "leapfrog2"; }

struct TransportAdjointProblem {
    double a = 1.0;
    Kernel phi = Kernel::constant();
    double domain_length = 1.0;
    double final_time = 0.5;

    static TransportAdjointProblem for_primal(const TransportProblem& p, Kernel phi) {
        return {p.a, std::move(phi), p.domain_length, p.final_time};
    }
};

/// Adjoint indexed by physical time, tagged with the kernel that forced it.
struct TransportAdjointSolution {
    SpaceTimeField field;
    Kernel forcing;
    AdjointScheme scheme;
};

/// Level k of the result is level N - k of the input.
inline SpaceTimeField reverse_time(const SpaceTimeField& field) {
    SpaceTimeField out(field.grid(), field.time_grid(), field.components());
    const std::size_t last = field.level_count() - 1;
    for (std::size_t n = 0; n <= last; ++n) {
        for (std::size_t i = 0; i < field.cell_count(); ++i) {
            for (std::size_t c = 0; c < field.components(); ++c) out.at(last - n, i, c) = field.at(n, i, c);
        }
    }
    return out;
}

namespace detail {

inline void check_adjoint_inputs(const TransportAdjointProblem& p, const Grid1D& grid, const TimeGrid& tgrid) {
    detail::require(p.a > 0.0, "adjoint: wave speed a must be positive");
    detail::require(p.phi.components() == 1, "transport adjoint needs a scalar kernel");
    detail::require(std::abs(grid.length() - p.domain_length) <= 1e-12 * p.domain_length,
                    "adjoint: grid does not cover the domain");
    detail::require(tgrid.t_start() == 0.0 && std::abs(tgrid.t_end() - p.final_time) <= 1e-12 * p.final_time,
                    "adjoint: time grid must span [0, T]");
}

/// phi at cell centers, physical time t.
inline void sample_kernel(const Kernel& phi, const Grid1D& grid, double t, std::vector<double>& out) {
    out.resize(grid.cell_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = phi.values(grid.center(i), t)[0];
}

}  // namespace detail

/// First-order upwind biased from the right; inflow ghost mirrored to 0 at x = L.
inline TransportAdjointSolution adjoint_upwind_solve(const TransportAdjointProblem& problem, const Grid1D& grid,
                                                     const TimeGrid& tgrid) {
    detail::check_adjoint_inputs(problem, grid, tgrid);
    check_cfl(problem.a, tgrid.dt(), grid, "adjoint_upwind_solve");
    const std::size_t m = grid.cell_count();
    const double dtau = tgrid.dt();
    const double T = problem.final_time;
    std::vector<double> nu(m), cur(m, 0.0), next(m), src;
    for (std::size_t i = 0; i < m; ++i) nu[i] = problem.a * dtau / grid.width(i);

    SpaceTimeField tau_field(grid, tgrid, 1);
    for (std::size_t n = 0; n < tgrid.steps(); ++n) {
        detail::sample_kernel(problem.phi, grid, T - tgrid.time(n), src);
        for (std::size_t i = 0; i < m; ++i) {
            double down = i + 1 == m ? -cur[m - 1] : cur[i + 1];
            next[i] = cur[i] + nu[i] * (down - cur[i]) + dtau * src[i];
        }
        cur.swap(next);
        tau_field.set_level(n + 1, cur);
    }
    tau_field.require_finite("adjoint_upwind_solve");
    return {reverse_time(tau_field), problem.phi, AdjointScheme::upwind1};
}

inline bool is_uniform(const Grid1D& grid, double rel_tol = 1e-10) {
    double w0 = grid.width(0);
    for (std::size_t i = 1; i < grid.cell_count(); ++i) {
        if (std::abs(grid.width(i) - w0) > rel_tol * w0) return false;
    }
    return true;
}

/// Leap-frog: one upwind step to start, inflow ghost mirrored to 0 at x = L,
/// zeroth-order extrapolation at the outflow x = 0. Uniform grids only.
inline TransportAdjointSolution adjoint_leapfrog_solve(const TransportAdjointProblem& problem, const Grid1D& grid,
                                                       const TimeGrid& tgrid) {
    detail::check_adjoint_inputs(problem, grid, tgrid);
    if (!is_uniform(grid)) throw InvalidArgument("adjoint_leapfrog_solve: grid must be uniform");
    check_cfl(problem.a, tgrid.dt(), grid, "adjoint_leapfrog_solve");
    const std::size_t m = grid.cell_count();
    const double dtau = tgrid.dt();
    const double T = problem.final_time;
    const double nu = problem.a * dtau / grid.width(0);
    std::vector<double> prev(m, 0.0), cur(m), next(m), src;

    SpaceTimeField tau_field(grid, tgrid, 1);
    detail::sample_kernel(problem.phi, grid, T, src);
    for (std::size_t i = 0; i < m; ++i) {
        double down = i + 1 == m ? -prev[m - 1] : prev[i + 1];
        cur[i] = prev[i] + nu * (down - prev[i]) + dtau * src[i];
    }
    tau_field.set_level(1, cur);
    for (std::size_t n = 1; n < tgrid.steps(); ++n) {
        detail::sample_kernel(problem.phi, grid, T - tgrid.time(n), src);
        for (std::size_t i = 0; i < m; ++i) {
            double right = i + 1 == m ? -cur[m - 1] : cur[i + 1];
            double left = i == 0 ? cur[0] : cur[i - 1];
            next[i] = prev[i] + nu * (right - left) + 2.0 * dtau * src[i];
        }
        prev.swap(cur);
        cur.swap(next);
        tau_field.set_level(n + 1, cur);
    }
    tau_field.require_finite("adjoint_leapfrog_solve");
    return {reverse_time(tau_field), problem.phi, AdjointScheme::leapfrog2};
}

inline TransportAdjointSolution adjoint_solve(const TransportAdjointProblem& problem, const Grid1D& grid,
                                              const TimeGrid& tgrid, AdjointScheme scheme) {
    return scheme == AdjointScheme::upwind1 ? adjoint_upwind_solve(problem, grid, tgrid)
                                            : adjoint_leapfrog_solve(problem, grid, tgrid);
}

/// Uniform M_adj-cell grid with the fewest steps meeting `cfl`.
inline TransportAdjointSolution adjoint_solve(const TransportAdjointProblem& problem, std::size_t cells,
                                              AdjointScheme scheme, double cfl = 0.9) {
    auto grid = uniform_grid(problem.domain_length, cells);
    auto tg = TimeGrid::for_cfl(0.0, problem.final_time, problem.a, grid.min_width(), cfl);
    return adjoint_solve(problem, grid, tg, scheme);
}

/// Characteristic solution for phi = c: v = c min(T - t, (L - x) / a).
class ConstantKernelAdjoint {
public:
    ConstantKernelAdjoint(double a, double domain_length, double final_time, double c = 1.0)
        : a_(a), L_(domain_length), T_(final_time), c_(c) {}

    std::size_t components() const { return 1; }
    double value(double x, double t) const { return c_ * std::min(T_ - t, (L_ - x) / a_); }
    Values values(double x, double t) const { return {value(x, t), 0.0}; }

    /// The kink x = L - a (T - t) is diagonal; break where it meets the region edges.
    void add_breaks(std::vector<double>& xb, std::vector<double>& tb, const Rect& r) const {
        xb.push_back(L_ - a_ * (T_ - r.t_lo));
        xb.push_back(L_ - a_ * (T_ - r.t_hi));
        tb.push_back(T_ - (L_ - r.x_lo) / a_);
        tb.push_back(T_ - (L_ - r.x_hi) / a_);
    }

private:
    double a_, L_, T_, c_;
};

}  // namespace fvgoal
