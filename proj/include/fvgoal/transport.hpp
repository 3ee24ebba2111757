#pragma once
// Linear advection u_t + a u_x = f on (0, L) x (0, T) with inflow data
// u(0, t) = g(t) and u(x, 0) = u0(x), solved by first-order upwind.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fvgoal/error.hpp"
#include "fvgoal/fields.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/quadrature.hpp"

namespace fvgoal {

using SpaceTimeFunction = std::function<double(double, double)>;
using LineFunction = std::function<double(double)>;

struct TransportProblem {
    double a = 1.0;
    SpaceTimeFunction f;  // empty means f = 0
    LineFunction g;
    LineFunction u0;
    double domain_length = 1.0;
    double final_time = 0.5;
    std::optional<SpaceTimeFunction> exact;  // closed-form solution, when known

    void validate() const {
        detail::require(std::isfinite(a) && a > 0.0, "transport: wave speed a must be positive");
        detail::require(domain_length > 0.0 && final_time > 0.0, "transport: bad domain");
        detail::require(static_cast<bool>(g) && static_cast<bool>(u0),
                        "transport: boundary and initial data required");
    }

    double source(double x, double t) const { return f ? f(x, t) : 0.0; }
};

inline double exact_sine_value(double a, double x, double t) {
    return std::sin(2.0 * std::numbers::pi * (x - a * t));
}

inline SpaceTimeFunction exact_sine_solution(double a) {
    return [a](double x, double t) { return exact_sine_value(a, x, t); };
}

/// u0 = sin(2 pi x), g = -sin(2 a pi t), f = 0 on (0, 1) x (0, T).
inline TransportProblem transport_sine_case(double a = 1.0, double final_time = 0.5) {
    TransportProblem p;
    p.a = a;
    p.u0 = [](double x) { return std::sin(2.0 * std::numbers::pi * x); };
    p.g = [a](double t) { return -std::sin(2.0 * a * std::numbers::pi * t); };
    p.domain_length = 1.0;
    p.final_time = final_time;
    p.exact = exact_sine_solution(a);
    return p;
}

/// Per-cell averages of `fn` with a `points`-point Gauss rule on each cell.
template <class F>
std::vector<double> cell_averages(const Grid1D& grid, F&& fn, std::size_t points = 3) {
    const auto& rule = gauss_legendre(points);
    std::vector<double> out(grid.cell_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double c = grid.center(i), r = 0.5 * grid.width(i), s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * fn(c + r * rule.abscissae[q]);
        out[i] = 0.5 * s;
    }
    return out;
}

/// Throws CflViolation when speed * dt / min(width) exceeds 1.
inline void check_cfl(double speed, double dt, const Grid1D& grid, const std::string& who) {
    double nu = std::abs(speed) * dt / grid.min_width();
    if (nu > 1.0 + 1e-12) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: CFL number %.6g > 1 (speed %.6g, dt %.6g, min width %.6g)",
                      who.c_str(), nu, std::abs(speed), dt, grid.min_width());
        throw CflViolation(buf);
    }
}

/// Upwind from given initial averages. Ghost cell: (U_0 + U_1) / 2 = g(t_n).
inline SpaceTimeField upwind_solve(const TransportProblem& problem, const Grid1D& grid,
                                   const TimeGrid& tgrid, std::span<const double> initial) {
    problem.validate();
    check_cfl(problem.a, tgrid.dt(), grid, "upwind_solve");
    detail::require(initial.size() == grid.cell_count(), "upwind_solve: initial data size mismatch");
    const std::size_t m = grid.cell_count();
    const double dt = tgrid.dt();
    std::vector<double> nu(m);
    for (std::size_t i = 0; i < m; ++i) nu[i] = problem.a * dt / grid.width(i);

    SpaceTimeField field(grid, tgrid, 1);
    field.set_level(0, initial);
    std::vector<double> cur(initial.begin(), initial.end()), next(m);
    for (std::size_t n = 0; n < tgrid.steps(); ++n) {
        double t = tgrid.time(n);
        double ghost = 2.0 * problem.g(t) - cur[0];
        for (std::size_t i = 0; i < m; ++i) {
            double up = i == 0 ? ghost : cur[i - 1];
            next[i] = cur[i] - nu[i] * (cur[i] - up);
            if (problem.f) next[i] += dt * problem.f(grid.center(i), t);
        }
        cur.swap(next);
        field.set_level(n + 1, cur);
    }
    field.require_finite("upwind_solve");
    return field;
}

inline SpaceTimeField upwind_solve(const TransportProblem& problem, const Grid1D& grid,
                                   const TimeGrid& tgrid) {
    problem.validate();
    auto init = cell_averages(grid, problem.u0);
    return upwind_solve(problem, grid, tgrid, init);
}

/// One upwind solve per time interval; each restarts from the conservative
/// projection of the previous interval's final level.
inline std::vector<SpaceTimeField> upwind_solve(const TransportProblem& problem,
                                                const SlabPartition& partition, double cfl = 0.9) {
    problem.validate();
    detail::require(std::abs(partition.final_time() - problem.final_time) <= 1e-12 * problem.final_time,
                    "upwind_solve: partition does not end at T");
    std::vector<SpaceTimeField> out;
    out.reserve(partition.interval_count());
    std::vector<double> init = cell_averages(partition.grid(0), problem.u0);
    for (std::size_t j = 0; j < partition.interval_count(); ++j) {
        const Grid1D& g = partition.grid(j);
        if (j > 0) {
            const SpaceTimeField& prev = out.back();
            init = project_averages(prev.grid(), prev.level(prev.level_count() - 1), g);
        }
        auto tg = TimeGrid::for_cfl(partition.t_lo(j), partition.t_hi(j), problem.a, g.min_width(), cfl);
        out.push_back(upwind_solve(problem, g, tg, init));
    }
    return out;
}

}  // namespace fvgoal
