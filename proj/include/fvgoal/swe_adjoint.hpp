#pragma once
// Adjoint SWE: -v_t - A^T v_x = phi, v(., T) = 0, with xi~ = 0 at x = L and
// eta~ = 0 at x = 0 where (xi~, eta~) = P^T v. In tau = T - t the two
// characteristic fields decouple into scalar advection problems:
//   xi~_tau - lambda+ xi~_x = phi_h + sqrt2 phi_u   (moves left)
//   eta~_tau - lambda- eta~_x = phi_h - sqrt2 phi_u  (moves right)

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fvgoal/error.hpp"
#include "fvgoal/fields.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/qoi.hpp"
#include "fvgoal/swe.hpp"
#include "fvgoal/transport_adjoint.hpp"

namespace fvgoal {

struct SweAdjointProblem {
    Kernel phi = Kernel::kinetic_energy();
    double domain_length = 1.0;
    double final_time = 0.3;

    static SweAdjointProblem for_primal(const SweProblem& p, Kernel phi) {
        return {std::move(phi), p.domain_length, p.final_time};
    }
};

/// (xi~, eta~) stored as two scalar fields, each on its own time grid and
/// indexed by physical time.
struct SweAdjointSolution {
    SpaceTimeField xi;
    SpaceTimeField eta;
    Kernel forcing;
};

namespace detail {

struct CharacteristicSweep {
    double speed;       // > 0
    bool moves_left;    // inflow at x = L when true, at x = 0 otherwise
    double sqrt2_sign;  // source phi_h + sqrt2_sign * sqrt2 * phi_u
};

inline SpaceTimeField sweep_characteristic(const SweAdjointProblem& problem, const Grid1D& grid,
                                           const TimeGrid& tgrid, const CharacteristicSweep& sw) {
    check_cfl(sw.speed, tgrid.dt(), grid, "swe_adjoint_solve");
    const std::size_t m = grid.cell_count();
    const double dtau = tgrid.dt();
    const double T = problem.final_time;
    const double s2 = std::numbers::sqrt2 * sw.sqrt2_sign;
    std::vector<double> nu(m), cur(m, 0.0), next(m), src(m);
    for (std::size_t i = 0; i < m; ++i) nu[i] = sw.speed * dtau / grid.width(i);

    SpaceTimeField tau_field(grid, tgrid, 1);
    for (std::size_t n = 0; n < tgrid.steps(); ++n) {
        double t = T - tgrid.time(n);
        for (std::size_t i = 0; i < m; ++i) {
            Values phi = problem.phi.values(grid.center(i), t);
            src[i] = phi[0] + s2 * phi[1];
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (sw.moves_left) {
                double down = i + 1 == m ? -cur[m - 1] : cur[i + 1];
                next[i] = cur[i] + nu[i] * (down - cur[i]) + dtau * src[i];
            } else {
                double up = i == 0 ? -cur[0] : cur[i - 1];
                next[i] = cur[i] - nu[i] * (cur[i] - up) + dtau * src[i];
            }
        }
        cur.swap(next);
        tau_field.set_level(n + 1, cur);
    }
    tau_field.require_finite("swe_adjoint_solve");
    return reverse_time(tau_field);
}

inline void check_swe_adjoint_inputs(const SweAdjointProblem& p, const Grid1D& grid) {
    detail::require(p.phi.components() == 2, "swe adjoint needs a 2-component kernel");
    detail::require(std::abs(grid.length() - p.domain_length) <= 1e-12 * p.domain_length,
                    "swe adjoint: grid does not cover the domain");
}

}  // namespace detail

/// Both characteristic fields on the same time grid.
inline SweAdjointSolution swe_adjoint_solve(const SweAdjointProblem& problem, const Grid1D& grid,
                                            const TimeGrid& tgrid) {
    detail::check_swe_adjoint_inputs(problem, grid);
    detail::require(tgrid.t_start() == 0.0 &&
                        std::abs(tgrid.t_end() - problem.final_time) <= 1e-12 * problem.final_time,
                    "swe adjoint: time grid must span [0, T]");
    check_cfl(swe_max_speed(), tgrid.dt(), grid, "swe_adjoint_solve");
    const auto ct = eig_decompose();
    return {detail::sweep_characteristic(problem, grid, tgrid, {ct.lambda_plus, true, 1.0}),
            detail::sweep_characteristic(problem, grid, tgrid, {-ct.lambda_minus, false, -1.0}), problem.phi};
}

/// Each characteristic field with its own step, at CFL `cfl` for its own speed.
inline SweAdjointSolution swe_adjoint_solve(const SweAdjointProblem& problem, const Grid1D& grid,
                                            double cfl = 1.0) {
    detail::check_swe_adjoint_inputs(problem, grid);
    const auto ct = eig_decompose();
    const double T = problem.final_time, h = grid.min_width();
    auto tg_xi = TimeGrid::for_cfl(0.0, T, ct.lambda_plus, h, cfl);
    auto tg_eta = TimeGrid::for_cfl(0.0, T, -ct.lambda_minus, h, cfl);
    return {detail::sweep_characteristic(problem, grid, tg_xi, {ct.lambda_plus, true, 1.0}),
            detail::sweep_characteristic(problem, grid, tg_eta, {-ct.lambda_minus, false, -1.0}), problem.phi};
}

/// Physical adjoint (h~, u~) = P^{-T} (xi~, eta~) from reconstructions of both fields.
class SweAdjointReconstruction {
public:
    SweAdjointReconstruction(const SweAdjointSolution& sol,
                             ReconstructionKind kind = ReconstructionKind::piecewise_bilinear)
        : xi_(sol.xi, kind), eta_(sol.eta, kind) {}

    std::size_t components() const { return 2; }

    Vec2 characteristic(double x, double t) const { return {xi_.eval(x, t), eta_.eval(x, t)}; }

    Values values(double x, double t) const {
        double a = xi_.eval(x, t), b = eta_.eval(x, t);
        return {0.5 * (a + b), (a - b) / (2.0 * std::numbers::sqrt2)};
    }

    void add_breaks(std::vector<double>& xb, std::vector<double>& tb, const Rect& region) const {
        xi_.add_breaks(xb, tb, region);
        eta_.add_breaks(xb, tb, region);
    }

private:
    Reconstruction xi_;
    Reconstruction eta_;
};

}  // namespace fvgoal
