#pragma once
// Linearized shallow water system (h, u)_t + A (h, u)_x = 0 with
// A = [[1, 1], [2, 1]], advanced in characteristic variables (xi, eta).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fvgoal/error.hpp"
#include "fvgoal/fields.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/transport.hpp"

namespace fvgoal {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

inline Vec2 mat_vec(const Mat2& m, const Vec2& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline Mat2 multiply(const Mat2& a, const Mat2& b) {
    Mat2 out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return out;
}

inline Mat2 transpose(const Mat2& m) { return {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

inline constexpr Mat2 swe_matrix{{{1.0, 1.0}, {2.0, 1.0}}};

struct CharacteristicTransform {
    double lambda_plus;
    double lambda_minus;
    Mat2 P;      // columns are the eigenvectors for lambda_plus, lambda_minus
    Mat2 P_inv;
    Mat2 P_transpose;

    /// (xi, eta) from (h, u).
    Vec2 to_characteristic(const Vec2& hu) const { return mat_vec(P_inv, hu); }
    Vec2 to_physical(const Vec2& xe) const { return mat_vec(P, xe); }
    /// Adjoint characteristic variables (xi~, eta~) = P^T u~.
    Vec2 to_adjoint_characteristic(const Vec2& hu) const { return mat_vec(P_transpose, hu); }
    Vec2 from_adjoint_characteristic(const Vec2& xe) const {
        // P^{-T} = (P^{-1})^T
        return mat_vec(transpose(P_inv), xe);
    }
};

inline CharacteristicTransform eig_decompose() {
    const double s = std::numbers::sqrt2;
    CharacteristicTransform c;
    c.lambda_plus = 1.0 + s;
    c.lambda_minus = 1.0 - s;
    c.P = {{{1.0, 1.0}, {s, -s}}};
    const double k = 1.0 / (2.0 * s);
    c.P_inv = {{{k * s, k}, {k * s, -k}}};
    c.P_transpose = transpose(c.P);
    return c;
}

/// Square pulse h0 = amplitude on |x - center| < epsilon_ic, u0 = 0, on (0, L).
struct SweProblem {
    double epsilon_ic = 0.05;
    double center = 0.5;
    double amplitude = 1.0;
    double domain_length = 1.0;
    double final_time = 0.3;

    void validate() const {
        detail::require(epsilon_ic > 0.0 && domain_length > 0.0 && final_time > 0.0,
                        "swe: bad problem parameters");
        detail::require(center - epsilon_ic >= 0.0 && center + epsilon_ic <= domain_length,
                        "swe: pulse must lie inside the domain");
    }

    double pulse_lo() const { return center - epsilon_ic; }
    double pulse_hi() const { return center + epsilon_ic; }

    double h0(double x) const {
        return std::abs(x - center) < epsilon_ic ? amplitude : 0.0;
    }

    /// Exact cell averages of h0 (interval overlap).
    std::vector<double> h0_averages(const Grid1D& grid) const {
        std::vector<double> out(grid.cell_count());
        for (std::size_t i = 0; i < out.size(); ++i) {
            double overlap = std::min(grid.hi(i), pulse_hi()) - std::max(grid.lo(i), pulse_lo());
            out[i] = overlap > 0.0 ? amplitude * overlap / grid.width(i) : 0.0;
        }
        return out;
    }
};

inline double swe_max_speed() {
    auto c = eig_decompose();
    return std::max(std::abs(c.lambda_plus), std::abs(c.lambda_minus));
}

struct SweSolution {
    std::vector<SpaceTimeField> physical;        // components (h, u)
    std::vector<SpaceTimeField> characteristic;  // components (xi, eta)
};

/// Upwind in characteristic variables from initial (h, u) averages.
/// Zero inflow xi = 0 at x = 0 and eta = 0 at x = L, with mirrored ghosts.
inline SweSolution swe_upwind_solve(const SweProblem& problem, const Grid1D& grid, const TimeGrid& tgrid,
                                    std::span<const double> h_init, std::span<const double> u_init) {
    problem.validate();
    const auto ct = eig_decompose();
    check_cfl(swe_max_speed(), tgrid.dt(), grid, "swe_upwind_solve");
    const std::size_t m = grid.cell_count();
    detail::require(h_init.size() == m && u_init.size() == m, "swe_upwind_solve: initial data size");
    const double dt = tgrid.dt();

    std::vector<double> xi(m), eta(m), nx(m), ne(m), nup(m), nun(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec2 c = ct.to_characteristic({h_init[i], u_init[i]});
        xi[i] = c[0];
        eta[i] = c[1];
        nup[i] = ct.lambda_plus * dt / grid.width(i);
        nun[i] = -ct.lambda_minus * dt / grid.width(i);
    }

    SweSolution sol;
    sol.physical.emplace_back(grid, tgrid, 2);
    sol.characteristic.emplace_back(grid, tgrid, 2);
    SpaceTimeField& phys = sol.physical.back();
    SpaceTimeField& chr = sol.characteristic.back();
    auto store = [&](std::size_t n) {
        for (std::size_t i = 0; i < m; ++i) {
            chr.at(n, i, 0) = xi[i];
            chr.at(n, i, 1) = eta[i];
            Vec2 hu = ct.to_physical({xi[i], eta[i]});
            phys.at(n, i, 0) = hu[0];
            phys.at(n, i, 1) = hu[1];
        }
    };
    store(0);
    for (std::size_t n = 0; n < tgrid.steps(); ++n) {
        for (std::size_t i = 0; i < m; ++i) {
            double left = i == 0 ? -xi[0] : xi[i - 1];
            double right = i + 1 == m ? -eta[m - 1] : eta[i + 1];
            nx[i] = xi[i] - nup[i] * (xi[i] - left);
            ne[i] = eta[i] + nun[i] * (right - eta[i]);
        }
        xi.swap(nx);
        eta.swap(ne);
        store(n + 1);
    }
    phys.require_finite("swe_upwind_solve");
    return sol;
}

inline SweSolution swe_upwind_solve(const SweProblem& problem, const Grid1D& grid, const TimeGrid& tgrid) {
    problem.validate();
    std::vector<double> h = problem.h0_averages(grid), u(grid.cell_count(), 0.0);
    return swe_upwind_solve(problem, grid, tgrid, h, u);
}

/// Per-interval solves with conservative restarts.
inline SweSolution swe_upwind_solve(const SweProblem& problem, const SlabPartition& partition,
                                    double cfl = 0.9) {
    problem.validate();
    detail::require(std::abs(partition.final_time() - problem.final_time) <= 1e-12 * problem.final_time,
                    "swe_upwind_solve: partition does not end at T");
    SweSolution out;
    std::vector<double> h = problem.h0_averages(partition.grid(0));
    std::vector<double> u(h.size(), 0.0);
    for (std::size_t j = 0; j < partition.interval_count(); ++j) {
        const Grid1D& g = partition.grid(j);
        if (j > 0) {
            const SpaceTimeField& prev = out.physical.back();
            std::size_t last = prev.level_count() - 1;
            h = project_averages(prev.grid(), prev.level(last, 0), g);
            u = project_averages(prev.grid(), prev.level(last, 1), g);
        }
        auto tg = TimeGrid::for_cfl(partition.t_lo(j), partition.t_hi(j), swe_max_speed(), g.min_width(), cfl);
        auto piece = swe_upwind_solve(problem, g, tg, h, u);
        out.physical.push_back(std::move(piece.physical.front()));
        out.characteristic.push_back(std::move(piece.characteristic.front()));
    }
    return out;
}

/// Two packets traced along characteristics with zero inflow.
class SweExactSolution {
public:
    explicit SweExactSolution(const SweProblem& problem) : p_(problem), ct_(eig_decompose()) {
        problem.validate();
    }

    double xi(double x, double t) const {
        double s = x - ct_.lambda_plus * t;
        return s < 0.0 ? 0.0 : 0.5 * p_.h0(s);
    }
    double eta(double x, double t) const {
        double s = x - ct_.lambda_minus * t;
        return s > p_.domain_length ? 0.0 : 0.5 * p_.h0(s);
    }
    Vec2 hu(double x, double t) const { return ct_.to_physical({xi(x, t), eta(x, t)}); }

    /// Positions in [0, L] where the solution jumps at time t.
    std::vector<double> breaks_at(double t) const {
        std::vector<double> b;
        for (double lam : {ct_.lambda_plus, ct_.lambda_minus}) {
            for (double e : {p_.pulse_lo(), p_.pulse_hi()}) {
                double x = e + lam * t;
                if (x > 0.0 && x < p_.domain_length) b.push_back(x);
            }
        }
        std::sort(b.begin(), b.end());
        return b;
    }

    /// Range of x swept by the right-moving packet over [0, T], clipped to the domain.
    std::array<double, 2> right_packet_range() const {
        return {p_.pulse_lo(), std::min(p_.domain_length, p_.pulse_hi() + ct_.lambda_plus * p_.final_time)};
    }
    std::array<double, 2> left_packet_range() const {
        return {std::max(0.0, p_.pulse_lo() + ct_.lambda_minus * p_.final_time), p_.pulse_hi()};
    }

    const SweProblem& problem() const { return p_; }

private:
    SweProblem p_;
    CharacteristicTransform ct_;
};

inline SweExactSolution swe_exact_solution(const SweProblem& problem) { return SweExactSolution(problem); }

}  // namespace fvgoal
