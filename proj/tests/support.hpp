#pragma once
// Shared generators and independent oracles for the test suite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fvgoal/fvgoal.hpp"

namespace fvgoal::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240515u);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline std::size_t uniform_int(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng());
}

/// Nonuniform grid on [0, L]; widths vary by up to a factor `spread`.
inline Grid1D random_grid(double length, std::size_t cells, double spread = 3.0) {
    std::vector<double> w(cells);
    for (auto& x : w) x = uniform(1.0, spread);
    double total = 0.0;
    for (double x : w) total += x;
    std::vector<double> nodes(cells + 1, 0.0);
    for (std::size_t i = 0; i < cells; ++i) nodes[i + 1] = nodes[i] + w[i] * length / total;
    nodes[cells] = length;
    return Grid1D(nodes);
}

/// N in {1, 2, 3} intervals with random breaks and independent nonuniform grids.
inline SlabPartition random_partition(double length, double final_time, std::size_t min_cells = 8,
                                      std::size_t max_cells = 40) {
    std::size_t n = uniform_int(1, 3);
    std::vector<double> breaks{0.0};
    std::vector<double> inner;
    for (std::size_t j = 1; j < n; ++j) inner.push_back(uniform(0.15, 0.85) * final_time);
    std::sort(inner.begin(), inner.end());
    for (double b : inner) {
        if (b - breaks.back() < 0.05 * final_time) b = breaks.back() + 0.05 * final_time;
        breaks.push_back(b);
    }
    breaks.push_back(final_time);
    std::vector<Grid1D> grids;
    for (std::size_t j = 0; j < n; ++j) grids.push_back(random_grid(length, uniform_int(min_cells, max_cells)));
    return SlabPartition(breaks, grids);
}

/// Adaptive Gauss-Kronrod (Boost) on [a, b]; independent of the library's integrators.
template <class F>
double gk_integrate(F f, double a, double b, double tol = 1e-13) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol);
}

/// Nested Gauss-Kronrod over [x0, x1] x [t0, t1].
template <class F>
double gk_integrate_2d(F f, double x0, double x1, double t0, double t1, double tol = 1e-12) {
    return gk_integrate([&](double t) { return gk_integrate([&](double x) { return f(x, t); }, x0, x1, tol); },
                        t0, t1, tol);
}

/// Integral of a function constant on each interval between sorted `points`
/// of [lo, hi], sampled at interval midpoints.
template <class F>
double piecewise_constant_integral(double lo, double hi, std::vector<double> points, F f) {
    points.push_back(lo);
    points.push_back(hi);
    std::erase_if(points, [&](double p) { return p < lo || p > hi; });
    std::sort(points.begin(), points.end());
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        double a = points[k], b = points[k + 1];
        if (b > a) s += (b - a) * f(0.5 * (a + b));
    }
    return s;
}

/// L1(Omega) distance between a discrete SWE solution and the exact packets,
/// exact in x (both are piecewise constant) and Gauss in t on each step.
inline double swe_l1_error(const SweSolution& sol, const SweProblem& problem, std::size_t t_points = 8) {
    SweExactSolution exact(problem);
    const auto& rule = gauss_legendre(t_points);
    double total = 0.0;
    for (const auto& f : sol.physical) {
        const auto& tg = f.time_grid();
        const auto& g = f.grid();
        for (std::size_t n = 0; n < tg.steps(); ++n) {
            double c = 0.5 * (tg.time(n) + tg.time(n + 1)), r = 0.5 * tg.dt();
            for (std::size_t q = 0; q < rule.size(); ++q) {
                double t = c + r * rule.abscissae[q];
                auto jumps = exact.breaks_at(t);
                std::vector<double> pts(g.nodes().begin(), g.nodes().end());
                pts.insert(pts.end(), jumps.begin(), jumps.end());
                double e = piecewise_constant_integral(0.0, g.length(), pts, [&](double x) {
                    std::size_t i = g.locate(x);
                    Vec2 hu = exact.hu(x, t);
                    return std::abs(hu[0] - f.at(n, i, 0)) + std::abs(hu[1] - f.at(n, i, 1));
                });
                total += r * rule.weights[q] * e;
            }
        }
    }
    return total;
}

/// Q'(u#)(u - u#) for the kinetic energy linearized about u#: the value the
/// estimator must reach once its adjoint is exact. Same quadrature as swe_l1_error.
inline double swe_linearized_error(const SweSolution& sol, const SweProblem& problem, std::size_t t_points = 8) {
    SweExactSolution exact(problem);
    const auto& rule = gauss_legendre(t_points);
    double total = 0.0;
    for (const auto& f : sol.physical) {
        const auto& tg = f.time_grid();
        const auto& g = f.grid();
        for (std::size_t n = 0; n < tg.steps(); ++n) {
            double c = 0.5 * (tg.time(n) + tg.time(n + 1)), r = 0.5 * tg.dt();
            for (std::size_t q = 0; q < rule.size(); ++q) {
                double t = c + r * rule.abscissae[q];
                auto jumps = exact.breaks_at(t);
                std::vector<double> pts(g.nodes().begin(), g.nodes().end());
                pts.insert(pts.end(), jumps.begin(), jumps.end());
                double e = piecewise_constant_integral(0.0, g.length(), pts, [&](double x) {
                    std::size_t i = g.locate(x);
                    Vec2 hu = exact.hu(x, t);
                    double h = f.at(n, i, 0), u = f.at(n, i, 1);
                    return 0.5 * u * u * (hu[0] - h) + h * u * (hu[1] - u);
                });
                total += r * rule.weights[q] * e;
            }
        }
    }
    return total;
}

/// L2(Omega) distance between a piecewise-constant scalar field and u(x, t),
/// q x q Gauss points on every cell x step rectangle.
template <class U>
double l2_error(const SpaceTimeField& f, U u, std::size_t q = 5) {
    const auto& rule = gauss_legendre(q);
    const auto& g = f.grid();
    const auto& tg = f.time_grid();
    double s = 0.0;
    for (std::size_t n = 0; n < tg.steps(); ++n) {
        double tc = 0.5 * (tg.time(n) + tg.time(n + 1)), tr = 0.5 * tg.dt();
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            double xc = g.center(i), xr = 0.5 * g.width(i);
            for (std::size_t a = 0; a < rule.size(); ++a) {
                for (std::size_t b = 0; b < rule.size(); ++b) {
                    double d = f.at(n, i) - u(xc + xr * rule.abscissae[a], tc + tr * rule.abscissae[b]);
                    s += rule.weights[a] * rule.weights[b] * xr * tr * d * d;
                }
            }
        }
    }
    return std::sqrt(s);
}

inline double observed_order(double coarse_error, double fine_error) { return std::log2(coarse_error / fine_error); }

}  // namespace fvgoal::testing
