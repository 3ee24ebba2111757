#pragma once
// Composite tensor-product Gauss-Legendre quadrature over space-time
// rectangles, plus a small adaptive integrator for reference values.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "fvgoal/error.hpp"

namespace fvgoal {

struct GaussLegendreRule {
    std::vector<double> abscissae;  // on [-1, 1]
    std::vector<double> weights;

    std::size_t size() const { return abscissae.size(); }
};

namespace detail {

inline GaussLegendreRule compute_gauss_legendre(std::size_t n) {
    GaussLegendreRule rule;
    rule.abscissae.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    if (n == 1) {
        rule.weights[0] = 2.0;
        return rule;
    }
    for (std::size_t i = 0; i < n / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.abscissae[i] = -x;
        rule.abscissae[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        // middle node x = 0: P_n'(0) from the recurrence
        double p0 = 1.0, p1 = 0.0;
        for (std::size_t k = 2; k <= n; ++k) {
            double pk = (-(k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        double dp = static_cast<double>(n) * (-p0) / -1.0;
        rule.weights[n / 2] = 2.0 / (dp * dp);
    }
    return rule;
}

}  // namespace detail

inline constexpr std::size_t max_gauss_points = 32;

/// Cached n-point rule, 1 <= n <= max_gauss_points.
inline const GaussLegendreRule& gauss_legendre(std::size_t n) {
    detail::require(n >= 1 && n <= max_gauss_points, "Gauss-Legendre order out of range");
    static const auto cache = [] {
        std::array<GaussLegendreRule, max_gauss_points + 1> rules{};
        for (std::size_t k = 1; k <= max_gauss_points; ++k) {
            rules[k] = detail::compute_gauss_legendre(k);
        }
        return rules;
    }();
    return cache[n];
}

/// Sum in a fixed binary tree; order depends only on the input length.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct QuadratureSpec {
    std::size_t points = 3;  // per axis per panel
};

struct Rect {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;

    bool empty() const { return !(x_hi > x_lo) || !(t_hi > t_lo); }
};

/// Sorted, de-duplicated breakpoints clipped to [lo, hi] with both ends present.
inline std::vector<double> normalize_breaks(std::vector<double> breaks, double lo, double hi) {
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::erase_if(breaks, [&](double b) { return !(b >= lo && b <= hi); });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

/// Composite rule on the panels cut by `breaks` in [lo, hi].
template <class F>
double integrate_line(double lo, double hi, std::vector<double> breaks, F&& f,
                      QuadratureSpec spec = {}) {
    if (!(hi > lo)) return 0.0;
    const auto& rule = gauss_legendre(spec.points);
    auto b = normalize_breaks(std::move(breaks), lo, hi);
    std::vector<double> panels;
    panels.reserve(b.size());
    for (std::size_t p = 0; p + 1 < b.size(); ++p) {
        double c = 0.5 * (b[p] + b[p + 1]), r = 0.5 * (b[p + 1] - b[p]);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(c + r * rule.abscissae[q]);
        panels.push_back(r * s);
    }
    return pairwise_sum(panels);
}

/// Composite tensor-product rule on the panels cut by the x and t breaks.
template <class F>
double integrate_rect(const Rect& region, std::vector<double> x_breaks, std::vector<double> t_breaks,
                      F&& f, QuadratureSpec spec = {}) {
    if (region.empty()) return 0.0;
    const auto& rule = gauss_legendre(spec.points);
    auto xb = normalize_breaks(std::move(x_breaks), region.x_lo, region.x_hi);
    auto tb = normalize_breaks(std::move(t_breaks), region.t_lo, region.t_hi);
    const std::size_t q = rule.size();
    std::vector<double> xs((xb.size() - 1) * q), wx((xb.size() - 1) * q);
    for (std::size_t p = 0; p + 1 < xb.size(); ++p) {
        double c = 0.5 * (xb[p] + xb[p + 1]), r = 0.5 * (xb[p + 1] - xb[p]);
        for (std::size_t k = 0; k < q; ++k) {
            xs[p * q + k] = c + r * rule.abscissae[k];
            wx[p * q + k] = r * rule.weights[k];
        }
    }
    std::vector<double> panels;
    panels.reserve((xb.size() - 1) * (tb.size() - 1));
    for (std::size_t pt = 0; pt + 1 < tb.size(); ++pt) {
        double c = 0.5 * (tb[pt] + tb[pt + 1]), r = 0.5 * (tb[pt + 1] - tb[pt]);
        for (std::size_t px = 0; px + 1 < xb.size(); ++px) {
            double s = 0.0;
            for (std::size_t kt = 0; kt < q; ++kt) {
                double t = c + r * rule.abscissae[kt];
                double row = 0.0;
                for (std::size_t kx = 0; kx < q; ++kx) {
                    row += wx[px * q + kx] * f(xs[px * q + kx], t);
                }
                s += r * rule.weights[kt] * row;
            }
            panels.push_back(s);
        }
    }
    return pairwise_sum(panels);
}

namespace detail {
template <class F>
double adaptive_step(F& f, double a, double b, double whole, double tol, int depth) {
    const auto& rule = gauss_legendre(10);
    auto gl = [&](double lo, double hi) {
        double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo), s = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * f(c + r * rule.abscissae[k]);
        return r * s;
    };
    double m = 0.5 * (a + b);
    double left = gl(a, m), right = gl(m, b);
    double refined = left + right;
    if (depth <= 0 || std::abs(refined - whole) <= tol) return refined;
    return adaptive_step(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Recursive bisection with a 10-point Gauss-Legendre rule per piece.
/// `breaks` are known non-smooth points; each piece between them is refined separately.
template <class F>
double adaptive_integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                          std::vector<double> breaks = {}, int max_depth = 40) {
    if (!(b > a)) return 0.0;
    auto pieces = normalize_breaks(std::move(breaks), a, b);
    const auto& rule = gauss_legendre(10);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
        double lo = pieces[p], hi = pieces[p + 1];
        double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo), s = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * f(c + r * rule.abscissae[k]);
        double share = abs_tol * (hi - lo) / (b - a);
        total += detail::adaptive_step(f, lo, hi, r * s, share, max_depth);
    }
    return total;
}

}  // namespace fvgoal
