#pragma once
// Goal-oriented error estimates Q(u) - Q(u#) = (f - L u#, v) evaluated in
// transposed form, so that only the kernel, the data and boundary traces of
// the adjoint v appear:
//
//   transport: (f, v) - (u#, phi) + int_{t=0} u0 v dx + a int_{x=0} g v dt
//   SWE:       -(u#, phi) + int_{t=0} (h# h~ + u# u~) dx
//              + lambda+ int_{x=0} xi# xi~ dt - lambda- int_{x=L} eta# eta~ dt
//
// and their per-slab contributions E_ij.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "fvgoal/dual.hpp"
#include "fvgoal/error.hpp"
#include "fvgoal/fields.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/qoi.hpp"
#include "fvgoal/quadrature.hpp"
#include "fvgoal/swe.hpp"
#include "fvgoal/swe_adjoint.hpp"
#include "fvgoal/transport.hpp"
#include "fvgoal/transport_adjoint.hpp"

namespace fvgoal {

struct EstimateTerms {
    double source = 0.0;         // (f, v)
    double functional = 0.0;     // -(u#, phi)
    double initial_line = 0.0;   // t = 0
    double boundary_line = 0.0;  // x = 0 and x = L
};

struct ErrorBreakdown {
    double total = 0.0;
    std::map<SlabIndex, double> slabs;
    SlabPartition partition;
    EstimateTerms terms;

    double slab_sum() const {
        std::vector<double> v;
        v.reserve(slabs.size());
        for (const auto& [k, e] : slabs) v.push_back(e);
        return pairwise_sum(v);
    }

    double abs_sum() const {
        std::vector<double> v;
        v.reserve(slabs.size());
        for (const auto& [k, e] : slabs) v.push_back(std::abs(e));
        return pairwise_sum(v);
    }

    /// Per-cell totals over all time intervals (interval 0 grid; N = 1 layouts).
    std::vector<double> cell_totals() const {
        std::vector<double> out(partition.grid(0).cell_count(), 0.0);
        for (const auto& [k, e] : slabs) {
            if (k.interval == 0 || partition.grid(k.interval) == partition.grid(0)) out[k.cell] += e;
        }
        return out;
    }
};

struct EstimatorOptions {
    QuadratureSpec quadrature{};
    ReconstructionKind adjoint_reconstruction = ReconstructionKind::piecewise_bilinear;
    /// Also evaluate the global integrals directly (per time interval, not per
    /// slab) and report that as `total`; otherwise total is the slab sum.
    bool compute_global = true;
};

struct EffectivityReport {
    double estimated_error = 0.0;
    double true_error = 0.0;
    std::optional<double> effectivity;
};

inline EffectivityReport effectivity(double estimated, double true_error) {
    EffectivityReport r{estimated, true_error, std::nullopt};
    if (true_error != 0.0) r.effectivity = estimated / true_error;
    return r;
}

/// Slab layout of a per-interval solution.
inline SlabPartition partition_of(std::span<const SpaceTimeField> pieces) {
    detail::require(!pieces.empty(), "partition_of: empty solution");
    std::vector<double> breaks;
    std::vector<Grid1D> grids;
    for (const auto& f : pieces) {
        breaks.push_back(f.time_grid().t_start());
        grids.push_back(f.grid());
    }
    breaks.push_back(pieces.back().time_grid().t_end());
    return SlabPartition(std::move(breaks), std::move(grids));
}

namespace detail {

inline void nodes_within(const Grid1D& g, double lo, double hi, std::vector<double>& out) {
    auto n = g.nodes();
    out.insert(out.end(), std::lower_bound(n.begin(), n.end(), lo), std::upper_bound(n.begin(), n.end(), hi));
}

template <Integrand A>
void line_breaks_x(const A& a, double lo, double hi, double t, std::vector<double>& xb) {
    std::vector<double> tb;
    a.add_breaks(xb, tb, Rect{lo, hi, t, t});
}

template <Integrand A>
void line_breaks_t(const A& a, double x, double lo, double hi, std::vector<double>& tb) {
    std::vector<double> xb;
    a.add_breaks(xb, tb, Rect{x, x, lo, hi});
}

/// Shared slab loop. `area(region)` gives the area terms on a region,
/// `initial(lo, hi)` the t = 0 line on [lo, hi], `left(lo, hi)` / `right(lo, hi)`
/// the x = 0 / x = L lines on a time range.
template <class Area, class Initial, class Left, class Right>
ErrorBreakdown assemble(const SlabPartition& partition, const EstimatorOptions& opts, Area&& area,
                        Initial&& initial, Left&& left, Right&& right) {
    ErrorBreakdown out{0.0, {}, partition, {}};
    const double L = partition.domain_length();
    std::vector<double> src_parts, fun_parts, init_parts, bnd_parts;
    for (std::size_t j = 0; j < partition.interval_count(); ++j) {
        const Grid1D& g = partition.grid(j);
        const double t_lo = partition.t_lo(j), t_hi = partition.t_hi(j);
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            auto [s, f] = area(Rect{g.lo(i), g.hi(i), t_lo, t_hi});
            double e = s + f;
            if (j == 0) {
                double v = initial(g.lo(i), g.hi(i));
                if (!opts.compute_global) init_parts.push_back(v);
                e += v;
            }
            double b = 0.0;
            if (i == 0) b += left(t_lo, t_hi);
            if (i + 1 == g.cell_count()) b += right(t_lo, t_hi);
            e += b;
            if (!opts.compute_global) {
                src_parts.push_back(s);
                fun_parts.push_back(f);
                bnd_parts.push_back(b);
            }
            out.slabs[{j, i}] = e;
        }
        if (opts.compute_global) {
            auto [s, f] = area(Rect{0.0, L, t_lo, t_hi});
            src_parts.push_back(s);
            fun_parts.push_back(f);
            bnd_parts.push_back(left(t_lo, t_hi) + right(t_lo, t_hi));
        }
    }
    if (opts.compute_global) init_parts.push_back(initial(0.0, L));
    out.terms.source = pairwise_sum(src_parts);
    out.terms.functional = pairwise_sum(fun_parts);
    out.terms.initial_line = pairwise_sum(init_parts);
    out.terms.boundary_line = pairwise_sum(bnd_parts);
    if (opts.compute_global) {
        std::vector<double> all{out.terms.source, out.terms.functional, out.terms.initial_line,
                                out.terms.boundary_line};
        out.total = pairwise_sum(all);
    } else {
        out.total = out.slab_sum();
    }
    return out;
}

}  // namespace detail

/// Transport estimate with any scalar adjoint integrand (discrete or analytic).
template <Integrand Adj>
ErrorBreakdown estimate_transport(std::span<const SpaceTimeField> u_sharp, const Adj& adjoint,
                                  const TransportProblem& problem, const Kernel& kernel,
                                  const EstimatorOptions& opts = {}) {
    problem.validate();
    detail::require(kernel.components() == 1 && adjoint.components() == 1,
                    "estimate_transport: scalar kernel and adjoint required");
    const SlabPartition partition = partition_of(u_sharp);
    const Reconstruction u(u_sharp, ReconstructionKind::piecewise_constant);
    const Grid1D& g0 = partition.grid(0);
    const auto q = opts.quadrature;

    auto area = [&](const Rect& r) -> std::pair<double, double> {
        double s = 0.0;
        if (problem.f) {
            std::vector<double> xb, tb;
            u.add_breaks(xb, tb, r);
            Analytic fb([&](double x, double t) { return problem.f(x, t); }, 1, xb, tb);
            s = inner_product(fb, adjoint, r, q);
        }
        return {s, -inner_product(u, kernel, r, q)};
    };
    auto initial = [&](double lo, double hi) {
        std::vector<double> xb;
        detail::nodes_within(g0, lo, hi, xb);
        detail::line_breaks_x(adjoint, lo, hi, 0.0, xb);
        return integrate_line(lo, hi, std::move(xb),
                              [&](double x) { return problem.u0(x) * adjoint.values(x, 0.0)[0]; }, q);
    };
    auto left = [&](double lo, double hi) {
        std::vector<double> tb(partition.time_breaks().begin(), partition.time_breaks().end());
        detail::line_breaks_t(u, 0.0, lo, hi, tb);  // primal steps keep g resolved
        detail::line_breaks_t(adjoint, 0.0, lo, hi, tb);
        return problem.a *
               integrate_line(lo, hi, std::move(tb), [&](double t) { return problem.g(t) * adjoint.values(0.0, t)[0]; },
                              q);
    };
    auto right = [](double, double) { return 0.0; };
    return detail::assemble(partition, opts, area, initial, left, right);
}

inline void require_same_forcing(const Kernel& forcing, const Kernel& kernel) {
    if (!forcing.same_as(kernel)) {
        throw InvalidArgument("estimator: adjoint was forced by " + forcing.describe() +
                              " but the estimate uses " + kernel.describe());
    }
}

inline ErrorBreakdown estimate_transport(std::span<const SpaceTimeField> u_sharp,
                                         const TransportAdjointSolution& adjoint, const TransportProblem& problem,
                                         const Kernel& kernel, const EstimatorOptions& opts = {}) {
    require_same_forcing(adjoint.forcing, kernel);
    Reconstruction v(adjoint.field, opts.adjoint_reconstruction);
    return estimate_transport(u_sharp, v, problem, kernel, opts);
}

inline ErrorBreakdown estimate_transport(const SpaceTimeField& u_sharp, const TransportAdjointSolution& adjoint,
                                         const TransportProblem& problem, const Kernel& kernel,
                                         const EstimatorOptions& opts = {}) {
    return estimate_transport(std::span<const SpaceTimeField>(&u_sharp, 1), adjoint, problem, kernel, opts);
}

/// SWE estimate with any 2-component adjoint integrand returning (h~, u~).
template <Integrand Adj>
ErrorBreakdown estimate_swe(const SweSolution& u_sharp, const Adj& adjoint, const SweProblem& problem,
                            const Kernel& kernel, const EstimatorOptions& opts = {}) {
    problem.validate();
    detail::require(kernel.components() == 2 && adjoint.components() == 2,
                    "estimate_swe: 2-component kernel and adjoint required");
    const SlabPartition partition = partition_of(u_sharp.physical);
    const Reconstruction u(std::span<const SpaceTimeField>(u_sharp.physical), ReconstructionKind::piecewise_constant);
    const Reconstruction chr(std::span<const SpaceTimeField>(u_sharp.characteristic),
                             ReconstructionKind::piecewise_constant);
    const Grid1D& g0 = partition.grid(0);
    const double L = partition.domain_length();
    const auto ct = eig_decompose();
    const double s2 = std::numbers::sqrt2;
    const auto q = opts.quadrature;

    auto area = [&](const Rect& r) -> std::pair<double, double> {
        return {0.0, -inner_product(u, kernel, r, q)};
    };
    // initial data, not u#(0): the cell averages miss pulse edges that fall inside a cell
    auto initial = [&](double lo, double hi) {
        std::vector<double> xb{problem.pulse_lo(), problem.pulse_hi()};
        detail::nodes_within(g0, lo, hi, xb);
        detail::line_breaks_x(adjoint, lo, hi, 0.0, xb);
        return integrate_line(lo, hi, std::move(xb),
                              [&](double x) { return problem.h0(x) * adjoint.values(x, 0.0)[0]; }, q);
    };
    // characteristic traces of u# from the boundary cells
    auto boundary = [&](double x, double lo, double hi, int comp) {
        std::vector<double> tb(partition.time_breaks().begin(), partition.time_breaks().end());
        detail::line_breaks_t(chr, x, lo, hi, tb);
        detail::line_breaks_t(adjoint, x, lo, hi, tb);
        return integrate_line(lo, hi, std::move(tb), [&](double t) {
            Values v = adjoint.values(x, t);
            double vt = comp == 0 ? v[0] + s2 * v[1] : v[0] - s2 * v[1];
            return chr.values(x, t)[comp] * vt;
        }, q);
    };
    auto left = [&](double lo, double hi) { return ct.lambda_plus * boundary(0.0, lo, hi, 0); };
    auto right = [&](double lo, double hi) { return -ct.lambda_minus * boundary(L, lo, hi, 1); };
    return detail::assemble(partition, opts, area, initial, left, right);
}

inline ErrorBreakdown estimate_swe(const SweSolution& u_sharp, const SweAdjointSolution& adjoint,
                                   const SweProblem& problem, const Kernel& kernel, const EstimatorOptions& opts = {}) {
    require_same_forcing(adjoint.forcing, kernel);
    SweAdjointReconstruction v(adjoint, opts.adjoint_reconstruction);
    return estimate_swe(u_sharp, v, problem, kernel, opts);
}

/// CSV columns j,i,t_lo,t_hi,x_lo,x_hi,E_ij with 1-based j and i.
inline void write_breakdown_csv(std::ostream& os, const ErrorBreakdown& b) {
    os << "j,i,t_lo,t_hi,x_lo,x_hi,E_ij\n";
    char buf[256];
    for (const auto& [k, e] : b.slabs) {
        const Grid1D& g = b.partition.grid(k.interval);
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", k.interval + 1, k.cell + 1,
                      b.partition.t_lo(k.interval), b.partition.t_hi(k.interval), g.lo(k.cell), g.hi(k.cell), e);
        os << buf;
    }
}

// Duality self-tests: |(L u, v) - (u, L* v)| with exact derivatives of
// analytic test functions written as generic lambdas f(x, t).

struct DualityOptions {
    double domain_length = 1.0;
    double final_time = 0.5;
    std::size_t panels = 16;   // per axis
    std::size_t points = 10;   // per panel per axis
};

namespace detail {
inline std::vector<double> even_breaks(double lo, double hi, std::size_t n) {
    std::vector<double> b(n + 1);
    for (std::size_t k = 0; k <= n; ++k) b[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
    return b;
}
}  // namespace detail

/// Transport: L u = u_t + a u_x, L* v = -v_t - a v_x.
template <class U, class V>
double duality_residual_transport(double a, const U& u, const V& v, const DualityOptions& o = {}) {
    Rect omega{0.0, o.domain_length, 0.0, o.final_time};
    auto xb = detail::even_breaks(0.0, o.domain_length, o.panels);
    auto tb = detail::even_breaks(0.0, o.final_time, o.panels);
    QuadratureSpec q{o.points};
    double lu_v = integrate_rect(omega, xb, tb, [&](double x, double t) {
        Jet ju = jet(u, x, t);
        return (ju.dt + a * ju.dx) * value_of(v(x, t));
    }, q);
    double u_lv = integrate_rect(omega, xb, tb, [&](double x, double t) {
        Jet jv = jet(v, x, t);
        return value_of(u(x, t)) * (-jv.dt - a * jv.dx);
    }, q);
    return std::abs(lu_v - u_lv);
}

/// SWE: L u = u_t + A u_x, L* v = -v_t - A^T v_x with A = [[1, 1], [2, 1]].
template <class UH, class UU, class VH, class VU>
double duality_residual_swe(const UH& uh, const UU& uu, const VH& vh, const VU& vu, const DualityOptions& o = {}) {
    Rect omega{0.0, o.domain_length, 0.0, o.final_time};
    auto xb = detail::even_breaks(0.0, o.domain_length, o.panels);
    auto tb = detail::even_breaks(0.0, o.final_time, o.panels);
    QuadratureSpec q{o.points};
    const Mat2& A = swe_matrix;
    double lu_v = integrate_rect(omega, xb, tb, [&](double x, double t) {
        Jet h = jet(uh, x, t), u = jet(uu, x, t);
        double l0 = h.dt + A[0][0] * h.dx + A[0][1] * u.dx;
        double l1 = u.dt + A[1][0] * h.dx + A[1][1] * u.dx;
        return l0 * value_of(vh(x, t)) + l1 * value_of(vu(x, t));
    }, q);
    double u_lv = integrate_rect(omega, xb, tb, [&](double x, double t) {
        Jet h = jet(vh, x, t), u = jet(vu, x, t);
        double l0 = -h.dt - A[0][0] * h.dx - A[1][0] * u.dx;
        double l1 = -u.dt - A[0][1] * h.dx - A[1][1] * u.dx;
        return value_of(uh(x, t)) * l0 + value_of(uu(x, t)) * l1;
    }, q);
    return std::abs(lu_v - u_lv);
}

/// u = sin^2(pi x) t^2, v = sin^2(pi x) (T - t)^2 on (0, 1) x (0, T).
inline double standard_transport_duality_residual(double a = 1.0, double final_time = 0.5) {
    auto u = [](auto x, auto t) {
        using std::sin;
        auto s = sin(std::numbers::pi * x);
        return s * s * t * t;
    };
    auto v = [final_time](auto x, auto t) {
        using std::sin;
        auto s = sin(std::numbers::pi * x);
        auto r = final_time - t;
        return s * s * r * r;
    };
    DualityOptions o;
    o.final_time = final_time;
    return duality_residual_transport(a, u, v, o);
}

namespace detail {
/// ((x - lo)(hi - x))^3 on (lo, hi), zero outside.
template <class X>
X cubic_bump(X x, double lo, double hi) {
    if (x <= X(lo) || x >= X(hi)) return X(0.0);
    X w = (x - X(lo)) * (X(hi) - x);
    return w * w * w;
}
}  // namespace detail

/// Compactly supported polynomial bumps in x times t^2 and (T - t)^2.
inline double standard_swe_duality_residual(double final_time = 0.3) {
    const double T = final_time;
    auto uh = [](auto x, auto t) { return detail::cubic_bump(x, 0.2, 0.7) * t * t; };
    auto uu = [](auto x, auto t) { return detail::cubic_bump(x, 0.3, 0.9) * t * t * 2.0; };
    auto vh = [T](auto x, auto t) { return detail::cubic_bump(x, 0.1, 0.6) * (T - t) * (T - t); };
    auto vu = [T](auto x, auto t) { return detail::cubic_bump(x, 0.25, 0.8) * (T - t) * (T - t) * 3.0; };
    DualityOptions o;
    o.final_time = T;
    o.panels = 20;
    return duality_residual_swe(uh, uu, vh, vu, o);
}

}  // namespace fvgoal
