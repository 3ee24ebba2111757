#pragma once
// Discrete space-time solutions (cell averages per time level), their
// point reconstructions, conservative projection, and L2(Omega) pairings.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "fvgoal/error.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/quadrature.hpp"

namespace fvgoal {

inline constexpr std::size_t max_components = 2;
using Values = std::array<double, max_components>;

class SpaceTimeField {
public:
    SpaceTimeField(Grid1D grid, TimeGrid tgrid, std::size_t components)
        : grid_(std::move(grid)), tgrid_(tgrid), components_(components) {
        detail::require(components >= 1 && components <= max_components,
                        "SpaceTimeField supports 1 or 2 components");
        values_.assign(tgrid_.level_count() * grid_.cell_count() * components_, 0.0);
    }

    const Grid1D& grid() const { return grid_; }
    const TimeGrid& time_grid() const { return tgrid_; }
    std::size_t components() const { return components_; }
    std::size_t cell_count() const { return grid_.cell_count(); }
    std::size_t level_count() const { return tgrid_.level_count(); }

    double& at(std::size_t level, std::size_t cell, std::size_t comp = 0) {
        return values_[index(level, cell, comp)];
    }
    double at(std::size_t level, std::size_t cell, std::size_t comp = 0) const {
        return values_[index(level, cell, comp)];
    }

    /// Component `comp` of one time level copied out as a cell vector.
    std::vector<double> level(std::size_t level, std::size_t comp = 0) const {
        std::vector<double> out(cell_count());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(level, i, comp);
        return out;
    }

    void set_level(std::size_t level, std::span<const double> cells, std::size_t comp = 0) {
        detail::require(cells.size() == cell_count(), "set_level: size mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) at(level, i, comp) = cells[i];
    }

    std::span<const double> raw() const { return values_; }

    void require_finite(const std::string& who) const {
        for (double v : values_) {
            if (!std::isfinite(v)) throw NumericalFailure(who + ": non-finite value in solution");
        }
    }

    friend bool operator==(const SpaceTimeField&, const SpaceTimeField&) = default;

private:
    std::size_t index(std::size_t level, std::size_t cell, std::size_t comp) const {
        return (level * grid_.cell_count() + cell) * components_ + comp;
    }

    Grid1D grid_;
    TimeGrid tgrid_;
    std::size_t components_;
    std::vector<double> values_;
};

/// Something that can be paired in L2(Omega): point values plus the
/// breakpoints where it stops being smooth.
template <class T>
concept Integrand = requires(const T& f, double x, double t, std::vector<double>& b, const Rect& r) {
    { f.components() } -> std::convertible_to<std::size_t>;
    { f.values(x, t) } -> std::convertible_to<Values>;
    f.add_breaks(b, b, r);
};

enum class ReconstructionKind { piecewise_constant, piecewise_bilinear };

/// Point evaluation of one field, or of consecutive per-interval fields.
class Reconstruction {
public:
    Reconstruction(const SpaceTimeField& field, ReconstructionKind kind)
        : pieces_(&field, 1), kind_(kind) {}
    Reconstruction(std::span<const SpaceTimeField> pieces, ReconstructionKind kind)
        : pieces_(pieces), kind_(kind) {
        detail::require(!pieces_.empty(), "Reconstruction needs at least one field");
        for (std::size_t j = 1; j < pieces_.size(); ++j) {
            detail::require(pieces_[j].time_grid().t_start() == pieces_[j - 1].time_grid().t_end(),
                            "Reconstruction pieces must be contiguous in time");
            detail::require(pieces_[j].components() == pieces_[0].components(),
                            "Reconstruction pieces must share component count");
        }
    }

    ReconstructionKind kind() const { return kind_; }
    std::size_t components() const { return pieces_[0].components(); }
    double t_start() const { return pieces_.front().time_grid().t_start(); }
    double t_end() const { return pieces_.back().time_grid().t_end(); }
    double length() const { return pieces_.front().grid().length(); }
    std::span<const SpaceTimeField> pieces() const { return pieces_; }

    std::size_t piece_of(double t) const {
        if (!(t >= t_start() && t <= t_end())) {
            throw OutOfDomain("t = " + std::to_string(t) + " outside reconstruction");
        }
        std::size_t j = 0;
        while (j + 1 < pieces_.size() && t > pieces_[j].time_grid().t_end()) ++j;
        return j;
    }

    Values values(double x, double t) const {
        const SpaceTimeField& f = pieces_[piece_of(t)];
        const Grid1D& g = f.grid();
        const TimeGrid& tg = f.time_grid();
        std::size_t n = tg.locate(t);
        std::size_t cell = g.locate(x);
        Values out{};
        if (kind_ == ReconstructionKind::piecewise_constant) {
            for (std::size_t c = 0; c < f.components(); ++c) out[c] = f.at(n, cell, c);
            return out;
        }
        // anchors at cell centers and time levels; constant in boundary half-cells
        std::size_t left = cell, right = cell;
        double wr = 0.0;
        if (x < g.center(cell)) {
            if (cell > 0) {
                left = cell - 1;
                wr = (x - g.center(left)) / (g.center(cell) - g.center(left));
            }
        } else if (cell + 1 < g.cell_count()) {
            right = cell + 1;
            wr = (x - g.center(cell)) / (g.center(right) - g.center(cell));
        }
        double theta = (t - tg.time(n)) / tg.dt();
        for (std::size_t c = 0; c < f.components(); ++c) {
            double lo = (1.0 - wr) * f.at(n, left, c) + wr * f.at(n, right, c);
            double hi = (1.0 - wr) * f.at(n + 1, left, c) + wr * f.at(n + 1, right, c);
            out[c] = (1.0 - theta) * lo + theta * hi;
        }
        return out;
    }

    double eval(double x, double t, std::size_t comp = 0) const { return values(x, t)[comp]; }

    /// Breakpoints inside `region` (closed) of every piece overlapping it in
    /// time. A zero-height region (a line t = const) is allowed.
    void add_breaks(std::vector<double>& xb, std::vector<double>& tb, const Rect& region) const {
        for (const auto& f : pieces_) {
            const TimeGrid& tg = f.time_grid();
            bool line = !(region.t_hi > region.t_lo);
            if (line ? (region.t_lo < tg.t_start() || region.t_lo > tg.t_end())
                     : (tg.t_end() <= region.t_lo || tg.t_start() >= region.t_hi)) {
                continue;
            }
            const Grid1D& g = f.grid();
            auto nodes = g.nodes();
            auto first = std::lower_bound(nodes.begin(), nodes.end(), region.x_lo);
            auto last = std::upper_bound(nodes.begin(), nodes.end(), region.x_hi);
            xb.insert(xb.end(), first, last);
            if (kind_ == ReconstructionKind::piecewise_bilinear) {
                auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(first - nodes.begin() - 1, 0));
                for (std::size_t i = lo; i < g.cell_count() && g.lo(i) <= region.x_hi; ++i) {
                    xb.push_back(g.center(i));
                }
            }
            double s_lo = std::max(region.t_lo, tg.t_start()), s_hi = std::min(region.t_hi, tg.t_end());
            std::size_t n0 = tg.locate(s_lo), n1 = tg.locate(s_hi) + 1;
            for (std::size_t n = n0; n <= n1; ++n) tb.push_back(tg.time(n));
        }
    }

private:
    std::span<const SpaceTimeField> pieces_;
    ReconstructionKind kind_;
};

/// Analytic integrand; `fn(x, t)` returns a double (one component) or Values.
template <class F>
class Analytic {
public:
    explicit Analytic(F fn, std::size_t components = 1, std::vector<double> x_breaks = {},
                      std::vector<double> t_breaks = {})
        : fn_(std::move(fn)), components_(components), xb_(std::move(x_breaks)),
          tb_(std::move(t_breaks)) {}

    std::size_t components() const { return components_; }

    Values values(double x, double t) const {
        if constexpr (std::convertible_to<std::invoke_result_t<const F&, double, double>, double>) {
            return Values{fn_(x, t), 0.0};
        } else {
            return fn_(x, t);
        }
    }

    void add_breaks(std::vector<double>& xb, std::vector<double>& tb, const Rect&) const {
        xb.insert(xb.end(), xb_.begin(), xb_.end());
        tb.insert(tb.end(), tb_.begin(), tb_.end());
    }

private:
    F fn_;
    std::size_t components_;
    std::vector<double> xb_, tb_;
};

/// Integral of sum_c a_c b_c over `region`; panels are the cells of both
/// operands' breakpoints intersected with the region.
template <Integrand A, Integrand B>
double inner_product(const A& a, const B& b, const Rect& region, QuadratureSpec spec = {}) {
    if (a.components() != b.components()) {
        throw InvalidArgument("inner_product: component counts differ");
    }
    if (region.empty()) return 0.0;
    std::vector<double> xb, tb;
    a.add_breaks(xb, tb, region);
    b.add_breaks(xb, tb, region);
    const std::size_t nc = a.components();
    return integrate_rect(
        region, std::move(xb), std::move(tb),
        [&](double x, double t) {
            Values va = a.values(x, t), vb = b.values(x, t);
            double s = 0.0;
            for (std::size_t c = 0; c < nc; ++c) s += va[c] * vb[c];
            return s;
        },
        spec);
}

/// Conservative overlap projection of cell averages onto `target`.
inline std::vector<double> project_averages(const Grid1D& source, std::span<const double> values,
                                            const Grid1D& target) {
    detail::require(values.size() == source.cell_count(), "project: value count mismatch");
    if (std::abs(source.length() - target.length()) > 1e-12 * source.length()) {
        throw InvalidArgument("project: grids cover different domains");
    }
    if (source == target) return {values.begin(), values.end()};
    std::vector<double> out(target.cell_count(), 0.0);
    std::size_t s = 0;
    for (std::size_t k = 0; k < target.cell_count(); ++k) {
        double lo = target.lo(k), hi = target.hi(k), acc = 0.0;
        while (s + 1 < source.cell_count() && source.hi(s) <= lo) ++s;
        for (std::size_t i = s; i < source.cell_count() && source.lo(i) < hi; ++i) {
            double overlap = std::min(hi, source.hi(i)) - std::max(lo, source.lo(i));
            if (overlap > 0.0) acc += overlap * values[i];
        }
        out[k] = acc / target.width(k);
    }
    return out;
}

inline SpaceTimeField project(const SpaceTimeField& field, const Grid1D& target) {
    SpaceTimeField out(target, field.time_grid(), field.components());
    for (std::size_t n = 0; n < field.level_count(); ++n) {
        for (std::size_t c = 0; c < field.components(); ++c) {
            out.set_level(n, project_averages(field.grid(), field.level(n, c), target), c);
        }
    }
    return out;
}

/// CSV columns time_level,cell_index,component,value (cell_index 1-based).
inline void write_field_csv(std::ostream& os, const SpaceTimeField& field) {
    os << "time_level,cell_index,component,value\n";
    char buf[128];
    for (std::size_t n = 0; n < field.level_count(); ++n) {
        for (std::size_t i = 0; i < field.cell_count(); ++i) {
            for (std::size_t c = 0; c < field.components(); ++c) {
                std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g\n", n, i + 1, c, field.at(n, i, c));
                os << buf;
            }
        }
    }
}

}  // namespace fvgoal
