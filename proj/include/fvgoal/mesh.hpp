#pragma once
// Spatial grids, time grids and space-time slab partitions.
//
// Indices are 0-based throughout the C++ API: cell i of a Grid1D is
// [node(i), node(i + 1)], interval j of a SlabPartition is
// [time_break(j), time_break(j + 1)].

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fvgoal/error.hpp"

namespace fvgoal {

class Grid1D {
public:
    explicit Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        detail::require(nodes_.size() >= 3, "Grid1D needs at least 2 cells");
        detail::require(nodes_.front() == 0.0, "Grid1D must start at x = 0");
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            detail::require(std::isfinite(nodes_[i]) && nodes_[i] > nodes_[i - 1],
                            "Grid1D nodes must be strictly increasing");
        }
    }

    std::size_t cell_count() const { return nodes_.size() - 1; }
    double length() const { return nodes_.back(); }
    std::span<const double> nodes() const { return nodes_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double lo(std::size_t cell) const { return nodes_[cell]; }
    double hi(std::size_t cell) const { return nodes_[cell + 1]; }
    double width(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }
    double center(std::size_t cell) const { return 0.5 * (nodes_[cell] + nodes_[cell + 1]); }

    double min_width() const {
        double w = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cell_count(); ++i) w = std::min(w, width(i));
        return w;
    }

    bool contains(double x) const { return x >= 0.0 && x <= length(); }

    /// Cell holding x; a point on a shared node belongs to the lower cell.
    std::size_t locate(double x) const {
        if (!contains(x)) throw OutOfDomain("x = " + std::to_string(x) + " outside grid");
        auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end(), x);
        return static_cast<std::size_t>(it - (nodes_.begin() + 1));
    }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    std::vector<double> nodes_;
};

/// Uniform steps t_n = t_start + n (t_end - t_start) / N.
class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t steps)
        : t_start_(t_start), t_end_(t_end), steps_(steps) {
        detail::require(steps >= 1, "TimeGrid needs N >= 1");
        detail::require(t_end > t_start, "TimeGrid needs a positive time step");
    }

    /// Fewest equal steps with speed * dt / min_width <= cfl.
    static TimeGrid for_cfl(double t_start, double t_end, double speed, double min_width,
                            double cfl) {
        detail::require(cfl > 0.0 && speed > 0.0 && min_width > 0.0, "for_cfl: bad arguments");
        double exact = speed * (t_end - t_start) / (cfl * min_width);
        auto n = static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-14)));
        return TimeGrid(t_start, t_end, std::max<std::size_t>(n, 1));
    }

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    std::size_t steps() const { return steps_; }
    std::size_t level_count() const { return steps_ + 1; }
    double dt() const { return (t_end_ - t_start_) / static_cast<double>(steps_); }

    double time(std::size_t level) const {
        if (level >= steps_) return t_end_;
        return t_start_ + static_cast<double>(level) * dt();
    }

    bool contains(double t) const { return t >= t_start_ && t <= t_end_; }

    /// Step n with t in [t_n, t_{n+1}]; shared levels go to the lower step.
    std::size_t locate(double t) const {
        if (!contains(t)) throw OutOfDomain("t = " + std::to_string(t) + " outside time grid");
        double s = (t - t_start_) / dt();
        auto n = static_cast<std::ptrdiff_t>(std::ceil(s)) - 1;
        n = std::clamp<std::ptrdiff_t>(n, 0, static_cast<std::ptrdiff_t>(steps_) - 1);
        auto un = static_cast<std::size_t>(n);
        // ceil can be off by one when s is within rounding of an integer
        if (un + 1 < steps_ && t > time(un + 1)) ++un;
        if (un > 0 && t <= time(un)) --un;
        return un;
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t_start_;
    double t_end_;
    std::size_t steps_;
};

inline Grid1D uniform_grid(double domain_length, std::size_t cells) {
    detail::require(cells >= 2, "uniform_grid needs M >= 2");
    detail::require(domain_length > 0.0 && std::isfinite(domain_length),
                    "uniform_grid needs a positive length");
    std::vector<double> nodes(cells + 1);
    for (std::size_t i = 0; i < cells; ++i) {
        nodes[i] = domain_length * static_cast<double>(i) / static_cast<double>(cells);
    }
    nodes[cells] = domain_length;
    return Grid1D(std::move(nodes));
}

/// Splits every flagged cell at its midpoint.
inline Grid1D bisect_cells(const Grid1D& grid, const std::set<std::size_t>& flagged) {
    if (!flagged.empty() && *flagged.rbegin() >= grid.cell_count()) {
        throw InvalidArgument("bisect_cells: cell index out of range");
    }
    std::vector<double> nodes;
    nodes.reserve(grid.nodes().size() + flagged.size());
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        nodes.push_back(grid.lo(i));
        if (flagged.contains(i)) nodes.push_back(grid.center(i));
    }
    nodes.push_back(grid.length());
    return Grid1D(std::move(nodes));
}

/// True when every node of `coarse` is also a node of `fine`.
inline bool is_refinement_of(const Grid1D& fine, const Grid1D& coarse) {
    auto f = fine.nodes();
    for (double x : coarse.nodes()) {
        if (!std::binary_search(f.begin(), f.end(), x)) return false;
    }
    return true;
}

struct SlabIndex {
    std::size_t interval = 0;
    std::size_t cell = 0;
    auto operator<=>(const SlabIndex&) const = default;
};

/// Time intervals [t_{j}, t_{j+1}] each carrying its own spatial grid.
/// One interval is the time-unvarying layout; several give the time-varying one.
class SlabPartition {
public:
    SlabPartition(std::vector<double> time_breaks, std::vector<Grid1D> grids)
        : breaks_(std::move(time_breaks)), grids_(std::move(grids)) {
        detail::require(breaks_.size() >= 2, "SlabPartition needs at least one interval");
        detail::require(breaks_.front() == 0.0, "SlabPartition must start at t = 0");
        detail::require(grids_.size() + 1 == breaks_.size(),
                        "SlabPartition needs one grid per time interval");
        for (std::size_t j = 1; j < breaks_.size(); ++j) {
            detail::require(breaks_[j] > breaks_[j - 1], "time breaks must increase");
        }
        for (const auto& g : grids_) {
            detail::require(g.length() == grids_.front().length(),
                            "all interval grids must share the domain length");
        }
    }

    /// N equal intervals over [0, T], each with a uniform grid of `cells` cells.
    static SlabPartition uniform(double domain_length, double final_time, std::size_t intervals,
                                 std::size_t cells) {
        detail::require(intervals >= 1, "SlabPartition needs N >= 1");
        std::vector<double> breaks(intervals + 1);
        for (std::size_t j = 0; j < intervals; ++j) {
            breaks[j] = final_time * static_cast<double>(j) / static_cast<double>(intervals);
        }
        breaks[intervals] = final_time;
        std::vector<Grid1D> grids(intervals, uniform_grid(domain_length, cells));
        return SlabPartition(std::move(breaks), std::move(grids));
    }

    std::size_t interval_count() const { return grids_.size(); }
    std::span<const double> time_breaks() const { return breaks_; }
    double t_lo(std::size_t j) const { return breaks_[j]; }
    double t_hi(std::size_t j) const { return breaks_[j + 1]; }
    double final_time() const { return breaks_.back(); }
    double domain_length() const { return grids_.front().length(); }
    const Grid1D& grid(std::size_t j) const { return grids_[j]; }
    std::span<const Grid1D> grids() const { return grids_; }

    std::size_t slab_count() const {
        std::size_t n = 0;
        for (const auto& g : grids_) n += g.cell_count();
        return n;
    }

    double min_width() const {
        double w = std::numeric_limits<double>::infinity();
        for (const auto& g : grids_) w = std::min(w, g.min_width());
        return w;
    }

    std::size_t interval_of(double t) const {
        if (t < 0.0 || t > final_time()) {
            throw OutOfDomain("t = " + std::to_string(t) + " outside partition");
        }
        auto it = std::lower_bound(breaks_.begin() + 1, breaks_.end(), t);
        return static_cast<std::size_t>(it - (breaks_.begin() + 1));
    }

    /// Slab containing (x, t); shared boundaries resolve to the lower index.
    SlabIndex slab_of(double x, double t) const {
        std::size_t j = interval_of(t);
        return {j, grids_[j].locate(x)};
    }

    friend bool operator==(const SlabPartition&, const SlabPartition&) = default;

private:
    std::vector<double> breaks_;
    std::vector<Grid1D> grids_;
};

inline SlabIndex slab_of(const SlabPartition& p, double x, double t) { return p.slab_of(x, t); }

struct RefinementPlan {
    std::set<SlabIndex> flags;
    SlabPartition refined_partition;
};

inline RefinementPlan plan_refinement(const SlabPartition& partition, std::set<SlabIndex> flags) {
    std::vector<std::set<std::size_t>> per_interval(partition.interval_count());
    for (const auto& f : flags) {
        if (f.interval >= partition.interval_count()) {
            throw InvalidArgument("refinement flag interval out of range");
        }
        per_interval[f.interval].insert(f.cell);
    }
    std::vector<Grid1D> grids;
    grids.reserve(partition.interval_count());
    for (std::size_t j = 0; j < partition.interval_count(); ++j) {
        grids.push_back(bisect_cells(partition.grid(j), per_interval[j]));
    }
    std::vector<double> breaks(partition.time_breaks().begin(), partition.time_breaks().end());
    return {std::move(flags), SlabPartition(std::move(breaks), std::move(grids))};
}

/// One node per line, round-trip decimal text.
inline void write_grid_nodes(std::ostream& os, const Grid1D& grid) {
    char buf[32];
    for (double x : grid.nodes()) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf << '\n';
    }
}

}  // namespace fvgoal
