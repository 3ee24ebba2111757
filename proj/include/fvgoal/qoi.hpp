#pragma once
// Quantities of interest Q(u) = (u, phi) and their kernels.

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fvgoal/error.hpp"
#include "fvgoal/fields.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/quadrature.hpp"
#include "fvgoal/swe.hpp"
#include "fvgoal/transport.hpp"

namespace fvgoal {

enum class KernelKind { constant, gaussian, kinetic_energy };

inline const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::constant: return "constant";
        case KernelKind::gaussian: return "gaussian";
        case KernelKind::kinetic_energy: return "kinetic_energy";
    }
    return "?";
}

/// Kernel parameters as they appear in configs.
struct KernelSpec {
    KernelKind kind = KernelKind::constant;
    double value = 1.0;     // constant
    double epsilon = 0.1;   // gaussian
    double center_x = 0.5;
    double center_t = 0.25;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

class Kernel {
public:
    static Kernel constant(double c = 1.0) {
        KernelSpec s;
        s.kind = KernelKind::constant;
        s.value = c;
        return Kernel(s);
    }

    static Kernel gaussian(double epsilon, double center_x, double center_t) {
        detail::require(epsilon > 0.0, "gaussian kernel needs epsilon > 0");
        KernelSpec s;
        s.kind = KernelKind::gaussian;
        s.epsilon = epsilon;
        s.center_x = center_x;
        s.center_t = center_t;
        return Kernel(s);
    }

    /// phi = (u#^2 / 2, h# u#) from the discrete solution (components h, u).
    static Kernel kinetic_energy(std::shared_ptr<const std::vector<SpaceTimeField>> linearization = nullptr) {
        KernelSpec s;
        s.kind = KernelKind::kinetic_energy;
        Kernel k(s);
        if (linearization) {
            detail::require(!linearization->empty() && linearization->front().components() == 2,
                            "kinetic-energy linearization must be a 2-component field");
            k.lin_ = std::move(linearization);
            k.recon_ = std::make_shared<Reconstruction>(std::span<const SpaceTimeField>(*k.lin_),
                                                        ReconstructionKind::piecewise_constant);
        }
        return k;
    }

    /// For the constant and gaussian kinds; kinetic_energy needs its field.
    static Kernel from_spec(const KernelSpec& s) {
        switch (s.kind) {
            case KernelKind::constant: return constant(s.value);
            case KernelKind::gaussian: return gaussian(s.epsilon, s.center_x, s.center_t);
            case KernelKind::kinetic_energy: return kinetic_energy();
        }
        throw InvalidArgument("unknown kernel kind");
    }

    const KernelSpec& spec() const { return spec_; }
    KernelKind kind() const { return spec_.kind; }
    std::size_t components() const { return spec_.kind == KernelKind::kinetic_energy ? 2 : 1; }
    bool has_linearization() const { return static_cast<bool>(lin_); }
    const std::vector<SpaceTimeField>& linearization() const {
        if (!lin_) throw InvalidArgument("kinetic-energy kernel has no linearization field");
        return *lin_;
    }

    /// Same parameters and, for kinetic energy, the same linearization object.
    bool same_as(const Kernel& other) const { return spec_ == other.spec_ && lin_ == other.lin_; }

    Values values(double x, double t) const {
        switch (spec_.kind) {
            case KernelKind::constant: return {spec_.value, 0.0};
            case KernelKind::gaussian: {
                double e2 = spec_.epsilon * spec_.epsilon;
                double dx = x - spec_.center_x, dt = t - spec_.center_t;
                return {std::exp(-(dx * dx + dt * dt) / e2) / (std::numbers::pi * e2), 0.0};
            }
            case KernelKind::kinetic_energy: {
                if (!recon_) throw InvalidArgument("kinetic-energy kernel evaluated without linearization field");
                Values hu = recon_->values(x, t);
                return {0.5 * hu[1] * hu[1], hu[0] * hu[1]};
            }
        }
        return {};
    }

    /// Gaussian: breaks every epsilon/4 within 3 epsilon of the center.
    /// Kinetic energy: the cell and step boundaries of the linearization.
    void add_breaks(std::vector<double>& xb, std::vector<double>& tb, const Rect& region) const {
        if (spec_.kind == KernelKind::gaussian) {
            double step = spec_.epsilon / 4.0;
            for (int k = -12; k <= 12; ++k) {
                xb.push_back(spec_.center_x + k * step);
                tb.push_back(spec_.center_t + k * step);
            }
            // coarser panels out to 6 eps, where the density is below 1e-15 of its peak
            for (double r : {3.5, 4.0, 4.5, 5.0, 6.0}) {
                for (double s : {-1.0, 1.0}) {
                    xb.push_back(spec_.center_x + s * r * spec_.epsilon);
                    tb.push_back(spec_.center_t + s * r * spec_.epsilon);
                }
            }
        } else if (spec_.kind == KernelKind::kinetic_energy && recon_) {
            recon_->add_breaks(xb, tb, region);
        }
    }

    std::string describe() const {
        char buf[128];
        switch (spec_.kind) {
            case KernelKind::constant:
                std::snprintf(buf, sizeof buf, "constant(%g)", spec_.value);
                break;
            case KernelKind::gaussian:
                std::snprintf(buf, sizeof buf, "gaussian(eps=%g, x=%g, t=%g)", spec_.epsilon, spec_.center_x,
                              spec_.center_t);
                break;
            case KernelKind::kinetic_energy: std::snprintf(buf, sizeof buf, "kinetic_energy"); break;
        }
        return buf;
    }

private:
    explicit Kernel(KernelSpec s) : spec_(s) {}

    KernelSpec spec_;
    std::shared_ptr<const std::vector<SpaceTimeField>> lin_;
    std::shared_ptr<const Reconstruction> recon_;
};

inline Values eval_kernel(const Kernel& kernel, double x, double t) { return kernel.values(x, t); }

enum class Provenance { exact, reference, discrete };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::exact: return "exact";
        case Provenance::reference: return "reference";
        case Provenance::discrete: return "discrete";
    }
    return "?";
}

struct QoIValue {
    double value = 0.0;
    std::string definition;
    Provenance provenance = Provenance::discrete;
};

/// Q(u#) for a (possibly per-interval) discrete solution.
inline QoIValue qoi_discrete(std::span<const SpaceTimeField> pieces, const Kernel& kernel,
                             QuadratureSpec spec = {}) {
    detail::require(!pieces.empty(), "qoi_discrete: empty solution");
    QoIValue q;
    q.definition = kernel.describe();
    q.provenance = Provenance::discrete;
    if (pieces.front().components() != kernel.components()) {
        throw InvalidArgument("qoi_discrete: field and kernel component counts differ");
    }
    std::vector<double> parts;
    if (kernel.kind() == KernelKind::kinetic_energy) {
        // 1/2 int h u^2, exact for piecewise constants
        for (const auto& f : pieces) {
            const double dt = f.time_grid().dt();
            for (std::size_t n = 0; n + 1 < f.level_count(); ++n) {
                double s = 0.0;
                for (std::size_t i = 0; i < f.cell_count(); ++i) {
                    double h = f.at(n, i, 0), u = f.at(n, i, 1);
                    s += 0.5 * h * u * u * f.grid().width(i);
                }
                parts.push_back(s * dt);
            }
        }
    } else {
        Reconstruction r(pieces, ReconstructionKind::piecewise_constant);
        for (const auto& f : pieces) {
            Rect region{0.0, f.grid().length(), f.time_grid().t_start(), f.time_grid().t_end()};
            parts.push_back(inner_product(r, kernel, region, spec));
        }
    }
    q.value = pairwise_sum(parts);
    return q;
}

inline QoIValue qoi_discrete(const SpaceTimeField& field, const Kernel& kernel, QuadratureSpec spec = {}) {
    return qoi_discrete(std::span<const SpaceTimeField>(&field, 1), kernel, spec);
}

/// Fine-grid discrete value, labeled "reference".
inline QoIValue qoi_fine_reference(const TransportProblem& problem, const Kernel& kernel,
                                   std::size_t cells = 5120, double cfl = 0.9) {
    auto grid = uniform_grid(problem.domain_length, cells);
    auto tg = TimeGrid::for_cfl(0.0, problem.final_time, problem.a, grid.min_width(), cfl);
    QoIValue q = qoi_discrete(upwind_solve(problem, grid, tg), kernel);
    q.provenance = Provenance::reference;
    return q;
}

inline QoIValue qoi_fine_reference(const SweProblem& problem, std::size_t cells = 5120, double cfl = 0.9) {
    auto grid = uniform_grid(problem.domain_length, cells);
    auto tg = TimeGrid::for_cfl(0.0, problem.final_time, swe_max_speed(), grid.min_width(), cfl);
    auto sol = swe_upwind_solve(problem, grid, tg);
    QoIValue q = qoi_discrete(sol.physical, Kernel::kinetic_energy());
    q.provenance = Provenance::reference;
    return q;
}

/// Q(u) of the exact solution by nested adaptive quadrature; falls back to a
/// fine-grid reference when the problem has no closed-form solution.
inline QoIValue qoi_reference(const TransportProblem& problem, const Kernel& kernel) {
    if (kernel.kind() == KernelKind::kinetic_energy) {
        throw InvalidArgument("qoi_reference: kinetic-energy QoI is defined for the SWE case");
    }
    if (!problem.exact) return qoi_fine_reference(problem, kernel);
    const auto& u = *problem.exact;
    const double L = problem.domain_length;
    std::vector<double> tb, xb;
    if (kernel.kind() == KernelKind::gaussian) {
        kernel.add_breaks(xb, tb, Rect{0.0, L, 0.0, problem.final_time});
    }
    auto inner = [&](double t) {
        return adaptive_integrate([&](double x) { return u(x, t) * kernel.values(x, t)[0]; }, 0.0, L, 1e-14,
                                  xb);
    };
    QoIValue q;
    q.value = adaptive_integrate(inner, 0.0, problem.final_time, 1e-13, tb);
    q.definition = kernel.describe();
    q.provenance = Provenance::exact;
    return q;
}

/// Q(u) = 1/2 int h u^2 of the exact two-packet solution.
inline QoIValue qoi_reference(const SweProblem& problem) {
    const SweExactSolution exact(problem);
    const auto ct = eig_decompose();
    const double L = problem.domain_length;
    auto density = [&](double t) {
        auto b = exact.breaks_at(t);
        b.insert(b.begin(), 0.0);
        b.push_back(L);
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < b.size(); ++k) {
            if (!(b[k + 1] > b[k])) continue;
            Vec2 hu = exact.hu(0.5 * (b[k] + b[k + 1]), t);
            s += 0.5 * hu[0] * hu[1] * hu[1] * (b[k + 1] - b[k]);
        }
        return s;
    };
    // kinks: an edge meets a boundary or another edge
    std::vector<double> kinks;
    const double lams[2] = {ct.lambda_plus, ct.lambda_minus};
    const double edges[2] = {problem.pulse_lo(), problem.pulse_hi()};
    for (double lam : lams) {
        for (double e : edges) {
            for (double wall : {0.0, L}) kinks.push_back((wall - e) / lam);
        }
    }
    for (double e1 : edges) {
        for (double e2 : edges) kinks.push_back((e2 - e1) / (ct.lambda_plus - ct.lambda_minus));
    }
    QoIValue q;
    q.value = adaptive_integrate(density, 0.0, problem.final_time, 1e-14, kinks);
    q.definition = "kinetic_energy";
    q.provenance = Provenance::exact;
    return q;
}

}  // namespace fvgoal
