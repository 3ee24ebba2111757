#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace fvgoal;
using namespace fvgoal::testing;

namespace {

SpaceTimeField filled(const Grid1D& g, const TimeGrid& tg, Values v, std::size_t comps) {
    SpaceTimeField f(g, tg, comps);
    for (std::size_t n = 0; n < f.level_count(); ++n)
        for (std::size_t i = 0; i < f.cell_count(); ++i)
            for (std::size_t c = 0; c < comps; ++c) f.at(n, i, c) = v[c];
    return f;
}

/// 1/2 int h u^2 of the two packets, from the packet geometry. Single-packet
/// regions carry density 1/8; the overlap has u = 0.
double swe_qoi_closed_form(const SweProblem& p) {
    const double lp = 1.0 + std::numbers::sqrt2, lm = 1.0 - std::numbers::sqrt2;
    const double e = p.epsilon_ic, T = p.final_time;
    const double t_right_in = (p.domain_length - p.pulse_hi()) / lp;  // leading edge leaves
    const double t_right_out = (p.domain_length - p.pulse_lo()) / lp;
    const double t_split = 2.0 * e / (lp - lm);
    EXPECT_LT(t_right_out, T);
    EXPECT_GT(p.pulse_lo() + lm * T, 0.0);
    double right = 2.0 * e * t_right_in + e * (t_right_out - t_right_in);
    double left = 2.0 * e * T;
    double overlap = e * t_split;
    return (right + left - 2.0 * overlap) / 8.0;
}

}  // namespace

TEST(Kernel, Values) {
    EXPECT_EQ(eval_kernel(Kernel::constant(), 0.3, 0.2)[0], 1.0);
    EXPECT_NEAR(eval_kernel(Kernel::gaussian(0.1, 0.5, 0.25), 0.5, 0.25)[0], 31.830988618379067, 1e-12);
    auto zero = std::make_shared<std::vector<SpaceTimeField>>();
    zero->push_back(filled(uniform_grid(1.0, 4), TimeGrid(0.0, 0.3, 3), {0.0, 0.0}, 2));
    auto ke = eval_kernel(Kernel::kinetic_energy(zero), 0.4, 0.1);
    EXPECT_EQ(ke[0], 0.0);
    EXPECT_EQ(ke[1], 0.0);
}

TEST(Kernel, KineticEnergyLinearization) {
    auto lin = std::make_shared<std::vector<SpaceTimeField>>();
    lin->push_back(filled(uniform_grid(1.0, 4), TimeGrid(0.0, 0.3, 3), {3.0, 2.0}, 2));
    auto ke = Kernel::kinetic_energy(lin).values(0.9, 0.29);
    EXPECT_DOUBLE_EQ(ke[0], 2.0);  // u^2 / 2
    EXPECT_DOUBLE_EQ(ke[1], 6.0);  // h u
}

TEST(Kernel, KineticEnergyWithoutFieldRaises) {
    auto k = Kernel::kinetic_energy();
    EXPECT_THROW(k.values(0.5, 0.1), InvalidArgument);
    EXPECT_THROW(k.linearization(), InvalidArgument);
    auto bad = std::make_shared<std::vector<SpaceTimeField>>();
    bad->push_back(filled(uniform_grid(1.0, 4), TimeGrid(0.0, 0.3, 3), {1.0, 0.0}, 1));
    EXPECT_THROW(Kernel::kinetic_energy(bad), InvalidArgument);
    EXPECT_THROW(Kernel::gaussian(0.0, 0.5, 0.25), InvalidArgument);
}

TEST(Kernel, SameAs) {
    EXPECT_TRUE(Kernel::constant(2.0).same_as(Kernel::constant(2.0)));
    EXPECT_FALSE(Kernel::constant(2.0).same_as(Kernel::constant(1.0)));
    EXPECT_FALSE(Kernel::constant().same_as(Kernel::gaussian(0.1, 0.5, 0.25)));
    auto a = std::make_shared<std::vector<SpaceTimeField>>();
    a->push_back(filled(uniform_grid(1.0, 4), TimeGrid(0.0, 0.3, 3), {1.0, 1.0}, 2));
    auto b = std::make_shared<std::vector<SpaceTimeField>>(*a);
    EXPECT_TRUE(Kernel::kinetic_energy(a).same_as(Kernel::kinetic_energy(a)));
    EXPECT_FALSE(Kernel::kinetic_energy(a).same_as(Kernel::kinetic_energy(b)));
}

TEST(Kernel, GaussianMassInsideUnitSlab) {
    auto k = Kernel::gaussian(0.1, 0.5, 0.25);
    auto f = [&](double x, double t) { return k.values(x, t)[0]; };
    double oracle = gk_integrate_2d(f, 0.0, 1.0, 0.0, 0.5);
    EXPECT_NEAR(oracle, 1.0, 2e-3);
    auto one = Analytic([](double, double) { return 1.0; });
    EXPECT_NEAR(inner_product(one, k, Rect{0.0, 1.0, 0.0, 0.5}, {5}), oracle, 1e-10);
}

TEST(QoiDiscrete, UnitFieldConstantKernel) {
    auto f = filled(random_grid(1.0, 13), TimeGrid(0.0, 0.5, 9), {1.0, 0.0}, 1);
    EXPECT_NEAR(qoi_discrete(f, Kernel::constant()).value, 0.5, 1e-15);
}

TEST(QoiDiscrete, SineCellAveragesAgainstConstantKernel) {
    auto g = uniform_grid(1.0, 64);
    TimeGrid tg(0.0, 0.5, 40);
    SpaceTimeField f(g, tg, 1);
    auto avg = cell_averages(g, [](double x) { return std::sin(2.0 * std::numbers::pi * x); });
    for (std::size_t n = 0; n < f.level_count(); ++n) f.set_level(n, avg);
    EXPECT_NEAR(qoi_discrete(f, Kernel::constant()).value, 0.0, 1e-14);
}

TEST(QoiDiscrete, KineticEnergyOfUniformState) {
    auto f = filled(random_grid(1.0, 11), TimeGrid(0.0, 0.3, 7), {1.0, 2.0}, 2);
    auto q = qoi_discrete(f, Kernel::kinetic_energy());
    EXPECT_NEAR(q.value, 0.6, 1e-15);
    EXPECT_EQ(q.provenance, Provenance::discrete);
}

TEST(QoiDiscrete, LinearInTheSolution) {
    auto g = random_grid(1.0, 17);
    TimeGrid tg(0.0, 0.5, 11);
    SpaceTimeField a(g, tg, 1), b(g, tg, 1), c(g, tg, 1);
    for (std::size_t n = 0; n < a.level_count(); ++n)
        for (std::size_t i = 0; i < a.cell_count(); ++i) {
            a.at(n, i) = uniform(-1.0, 1.0);
            b.at(n, i) = uniform(-1.0, 1.0);
            c.at(n, i) = 2.0 * a.at(n, i) - 3.0 * b.at(n, i);
        }
    auto k = Kernel::gaussian(0.1, 0.5, 0.25);
    EXPECT_NEAR(qoi_discrete(c, k).value, 2.0 * qoi_discrete(a, k).value - 3.0 * qoi_discrete(b, k).value, 1e-13);
}

TEST(QoiDiscrete, ComponentMismatch) {
    auto f = filled(uniform_grid(1.0, 4), TimeGrid(0.0, 0.3, 3), {1.0, 1.0}, 2);
    EXPECT_THROW(qoi_discrete(f, Kernel::constant()), InvalidArgument);
}

TEST(QoiReference, SineConstantKernelIsZero) {
    auto q = qoi_reference(transport_sine_case(), Kernel::constant());
    EXPECT_NEAR(q.value, 0.0, 1e-12);
    EXPECT_EQ(q.provenance, Provenance::exact);
}

TEST(QoiReference, SineGaussianAgainstGaussKronrod) {
    auto k = Kernel::gaussian(0.1, 0.5, 0.25);
    auto q = qoi_reference(transport_sine_case(), k);
    double oracle = gk_integrate_2d(
        [&](double x, double t) { return exact_sine_value(1.0, x, t) * k.values(x, t)[0]; }, 0.0, 1.0, 0.0, 0.5);
    EXPECT_NEAR(q.value, oracle, 1e-11);
}

TEST(QoiReference, FallsBackToFineGridWithoutExactSolution) {
    auto p = transport_sine_case();
    p.exact.reset();
    auto q = qoi_reference(p, Kernel::constant());
    EXPECT_EQ(q.provenance, Provenance::reference);
    EXPECT_NEAR(q.value, 0.0, 1e-4);
    EXPECT_THROW(qoi_reference(transport_sine_case(), Kernel::kinetic_energy()), InvalidArgument);
}

TEST(QoiReference, SweKineticEnergyClosedForm) {
    SweProblem p;
    auto q = qoi_reference(p);
    EXPECT_EQ(q.provenance, Provenance::exact);
    EXPECT_NEAR(q.value, swe_qoi_closed_form(p), 1e-13);
    SweProblem q2;
    q2.epsilon_ic = 0.08;
    q2.center = 0.45;
    EXPECT_NEAR(qoi_reference(q2).value, swe_qoi_closed_form(q2), 1e-13);
}

TEST(QoiReference, SweFineGridIsLabeledReference) {
    SweProblem p;
    auto fine = qoi_fine_reference(p, 5120);
    EXPECT_EQ(fine.provenance, Provenance::reference);
    // first-order-in-sqrt(h) convergence leaves a few 1e-4 at this resolution
    EXPECT_NEAR(fine.value, qoi_reference(p).value, 4e-4);
}

TEST(QoiKineticEnergy, DifferenceIdentity) {
    // Q(u) - Q(u#) = int (h - h#) u^2 / 2 + int (u - u#) h# (u + u#) / 2
    auto g = random_grid(1.0, 20);
    TimeGrid tg(0.0, 0.3, 12);
    SpaceTimeField d(g, tg, 2);
    for (std::size_t n = 0; n < d.level_count(); ++n)
        for (std::size_t i = 0; i < d.cell_count(); ++i) {
            d.at(n, i, 0) = uniform(0.5, 1.5);
            d.at(n, i, 1) = uniform(-1.0, 1.0);
        }
    auto h = [](double x, double t) { return 1.0 + 0.3 * std::sin(3.0 * x + t); };
    auto u = [](double x, double t) { return std::cos(2.0 * x - t); };
    Reconstruction rd(d, ReconstructionKind::piecewise_constant);
    std::vector<double> xb, tb;
    rd.add_breaks(xb, tb, Rect{0.0, 1.0, 0.0, 0.3});
    Rect all{0.0, 1.0, 0.0, 0.3};
    QuadratureSpec q{8};
    double qu = integrate_rect(all, xb, tb, [&](double x, double t) { return 0.5 * h(x, t) * u(x, t) * u(x, t); }, q);
    double qd = qoi_discrete(d, Kernel::kinetic_energy()).value;
    double rhs = integrate_rect(all, xb, tb, [&](double x, double t) {
        Values v = rd.values(x, t);
        return 0.5 * (h(x, t) - v[0]) * u(x, t) * u(x, t) + 0.5 * (u(x, t) - v[1]) * v[0] * (u(x, t) + v[1]);
    }, q);
    EXPECT_NEAR(qu - qd, rhs, 1e-13);
}
