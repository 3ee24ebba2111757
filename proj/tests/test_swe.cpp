#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace fvgoal;
using namespace fvgoal::testing;

namespace {

const double s2 = std::numbers::sqrt2;

double mass(const SpaceTimeField& f, std::size_t n, std::size_t c) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.cell_count(); ++i) s += f.grid().width(i) * f.at(n, i, c);
    return s;
}

double l1(const SpaceTimeField& f, std::size_t n, std::size_t c) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.cell_count(); ++i) s += f.grid().width(i) * std::abs(f.at(n, i, c));
    return s;
}

}  // namespace

TEST(EigDecompose, DiagonalizesSystemMatrix) {
    auto c = eig_decompose();
    EXPECT_NEAR(c.lambda_plus, 1.0 + s2, 1e-15);
    EXPECT_NEAR(c.lambda_minus, 1.0 - s2, 1e-15);
    Mat2 d = multiply(c.P_inv, multiply(swe_matrix, c.P));
    EXPECT_NEAR(d[0][0], c.lambda_plus, 1e-14);
    EXPECT_NEAR(d[1][1], c.lambda_minus, 1e-14);
    EXPECT_NEAR(d[0][1], 0.0, 1e-14);
    EXPECT_NEAR(d[1][0], 0.0, 1e-14);
    Mat2 id = multiply(c.P, c.P_inv);
    EXPECT_NEAR(id[0][0], 1.0, 1e-15);
    EXPECT_NEAR(id[0][1], 0.0, 1e-15);
    EXPECT_NEAR(id[1][0], 0.0, 1e-15);
    EXPECT_NEAR(id[1][1], 1.0, 1e-15);
}

TEST(EigDecompose, CharacteristicExamples) {
    auto c = eig_decompose();
    auto a = c.to_characteristic({1.0, s2});
    EXPECT_NEAR(a[0], 1.0, 1e-15);
    EXPECT_NEAR(a[1], 0.0, 1e-15);
    auto z = c.to_characteristic({0.0, 0.0});
    EXPECT_EQ(z[0], 0.0);
    EXPECT_EQ(z[1], 0.0);
}

TEST(EigDecompose, TransformsRoundTrip) {
    auto c = eig_decompose();
    for (int k = 0; k < 100; ++k) {
        Vec2 v{uniform(-3.0, 3.0), uniform(-3.0, 3.0)};
        auto p = c.to_physical(c.to_characteristic(v));
        auto q = c.from_adjoint_characteristic(c.to_adjoint_characteristic(v));
        for (int i = 0; i < 2; ++i) {
            EXPECT_NEAR(p[i], v[i], 1e-14);
            EXPECT_NEAR(q[i], v[i], 1e-14);
        }
    }
}

TEST(SweUpwind, ZeroDataStaysZero) {
    SweProblem p;
    p.amplitude = 0.0;
    auto g = uniform_grid(1.0, 40);
    auto sol = swe_upwind_solve(p, g, TimeGrid::for_cfl(0.0, 0.3, swe_max_speed(), g.min_width(), 0.9));
    for (double v : sol.physical.front().raw()) EXPECT_EQ(v, 0.0);
}

TEST(SweUpwind, PulseSplitsIntoEqualCharacteristicHalves) {
    SweProblem p;
    auto g = uniform_grid(1.0, 40);
    auto sol = swe_upwind_solve(p, g, TimeGrid::for_cfl(0.0, 0.3, swe_max_speed(), g.min_width(), 0.9));
    const auto& ch = sol.characteristic.front();
    auto h0 = p.h0_averages(g);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        EXPECT_NEAR(ch.at(0, i, 0), 0.5 * h0[i], 1e-15);
        EXPECT_NEAR(ch.at(0, i, 1), 0.5 * h0[i], 1e-15);
    }
}

TEST(SweUpwind, H0AveragesAreExactOverlaps) {
    SweProblem p;
    Grid1D g({0.0, 0.42, 0.47, 0.6, 1.0});
    auto h = p.h0_averages(g);
    EXPECT_DOUBLE_EQ(h[0], 0.0);
    EXPECT_NEAR(h[1], 0.02 / 0.05, 1e-14);
    EXPECT_NEAR(h[2], 0.08 / 0.13, 1e-14);
    EXPECT_DOUBLE_EQ(h[3], 0.0);
}

TEST(SweUpwind, MassOfRightGoingPacket) {
    // xi mass is constant while nothing reaches x = L and non-increasing after
    SweProblem p;
    auto g = uniform_grid(1.0, 80);
    auto tg = TimeGrid::for_cfl(0.0, 0.3, swe_max_speed(), g.min_width(), 0.9);
    auto sol = swe_upwind_solve(p, g, tg);
    const auto& ch = sol.characteristic.front();
    const std::size_t m = g.cell_count();
    bool touched = false;
    for (std::size_t n = 0; n < tg.steps(); ++n) {
        EXPECT_EQ(ch.at(n, 0, 0), 0.0);
        touched = touched || ch.at(n, m - 1, 0) != 0.0;
        double before = mass(ch, n, 0), after = mass(ch, n + 1, 0);
        if (!touched) {
            EXPECT_NEAR(after, before, 1e-15);
        } else {
            EXPECT_LE(after, before + 1e-15);
        }
    }
    EXPECT_TRUE(touched);
}

TEST(SweUpwind, MatchesCoupledSplitFluxStencil) {
    // U^{n+1} = U - dt/h [A+ (U_i - U_{i-1}) + A- (U_{i+1} - U_i)] with
    // A+- = P Lambda+- P^-1 and ghost states carrying the mirrored inflow
    auto ct = eig_decompose();
    Mat2 lp{{{ct.lambda_plus, 0.0}, {0.0, 0.0}}}, lm{{{0.0, 0.0}, {0.0, ct.lambda_minus}}};
    Mat2 ap = multiply(ct.P, multiply(lp, ct.P_inv)), am = multiply(ct.P, multiply(lm, ct.P_inv));
    for (int trial = 0; trial < 20; ++trial) {
        SweProblem p;
        auto g = random_grid(1.0, uniform_int(5, 60));
        auto tg = TimeGrid::for_cfl(0.0, 0.3, swe_max_speed(), g.min_width(), uniform(0.3, 1.0));
        const std::size_t m = g.cell_count();
        std::vector<double> h(m), u(m);
        for (std::size_t i = 0; i < m; ++i) {
            h[i] = uniform(-1.0, 1.0);
            u[i] = uniform(-1.0, 1.0);
        }
        auto sol = swe_upwind_solve(p, g, tg, h, u);
        std::vector<Vec2> cur(m), next(m);
        for (std::size_t i = 0; i < m; ++i) cur[i] = {h[i], u[i]};
        for (std::size_t n = 0; n < tg.steps(); ++n) {
            Vec2 c0 = ct.to_characteristic(cur[0]), cm = ct.to_characteristic(cur[m - 1]);
            Vec2 left = ct.to_physical({-c0[0], c0[1]});
            Vec2 right = ct.to_physical({cm[0], -cm[1]});
            for (std::size_t i = 0; i < m; ++i) {
                Vec2 ul = i == 0 ? left : cur[i - 1];
                Vec2 ur = i + 1 == m ? right : cur[i + 1];
                Vec2 dl{cur[i][0] - ul[0], cur[i][1] - ul[1]}, dr{ur[0] - cur[i][0], ur[1] - cur[i][1]};
                Vec2 fp = mat_vec(ap, dl), fm = mat_vec(am, dr);
                double r = tg.dt() / g.width(i);
                next[i] = {cur[i][0] - r * (fp[0] + fm[0]), cur[i][1] - r * (fp[1] + fm[1])};
            }
            cur.swap(next);
            for (std::size_t i = 0; i < m; ++i) {
                EXPECT_NEAR(sol.physical.front().at(n + 1, i, 0), cur[i][0], 1e-12);
                EXPECT_NEAR(sol.physical.front().at(n + 1, i, 1), cur[i][1], 1e-12);
            }
        }
    }
}

TEST(SweUpwind, CharacteristicL1Contraction) {
    for (int trial = 0; trial < 40; ++trial) {
        SweProblem p;
        auto g = random_grid(1.0, uniform_int(5, 80), 4.0);
        auto tg = TimeGrid::for_cfl(0.0, 0.3, swe_max_speed(), g.min_width(), uniform(0.2, 1.0));
        std::vector<double> h(g.cell_count()), u(g.cell_count());
        for (auto& v : h) v = uniform(-1.0, 1.0);
        for (auto& v : u) v = uniform(-1.0, 1.0);
        auto sol = swe_upwind_solve(p, g, tg, h, u);
        const auto& ch = sol.characteristic.front();
        for (std::size_t n = 0; n < tg.steps(); ++n) {
            for (std::size_t c = 0; c < 2; ++c) EXPECT_LE(l1(ch, n + 1, c), l1(ch, n, c) + 1e-14);
        }
    }
}

TEST(SweUpwind, CflViolation) {
    SweProblem p;
    auto g = uniform_grid(1.0, 40);
    // lambda+ dt / h = 2.414 * 0.3 / 10 / 0.025 > 1
    EXPECT_THROW(swe_upwind_solve(p, g, TimeGrid(0.0, 0.3, 10)), CflViolation);
}

TEST(SweUpwind, InvalidPulse) {
    SweProblem p;
    p.center = 0.02;
    EXPECT_THROW(swe_upwind_solve(p, uniform_grid(1.0, 10), TimeGrid(0.0, 0.3, 100)), InvalidArgument);
}

TEST(SweExact, Examples) {
    SweProblem p;
    SweExactSolution e(p);
    auto h0 = e.hu(0.5, 0.0);
    EXPECT_DOUBLE_EQ(h0[0], 1.0);
    EXPECT_DOUBLE_EQ(h0[1], 0.0);
    const double t = 0.1;
    // inside only the right-moving packet
    auto r = e.hu(0.5 + (1.0 + s2) * t, t);
    EXPECT_NEAR(r[0], 0.5, 1e-15);
    EXPECT_NEAR(r[1], 0.5 * s2, 1e-15);
    auto l = e.hu(0.5 + (1.0 - s2) * t, t);
    EXPECT_NEAR(l[0], 0.5, 1e-15);
    EXPECT_NEAR(l[1], -0.5 * s2, 1e-15);
    auto ahead = e.hu(0.99, t);
    EXPECT_EQ(ahead[0], 0.0);
    EXPECT_EQ(ahead[1], 0.0);
}

TEST(SweExact, PacketRanges) {
    SweProblem p;
    SweExactSolution e(p);
    auto r = e.right_packet_range();
    auto l = e.left_packet_range();
    EXPECT_DOUBLE_EQ(r[0], 0.45);
    EXPECT_DOUBLE_EQ(r[1], 1.0);
    EXPECT_NEAR(l[0], 0.45 + (1.0 - s2) * 0.3, 1e-15);
    EXPECT_DOUBLE_EQ(l[1], 0.55);
}

TEST(SweUpwind, HalfOrderInL1) {
    SweProblem p;
    std::vector<double> err;
    for (std::size_t m : {40, 80, 160, 320}) {
        auto g = uniform_grid(1.0, m);
        auto sol = swe_upwind_solve(p, g, TimeGrid::for_cfl(0.0, 0.3, swe_max_speed(), g.min_width(), 0.9));
        err.push_back(swe_l1_error(sol, p));
    }
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
        double order = observed_order(err[k], err[k + 1]);
        EXPECT_GE(order, 0.4) << k;
        EXPECT_LE(order, 0.8) << k;
    }
}

TEST(SweUpwind, PartitionRestartsConserveMass) {
    SweProblem p;
    for (int trial = 0; trial < 10; ++trial) {
        auto part = random_partition(1.0, 0.3);
        auto sol = swe_upwind_solve(p, part, 0.9);
        ASSERT_EQ(sol.physical.size(), part.interval_count());
        for (std::size_t j = 1; j < sol.physical.size(); ++j) {
            const auto& a = sol.physical[j - 1];
            for (std::size_t c = 0; c < 2; ++c) {
                EXPECT_NEAR(mass(a, a.level_count() - 1, c), mass(sol.physical[j], 0, c), 1e-13);
            }
        }
    }
}
