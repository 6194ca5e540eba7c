#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include <asep/ctmc.hpp>
#include <asep/qcalc/plz.hpp>

using namespace asep;

namespace {
const ModelParams kModel = ModelParams::from_p(0.3);
}

TEST(StateSpace, EncodeDecode) {
    StateSpace s(-2, 5, 3);
    EXPECT_EQ(s.size(), 56u);
    const std::vector<std::int64_t> x{-2, 1, 5};
    EXPECT_EQ(s.decode(s.encode(x)), x);
    EXPECT_EQ(s.states[s.index(s.encode(x))], s.encode(x));
    EXPECT_THROW(s.encode({-3, 0, 1}), DomainError);
    EXPECT_THROW(s.encode({0, 1}), DomainError);
    EXPECT_THROW(StateSpace(0, 20, 3), DomainError);
    EXPECT_THROW(StateSpace(0, 12, 9), DomainError);
}

TEST(Generator, SingleParticle) {
    StateSpace s(0, 2, 1);
    const auto g = build_generator(s, kModel);
    const std::size_t i = s.index(s.encode({1}));
    EXPECT_DOUBLE_EQ(g.diag[i], -1.0);
    ASSERT_EQ(g.row_start[i + 1] - g.row_start[i], 2u);
    double to_right = 0, to_left = 0;
    for (std::size_t e = g.row_start[i]; e < g.row_start[i + 1]; ++e) {
        const auto site = s.decode(s.states[g.target[e]])[0];
        (site == 2 ? to_right : to_left) += g.rate[e];
    }
    EXPECT_DOUBLE_EQ(to_right, 0.3);
    EXPECT_DOUBLE_EQ(to_left, 0.7);
}

TEST(Generator, FrozenFullWindowAndRowSums) {
    const auto full = build_generator(StateSpace(0, 4, 5), kModel);
    EXPECT_EQ(full.size(), 1u);
    EXPECT_EQ(full.diag[0], 0.0);
    StateSpace s(-3, 6, 4);
    const auto g = build_generator(s, kModel);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double sum = g.diag[i];
        for (std::size_t e = g.row_start[i]; e < g.row_start[i + 1]; ++e) sum += g.rate[e];
        EXPECT_NEAR(sum, 0.0, 1e-15);
    }
}

TEST(Evolve, Basics) {
    StateSpace s(-4, 6, 3);
    const auto g = build_generator(s, kModel);
    const std::size_t start = s.index(s.encode({1, 2, 3}));
    const auto d0 = evolve(g, start, 0.0);
    EXPECT_EQ(d0[start], 1.0);
    EXPECT_EQ(std::accumulate(d0.begin(), d0.end(), 0.0), 1.0);
    const auto d1 = evolve(g, start, 1.0);
    EXPECT_NEAR(std::accumulate(d1.begin(), d1.end(), 0.0), 1.0, 1e-10);
    for (double v : d1) EXPECT_GE(v, 0.0);
    EXPECT_THROW(evolve(g, start, -1.0), DomainError);
}

TEST(Evolve, SkellamSingleParticle) {
    // reaching a wall and returning needs about 19 events at rate 1
    CtmcOracle o(-8, 9, {1}, kModel, 1.0);
    double ref = 0, term = 1;
    for (int j = 0; j < 40; ++j) {
        if (j) term *= 0.21 / (static_cast<double>(j) * j);
        ref += term;
    }
    ref *= std::exp(-1.0);
    EXPECT_NEAR(o.prob_event([](const std::vector<std::int64_t>& x) { return x[0] == 1; }), ref, 1e-10);
}

TEST(PoissonTail, Values) {
    EXPECT_EQ(poisson_tail(2.0, 0), 1.0);
    EXPECT_NEAR(poisson_tail(2.0, 1), 1 - std::exp(-2.0), 1e-15);
    EXPECT_NEAR(poisson_tail(0.5, 3), 1 - std::exp(-0.5) * (1 + 0.5 + 0.125), 1e-15);
}

TEST(Oracle, BlocksAndGaps) {
    const auto o0 = CtmcOracle::step(-3, 4, 4, kModel, 0.0);
    EXPECT_EQ(o0.prob_block(1, 1, 4), 1.0);
    const auto o = CtmcOracle::step(-9, 6, 6, kModel, 0.7);
    for (long x = -3; x <= 2; ++x)
        for (int m = 1; m <= 3; ++m)
            EXPECT_NEAR(o.prob_gap(x, m, 1) + o.prob_block(x, m, 2), o.prob_block(x, m, 1), 1e-15);
    EXPECT_THROW(o.prob_block(0, 6, 2), DomainError);
    // too narrow a left margin
    EXPECT_THROW(CtmcOracle::step(-1, 5, 5, kModel, 2.0).prob_block(0, 1, 1), DomainError);
}

TEST(Oracle, OpenRightSideRegression) {
    // three particles with an open right side are not step data on Z+
    CtmcOracle o(-5, 7, {1, 2, 3}, kModel, 0.5);
    const double v = o.prob_block(0, 1, 2, 1e-6);
    EXPECT_NEAR(v, 0.0356327818371371, 1e-12);
    EXPECT_GT(std::abs(v - 0.035796921210079775), 1e-4);
    // a wall behind the rightmost particle restores the Z+ value
    const auto w = CtmcOracle::step(-5, 7, 7, kModel, 0.5);
    EXPECT_NEAR(w.prob_block(0, 1, 2, 1e-6), qcalc::plz_probability(0, 1, 0.5, 2, kModel), 1e-6);
}
