#include <gtest/gtest.h>

#include <cmath>

#include <asep/ctmc.hpp>
#include <asep/qcalc/identities.hpp>
#include <asep/qcalc/pjw.hpp>
#include <asep/qcalc/plz.hpp>

using namespace asep;
using namespace asep::qcalc;

namespace {
const ModelParams kModel = ModelParams::from_p(0.3);

struct Frozen {
    int m, L;
    long x;
    double value; // CTMC, step data on Z+, t = 0.5
};
const Frozen kFrozen[] = {
    {1, 1, -1, 0.03975592444885588}, {1, 1, 0, 0.23461770457964518}, {1, 1, 1, 0.7206415969432417},
    {1, 2, 0, 0.035796921210079775}, {1, 2, 1, 0.7206415969432417},  {2, 1, 1, 0.04396574899666654},
    {2, 2, 1, 0.004863496695804787}, {3, 1, 2, 0.004977626287823136},
};
} // namespace

TEST(Quadrature, GaussLegendreExactness) {
    const auto r = gauss_legendre(10, -1.0, 2.0);
    double s = 0;
    for (int i = 0; i < 10; ++i) s += r.weights[i] * std::pow(r.nodes[i], 19);
    EXPECT_NEAR(s, (std::pow(2.0, 20) - 1.0) / 20, 1e-8);
}

TEST(Quadrature, CircleResidues) {
    const CircleContour c{0.0, 2.0, 32};
    EXPECT_NEAR(std::abs(circle_integral(c, [](cplx z) { return 1.0 / (z - 0.5); }) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(circle_integral(c, [](cplx z) { return z * z; })), 0.0, 1e-14);
    // 1/((1 - l) l) on a circle enclosing 0 and 1: residues cancel
    const CircleContour big{0.0, std::pow(kModel.tau, -0.5), 128};
    EXPECT_LT(std::abs(circle_integral(big, [](cplx l) { return 1.0 / (qpoch(l, kModel.tau, 1) * l); })), 1e-14);
}

TEST(QPoch, Values) {
    EXPECT_EQ(qpoch(0.0, 0.4, 7), cplx(1.0));
    EXPECT_NEAR(std::abs(qpoch(cplx(0.3, 0.2), 0.4, 1) - cplx(0.7, -0.2)), 0.0, 1e-15);
    EXPECT_NEAR(qpoch_inf(0.5, 0.5).real(), 0.2887880950866024, 1e-12);
    EXPECT_EQ(qpoch_inf(1.0, 0.5), cplx(0.0));
    EXPECT_NEAR(std::abs(qpoch(0.7, 0.4, 200) - qpoch_inf(0.7, 0.4)), 0.0, 1e-15);
    EXPECT_THROW(qpoch(0.5, 1.0, 2), DomainError);
}

TEST(Kernels, U) {
    EXPECT_NEAR(std::abs(eval_U(2.0, 3.0, kModel) - 2.5), 0.0, 1e-14);
    for (cplx z : {cplx(2, 1), cplx(-0.3, 0.5)}) {
        EXPECT_NEAR(std::abs(eval_U(kModel.tau, z, kModel) - kModel.p), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(eval_U(z, kModel.tau, kModel) - kModel.q), 0.0, 1e-14);
    }
    EXPECT_THROW(eval_U(1.0, 1.0, kModel), DomainError);
}

TEST(Kernels, Kx) {
    const cplx a(1.2, 0.4), b(-0.7, 2.0);
    EXPECT_NEAR(std::abs(eval_Kx(a, b, 0, 0.0, kModel) - 1.0 / (kModel.p + kModel.q * a * b - a)), 0.0, 1e-14);
    EXPECT_NEAR(eval_Kx(2.0, 3.0, 1, 0.5, kModel).real(), 1.0532245398940976, 1e-13);
    // growth on a large circle is dominated by e^{qRt} R^x
    const double R = 40;
    const double ratio = std::abs(eval_Kx(R, R, 2, 1.0, kModel)) * std::abs(kModel.p + kModel.q * R * R - R) /
                         (std::exp(kModel.q * R * 1.0) * R * R);
    EXPECT_NEAR(ratio, std::exp(kModel.p / R - 1.0), 1e-12);
}

TEST(Fredholm, Basics) {
    const CircleContour c{0.0, 1.0, 16};
    auto k0 = [&](cplx e, cplx ep) { return 1.0 / (ep - 0.4 * e); };
    EXPECT_NEAR(std::abs(fredholm_det_circle(k0, c, 0.0).value - 1.0), 0.0, 1e-15);
    // rank one: det = 1 + scalar * (1/2 pi i) \oint a b
    auto a = [](cplx z) { return std::exp(z) / z; };
    auto b = [](cplx z) { return z * z + 1.0; };
    const cplx direct = circle_integral(CircleContour{0.0, 1.0, 64}, [&](cplx z) { return a(z) * b(z); });
    const auto r = fredholm_det_circle([&](cplx x, cplx y) { return a(x) * b(y); }, c, 0.3);
    EXPECT_NEAR(std::abs(r.value - (1.0 + 0.3 * direct)), 0.0, 1e-12);
    // K0 identity on the unit circle
    const auto d = fredholm_det_circle(k0, c, -0.4 * 0.7);
    EXPECT_NEAR(std::abs(d.value - qpoch_inf(0.4 * 0.7, 0.4)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(k0_det(0.4, 0.7) - qpoch_inf(0.7, 0.4)), 0.0, 1e-12);
}

TEST(Fredholm, HessenbergShiftedDet) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Random(12, 12);
    Eigen::HessenbergDecomposition<Eigen::MatrixXcd> hd(M);
    const Eigen::MatrixXcd H = hd.matrixH();
    for (cplx c : {cplx(0.3, 0.1), cplx(-1.2, 0.0)}) {
        const cplx ref = (Eigen::MatrixXcd::Identity(12, 12) - c * M).determinant();
        EXPECT_LT(std::abs(hessenberg_shifted_det(H, c) - ref), 1e-10 * std::max(1.0, std::abs(ref)));
    }
}

TEST(FBilateral, ShiftIdentityAndGuards) {
    const double tau = 0.4;
    const cplx lhs = f_bilateral(0.3 / tau, 1.5, tau), rhs = tau * 1.5 * f_bilateral(0.3, 1.5, tau);
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::abs(rhs));
    EXPECT_THROW(f_bilateral(0.0, 1.5, tau), DomainError);
    EXPECT_THROW(f_bilateral(0.3, 0.9, tau), DomainError);
    EXPECT_THROW(f_bilateral(1.0 / (tau * tau), 1.5, tau), DomainError);
    EXPECT_THROW(f_bilateral(0.3, 1.0 + 1e-9, tau), ConvergenceError);
}

TEST(PhiInf, RatioAtEqualPoints) {
    const cplx e(0.3, 0.2);
    EXPECT_NEAR(std::abs(phi_inf(e, 2, 2, 0.7) / phi_inf(e, 2, 2, 0.7) - 1.0), 0.0, 1e-15);
}

TEST(Identities, MuIntegral) {
    for (double tau : {0.3, 0.5, 0.8}) EXPECT_NEAR(std::abs(mint_lhs(1, tau) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(mint_rhs(2, 0.5).real(), -0.5, 1e-15);
    EXPECT_NEAR(std::abs(mint_lhs(2, 0.5) - mint_rhs(2, 0.5)), 0.0, 1e-10);
    const double t = 0.3;
    EXPECT_NEAR(mint_rhs(4, t).real(), -std::pow(t, 15) / ((1 - t) * (1 - t * t) * (1 - t * t * t)), 1e-22);
    EXPECT_NEAR(std::abs(mint_lhs(4, t) - mint_rhs(4, t)), 0.0, 1e-10);
}

TEST(Identities, FWeight) {
    EXPECT_NEAR(std::abs(F_weight({cplx(2.0)}, 0.5) - 1.0 / (2.0 * 1.5)), 0.0, 1e-15);
    const cplx v = F_weight({cplx(2.0), cplx(3.0)}, 0.5);
    EXPECT_NEAR(std::abs(v - (1.0 / (2 * 1.5 * 1.5)) * (1.0 / (3 * 2.5)) * (1.0 / 2.0)), 0.0, 1e-15);
    EXPECT_THROW(F_weight({cplx(0.5)}, 0.5), DomainError);
}

TEST(Identities, FIntegrals) {
    EXPECT_LT(std::abs(f0_integral(1, 0.4)), 1e-12);
    EXPECT_NEAR(std::abs(f_integral(1, 0.4, -1.0) - (-1.25)), 0.0, 1e-10);
    const double tau = 0.4;
    const cplx ref = -1.0 / 8.0 * (1 - tau) * (1 - tau * tau) / std::pow(tau, 9);
    EXPECT_NEAR(std::abs(result_closed_form(3, tau, -1.0) - ref), 0.0, 1e-12 * std::abs(ref));
    EXPECT_LT(std::abs(f_integral(3, tau, -1.0) / ref - 1.0), 1e-9);
    EXPECT_LT(std::abs(f0_integral(3, tau)), 1e-10);
}

TEST(Identities, ClaimStages) {
    const double tau = 0.4;
    const cplx base = claim_step_value(3, 0, tau, -1.0);
    EXPECT_EQ(base, f_integral(3, tau, -1.0));
    for (int k = 1; k <= 3; ++k) EXPECT_LT(std::abs(claim_step_value(3, k, tau, -1.0) / base - 1.0), 1e-9) << k;
    EXPECT_LT(std::abs(claim_step_value(3, 3, tau, -1.0) / result_closed_form(3, tau, -1.0) - 1.0), 1e-13);
    EXPECT_THROW(claim_step_value(3, 4, tau, -1.0), DomainError);
}

TEST(Identities, GlPoleProbe) {
    const double tau = 0.4;
    // residues at w2 = 0 and w2 = tau: (1 - tau) / (tau^2 (w1 - 1))
    EXPECT_NEAR(gl_pole_probe(2, tau, 2.0).real(), 3.75, 1e-10);
    EXPECT_NEAR(std::abs(gl_pole_probe(2, tau, cplx(0.5, 0.5)) - (1 - tau) / (tau * tau * (cplx(0.5, 0.5) - 1.0))), 0.0,
                1e-10);
    for (int L : {2, 3}) {
        auto probe_max = [&](double rho) {
            double mx = 0.0;
            for (int k = 0; k < 8; ++k) {
                const cplx w1 = 1.0 + std::polar(rho, 2 * std::numbers::pi * (k + 0.5) / 8);
                mx = std::max(mx, std::abs(std::pow(w1 - 1.0, L - 1) * gl_pole_probe(L, tau, w1)));
            }
            return mx;
        };
        const double a = probe_max(1e-2), b = probe_max(1e-3);
        EXPECT_LT(std::abs(a - b), 0.05 * std::max(a, b));
        EXPECT_LT(std::abs(gl_pole_probe(L, tau, 1e3)), 10.0);
    }
    // psi need not be constant
    const cplx with_psi = gl_pole_probe(2, tau, 2.0, [](const std::vector<cquad>& v) { return v[0]; });
    // only the residue at w2 = tau survives: (w1 - tau) / (tau (w1 - 1))
    EXPECT_NEAR(std::abs(with_psi - (2 - tau) / tau), 0.0, 1e-10);
    EXPECT_THROW(gl_pole_probe(1, tau, 2.0), DomainError);
}

TEST(ExactFormulas, PlzMatchesOracle) {
    for (const auto& f : kFrozen) {
        ExactOptions opt;
        opt.allow_L3 = true;
        EXPECT_NEAR(plz_probability(f.x, f.m, 0.5, f.L, kModel, opt), f.value, 1e-6) << f.m << f.L << f.x;
    }
}

TEST(ExactFormulas, PjwMatchesOracle) {
    for (const auto& f : kFrozen) EXPECT_NEAR(pjw_probability(f.x, f.m, 0.5, f.L, kModel), f.value, 1e-6) << f.m << f.L << f.x;
}

TEST(ExactFormulas, OracleValuesFrozen) {
    const auto o = CtmcOracle::step(-10, 7, 7, kModel, 0.5);
    for (const auto& f : kFrozen) EXPECT_NEAR(o.prob_block(f.x, f.m, f.L), f.value, 1e-12);
}

TEST(ExactFormulas, NormalizationAndInitialData) {
    double sum = 0;
    for (long x = -10; x <= 3; ++x) sum += plz_probability(x, 1, 0.5, 1, kModel);
    EXPECT_NEAR(sum, 1.0, 1e-6);
    EXPECT_NEAR(plz_probability(1, 1, 0.0, 2, kModel), 1.0, 1e-6);
    EXPECT_NEAR(plz_probability(0, 1, 0.0, 1, kModel), 0.0, 1e-6);
}

TEST(ExactFormulas, LambdaNodeDoubling) {
    const std::vector<cplx> z{cplx(0.01, 0.003)};
    ExactOptions a, b;
    b.n_outer = 2 * a.n_outer;
    const cplx va = lambda_block_integral(0, 1, 0.5, 1, z, kModel, a), vb = lambda_block_integral(0, 1, 0.5, 1, z, kModel, b);
    EXPECT_LT(std::abs(va - vb), 1e-10 * std::max(1.0, std::abs(vb)));
    EXPECT_THROW(lambda_block_integral(0, 1, 0.5, 2, z, kModel), DomainError);
}

TEST(ExactFormulas, Guards) {
    EXPECT_THROW(plz_probability(0, 4, 0.5, 1, kModel), DomainError);
    EXPECT_THROW(plz_probability(0, 1, 3.0, 1, kModel), DomainError);
    EXPECT_THROW(plz_probability(0, 1, 0.5, 3, kModel), DomainError);
    EXPECT_THROW(pjw_probability(0, 1, 0.5, 0, kModel), DomainError);
}

TEST(ResidueTrees, Nesting) {
    for (double tau : {0.2, 0.5, 0.8}) {
        EXPECT_NO_THROW(ResidueTree::geometric(3, tau).require_nested());
        EXPECT_NO_THROW(ResidueTree::rational(4, tau).require_nested());
    }
}
