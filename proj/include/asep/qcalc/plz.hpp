#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "fredholm.hpp"
#include "residue.hpp"

namespace asep::qcalc {

struct ExactOptions {
    int n_kernel = 48;    // nodes on C_R (PLZ) or on the eps/zeta circles (PJw)
    int n_outer = 64;     // nodes on the lambda (PLZ) or mu (PJw) circle
    int n_residue = 12;   // nodes per residue circle
    bool allow_L3 = false;
};

namespace detail {

inline void check_guards(long, int m, double t, int L, const ExactOptions& opt) {
    if (L < 1 || m < 1) throw DomainError("exact formula: need L, m >= 1");
    if (L > 3 || (L == 3 && !opt.allow_L3)) throw DomainError("exact formula: L > 2 needs allow_L3 (cost guard)");
    if (m > 3) throw DomainError("exact formula: m <= 3 (cost guard)");
    if (t < 0.0 || t > 2.0) throw DomainError("exact formula: need 0 <= t <= 2 (cost guard)");
    if (opt.n_kernel > 256) throw DomainError("exact formula: determinant matrices capped at 256");
}

inline double check_probability(cplx v, const char* who) {
    if (std::abs(v.imag()) > 1e-8) throw ConvergenceError(std::string(who) + ": imaginary residue " + std::to_string(v.imag()));
    if (v.real() < -1e-8 || v.real() > 1.0 + 1e-8)
        throw ConvergenceError(std::string(who) + ": value outside [0,1]: " + std::to_string(v.real()));
    return v.real();
}

} // namespace detail

// Radius of C_R.
inline double plz_radius(double tau) { return std::max(4.0, 2.0 / (1.0 - tau)); }

// The bracketed lambda integral of the PLZ formula for fixed z:
//   (1/2 pi i) \oint det(I - tau^{-L} lambda K_{L,x}(z)) / (lambda; tau)_m dlambda / lambda^L
// on |lambda| = tau^{-m+1/2}. K_{L,x}(xi, xi'; z) = q^{1-L} K_{x+L-1}(xi, xi') prod_j U(z_j, xi).
class LambdaBlock {
public:
    LambdaBlock(long x, int m, double t, int L, const ModelParams& model, const ExactOptions& opt = {})
        : m_(m), L_(L), model_(model), lambda_{0.0, std::pow(model.tau, -m + 0.5), opt.n_outer} {
        CircleContour cr{0.0, plz_radius(model.tau), opt.n_kernel};
        xi_ = cr.nodes();
        const double scale = std::pow(model.q, 1 - L);
        base_ = nystrom_matrix(
            [&](cplx a, cplx b) { return scale * eval_Kx(a, b, x + L - 1, t, model); }, cr);
        for (int k = 0; k < lambda_.n_nodes; ++k) {
            const cplx lam = lambda_.node(k);
            outer_w_.push_back(lambda_.weight(k) / (qpoch(lam, model.tau, m) * std::pow(lam, L)));
            shift_.push_back(std::pow(model.tau, -L) * lam);
        }
    }

    cplx operator()(const std::vector<cplx>& z) const {
        Eigen::MatrixXcd M = base_;
        for (Eigen::Index a = 0; a < M.rows(); ++a) {
            cplx g = 1.0;
            for (cplx zj : z) g *= eval_U(zj, xi_[a], model_);
            M.row(a) *= g;
        }
        Eigen::HessenbergDecomposition<Eigen::MatrixXcd> hd(M);
        Eigen::MatrixXcd H = hd.matrixH();
        cplx s = 0.0;
        for (std::size_t k = 0; k < shift_.size(); ++k) s += outer_w_[k] * hessenberg_shifted_det(H, shift_[k]);
        return s;
    }

private:
    int m_, L_;
    ModelParams model_;
    CircleContour lambda_;
    std::vector<cplx> xi_;
    Eigen::MatrixXcd base_;
    std::vector<cplx> outer_w_, shift_;
};

inline cplx lambda_block_integral(long x, int m, double t, int L, const std::vector<cplx>& z, const ModelParams& model,
                                  const ExactOptions& opt = {}) {
    if (static_cast<int>(z.size()) != L) throw DomainError("lambda_block_integral: need L z-values");
    return LambdaBlock(x, m, t, L, model, opt)(z);
}

// P(x_m(t) = x, ..., x_{m+L-1}(t) = x+L-1) for step data on Z+, time t.
inline cplx plz_value(long x, int m, double t, int L, const ModelParams& model, const ExactOptions& opt = {}) {
    detail::check_guards(x, m, t, L, opt);
    const double p = model.p, q = model.q, tau = model.tau;
    LambdaBlock block(x, m, t, L, model, opt);
    auto tree = ResidueTree::geometric(L, tau, 0.02, opt.n_residue);
    tree.require_nested();
    cplx total = nested_residue<cplx>(tree, [&](const std::vector<cplx>& z) {
        cplx pre = 1.0;
        for (int j = 0; j < L; ++j) pre /= std::pow(z[j], L - j) * (q * z[j] - p);
        for (int i = 0; i < L; ++i)
            for (int j = i + 1; j < L; ++j) pre /= eval_U(z[j], z[i], model);
        return pre * block(z);
    });
    const double sign = (L % 2 == 1) ? 1.0 : -1.0;
    return sign * std::pow(p, L * (L + 1) / 2.0) * std::pow(tau, -(m - 1) * (L - 1)) * total;
}

inline double plz_probability(long x, int m, double t, int L, const ModelParams& model, const ExactOptions& opt = {}) {
    return detail::check_probability(plz_value(x, m, t, L, model, opt), "plz_probability");
}

} // namespace asep::qcalc
