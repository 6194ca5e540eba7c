#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "plz.hpp"
#include "residue.hpp"

namespace asep::qcalc {

inline ExactOptions pjw_default_options() {
    ExactOptions o;
    o.n_kernel = 64;
    o.n_outer = 24;
    o.n_residue = 12;
    return o;
}

struct PjwContours {
    double eps_radius;   // operator circle, in (tau, 1)
    double zeta_radius;  // in (1, eps_radius / tau)
    double mu_radius;
};

// eps on |eps| = tau^{1/3} and zeta on |zeta| = tau^{-1/3} keep zeta/eps at
// the centre of the annulus of f. The mu-circle sits at tau^{-L-1/2}: the
// poles of det(I + mu J) at mu = tau^{-k}, k >= L, are cancelled by zeros of
// (tau^L mu; tau)_inf, so this radius is equivalent to tau^{-L+1/2} and
// farther from the remaining poles.
inline PjwContours pjw_contours(double tau, int L) {
    return {std::cbrt(tau), 1.0 / std::cbrt(tau), std::pow(tau, -L - 0.5)};
}

// phi_{inf,x}(e) = (1-e)^{-x-L+1} e^{t e/(1-e)}.
inline cplx phi_inf(cplx e, long x, int L, double t) {
    return std::pow(1.0 - e, static_cast<double>(-x - L + 1)) * std::exp(t * e / (1.0 - e));
}

// The deformed-contour formula. Its time variable is gamma * t in terms of
// the physical time t of the process.
inline cplx pjw_value(long x, int m, double t, int L, const ModelParams& model,
                      const ExactOptions& opt = pjw_default_options()) {
    detail::check_guards(x, m, t, L, opt);
    const double tau = model.tau;
    const double tf = model.gamma * t;
    const auto cs = pjw_contours(tau, L);
    const int n = opt.n_kernel;
    CircleContour ce{0.0, cs.eps_radius, n}, cz{0.0, cs.zeta_radius, n}, cm{0.0, cs.mu_radius, opt.n_outer};
    const auto eps = ce.nodes(), weps = ce.weights(), zeta = cz.nodes(), wzeta = cz.weights();

    // J = A C_mu with A(eps, zeta) = w_zeta / (zeta - eps) and
    // C_mu(zeta, eps') = phi(zeta)/phi(eps') zeta^{m-L}/eps'^{m-L+1} f(mu, zeta/eps') w_eps'.
    // zeta_a / eps_b depends only on (a - b) mod n since the angles match.
    Eigen::MatrixXcd A(n, n), Cbase(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            A(a, b) = wzeta[b] / (zeta[b] - eps[a]);
            Cbase(a, b) = phi_inf(zeta[a], x, L, tf) / phi_inf(eps[b], x, L, tf) * std::pow(zeta[a], m - L) /
                          std::pow(eps[b], m - L + 1) * weps[b];
        }
    std::vector<Eigen::MatrixXcd> C;
    std::vector<cplx> mus, mu_w;
    for (int k = 0; k < cm.n_nodes; ++k) {
        const cplx mu = cm.node(k);
        std::vector<cplx> f(n);
        for (int d = 0; d < n; ++d) f[d] = f_bilateral(mu, zeta[d] / eps[0], tau);
        Eigen::MatrixXcd Ck(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) Ck(a, b) = Cbase(a, b) * f[((a - b) % n + n) % n];
        C.push_back(std::move(Ck));
        mus.push_back(mu);
        mu_w.push_back(cm.weight(k) * qpoch_inf(std::pow(tau, L) * mu, tau) / std::pow(mu, L));
    }

    auto tree = ResidueTree::geometric(L, tau, 0.02, opt.n_residue);
    tree.require_nested();
    const cplx ct(tau);
    cplx total = nested_residue<cplx>(tree, [&](const std::vector<cplx>& w) {
        // V(zeta, eps'; w) = prod_j (w_j zeta - tau)/(w_j eps' - tau) is
        // separable; conjugating by diag(h) moves it into A.
        Eigen::MatrixXcd Aw = A;
        for (int a = 0; a < n; ++a) {
            cplx h = 1.0;
            for (cplx wj : w) h *= wj * eps[a] - tau;
            Aw.row(a) /= h;
        }
        for (int b = 0; b < n; ++b) {
            cplx g = 1.0;
            for (cplx wj : w) g *= wj * zeta[b] - tau;
            Aw.col(b) *= g;
        }
        cplx acc = 0.0;
        Eigen::MatrixXcd M(n, n);
        for (std::size_t k = 0; k < C.size(); ++k) {
            M.noalias() = mus[k] * (Aw * C[k]);
            M.diagonal().array() += 1.0;
            acc += mu_w[k] * M.partialPivLu().determinant();
        }
        return F_weight<cplx>(w, ct) * acc;
    });
    return -std::pow(tau, -(L * L - 5.0 * L + 2.0) / 2.0) * total;
}

inline double pjw_probability(long x, int m, double t, int L, const ModelParams& model,
                              const ExactOptions& opt = pjw_default_options()) {
    return detail::check_probability(pjw_value(x, m, t, L, model, opt), "pjw_probability");
}

} // namespace asep::qcalc
