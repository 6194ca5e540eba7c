#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "core.hpp"
#include "fredholm.hpp"
#include "residue.hpp"

namespace asep::qcalc {

inline cplx to_double(const cquad& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// (1/2 pi i) \oint (tau^L mu; tau)_inf dmu / mu^L on |mu| = tau^{-L+1/2}.
inline cplx mint_lhs(int L, double tau, int n = 64) {
    if (L < 1) throw DomainError("mint: need L >= 1");
    CircleContour c{0.0, std::pow(tau, -L + 0.5), n};
    auto f = [&](cplx mu) { return qpoch_inf(std::pow(tau, L) * mu, tau) / std::pow(mu, L); };
    cplx a = circle_integral(c, f), b = circle_integral(c.doubled(), f);
    if (std::abs(a - b) > 1e-13 * std::max(1.0, std::abs(b))) throw ConvergenceError("mint_lhs: node doubling");
    return b;
}

// (-1)^{L-1} tau^{(L-1)(3L-2)/2} / ((1-tau)...(1-tau^{L-1})).
inline cplx mint_rhs(int L, double tau) {
    if (L < 1) throw DomainError("mint: need L >= 1");
    double v = std::pow(tau, (L - 1) * (3 * L - 2) / 2.0);
    for (int k = 1; k < L; ++k) v /= 1.0 - std::pow(tau, k);
    return (L % 2 == 1) ? v : -v;
}

// det(I - a K0) with K0(e, e') = 1/(e' - tau e) on the unit circle; equals
// (a; tau)_inf.
inline cplx k0_det(double tau, cplx a, int n = 64) {
    auto k = [tau](cplx e, cplx ep) { return 1.0 / (ep - tau * e); };
    return fredholm_det_circle(k, CircleContour{0.0, 1.0, n}, -a).value;
}

// -xi^{L-1}/(1-xi)^L (1-tau)...(1-tau^{L-1}) / tau^{L^2}, in quad precision.
inline cquad result_closed_form_q(int L, quad tau, cquad xi) {
    cquad v = -ipow(xi, L - 1) / ipow(cquad(1) - xi, L);
    for (int k = 1; k < L; ++k) v *= quad(1) - ipow(tau, k);
    return v / ipow(tau, L * L);
}

inline cplx result_closed_form(int L, double tau, cplx xi) {
    return to_double(result_closed_form_q(L, quad(tau), cquad(xi.real(), xi.imag())));
}

namespace detail {

// F on n variables: univariate part of variable i (0-based).
inline cquad f_univariate(int n, int i, const cquad& w, const quad& tau) {
    return ipow(cquad(w - quad(1)), n - 1 - i) / (w * ipow(cquad(w - tau), n - i));
}

inline cquad f_pair(const cquad& wi, const cquad& wj, const quad& tau) { return (wj - wi) / (wj - tau * wi); }

} // namespace detail

// Nested residue integrals of F: the plain integral (which vanishes) and,
// for each xi, the integral of F * sum_j w_j/(w_j xi - tau).
inline std::vector<cplx> f_integrals(int L, double tau, const std::vector<cplx>& xis, const ResidueTree& tree) {
    tree.require_nested();
    const quad tq(tau);
    ProductIntegrand<cquad> g;
    g.univariate = [&](int i, const cquad& w) { return detail::f_univariate(L, i, w, tq); };
    g.pair = [&](int, int, const cquad& wi, const cquad& wj) { return detail::f_pair(wi, wj, tq); };
    for (cplx xi : xis) {
        const cquad xq(xi.real(), xi.imag());
        g.psi.push_back([xq, tq](const cquad& w) { return w / (w * xq - tq); });
    }
    std::vector<cplx> out;
    for (const auto& v : nested_product_residue(tree, g)) out.push_back(to_double(v));
    return out;
}

inline cplx f0_integral(int L, double tau) { return f_integrals(L, tau, {}, ResidueTree::rational(L, tau))[0]; }

inline cplx f_integral(int L, double tau, cplx xi) {
    return f_integrals(L, tau, {xi}, ResidueTree::rational(L, tau))[1];
}

// Stage k of the induction: (factor) * (integral2). Stage 0 is the starting
// integral itself, i.e. f_integral.
inline cplx claim_step_value(int L, int k, double tau, cplx xi) {
    if (k < 0 || k > L) throw DomainError("claim_step_value: need 0 <= k <= L");
    if (k == 0) return f_integral(L, tau, xi);
    const quad tq(tau);
    const cquad xq(xi.real(), xi.imag());
    cquad factor = -ipow(xq, L - 1) / ipow(cquad(quad(1) - xq), L) * ipow(cquad(ipow(tq, k) / xq - quad(1)), L - k);
    for (int i = 1; i < k; ++i) factor *= quad(1) - ipow(tq, i);
    factor /= ipow(tq, k * L);
    const int n = L - k;
    if (n == 0) return to_double(factor);
    const cquad a = tq / xq, b = ipow(tq, k + 1) / xq;
    ProductIntegrand<cquad> g;
    g.univariate = [&](int i, const cquad& v) { return detail::f_univariate(n, i, v, tq) * (a - v) / (b - v); };
    g.pair = [&](int, int, const cquad& vi, const cquad& vj) { return detail::f_pair(vi, vj, tq); };
    auto tree = ResidueTree::rational(n, tau);
    tree.require_nested();
    return to_double(factor * nested_product_residue(tree, g)[0]);
}

namespace detail {

// Tree for w_2..w_L with w_1 fixed: the circles must also avoid tau * w1.
inline ResidueTree probe_tree(int L, double tau, cplx w1) {
    auto t = ResidueTree::rational(L - 1, tau);
    const double dtau = 0.1 * tau * std::abs(w1 - 1.0), d0 = 0.1 * tau * std::abs(w1);
    for (int i = 0; i < L - 1; ++i) {
        t.rtau[i] = std::min(t.rtau[i], dtau * std::pow(0.3, i));
        t.r0[i] = std::min(t.r0[i], d0 * std::pow(0.01 * tau, i));
    }
    return t;
}

} // namespace detail

// (L-1)-fold nested residue integral of G_L(w1, w_2..w_L) psi(w_2..w_L) over
// w_2..w_L, as a function of w1. G_L omits the univariate factor of w_1.
template <class Psi>
cplx gl_pole_probe(int L, double tau, cplx w1, Psi&& psi) {
    if (L < 2) throw DomainError("gl_pole_probe: need L >= 2");
    if (w1 == 0.0 || w1 == tau) throw DomainError("gl_pole_probe: w1 on a pole");
    const quad tq(tau);
    const cquad w1q(w1.real(), w1.imag());
    auto tree = detail::probe_tree(L, tau, w1);
    tree.require_nested();
    auto integrand = [&](const std::vector<cquad>& v) {
        // v[i] is w_{i+2}
        cquad g = 1;
        const int n = L - 1;
        for (int i = 0; i < n; ++i) {
            g *= detail::f_univariate(n, i, v[i], tq);
            g *= (w1q - v[i]) / (tq * w1q - v[i]);
            for (int j = i + 1; j < n; ++j) g *= (v[i] - v[j]) / (tq * v[i] - v[j]);
        }
        return g * psi(v);
    };
    return to_double(nested_residue<cquad>(tree, integrand));
}

inline cplx gl_pole_probe(int L, double tau, cplx w1) {
    return gl_pole_probe(L, tau, w1, [](const std::vector<cquad>&) { return cquad(1); });
}

} // namespace asep::qcalc
