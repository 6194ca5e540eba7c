#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/multiprecision/complex128.hpp>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include "../model.hpp"
#include "../quadrature.hpp"

namespace asep::qcalc {

using quad = boost::multiprecision::float128;
using cquad = boost::multiprecision::complex128;

// Nested small circles around 0 and tau for variables w_1..w_L (index 0 is
// the outermost variable). Integration over the product of these fixed
// circles equals the iterated integral with w_L innermost.
struct ResidueTree {
    int L = 1;
    double tau = 0.5;
    std::vector<double> r0;   // radius of the circle around 0, per variable
    std::vector<double> rtau; // radius of the circle around tau, per variable
    int n0 = 16;
    int ntau = 16;

    // rho_i = base * ratio^{i-1} on both pole sets; ratio <= min(0.3, tau/8)
    // so that a pole tracking tau * w_i (or tau + tau (w_i - tau)) stays
    // outside the next circle in.
    static ResidueTree geometric(int L, double tau, double base_factor = 0.02, int n = 12) {
        ResidueTree t;
        t.L = L;
        t.tau = tau;
        t.n0 = t.ntau = n;
        const double base = base_factor * std::min(tau, 1.0 - tau);
        const double ratio = std::min(0.3, tau / 8.0);
        for (int i = 0; i < L; ++i) {
            t.r0.push_back(base * std::pow(ratio, i));
            t.rtau.push_back(base * std::pow(ratio, i));
        }
        return t;
    }

    // Radii for the rational integrands of the closed-form identities: the
    // 0-circles shrink by 0.01 tau per level (a pole at w_i / tau must stay
    // inside), the tau-circles by 0.3.
    static ResidueTree rational(int L, double tau, int n = 24) {
        ResidueTree t;
        t.L = L;
        t.tau = tau;
        t.n0 = t.ntau = n;
        for (int i = 0; i < L; ++i) {
            t.r0.push_back(0.01 * tau * std::pow(0.01 * tau, i));
            t.rtau.push_back(0.05 * tau * (1.0 - tau) * std::pow(0.3, i));
        }
        return t;
    }

    bool nested() const {
        for (int i = 0; i + 1 < L; ++i) {
            const double lim = 0.3 * (1.0 + 1e-12);
            if (r0[i + 1] > lim * r0[i] || rtau[i + 1] > lim * rtau[i]) return false;
        }
        for (int i = 0; i < L; ++i)
            if (r0[i] + rtau[i] >= tau) return false;
        return true;
    }

    void require_nested() const {
        if (!nested()) throw DomainError("ResidueTree: nesting violated");
    }
};

template <class S>
struct real_of;
template <>
struct real_of<cplx> {
    using type = double;
};
template <>
struct real_of<cquad> {
    using type = quad;
};

namespace detail {

template <class S>
struct NodeSet {
    std::vector<S> z, w;
};

template <class S>
S unit_circle_point(int k, int n);

template <>
inline cplx unit_circle_point<cplx>(int k, int n) {
    return std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / n);
}

template <>
inline cquad unit_circle_point<cquad>(int k, int n) {
    const quad th = 2 * boost::math::constants::pi<quad>() * (quad(k) + quad(0.5)) / n;
    return cquad(boost::multiprecision::cos(th), boost::multiprecision::sin(th));
}

template <class S, class R>
void append_circle(NodeSet<S>& ns, S center, R radius, int n) {
    for (int k = 0; k < n; ++k) {
        const S u = unit_circle_point<S>(k, n);
        ns.z.push_back(center + radius * u);
        ns.w.push_back(radius * u / S(n));
    }
}

} // namespace detail

// Nodes and dz/(2 pi i) weights of variable i: the 0-circle then the tau-circle.
template <class S>
detail::NodeSet<S> residue_nodes(const ResidueTree& t, int i) {
    detail::NodeSet<S> ns;
    using R = typename real_of<S>::type;
    detail::append_circle(ns, S(0), R(t.r0[i]), t.n0);
    detail::append_circle(ns, S(R(t.tau)), R(t.rtau[i]), t.ntau);
    return ns;
}

// Sum of f(w) * weight over the tensor grid (generic integrand).
template <class S, class F>
S nested_residue(const ResidueTree& t, F&& f) {
    std::vector<detail::NodeSet<S>> nodes;
    for (int i = 0; i < t.L; ++i) nodes.push_back(residue_nodes<S>(t, i));
    std::vector<S> w(t.L);
    S total(0);
    std::function<void(int, S)> rec = [&](int i, S weight) {
        if (i == t.L) {
            total += weight * f(w);
            return;
        }
        const auto& ns = nodes[i];
        for (std::size_t k = 0; k < ns.z.size(); ++k) {
            w[i] = ns.z[k];
            rec(i + 1, weight * ns.w[k]);
        }
    };
    if (t.L == 0) return f(w);
    rec(0, S(1));
    return total;
}

// Integrand of product form
//   prod_i u(i, w_i) * prod_{i<j} pair(i, j, w_i, w_j) * [sum_i psi(w_i)]
// evaluated with tabulated factors and prefix products, so a leaf costs one
// multiplication per enclosing variable. Returns the plain integral followed
// by one integral per psi table.
template <class S>
struct ProductIntegrand {
    std::function<S(int, const S&)> univariate;
    std::function<S(int, int, const S&, const S&)> pair;
    std::vector<std::function<S(const S&)>> psi;
};

template <class S>
std::vector<S> nested_product_residue(const ResidueTree& t, const ProductIntegrand<S>& g) {
    const int L = t.L;
    const std::size_t np = g.psi.size();
    std::vector<detail::NodeSet<S>> nodes;
    for (int i = 0; i < L; ++i) nodes.push_back(residue_nodes<S>(t, i));
    // u[i][a] includes the weight; pair[i][j][a*nj + b]; psi[k][i][a]
    std::vector<std::vector<S>> u(L);
    std::vector<std::vector<std::vector<S>>> pr(L, std::vector<std::vector<S>>(L));
    std::vector<std::vector<std::vector<S>>> ps(np, std::vector<std::vector<S>>(L));
    for (int i = 0; i < L; ++i) {
        const auto& ni = nodes[i];
        for (std::size_t a = 0; a < ni.z.size(); ++a) {
            u[i].push_back(ni.w[a] * g.univariate(i, ni.z[a]));
            for (std::size_t k = 0; k < np; ++k) ps[k][i].push_back(g.psi[k](ni.z[a]));
        }
        for (int j = i + 1; j < L; ++j) {
            const auto& nj = nodes[j];
            for (std::size_t a = 0; a < ni.z.size(); ++a)
                for (std::size_t b = 0; b < nj.z.size(); ++b) pr[i][j].push_back(g.pair(i, j, ni.z[a], nj.z[b]));
        }
    }
    std::vector<S> out(np + 1, S(0));
    if (L == 0) {
        out[0] = S(1);
        return out;
    }
    // level i holds the product and psi sums over variables 0..i
    std::vector<std::size_t> idx(L);
    std::vector<S> prod(L + 1, S(1));
    std::vector<std::vector<S>> sums(L + 1, std::vector<S>(np, S(0)));
    std::function<void(int)> rec = [&](int i) {
        const std::size_t ni = nodes[i].z.size();
        for (std::size_t a = 0; a < ni; ++a) {
            S p = prod[i] * u[i][a];
            for (int k = 0; k < i; ++k) p *= pr[k][i][idx[k] * ni + a];
            idx[i] = a;
            if (i + 1 == L) {
                out[0] += p;
                for (std::size_t k = 0; k < np; ++k) out[k + 1] += p * (sums[i][k] + ps[k][i][a]);
            } else {
                prod[i + 1] = p;
                for (std::size_t k = 0; k < np; ++k) sums[i + 1][k] = sums[i][k] + ps[k][i][a];
                rec(i + 1);
            }
        }
    };
    rec(0);
    return out;
}

} // namespace asep::qcalc
