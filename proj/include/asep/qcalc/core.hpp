#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "../model.hpp"
#include "../quadrature.hpp"

namespace asep::qcalc {

// Integer power by repeated squaring; negative exponents invert.
template <class S>
S ipow(S base, int n) {
    if (n < 0) return S(1) / ipow(base, -n);
    S r(1);
    while (n) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

// (a; tau)_m = prod_{j<m} (1 - a tau^j).
inline cplx qpoch(cplx a, double tau, int m) {
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("qpoch: need 0 < tau < 1");
    if (m < 0) throw DomainError("qpoch: negative order");
    cplx r = 1.0;
    double tj = 1.0;
    for (int j = 0; j < m; ++j, tj *= tau) r *= 1.0 - a * tj;
    return r;
}

// (a; tau)_inf, truncated once |a tau^j| < 1e-17 (the remaining factors
// change the product by less than 2e-17 / (1 - tau) relatively).
inline cplx qpoch_inf(cplx a, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("qpoch: need 0 < tau < 1");
    cplx r = 1.0;
    double tj = 1.0;
    while (std::abs(a) * tj >= 1e-17) {
        r *= 1.0 - a * tj;
        tj *= tau;
    }
    return r;
}

// U(xi, xi') = (p + q xi xi' - xi) / (xi' - xi).
inline cplx eval_U(cplx xi, cplx xi_p, const ModelParams& m) {
    if (xi == xi_p) throw DomainError("eval_U: coincident points");
    return (m.p + m.q * xi * xi_p - xi) / (xi_p - xi);
}

// K_x(xi, xi') = xi^x e^{(p/xi + q xi - 1) t} / (p + q xi xi' - xi).
inline cplx eval_Kx(cplx xi, cplx xi_p, long x, double t, const ModelParams& m) {
    const cplx den = m.p + m.q * xi * xi_p - xi;
    if (den == 0.0) throw DomainError("eval_Kx: pole");
    return ipow(xi, static_cast<int>(x)) * std::exp((m.p / xi + m.q * xi - 1.0) * t) / den;
}

// F(w) = prod_j (w_j - 1)^{L-j} / (w_j (w_j - tau)^{L-j+1})
//        * prod_{i<j} (w_j - w_i) / (w_j - tau w_i),  j 1-based.
template <class S>
S F_weight(const std::vector<S>& w, S tau) {
    const int L = static_cast<int>(w.size());
    S v(1);
    for (int j = 0; j < L; ++j) {
        S den = w[j] * ipow(S(w[j] - tau), L - j);
        if (den == S(0)) throw DomainError("F_weight: pole");
        v *= ipow(S(w[j] - S(1)), L - 1 - j) / den;
    }
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) {
            S den = w[j] - tau * w[i];
            if (den == S(0)) throw DomainError("F_weight: pole");
            v *= (w[j] - w[i]) / den;
        }
    return v;
}

inline cplx F_weight(const std::vector<cplx>& w, double tau) { return F_weight<cplx>(w, cplx(tau)); }

// f(mu, z) = sum_{k in Z} tau^k z^k / (1 - tau^k mu) for 1 < |z| < 1/tau.
// The two half-sums are cut when their geometric tail bounds drop below
// 1e-12 relative to the running sum.
inline cplx f_bilateral(cplx mu, cplx z, double tau) {
    const double az = std::abs(z);
    if (!(az > 1.0 && az * tau < 1.0)) throw DomainError("f_bilateral: need 1 < |z| < 1/tau");
    if (mu == 0.0) throw DomainError("f_bilateral: series diverges at mu = 0");
    const double amu = std::abs(mu);
    constexpr int kmax = 10000;
    auto near_lattice = [&](cplx d) { return std::abs(d) < 1e-14 * (1.0 + amu); };
    cplx sum = 0.0;
    // k >= 0: (tau z)^k / (1 - tau^k mu)
    cplx zk = 1.0;
    double tk = 1.0;
    for (int k = 0;; ++k) {
        const cplx d = 1.0 - tk * mu;
        if (near_lattice(d)) throw DomainError("f_bilateral: mu on pole lattice");
        sum += zk / d;
        zk *= tau * z;
        tk *= tau;
        const double r = az * tau;
        if (tk * amu < 0.5 && std::pow(r, k + 1) / (1.0 - r) * 2.0 < 1e-12 * std::max(1.0, std::abs(sum))) break;
        if (k > kmax) throw ConvergenceError("f_bilateral: truncation beyond K = 10^4");
    }
    // k = -j < 0: z^{-j} / (tau^j - mu)
    cplx zj = 1.0 / z;
    tk = tau;
    for (int j = 1;; ++j) {
        const cplx d = tk - mu;
        if (near_lattice(d)) throw DomainError("f_bilateral: mu on pole lattice");
        sum += zj / d;
        zj /= z;
        tk *= tau;
        if (tk < 0.5 * amu && std::pow(az, -(j + 1)) / (1.0 - 1.0 / az) * 2.0 / amu < 1e-12 * std::max(1.0, std::abs(sum)))
            break;
        if (j > kmax) throw ConvergenceError("f_bilateral: truncation beyond K = 10^4");
    }
    return sum;
}

} // namespace asep::qcalc
