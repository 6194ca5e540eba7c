#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "airy.hpp"
#include "quadrature.hpp"

namespace asep {

// det(I - K_Airy) on (s, inf) with n Gauss-Legendre nodes on (0,1) mapped by
// x = s + 10 tan(pi u / 2).
inline double f2_nystrom(double s, int n) {
    auto gl = gauss_legendre(n, 0.0, 1.0);
    std::vector<double> x(n), sw(n), ai(n), aip(n);
    for (int i = 0; i < n; ++i) {
        const double u = gl.nodes[i];
        const double c = std::cos(std::numbers::pi * u / 2);
        x[i] = s + 10.0 * std::tan(std::numbers::pi * u / 2);
        sw[i] = std::sqrt(10.0 * std::numbers::pi / 2 / (c * c) * gl.weights[i]);
        auto a = detail::airy_or_zero(x[i]);
        ai[i] = a.ai;
        aip[i] = a.aip;
    }
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double k = i == j ? aip[i] * aip[i] - x[i] * ai[i] * ai[i]
                              : (ai[i] * aip[j] - aip[i] * ai[j]) / (x[i] - x[j]);
            M(i, j) = (i == j ? 1.0 : 0.0) - sw[i] * k * sw[j];
        }
    }
    return M.partialPivLu().determinant();
}

struct F2Result {
    double value;
    int nodes;       // accepted node count
    double change;   // |f2_n - f2_{n/2}| at acceptance
};

inline F2Result f2_detailed(double s, double tol = 1e-10) {
    if (!(s >= -8.0 && s <= 6.0)) throw DomainError("f2: need s in [-8, 6]");
    int n = 24;
    double prev = f2_nystrom(s, n);
    for (n = 48; n <= 384; n *= 2) {
        double cur = f2_nystrom(s, n);
        if (std::abs(cur - prev) < tol) return {cur, n, std::abs(cur - prev)};
        prev = cur;
    }
    throw ConvergenceError("f2: no node-doubling convergence at s=" + std::to_string(s));
}

inline double f2(double s) { return f2_detailed(s).value; }

inline double f2_prime(double s) {
    if (!(s >= -7.5 && s <= 5.5)) throw DomainError("f2_prime: need s in [-7.5, 5.5]");
    auto d = [s](double h) { return (f2(s + h) - f2(s - h)) / (2 * h); };
    const double v = (4.0 * d(5e-4) - d(1e-3)) / 3.0;
    if (v < -1e-9) throw ConvergenceError("f2_prime: negative density " + std::to_string(v));
    return v < 0.0 ? 0.0 : v;
}

// Discretization of J0 on rays: Gamma_eta from 0 at angles +-pi/3 and
// Gamma_zeta from -c3 at angles +-2pi/3. J0 = A B with
//   A(eta, zeta)  = e^{-zeta^3/3 + s zeta} / (zeta - eta)  dzeta
//   B(zeta, eta') = e^{eta'^3/3 - s eta'} / (eta' - zeta)  deta'
// and J1 = A B1 where B1 drops 1/(eta' - zeta) and flips sign.
struct J0Discretization {
    Eigen::MatrixXcd A, B, B1;

    J0Discretization(double s, double c3, int n = 96, double radius = 8.0) {
        if (!(c3 > 0.0)) throw DomainError("det_J0_contour: need c3 > 0");
        std::vector<cplx> eta, weta, zeta, wzeta;
        ContourRays{0.0, std::numbers::pi / 3, radius, n}.discretize(eta, weta);
        ContourRays{-c3, 2 * std::numbers::pi / 3, radius, n}.discretize(zeta, wzeta);
        const int ne = static_cast<int>(eta.size()), nz = static_cast<int>(zeta.size());
        A.resize(ne, nz);
        B.resize(nz, ne);
        B1.resize(nz, ne);
        for (int b = 0; b < nz; ++b) {
            const cplx gz = std::exp(-zeta[b] * zeta[b] * zeta[b] / 3.0 + s * zeta[b]) * wzeta[b];
            for (int a = 0; a < ne; ++a) A(a, b) = gz / (zeta[b] - eta[a]);
        }
        for (int b = 0; b < ne; ++b) {
            const cplx ge = std::exp(eta[b] * eta[b] * eta[b] / 3.0 - s * eta[b]) * weta[b];
            for (int a = 0; a < nz; ++a) {
                B(a, b) = ge / (eta[b] - zeta[a]);
                B1(a, b) = -ge;
            }
        }
    }

    Eigen::MatrixXcd J0() const { return A * B; }
    Eigen::MatrixXcd J1() const { return A * B1; }
};

inline cplx det_J0_contour(double s, double c3, int n = 96) {
    J0Discretization d(s, c3, n);
    const Eigen::Index k = d.A.rows();
    cplx v = (Eigen::MatrixXcd::Identity(k, k) + d.J0()).partialPivLu().determinant();
    if (std::abs(v.imag()) > 1e-8) throw ConvergenceError("det_J0_contour: imaginary part " + std::to_string(v.imag()));
    return v;
}

inline double trace_f2_ratio(double s, double c3, int n = 96) {
    J0Discretization d(s, c3, n);
    const Eigen::Index k = d.A.rows();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(k, k) + d.J0();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible()) throw ConvergenceError("trace_f2_ratio: singular I + J0");
    cplx tr = lu.solve(d.J1()).trace();
    if (std::abs(tr.imag()) > 1e-8) throw ConvergenceError("trace_f2_ratio: imaginary part " + std::to_string(tr.imag()));
    return tr.real();
}

// Hastings-McLeod solution of q'' = s q + 2 q^3 integrated backwards from
// s0 = 8 with Airy data. The state carries J = int_s^inf q^2 and
// I = int_s^inf (x - s) q^2, so F2(s) = exp(-I(s)).
struct PainleveState {
    double q, qp, I, J;
};

inline PainleveState painleve_state(double s, double s0 = 8.0) {
    if (!(s >= -6.0)) throw DomainError("painleve_f2: need s >= -6");
    using State = std::array<double, 4>;
    auto a = airy(s0);
    State y{a.ai, a.aip,
            (2 * s0 * s0 * a.ai * a.ai - 2 * s0 * a.aip * a.aip - a.ai * a.aip) / 3.0,
            a.aip * a.aip - s0 * a.ai * a.ai};
    if (s >= s0) return {y[0], y[1], y[2], y[3]};
    auto rhs = [](const State& v, State& d, double x) {
        d[0] = v[1];
        d[1] = x * v[0] + 2 * v[0] * v[0] * v[0];
        d[2] = -v[3];
        d[3] = -v[0] * v[0];
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(1e-15, 1e-14, ode::runge_kutta_fehlberg78<State>());
    ode::integrate_adaptive(stepper, rhs, y, s0, s, -1e-3);
    const double bound = std::sqrt(std::abs(s) / 2) + 1.0;
    if (!std::isfinite(y[0]) || std::abs(y[0]) > bound || y[0] < -1e-12)
        throw ConvergenceError("painleve_f2: Hastings-McLeod solution lost at s=" + std::to_string(s));
    return {y[0], y[1], y[2], y[3]};
}

inline double painleve_f2(double s) { return std::exp(-painleve_state(s).I); }

} // namespace asep
