#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "model.hpp"

namespace asep {

using cplx = std::complex<double>;

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1] by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: need n >= 1");
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    return r;
}

// Gauss-Legendre mapped to [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    auto r = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = 0.5 * (b - a) * r.nodes[i] + 0.5 * (b + a);
        r.weights[i] *= 0.5 * (b - a);
    }
    return r;
}

// Equispaced nodes on a positively oriented circle. Weights carry dz/(2 pi i),
// so sum_k w_k f(z_k) approximates (1/2 pi i) \oint f(z) dz.
struct CircleContour {
    cplx center = 0.0;
    double radius = 1.0;
    int n_nodes = 32;

    cplx node(int k) const { return center + radius * unit(k); }
    cplx weight(int k) const { return radius * unit(k) / static_cast<double>(n_nodes); }

    std::vector<cplx> nodes() const {
        std::vector<cplx> z(n_nodes);
        for (int k = 0; k < n_nodes; ++k) z[k] = node(k);
        return z;
    }
    std::vector<cplx> weights() const {
        std::vector<cplx> w(n_nodes);
        for (int k = 0; k < n_nodes; ++k) w[k] = weight(k);
        return w;
    }

    CircleContour doubled() const { return {center, radius, 2 * n_nodes}; }

private:
    cplx unit(int k) const { return std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / n_nodes); }
};

template <class F>
auto circle_integral(const CircleContour& c, F&& f) {
    decltype(f(cplx{})) s{};
    for (int k = 0; k < c.n_nodes; ++k) s += c.weight(k) * f(c.node(k));
    return s;
}

// Pair of rays vertex + r e^{-i angle} (traversed inward) and
// vertex + r e^{+i angle} (outward), r in [0, radius]. Weights carry
// the 1/(2 pi i) factor.
struct ContourRays {
    cplx vertex = 0.0;
    double angle = std::numbers::pi / 3;
    double radius = 8.0;
    int n_nodes = 96; // per ray

    void discretize(std::vector<cplx>& z, std::vector<cplx>& w) const {
        auto gl = gauss_legendre(n_nodes, 0.0, radius);
        const cplx i2pi(0.0, 2.0 * std::numbers::pi);
        const cplx lo = std::polar(1.0, -angle), hi = std::polar(1.0, angle);
        z.clear();
        w.clear();
        for (int k = n_nodes - 1; k >= 0; --k) {
            z.push_back(vertex + gl.nodes[k] * lo);
            w.push_back(-lo * gl.weights[k] / i2pi);
        }
        for (int k = 0; k < n_nodes; ++k) {
            z.push_back(vertex + gl.nodes[k] * hi);
            w.push_back(hi * gl.weights[k] / i2pi);
        }
    }
};

} // namespace asep
