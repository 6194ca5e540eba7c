#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "../model.hpp"
#include "../quadrature.hpp"

namespace asep::qcalc {

// Nystrom matrix K(z_a, z_b) w_b on the contour nodes.
template <class Kernel>
Eigen::MatrixXcd nystrom_matrix(Kernel&& kernel, const CircleContour& c) {
    const int n = c.n_nodes;
    Eigen::MatrixXcd M(n, n);
    for (int b = 0; b < n; ++b) {
        const cplx zb = c.node(b), wb = c.weight(b);
        for (int a = 0; a < n; ++a) M(a, b) = kernel(c.node(a), zb) * wb;
    }
    return M;
}

struct DetResult {
    cplx value;
    int nodes;     // accepted node count
    double change; // |d_n - d_{n/2}|
};

// det(I + scalar K) for K acting on functions on the circle with measure
// dz/(2 pi i), doubled until two successive values agree to tol.
template <class Kernel>
DetResult fredholm_det_circle(Kernel&& kernel, const CircleContour& contour, cplx scalar, double tol = 1e-10,
                              int max_nodes = 256) {
    auto det_at = [&](const CircleContour& c) {
        Eigen::MatrixXcd M = scalar * nystrom_matrix(kernel, c);
        M.diagonal().array() += 1.0;
        return M.partialPivLu().determinant();
    };
    CircleContour c = contour;
    cplx prev = det_at(c);
    while (2 * c.n_nodes <= max_nodes) {
        c = c.doubled();
        cplx cur = det_at(c);
        double change = std::abs(cur - prev);
        if (change < tol * std::max(1.0, std::abs(cur))) return {cur, c.n_nodes, change};
        prev = cur;
    }
    throw ConvergenceError("fredholm_det_circle: no convergence up to " + std::to_string(max_nodes) + " nodes");
}

// det(I - c H) for upper Hessenberg H, by elimination with pivoting between
// adjacent rows. O(n^2).
inline cplx hessenberg_shifted_det(const Eigen::MatrixXcd& H, cplx c) {
    const Eigen::Index n = H.rows();
    Eigen::MatrixXcd A = -c * H;
    A.diagonal().array() += 1.0;
    cplx det = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (k + 1 < n && std::abs(A(k + 1, k)) > std::abs(A(k, k))) {
            A.row(k).tail(n - k).swap(A.row(k + 1).tail(n - k));
            det = -det;
        }
        const cplx piv = A(k, k);
        det *= piv;
        if (piv == 0.0) return 0.0;
        if (k + 1 < n) {
            const cplx f = A(k + 1, k) / piv;
            A.row(k + 1).tail(n - k - 1) -= f * A.row(k).tail(n - k - 1);
        }
    }
    return det;
}

} // namespace asep::qcalc
