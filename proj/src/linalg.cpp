#include <netprice/common.hpp>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace netprice {

Vector uniform_on_sphere(Index n, double radius, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    double norm = 0.0;
    while (norm == 0.0) {
        for (Index i = 0; i < n; ++i) v(i) = normal(rng);
        norm = v.norm();
    }
    return v * (radius / norm);
}

double operator_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    const Matrix gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double operator_norm_power(const Matrix& a, double tol, int max_iter) {
    if (a.size() == 0) return 0.0;
    const Matrix gram = a.transpose() * a;
    // Start from the column-norm profile; it is never orthogonal to the top singular vector
    // unless the matrix is zero.
    Vector v = gram.diagonal().cwiseSqrt();
    if (v.norm() == 0.0) return 0.0;
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = gram * v;
        const double next = v.dot(w);
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        v = w / wn;
        if (it > 0 && std::abs(next - estimate) <= tol * std::max(next, 1e-300)) {
            estimate = next;
            break;
        }
        estimate = next;
    }
    // Rayleigh quotient of the final iterate.
    estimate = std::max(estimate, v.dot(gram * v));
    return std::sqrt(std::max(0.0, estimate));
}

double spectral_norm(const Matrix& a) {
    if (a.rows() <= 32 && a.cols() <= 32) return operator_norm(a);
    return operator_norm_power(a);
}

}  // namespace netprice
