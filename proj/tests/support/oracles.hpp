#pragma once

// Test-only reference computations. Nothing here calls the closed forms it
// is used to check.

#include "smcg/direction.hpp"
#include "smcg/problems.hpp"
#include "smcg/rng.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace smcg::oracle {

struct Triple {
    Vector g, s, y;
};

inline Vector random_vector(SplitMix64& rng, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

/// Random (g, s, y) with s^T y > 0 and omega_bar(g, s) <= max_omega. y is
/// the image of s under a random SPD matrix (eigenvalues in [1e-2, 1e2])
/// plus a 10% perturbation, so curvature pairs look like real ones.
inline Triple random_triple(SplitMix64& rng, double max_omega = 0.75) {
    for (;;) {
        const int n = 2 + static_cast<int>(rng.next() % 11);
        Triple t;
        t.g = random_vector(rng, n);
        t.s = random_vector(rng, n);

        Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < n; ++j) Q.col(j) = random_vector(rng, n);
        Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Q).householderQ();
        Vector lam(n);
        for (int i = 0; i < n; ++i) lam[i] = std::pow(10.0, rng.uniform(-2.0, 2.0));
        const Vector Bs = Q * lam.asDiagonal() * Q.transpose() * t.s;
        t.y = Bs + 0.1 * Bs.norm() / std::sqrt(static_cast<double>(n)) * random_vector(rng, n);

        const double sy = t.s.dot(t.y);
        const double gs = t.g.dot(t.s);
        const double w = gs * gs / (t.g.squaredNorm() * t.s.squaredNorm());
        if (sy > 0.0 && w <= max_omega) return t;
    }
}

/// tau * (scaled memoryless BFGS matrix) applied to -g, built densely:
///   d = -(I - s y^T/sy)(I - y s^T/sy) g - tau s s^T g / sy.
inline Vector perry_shanno_dense(const Vector& g, const Vector& s, const Vector& y, double tau) {
    const int n = static_cast<int>(g.size());
    const double sy = s.dot(y);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd left = I - s * y.transpose() / sy;
    const Eigen::MatrixXd right = I - y * s.transpose() / sy;
    const Eigen::MatrixXd H = left * right + tau * s * s.transpose() / sy;
    return -(H * g);
}

/// Least-squares (u, v) for min ||target - (u g + v s)|| from the 2x2 normal
/// equations.
inline SubspaceCoefficients normal_equations_uv(const Vector& g, const Vector& s,
                                                const Vector& target) {
    Eigen::Matrix2d G;
    G << g.dot(g), g.dot(s), g.dot(s), s.dot(s);
    Eigen::Vector2d rhs(g.dot(target), s.dot(target));
    const Eigen::Vector2d uv = G.fullPivLu().solve(rhs);
    return {uv[0], uv[1]};
}

/// |a - b| measured against the size of the vectors the coefficients scale:
/// (|du| ||g|| + |dv| ||s||) / (|u| ||g|| + |v| ||s||).
inline double coefficient_error(const SubspaceCoefficients& a, const SubspaceCoefficients& b,
                                const Vector& g, const Vector& s) {
    const double num = std::abs(a.u - b.u) * g.norm() + std::abs(a.v - b.v) * s.norm();
    const double den = std::max(std::abs(a.u) * g.norm() + std::abs(a.v) * s.norm(),
                                std::abs(b.u) * g.norm() + std::abs(b.v) * s.norm());
    return den > 0.0 ? num / den : num;
}

inline double relative_error(double a, double b) {
    const double den = std::max(std::abs(a), std::abs(b));
    return den > 0.0 ? std::abs(a - b) / den : 0.0;
}

/// Exact minimizing step along d for a seeded quadratic.
inline double exact_step(const SeededQuadratic& q, const Vector& g, const Vector& d) {
    return -g.dot(d) / d.dot(q.hessian_times(d));
}

}  // namespace smcg::oracle
