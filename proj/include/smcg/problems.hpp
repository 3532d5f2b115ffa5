#pragma once

#include "smcg/model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <vector>

namespace smcg {

struct QuadraticSpec {
    int n = 2;
    double cond = 10.0;
    std::uint64_t seed = 0;
};

void from_json(const nlohmann::json& j, QuadraticSpec& spec);
void to_json(nlohmann::json& j, const QuadraticSpec& spec);

/// Strictly convex quadratic A = Q diag(lambda) Q^T with Q a product of
/// Householder reflections, minimizer x_star and minimum value 0:
///
///   q(x) = 1/2 x^T A x + b^T x + c,   b = -A x_star,   c = 1/2 x_star^T A x_star.
///
/// Values and gradients are evaluated in the rotated frame
/// w = Q^T (x - x_star), q = 1/2 sum lambda_i w_i^2, which keeps q accurate to
/// a few ulps relative to its own size near the minimizer.
class SeededQuadratic {
public:
    static constexpr int kMaxReflections = 8;

    explicit SeededQuadratic(const QuadraticSpec& spec);

    int n() const { return static_cast<int>(lambda_.size()); }
    const Vector& eigenvalues() const { return lambda_; }
    const Vector& minimizer() const { return x_star_; }
    const Vector& start() const { return x0_; }

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    Vector hessian_times(const Vector& v) const;
    Vector linear_term() const;  // b

    /// Dense A; O(n^2) memory, meant for tests.
    Eigen::MatrixXd hessian() const;

private:
    Vector to_eigenbasis(Vector v) const;    // Q^T v
    Vector from_eigenbasis(Vector v) const;  // Q v

    Vector lambda_;
    std::vector<Vector> reflectors_;  // unit vectors; Q = H_1 H_2 ... H_m
    Vector x_star_;
    Vector x0_;
};

/// Seeded quadratic with start point x0 = 0. Throws for n < 1 or cond < 1.
ObjectiveProblem make_quadratic(const QuadraticSpec& spec);

/// Literal 1/2 x^T A x + b^T x for an explicit symmetric positive definite A.
ObjectiveProblem make_quadratic(const Eigen::MatrixXd& A, const Vector& b, Vector x0,
                                std::string name);

ObjectiveProblem rosenbrock(int n);
ObjectiveProblem powell_singular(int n);
ObjectiveProblem trigonometric(int n);
ObjectiveProblem beale();
ObjectiveProblem wood();
ObjectiveProblem diagonal_quartic(int n);
ObjectiveProblem penalty1(int n);
ObjectiveProblem dixon_price(int n);
ObjectiveProblem raydan1(int n);
ObjectiveProblem freudenstein_roth();

/// Built-in benchmark corpus. `seed` perturbs the seeded quadratics only.
std::vector<ObjectiveProblem> corpus(std::uint64_t seed = 0);

/// Largest relative discrepancy ||fd - g||_inf / max(1, ||g||_inf) between
/// central differences (step h * max(1, |x_i|)) and the analytic gradient,
/// over `probes` seeded points around x0. Throws on a non-finite f.
double grad_check(const ObjectiveProblem& problem, int probes, double h, std::uint64_t seed = 1);

}  // namespace smcg
