#include "smcg/problems.hpp"

#include "smcg/rng.hpp"

#include <cmath>
#include <sstream>

namespace smcg {

void from_json(const nlohmann::json& j, QuadraticSpec& spec) {
    spec.n = j.at("n").get<int>();
    spec.cond = j.at("cond").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(nlohmann::json& j, const QuadraticSpec& spec) {
    j = nlohmann::json{{"n", spec.n}, {"cond", spec.cond}, {"seed", spec.seed}};
}

// ---------------------------------------------------------------------------
// Seeded quadratic

SeededQuadratic::SeededQuadratic(const QuadraticSpec& spec) {
    if (spec.n < 1) throw Error("quadratic dimension must be >= 1");
    if (!(spec.cond >= 1.0) || !std::isfinite(spec.cond))
        throw Error("quadratic condition number must be >= 1");

    const int n = spec.n;
    SplitMix64 rng(spec.seed);

    // Extremes pinned so that lambda_max / lambda_min == cond exactly.
    lambda_.resize(n);
    for (int i = 0; i < n; ++i) lambda_[i] = std::pow(spec.cond, rng.uniform());
    lambda_[0] = 1.0;
    if (n > 1) lambda_[n - 1] = spec.cond;

    const int m = std::min(n, kMaxReflections);
    reflectors_.reserve(m);
    for (int r = 0; r < m; ++r) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        v /= v.norm();
        reflectors_.push_back(std::move(v));
    }

    x_star_.resize(n);
    for (int i = 0; i < n; ++i) x_star_[i] = rng.uniform(-1.0, 1.0);
    x0_ = Vector::Zero(n);
}

Vector SeededQuadratic::to_eigenbasis(Vector v) const {
    for (const auto& h : reflectors_) v -= (2.0 * h.dot(v)) * h;
    return v;
}

Vector SeededQuadratic::from_eigenbasis(Vector v) const {
    for (auto it = reflectors_.rbegin(); it != reflectors_.rend(); ++it)
        v -= (2.0 * it->dot(v)) * *it;
    return v;
}

double SeededQuadratic::value(const Vector& x) const {
    const Vector w = to_eigenbasis(x - x_star_);
    return 0.5 * (lambda_.array() * w.array().square()).sum();
}

Vector SeededQuadratic::gradient(const Vector& x) const {
    Vector w = to_eigenbasis(x - x_star_);
    return from_eigenbasis(lambda_.cwiseProduct(w));
}

Vector SeededQuadratic::hessian_times(const Vector& v) const {
    return from_eigenbasis(lambda_.cwiseProduct(to_eigenbasis(v)));
}

Vector SeededQuadratic::linear_term() const { return -hessian_times(x_star_); }

Eigen::MatrixXd SeededQuadratic::hessian() const {
    const int n = this->n();
    Eigen::MatrixXd A(n, n);
    for (int j = 0; j < n; ++j) A.col(j) = hessian_times(Vector::Unit(n, j));
    return 0.5 * (A + A.transpose());
}

namespace {

std::string format_cond(double cond) {
    const double e = std::log10(cond);
    std::ostringstream os;
    if (std::abs(e - std::round(e)) < 1e-12) {
        os << "1e" << static_cast<int>(std::round(e));
    } else {
        os << cond;
    }
    return os.str();
}

}  // namespace

ObjectiveProblem make_quadratic(const QuadraticSpec& spec) {
    auto q = std::make_shared<const SeededQuadratic>(spec);
    ObjectiveProblem p;
    p.name = "quadratic_n" + std::to_string(spec.n) + "_cond" + format_cond(spec.cond);
    p.n = spec.n;
    p.f = [q](const Vector& x) { return q->value(x); };
    p.grad = [q](const Vector& x) { return q->gradient(x); };
    p.x0 = q->start();
    p.f_star = 0.0;
    return p;
}

ObjectiveProblem make_quadratic(const Eigen::MatrixXd& A, const Vector& b, Vector x0,
                                std::string name) {
    if (A.rows() != A.cols() || A.rows() != b.size() || b.size() != x0.size() || b.size() < 1)
        throw Error("quadratic: inconsistent dimensions");
    auto Ab = std::make_shared<const std::pair<Eigen::MatrixXd, Vector>>(A, b);
    ObjectiveProblem p;
    p.name = std::move(name);
    p.n = static_cast<int>(b.size());
    p.f = [Ab](const Vector& x) { return 0.5 * x.dot(Ab->first * x) + Ab->second.dot(x); };
    p.grad = [Ab](const Vector& x) -> Vector { return Ab->first * x + Ab->second; };
    p.x0 = std::move(x0);
    return p;
}

// ---------------------------------------------------------------------------
// Classic test functions (More, Garbow and Hillstrom 1981; Andrei 2008)

// sum_{i} 100 (x_{2i} - x_{2i-1}^2)^2 + (1 - x_{2i-1})^2, start (-1.2, 1, ...)
ObjectiveProblem rosenbrock(int n) {
    if (n < 2 || n % 2 != 0) throw Error("rosenbrock: n must be even");
    ObjectiveProblem p;
    p.name = "rosenbrock_" + std::to_string(n);
    p.n = n;
    p.f = [](const Vector& x) {
        double f = 0.0;
        for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
            const double t1 = 1.0 - x[i];
            const double t2 = x[i + 1] - x[i] * x[i];
            f += 100.0 * t2 * t2 + t1 * t1;
        }
        return f;
    };
    p.grad = [](const Vector& x) {
        Vector g(x.size());
        for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
            const double t2 = x[i + 1] - x[i] * x[i];
            g[i + 1] = 200.0 * t2;
            g[i] = -400.0 * x[i] * t2 - 2.0 * (1.0 - x[i]);
        }
        return g;
    };
    p.x0.resize(n);
    for (int i = 0; i < n; i += 2) {
        p.x0[i] = -1.2;
        p.x0[i + 1] = 1.0;
    }
    p.f_star = 0.0;
    return p;
}

// Blocks of four: (a+10b)^2 + 5(c-d)^2 + (b-2c)^4 + 10(a-d)^4, start (3,-1,0,1)
ObjectiveProblem powell_singular(int n) {
    if (n < 4 || n % 4 != 0) throw Error("powell_singular: n must be a multiple of 4");
    ObjectiveProblem p;
    p.name = "powell_singular_" + std::to_string(n);
    p.n = n;
    p.f = [](const Vector& x) {
        double f = 0.0;
        for (Eigen::Index i = 0; i + 3 < x.size(); i += 4) {
            const double t1 = x[i] + 10.0 * x[i + 1];
            const double t2 = x[i + 2] - x[i + 3];
            const double t3 = x[i + 1] - 2.0 * x[i + 2];
            const double t4 = x[i] - x[i + 3];
            f += t1 * t1 + 5.0 * t2 * t2 + std::pow(t3, 4) + 10.0 * std::pow(t4, 4);
        }
        return f;
    };
    p.grad = [](const Vector& x) {
        Vector g(x.size());
        for (Eigen::Index i = 0; i + 3 < x.size(); i += 4) {
            const double t1 = x[i] + 10.0 * x[i + 1];
            const double t2 = x[i + 2] - x[i + 3];
            const double t3 = x[i + 1] - 2.0 * x[i + 2];
            const double t4 = x[i] - x[i + 3];
            const double t3c = t3 * t3 * t3;
            const double t4c = t4 * t4 * t4;
            g[i] = 2.0 * t1 + 40.0 * t4c;
            g[i + 1] = 20.0 * t1 + 4.0 * t3c;
            g[i + 2] = 10.0 * t2 - 8.0 * t3c;
            g[i + 3] = -10.0 * t2 - 40.0 * t4c;
        }
        return g;
    };
    p.x0.resize(n);
    for (int i = 0; i < n; i += 4) {
        p.x0[i] = 3.0;
        p.x0[i + 1] = -1.0;
        p.x0[i + 2] = 0.0;
        p.x0[i + 3] = 1.0;
    }
    p.f_star = 0.0;
    return p;
}

// sum_i r_i^2, r_i = n - sum_j cos x_j + i (1 - cos x_i) - sin x_i, start 1/n
ObjectiveProblem trigonometric(int n) {
    if (n < 1) throw Error("trigonometric: n must be positive");
    ObjectiveProblem p;
    p.name = "trigonometric_" + std::to_string(n);
    p.n = n;
    auto residuals = [](const Vector& x) {
        const double n = static_cast<double>(x.size());
        const double c = n - x.array().cos().sum();
        Vector r(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            r[i] = c + static_cast<double>(i + 1) * (1.0 - std::cos(x[i])) - std::sin(x[i]);
        return r;
    };
    p.f = [residuals](const Vector& x) { return residuals(x).squaredNorm(); };
    p.grad = [residuals](const Vector& x) {
        const Vector r = residuals(x);
        const double total = r.sum();
        Vector g(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double sj = std::sin(x[j]);
            g[j] = 2.0 * sj * total +
                   2.0 * r[j] * (static_cast<double>(j + 1) * sj - std::cos(x[j]));
        }
        return g;
    };
    p.x0 = Vector::Constant(n, 1.0 / n);
    return p;
}

// sum_k (c_k - x1 + x1 x2^k)^2, c = (1.5, 2.25, 2.625), start (1, 1)
ObjectiveProblem beale() {
    static constexpr double c[3] = {1.5, 2.25, 2.625};
    ObjectiveProblem p;
    p.name = "beale_2";
    p.n = 2;
    p.f = [](const Vector& x) {
        double f = 0.0;
        for (int k = 1; k <= 3; ++k) {
            const double r = c[k - 1] - x[0] + x[0] * std::pow(x[1], k);
            f += r * r;
        }
        return f;
    };
    p.grad = [](const Vector& x) {
        Vector g = Vector::Zero(2);
        for (int k = 1; k <= 3; ++k) {
            const double r = c[k - 1] - x[0] + x[0] * std::pow(x[1], k);
            g[0] += 2.0 * r * (std::pow(x[1], k) - 1.0);
            g[1] += 2.0 * r * k * x[0] * std::pow(x[1], k - 1);
        }
        return g;
    };
    p.x0 = Vector::Ones(2);
    p.f_star = 0.0;
    return p;
}

ObjectiveProblem wood() {
    ObjectiveProblem p;
    p.name = "wood_4";
    p.n = 4;
    p.f = [](const Vector& x) {
        const double a = x[1] - x[0] * x[0];
        const double b = x[3] - x[2] * x[2];
        return 100.0 * a * a + (1.0 - x[0]) * (1.0 - x[0]) + 90.0 * b * b +
               (1.0 - x[2]) * (1.0 - x[2]) +
               10.1 * ((x[1] - 1.0) * (x[1] - 1.0) + (x[3] - 1.0) * (x[3] - 1.0)) +
               19.8 * (x[1] - 1.0) * (x[3] - 1.0);
    };
    p.grad = [](const Vector& x) {
        const double a = x[1] - x[0] * x[0];
        const double b = x[3] - x[2] * x[2];
        Vector g(4);
        g[0] = -400.0 * x[0] * a - 2.0 * (1.0 - x[0]);
        g[1] = 200.0 * a + 20.2 * (x[1] - 1.0) + 19.8 * (x[3] - 1.0);
        g[2] = -360.0 * x[2] * b - 2.0 * (1.0 - x[2]);
        g[3] = 180.0 * b + 20.2 * (x[3] - 1.0) + 19.8 * (x[1] - 1.0);
        return g;
    };
    p.x0 = Vector(4);
    p.x0 << -3.0, -1.0, -3.0, -1.0;
    p.f_star = 0.0;
    return p;
}

// sum_i (x_i - 1)^4, start 2
ObjectiveProblem diagonal_quartic(int n) {
    if (n < 1) throw Error("diagonal_quartic: n must be positive");
    ObjectiveProblem p;
    p.name = "diagonal_quartic_" + std::to_string(n);
    p.n = n;
    p.f = [](const Vector& x) { return (x.array() - 1.0).pow(4).sum(); };
    p.grad = [](const Vector& x) -> Vector { return 4.0 * (x.array() - 1.0).cube().matrix(); };
    p.x0 = Vector::Constant(n, 2.0);
    p.f_star = 0.0;
    return p;
}

// 1e-5 sum (x_i - 1)^2 + (sum x_i^2 - 1/4)^2, start x_i = i
ObjectiveProblem penalty1(int n) {
    if (n < 1) throw Error("penalty1: n must be positive");
    constexpr double a = 1e-5;
    ObjectiveProblem p;
    p.name = "penalty1_" + std::to_string(n);
    p.n = n;
    p.f = [](const Vector& x) {
        const double t = x.squaredNorm() - 0.25;
        return a * (x.array() - 1.0).square().sum() + t * t;
    };
    p.grad = [](const Vector& x) -> Vector {
        const double t = x.squaredNorm() - 0.25;
        return (2.0 * a * (x.array() - 1.0) + 4.0 * t * x.array()).matrix();
    };
    p.x0 = Vector::LinSpaced(n, 1.0, static_cast<double>(n));
    return p;
}

// (x_1 - 1)^2 + sum_{i>=2} i (2 x_i^2 - x_{i-1})^2, start 1
ObjectiveProblem dixon_price(int n) {
    if (n < 2) throw Error("dixon_price: n must be >= 2");
    ObjectiveProblem p;
    p.name = "dixon_price_" + std::to_string(n);
    p.n = n;
    p.f = [](const Vector& x) {
        double f = (x[0] - 1.0) * (x[0] - 1.0);
        for (Eigen::Index i = 1; i < x.size(); ++i) {
            const double t = 2.0 * x[i] * x[i] - x[i - 1];
            f += static_cast<double>(i + 1) * t * t;
        }
        return f;
    };
    p.grad = [](const Vector& x) {
        Vector g = Vector::Zero(x.size());
        g[0] = 2.0 * (x[0] - 1.0);
        for (Eigen::Index i = 1; i < x.size(); ++i) {
            const double t = 2.0 * x[i] * x[i] - x[i - 1];
            const double w = 2.0 * static_cast<double>(i + 1) * t;
            g[i] += w * 4.0 * x[i];
            g[i - 1] -= w;
        }
        return g;
    };
    p.x0 = Vector::Ones(n);
    p.f_star = 0.0;
    return p;
}

// sum_i (i/10) (exp(x_i) - x_i), start 1
ObjectiveProblem raydan1(int n) {
    if (n < 1) throw Error("raydan1: n must be positive");
    ObjectiveProblem p;
    p.name = "raydan1_" + std::to_string(n);
    p.n = n;
    const Vector w = Vector::LinSpaced(n, 0.1, 0.1 * n);
    p.f = [w](const Vector& x) { return (w.array() * (x.array().exp() - x.array())).sum(); };
    p.grad = [w](const Vector& x) -> Vector {
        return (w.array() * (x.array().exp() - 1.0)).matrix();
    };
    p.x0 = Vector::Ones(n);
    p.f_star = w.sum();
    return p;
}

ObjectiveProblem freudenstein_roth() {
    ObjectiveProblem p;
    p.name = "freudenstein_roth_2";
    p.n = 2;
    auto res = [](const Vector& x) {
        const double b = x[1];
        return std::pair{-13.0 + x[0] + ((5.0 - b) * b - 2.0) * b,
                         -29.0 + x[0] + ((b + 1.0) * b - 14.0) * b};
    };
    p.f = [res](const Vector& x) {
        const auto [r1, r2] = res(x);
        return r1 * r1 + r2 * r2;
    };
    p.grad = [res](const Vector& x) {
        const auto [r1, r2] = res(x);
        const double b = x[1];
        Vector g(2);
        g[0] = 2.0 * (r1 + r2);
        g[1] = 2.0 * r1 * (10.0 * b - 3.0 * b * b - 2.0) + 2.0 * r2 * (3.0 * b * b + 2.0 * b - 14.0);
        return g;
    };
    p.x0 = Vector(2);
    p.x0 << 0.5, -2.0;
    return p;
}

std::vector<ObjectiveProblem> corpus(std::uint64_t seed) {
    std::vector<ObjectiveProblem> out;
    for (int n : {2, 20, 100, 1000}) {
        for (int e : {1, 3, 5}) {
            SplitMix64 mix(seed ^ (static_cast<std::uint64_t>(n) << 16) ^
                           static_cast<std::uint64_t>(e));
            out.push_back(make_quadratic({n, std::pow(10.0, e), mix.next()}));
        }
    }
    for (int n : {2, 100, 1000}) out.push_back(rosenbrock(n));
    out.push_back(powell_singular(4));
    out.push_back(powell_singular(100));
    out.push_back(trigonometric(10));
    out.push_back(trigonometric(100));
    out.push_back(beale());
    out.push_back(wood());
    out.push_back(diagonal_quartic(100));
    out.push_back(diagonal_quartic(1000));
    out.push_back(penalty1(10));
    out.push_back(penalty1(50));
    out.push_back(dixon_price(10));
    out.push_back(raydan1(100));
    out.push_back(freudenstein_roth());
    return out;
}

double grad_check(const ObjectiveProblem& problem, int probes, double h, std::uint64_t seed) {
    if (!(h > 0.0)) throw Error("grad_check: h must be positive");
    SplitMix64 rng(seed);
    const int n = problem.n;
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        Vector x = problem.x0;
        for (int i = 0; i < n; ++i) x[i] += 0.1 * (1.0 + std::abs(x[i])) * rng.uniform(-1.0, 1.0);

        const Vector g = problem.grad(x);
        Vector fd(n);
        for (int i = 0; i < n; ++i) {
            const double hi = h * std::max(1.0, std::abs(x[i]));
            Vector xp = x;
            Vector xm = x;
            xp[i] += hi;
            xm[i] -= hi;
            const double fp = problem.f(xp);
            const double fm = problem.f(xm);
            if (!std::isfinite(fp) || !std::isfinite(fm)) {
                std::ostringstream os;
                os << "grad_check: non-finite f near probe [" << x.transpose() << "] of "
                   << problem.name;
                throw Error(os.str());
            }
            fd[i] = (fp - fm) / (xp[i] - xm[i]);
        }
        const double err =
            (fd - g).lpNorm<Eigen::Infinity>() / std::max(1.0, g.lpNorm<Eigen::Infinity>());
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace smcg
