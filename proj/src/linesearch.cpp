#include "smcg/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace smcg {

double eta_bar(int k, double f0, const SolverOptions& opts) {
    const double kk = static_cast<double>(k) + 1.0;
    return opts.eta_bar_scale * (1.0 + std::abs(f0)) / (kk * kk);
}

double bootstrap_step(const Vector& g0) {
    const double gmax = g0.lpNorm<Eigen::Infinity>();
    return gmax > 0.0 ? 1.0 / gmax : 1.0;
}

double initial_step(const IterateState& st, const Vector& d, bool steepest,
                    const SolverOptions& opts) {
    const double gtd = st.g_k.dot(d);
    if (!(gtd < 0.0)) throw Error("not a descent direction");
    const double a0 =
        std::max(opts.phi * st.alpha_prev, -2.0 * std::abs(st.f_k - st.f_prev) / gtd);
    if (!std::isfinite(a0) || !(a0 > 0.0)) return steepest ? bootstrap_step(st.g_k) : 1.0;
    return steepest ? a0 : std::min(1.0, a0);
}

bool improved_armijo(double f0, double f_new, double alpha, double gtd, double eta_bar_k,
                     const SolverOptions& opts) {
    const double slack = std::min(opts.eps_f * std::abs(f0), opts.delta * alpha * gtd + eta_bar_k);
    return f_new <= f0 + slack;
}

bool wolfe_curvature(double gtd, double gtd_new, const SolverOptions& opts) {
    return gtd_new >= opts.sigma * gtd;
}

namespace {

struct Trial {
    double alpha;
    double f;
};

// Minimizer of the quadratic matching f and f' at lo and f at hi, or the
// midpoint when that falls outside the inner 80% of the bracket.
double shrink(const Trial& lo, double lo_slope, const Trial& hi) {
    const double w = hi.alpha - lo.alpha;
    const double mid = lo.alpha + 0.5 * w;
    if (!std::isfinite(hi.f)) return mid;
    const double curvature = 2.0 * (hi.f - lo.f - lo_slope * w);
    if (!(curvature > 0.0)) return mid;
    const double a = lo.alpha - lo_slope * w * w / curvature;
    if (!(a >= lo.alpha + 0.1 * w && a <= hi.alpha - 0.1 * w)) return mid;
    return a;
}

}  // namespace

LineSearchResult line_search(const ObjectiveProblem& problem, const Vector& x, double f,
                             const Vector& g, const Vector& d, double alpha0, double eta_bar_k,
                             const SolverOptions& opts, bool rescale_first) {
    const double gtd = g.dot(d);
    if (!(gtd < 0.0)) throw Error("not a descent direction");
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw Error("initial step must be positive");

    LineSearchResult res;
    res.gtd = gtd;
    Trial lo{0.0, f};
    double lo_slope = gtd;
    std::optional<Trial> hi;

    struct Best {
        double alpha;
        double f;
        Vector x;
        std::optional<Vector> g;
    };
    std::optional<Best> best;

    double alpha = alpha0;
    for (int it = 0; it < kMaxLineSearchIter; ++it) {
        Vector xt = x + alpha * d;
        const double ft = problem.f(xt);
        ++res.n_f;

        const bool finite = std::isfinite(ft);
        if (finite && (!best || ft < best->f)) best = Best{alpha, ft, xt, std::nullopt};

        if (!finite || !improved_armijo(f, ft, alpha, gtd, eta_bar_k, opts)) {
            hi = Trial{alpha, ft};
            alpha = shrink(lo, lo_slope, *hi);
            continue;
        }

        // alpha0 without a scale: move to the minimizer of the quadratic
        // through f, g^T d at 0 and f at alpha0 when it is convex and clearly
        // elsewhere.
        if (it == 0 && rescale_first) {
            const double curvature = ft - f - alpha * gtd;
            if (curvature > 0.0) {
                const double a = -gtd * alpha * alpha / (2.0 * curvature);
                if (std::isfinite(a) && std::abs(a - alpha) > 0.1 * alpha) {
                    alpha = a;
                    continue;
                }
            }
        }

        Vector gt = problem.grad(xt);
        ++res.n_g;
        const double slope = gt.dot(d);
        if (best && best->alpha == alpha) best->g = gt;

        if (wolfe_curvature(gtd, slope, opts)) {
            res.alpha = alpha;
            res.x_new = std::move(xt);
            res.f_new = ft;
            res.g_new = std::move(gt);
            res.gtd_new = slope;
            res.status = ft <= f + opts.delta * alpha * gtd ? LineSearchStatus::ExactWolfe
                                                             : LineSearchStatus::ImprovedWolfe;
            return res;
        }

        lo = Trial{alpha, ft};
        lo_slope = slope;
        alpha = hi ? shrink(lo, lo_slope, *hi) : 2.0 * alpha;
    }

    if (!best) {
        res.status = LineSearchStatus::Failed;
        res.alpha = 0.0;
        res.x_new = x;
        res.f_new = f;
        res.g_new = g;
        res.gtd_new = gtd;
        return res;
    }
    if (!best->g) {
        best->g = problem.grad(best->x);
        ++res.n_g;
    }
    res.alpha = best->alpha;
    res.x_new = std::move(best->x);
    res.f_new = best->f;
    res.g_new = std::move(*best->g);
    res.gtd_new = res.g_new.dot(d);
    res.status = best->f < f ? LineSearchStatus::FallbackBest : LineSearchStatus::Failed;
    return res;
}

}  // namespace smcg
