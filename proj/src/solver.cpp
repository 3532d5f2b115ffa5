#include "smcg/solver.hpp"

#include "smcg/linesearch.hpp"

#include <cmath>
#include <limits>

namespace smcg {

QuadraticMeasures r_measures(double f_prev, double f, const Vector& g_prev, const Vector& g,
                             const Vector& s) {
    const double gps = g_prev.dot(s);
    const double gs = g.dot(s);
    const double denom = gps + gs;
    QuadraticMeasures m;
    m.r = denom != 0.0 ? 2.0 * (f - f_prev) / denom - 1.0
                       : std::numeric_limits<double>::infinity();
    if (!std::isfinite(m.r)) m.r = std::numeric_limits<double>::infinity();
    m.r_bar = f - f_prev - 0.5 * (gps + gs);
    return m;
}

void update_counters(IterateState& st, const QuadraticMeasures& m, const SolverOptions& opts) {
    ++st.iter_restart;
    if (std::abs(m.r) <= opts.eps1 || std::abs(m.r_bar) <= opts.eps1) {
        ++st.iter_quad;
    } else {
        st.iter_quad = 0;
    }
}

bool counter_restart_due(const IterateState& st, const SolverOptions& opts) {
    return st.iter_restart == opts.max_restart ||
           (st.iter_quad == opts.min_quad && st.iter_quad == st.iter_restart);
}

namespace {

DirectionOutcome steepest(const IterateState& st, std::optional<RestartReason> why) {
    DirectionOutcome out;
    out.d = -st.g_k;
    out.kind = DirectionKind::Steepest;
    out.restart_reason = why;
    out.gtd = st.g_k.dot(out.d);
    return out;
}

DirectionOutcome conjugate_direction(const IterateState& st, DirectionScheme scheme) {
    if (st.k == 0) return steepest(st, RestartReason::FirstIter);
    const double dy = st.d_prev.dot(st.y_prev);
    if (!(dy != 0.0) || !std::isfinite(dy)) return steepest(st, RestartReason::CurvatureFail);

    const double beta = scheme == DirectionScheme::HZ ? beta_hz(st.g_k, st.d_prev, st.y_prev)
                                                      : beta_dk(st.g_k, st.d_prev, st.y_prev);
    Vector d = -st.g_k + beta * st.d_prev;
    const double gtd = st.g_k.dot(d);
    if (!(gtd < -1e-12 * st.g_k.norm() * d.norm()) || !d.allFinite())
        return steepest(st, RestartReason::DescentGuard);

    DirectionOutcome out;
    out.d = std::move(d);
    out.kind = DirectionKind::Conjugate;
    out.beta = beta;
    out.gtd = gtd;
    return out;
}

}  // namespace

DirectionOutcome direction_dispatch(const IterateState& st, const SolverOptions& opts) {
    switch (opts.direction_scheme) {
        case DirectionScheme::SMCG: return smcg_direction(st, opts);
        case DirectionScheme::HZ:
        case DirectionScheme::DK: return conjugate_direction(st, opts.direction_scheme);
        case DirectionScheme::Steepest:
            return steepest(st, st.k == 0 ? std::optional(RestartReason::FirstIter) : std::nullopt);
    }
    return steepest(st, std::nullopt);
}

SolverResult solve(const ObjectiveProblem& problem, const SolverOptions& raw_opts,
                   bool record_trace) {
    const SolverOptions opts = validate_options(raw_opts);
    if (problem.n < 1 || problem.x0.size() != problem.n)
        throw Error("problem '" + problem.name + "': start point does not match dimension");

    IterateState st;
    st.x = problem.x0;
    st.f_k = problem.f(st.x);
    st.g_k = problem.grad(st.x);
    if (!std::isfinite(st.f_k)) throw Error("problem '" + problem.name + "': f(x0) is not finite");

    SolverResult res;
    res.n_f = 1;
    res.n_g = 1;
    const double f0 = st.f_k;

    auto finish = [&](SolverStatus status) {
        res.status = status;
        res.x_final = st.x;
        res.f_final = st.f_k;
        res.gnorm_inf = st.g_k.lpNorm<Eigen::Infinity>();
        res.n_iter = st.k;
        return res;
    };

    if (st.g_k.lpNorm<Eigen::Infinity>() <= opts.eps_grad) return finish(SolverStatus::Converged);

    std::optional<RestartReason> forced;
    int failures = 0;
    double mu_current = std::numeric_limits<double>::infinity();

    while (st.k < opts.max_iter) {
        DirectionOutcome dir;
        if (st.k == 0) {
            dir = direction_dispatch(st, opts);
        } else if (forced) {
            dir = steepest(st, forced);
        } else if (counter_restart_due(st, opts)) {
            st.iter_restart = 0;
            st.iter_quad = 0;
            dir = steepest(st, RestartReason::CounterRestart);
        } else {
            dir = direction_dispatch(st, opts);
        }
        forced.reset();

        const bool is_steepest = dir.kind == DirectionKind::Steepest;
        const bool bootstrap = st.k == 0 || failures > 0;
        const double alpha0 =
            bootstrap ? bootstrap_step(st.g_k) : initial_step(st, dir.d, is_steepest, opts);
        const double eb = eta_bar(st.k, f0, opts);
        LineSearchResult ls =
            line_search(problem, st.x, st.f_k, st.g_k, dir.d, alpha0, eb, opts, bootstrap);
        res.n_f += ls.n_f;
        res.n_g += ls.n_g;

        IterationRecord rec;
        if (record_trace) {
            rec.k = st.k;
            rec.f = st.f_k;
            rec.gnorm_inf = st.g_k.lpNorm<Eigen::Infinity>();
            rec.alpha = ls.alpha;
            rec.direction_kind = dir.kind;
            rec.restart_reason = dir.restart_reason;
            rec.u = dir.u;
            rec.v = dir.v;
            rec.tau = dir.tau;
            rec.gtd = ls.gtd;
            rec.n_f_cum = res.n_f;
            rec.n_g_cum = res.n_g;
            rec.ls_status = ls.status;
            rec.eta_bar = eb;
            rec.f_new = ls.f_new;
            rec.gtd_new = ls.gtd_new;
            rec.iter_restart = st.iter_restart;
            rec.iter_quad = st.iter_quad;
        }

        if (ls.status == LineSearchStatus::Failed) {
            if (record_trace) res.trace.push_back(rec);
            if (++failures >= 2) return finish(SolverStatus::LineSearchFailure);
            forced = RestartReason::LineSearchFallback;
            continue;
        }
        failures = 0;
        if (ls.status == LineSearchStatus::FallbackBest) forced = RestartReason::LineSearchFallback;

        res.zoutendijk_sum += dir.gtd * dir.gtd / dir.d.squaredNorm();

        advance_state(st, ls.x_new, ls.f_new, ls.g_new, dir.d, ls.alpha);
        st.mu_prev = mu_current;
        mu_current = mu_measure(st.f_prev, st.f_k, st.g_k, st.s_prev, st.y_prev);
        const QuadraticMeasures m = r_measures(st.f_prev, st.f_k, st.g_prev, st.g_k, st.s_prev);
        update_counters(st, m, opts);

        if (record_trace) {
            rec.sy = st.s_prev.dot(st.y_prev);
            rec.mu = mu_current;
            rec.r = m.r;
            rec.r_bar = m.r_bar;
            res.trace.push_back(rec);
        }

        if (st.g_k.lpNorm<Eigen::Infinity>() <= opts.eps_grad) return finish(SolverStatus::Converged);
    }
    return finish(SolverStatus::MaxIter);
}

}  // namespace smcg
