#include "smcg/direction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smcg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Inner products shared by the closed forms below.
struct Products {
    double gg, ss, yy, gs, gy, sy;

    Products(const Vector& g, const Vector& s, const Vector& y)
        : gg(g.squaredNorm()),
          ss(s.squaredNorm()),
          yy(y.squaredNorm()),
          gs(g.dot(s)),
          gy(g.dot(y)),
          sy(s.dot(y)) {}

    // ||g||^2 ||s||^2 - (g^T s)^2
    double gram() const { return gg * ss - gs * gs; }
};

void require_curvature(double sy) {
    if (!(sy > 0.0)) throw Error("curvature condition violated");
}

void require_subspace(const Products& p) {
    if (!(p.gram() >= 1e2 * kEps * p.gg * p.ss)) throw Error("near-parallel subspace");
}

}  // namespace

double omega_bar(const Vector& g, const Vector& s) {
    const double gg = g.squaredNorm();
    const double ss = s.squaredNorm();
    if (!(gg > 0.0) || !(ss > 0.0)) throw Error("degenerate vector");
    const double gs = g.dot(s);
    return std::clamp(gs * gs / (gg * ss), 0.0, 1.0);
}

Vector perry_shanno(const Vector& g, const Vector& s, const Vector& y, double tau) {
    const Products p(g, s, y);
    require_curvature(p.sy);
    const double gs_sy = p.gs / p.sy;
    const double coef_s = p.gy / p.sy - (tau + p.yy / p.sy) * gs_sy;
    return -g + coef_s * s + gs_sy * y;
}

SubspaceCoefficients project_uv(const Vector& g, const Vector& s, const Vector& y, double tau) {
    const Products p(g, s, y);
    require_curvature(p.sy);
    require_subspace(p);
    const double gram = p.gram();
    const double gs2 = p.gs * p.gs;

    const double u = -1.0 + p.gy * p.gs / (p.sy * p.gg) -
                     (p.gg * gs2 - p.gy * gs2 * p.gs / p.sy) / (p.gg * gram);
    const double v = p.gy / p.sy + (p.gg * p.gs - p.gy * gs2 / p.sy) / gram -
                     (tau + p.yy / p.sy) * p.gs / p.sy;
    return {u, v};
}

SubspaceCoefficients project_uv_rewritten(const Vector& g, const Vector& s, const Vector& y,
                                          double tau) {
    const Products p(g, s, y);
    require_curvature(p.sy);
    require_subspace(p);
    const double w = omega_bar(g, s);
    const double one_minus_w = 1.0 - w;

    const double u = (-1.0 + p.gy * p.gs / (p.sy * p.gg)) / one_minus_w;
    const double v = (1.0 - 2.0 * w) / one_minus_w * p.gy / p.sy -
                     (tau + p.yy / p.sy - p.sy / (one_minus_w * p.ss)) * p.gs / p.sy;
    return {u, v};
}

TruncationFloor eta_floor(const Vector& g, const Vector& s, double u, double omega_bar,
                          const SolverOptions& opts) {
    const double ss = s.squaredNorm();
    if (!(ss > 0.0)) throw Error("degenerate vector");
    const double gs = g.dot(s);

    double l = opts.xi2;
    if (gs > 0.0) {
        // gs > 0 implies omega_bar > 0
        l = std::min(std::max(opts.xi2_bbar, -1.0 + (1.0 + u) / omega_bar), opts.xi2_bar);
    }
    return {l, -l * std::abs(gs) / ss};
}

bool orthogonality_restart(const Vector& g, const Vector& g_prev, const SolverOptions& opts) {
    const double gg = g.squaredNorm();
    const double cross = g.dot(g_prev);
    return cross > opts.eta2 * gg || cross < -opts.eta1 * gg;
}

double mu_measure(double f_prev, double f, const Vector& g, const Vector& s, const Vector& y) {
    const double sy = s.dot(y);
    if (sy == 0.0) return std::numeric_limits<double>::infinity();
    const double mu = std::abs(2.0 * (f_prev - f + g.dot(s)) / sy - 1.0);
    return std::isfinite(mu) ? mu : std::numeric_limits<double>::infinity();
}

double tau_b(const Vector& s, const Vector& y) { return s.dot(y) / s.squaredNorm(); }

double tau_h(const Vector& s, const Vector& y) { return y.squaredNorm() / s.dot(y); }

double tau_select(const IterateState& st, const SolverOptions& opts) {
    const double sy = st.s_prev.dot(st.y_prev);
    require_curvature(sy);

    switch (opts.tau_strategy) {
        case TauStrategy::B: return tau_b(st.s_prev, st.y_prev);
        case TauStrategy::H: return tau_h(st.s_prev, st.y_prev);
        case TauStrategy::One: return 1.0;
        case TauStrategy::Adaptive: break;
    }

    const double mu = mu_measure(st.f_prev, st.f_k, st.g_k, st.s_prev, st.y_prev);
    const bool quadratic_like = mu <= opts.xi3 || std::max(mu, st.mu_prev) <= opts.xi4;
    const double gg = st.g_k.squaredNorm();
    const double ss = st.s_prev.squaredNorm();
    const bool near_stationary_or_short = gg <= opts.xi6 || (gg > opts.xi6 && ss <= opts.xi5);
    if (quadratic_like && near_stationary_or_short) return 1.0;
    return tau_b(st.s_prev, st.y_prev);
}

DirectionOutcome smcg_direction(const IterateState& st, const SolverOptions& opts) {
    DirectionOutcome out;
    out.d = -st.g_k;
    out.gtd = st.g_k.dot(out.d);

    auto restart = [&](RestartReason why) {
        out.kind = DirectionKind::Steepest;
        out.restart_reason = why;
        out.d = -st.g_k;
        out.gtd = st.g_k.dot(out.d);
        return out;
    };

    if (st.k == 0) return restart(RestartReason::FirstIter);

    const Vector& g = st.g_k;
    const Vector& s = st.s_prev;
    const Vector& y = st.y_prev;
    const Products p(g, s, y);
    if (!(p.sy > 0.0) || !std::isfinite(p.sy)) return restart(RestartReason::CurvatureFail);
    if (!(p.gg > 0.0)) return restart(RestartReason::FirstIter);

    out.omega_bar = omega_bar(g, s);
    if (out.omega_bar > opts.xi1) return restart(RestartReason::NearParallel);
    if (!(p.gram() >= 1e2 * kEps * p.gg * p.ss)) return restart(RestartReason::NearParallel);
    if (orthogonality_restart(g, st.g_prev, opts)) return restart(RestartReason::OrthogonalityFail);

    out.tau = tau_select(st, opts);
    const auto [u, v] = project_uv(g, s, y, out.tau);
    const auto floor = eta_floor(g, s, u, out.omega_bar, opts);
    out.u = u;
    out.v_raw = v;
    out.l = floor.l;
    out.eta = floor.eta;
    out.v = truncate_v(v, floor.eta);
    out.t_dl = dai_liao_t(g, s, y, out.tau);

    Vector d = u * g + out.v * s;
    const double gtd = g.dot(d);
    // The floor can cost descent when l is capped at xi2_bar, or when
    // g^T y_prev < 0 is allowed by a wide restart band.
    if (!(gtd <= -1e-12 * p.gg) || !d.allFinite()) return restart(RestartReason::DescentGuard);

    out.kind = DirectionKind::Subspace;
    out.restart_reason.reset();
    out.d = std::move(d);
    out.gtd = gtd;
    return out;
}

double dai_liao_t(const Vector& g, const Vector& s, const Vector& y, double tau) {
    const Products p(g, s, y);
    require_curvature(p.sy);
    require_subspace(p);
    return (p.gy * p.gy * p.ss / p.sy - 2.0 * p.gy * p.gs + p.gg * p.sy) / p.gram() -
           (tau + p.yy / p.sy);
}

EigenDiagnostics eigen_diagnostics(const Vector& g, const Vector& s, const Vector& y, double tau) {
    (void)g;
    const double sy = s.dot(y);
    require_curvature(sy);
    const double ss = s.squaredNorm();
    EigenDiagnostics e;
    e.p = y.squaredNorm() * ss / (sy * sy);
    e.gamma = tau * ss / sy;
    const double sum = e.p + e.gamma;
    const double disc = std::max(0.0, sum * sum - 4.0 * e.gamma);
    // smaller root of x^2 - sum x + gamma, written without cancellation
    e.lambda_min = 2.0 * e.gamma / (sum + std::sqrt(disc));
    return e;
}

double gtd_closed_form(const Vector& g, const Vector& s, const Vector& y, double tau) {
    const Products p(g, s, y);
    require_curvature(p.sy);
    return -p.gg + 2.0 * p.gs * p.gy / p.sy - (tau + p.yy / p.sy) * p.gs * p.gs / p.sy;
}

double beta_hz(const Vector& g_next, const Vector& d, const Vector& y) {
    const double dy = d.dot(y);
    if (dy == 0.0) throw Error("degenerate curvature");
    return g_next.dot(y) / dy - 2.0 * (y.squaredNorm() / dy) * (g_next.dot(d) / dy);
}

double beta_dk(const Vector& g_next, const Vector& d, const Vector& y) {
    const double dy = d.dot(y);
    if (dy == 0.0) throw Error("degenerate curvature");
    return g_next.dot(y) / dy - (y.squaredNorm() / dy) * (g_next.dot(d) / dy);
}

}  // namespace smcg
