#pragma once

#include "smcg/model.hpp"

#include <optional>

namespace smcg {

/// Search direction together with the quantities it was assembled from.
///
/// For a Subspace direction d = u * g_k + v * s_{k-1}, where v is the
/// truncated coefficient max{v_raw, eta}. Steepest directions are exactly
/// -g_k and carry the reason in `restart_reason`. Conjugate directions come
/// from the HZ/DK baselines (d = -g + beta * d_prev).
struct DirectionOutcome {
    Vector d;
    DirectionKind kind = DirectionKind::Steepest;
    std::optional<RestartReason> restart_reason;
    double u = -1.0;
    double v_raw = 0.0;
    double v = 0.0;
    double eta = 0.0;
    double l = 0.0;
    double omega_bar = 0.0;
    double tau = 0.0;
    double beta = 0.0;
    double gtd = 0.0;
    double t_dl = 0.0;
};

struct EigenDiagnostics {
    double p = 0.0;
    double gamma = 0.0;
    double lambda_min = 0.0;
};

struct SubspaceCoefficients {
    double u = 0.0;
    double v = 0.0;
};

struct TruncationFloor {
    double l = 0.0;
    double eta = 0.0;
};

/// Squared cosine of the angle between g and s, clamped to [0, 1].
double omega_bar(const Vector& g, const Vector& s);

/// Perry-Shanno memoryless quasi-Newton direction, rescaled by tau so that
/// d^T y = -tau * g^T s.
Vector perry_shanno(const Vector& g, const Vector& s, const Vector& y, double tau);

/// Least-squares projection of perry_shanno(g, s, y, tau) onto span{g, s}.
/// Throws when the subspace is numerically one-dimensional.
SubspaceCoefficients project_uv(const Vector& g, const Vector& s, const Vector& y, double tau);

/// The same projection written through omega_bar; used to cross-check
/// project_uv.
SubspaceCoefficients project_uv_rewritten(const Vector& g, const Vector& s, const Vector& y,
                                          double tau);

/// Lower bound eta applied to the s-coefficient, and the factor l behind it.
TruncationFloor eta_floor(const Vector& g, const Vector& s, double u, double omega_bar,
                          const SolverOptions& opts);

inline double truncate_v(double v, double eta) { return v >= eta ? v : eta; }

/// Powell-style test on g^T g_prev: true means restart with -g.
bool orthogonality_restart(const Vector& g, const Vector& g_prev, const SolverOptions& opts);

/// |2 (f_prev - f + g^T s) / (s^T y) - 1|; +inf when s^T y = 0.
double mu_measure(double f_prev, double f, const Vector& g, const Vector& s, const Vector& y);

double tau_b(const Vector& s, const Vector& y);
double tau_h(const Vector& s, const Vector& y);

/// Scaling parameter for the current iterate under opts.tau_strategy.
double tau_select(const IterateState& state, const SolverOptions& opts);

/// Direction for iterate `state` (restart tests, tau choice, projection and
/// truncation). Never throws: every degeneracy becomes a steepest restart.
DirectionOutcome smcg_direction(const IterateState& state, const SolverOptions& opts);

/// Dai-Liao parameter t with d^T y = t * g^T s for the untruncated
/// subspace direction.
double dai_liao_t(const Vector& g, const Vector& s, const Vector& y, double tau);

EigenDiagnostics eigen_diagnostics(const Vector& g, const Vector& s, const Vector& y, double tau);

/// Closed form of g^T d for the untruncated subspace direction.
double gtd_closed_form(const Vector& g, const Vector& s, const Vector& y, double tau);

double beta_hz(const Vector& g_next, const Vector& d, const Vector& y);
double beta_dk(const Vector& g_next, const Vector& d, const Vector& y);

}  // namespace smcg
