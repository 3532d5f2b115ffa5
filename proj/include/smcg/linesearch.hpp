#pragma once

#include "smcg/model.hpp"

namespace smcg {

struct LineSearchResult {
    double alpha = 0.0;
    Vector x_new;  // x + alpha d, exactly as evaluated
    double f_new = 0.0;
    Vector g_new;
    double gtd = 0.0;      // g^T d at the start point
    double gtd_new = 0.0;  // g_new^T d
    int n_f = 0;
    int n_g = 0;
    LineSearchStatus status = LineSearchStatus::Failed;
};

inline constexpr int kMaxLineSearchIter = 50;

/// Summable relaxation added to the sufficient-decrease test at iteration k.
double eta_bar(int k, double f0, const SolverOptions& opts);

/// First trial step for k >= 1. `steepest` tells whether d = -g_k, in which
/// case the step is not capped at 1.
double initial_step(const IterateState& state, const Vector& d, bool steepest,
                    const SolverOptions& opts);

/// Trial step for the very first iteration: 1 / ||g_0||_inf.
double bootstrap_step(const Vector& g0);

/// True when alpha passes the relaxed sufficient-decrease test
///   f_new <= f0 + min{eps_f |f0|, delta alpha g^T d + eta_bar}.
bool improved_armijo(double f0, double f_new, double alpha, double gtd, double eta_bar_k,
                     const SolverOptions& opts);

/// True when g_new^T d >= sigma g^T d.
bool wolfe_curvature(double gtd, double gtd_new, const SolverOptions& opts);

/// Improved Wolfe line search along d from (x, f, g), starting at alpha0.
///
/// Expands by doubling until the sufficient-decrease test fails, then
/// shrinks the bracket by safeguarded quadratic interpolation with a
/// bisection fallback. After kMaxLineSearchIter trials without an
/// acceptable step, returns the trial with the least f (FallbackBest if it
/// decreased f, Failed otherwise).
///
/// With `rescale_first` (used for the bootstrap trial), a first trial that
/// passes the decrease test is replaced once by the minimizer of the
/// quadratic interpolating f(x), g^T d and f(x + alpha0 d).
LineSearchResult line_search(const ObjectiveProblem& problem, const Vector& x, double f,
                             const Vector& g, const Vector& d, double alpha0, double eta_bar_k,
                             const SolverOptions& opts, bool rescale_first = false);

}  // namespace smcg
