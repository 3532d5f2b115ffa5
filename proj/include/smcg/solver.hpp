#pragma once

#include "smcg/direction.hpp"
#include "smcg/model.hpp"

namespace smcg {

struct QuadraticMeasures {
    double r = 0.0;
    double r_bar = 0.0;
};

/// r = 2 (f - f_prev) / ((g + g_prev)^T s) - 1 (+inf when the denominator
/// vanishes) and r_bar = f - f_prev - (g_prev^T s + g^T s) / 2. Both vanish
/// on quadratics.
QuadraticMeasures r_measures(double f_prev, double f, const Vector& g_prev, const Vector& g,
                             const Vector& s);

/// Step-4 bookkeeping: IterRestart always advances; IterQuad advances while
/// the last step looked quadratic and resets otherwise.
void update_counters(IterateState& state, const QuadraticMeasures& m, const SolverOptions& opts);

/// True when the counter restart fires (IterRestart reached MaxRestart, or
/// every step since the last restart was quadratic-like and there were
/// MinQuad of them).
bool counter_restart_due(const IterateState& state, const SolverOptions& opts);

/// Direction for the configured scheme. SMCG delegates to smcg_direction;
/// HZ/DK build -g + beta d_prev and fall back to -g without descent.
DirectionOutcome direction_dispatch(const IterateState& state, const SolverOptions& opts);

/// Minimizes `problem` from its start point. Options are validated first.
SolverResult solve(const ObjectiveProblem& problem, const SolverOptions& opts,
                   bool record_trace = false);

}  // namespace smcg
