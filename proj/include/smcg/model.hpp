#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace smcg {

using Vector = Eigen::VectorXd;

/// Raised when a precondition of a numerical routine is violated.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by validate_options; the message names the violated constraint.
class OptionsError : public Error {
public:
    using Error::Error;
};

/// A smooth unconstrained minimization problem.
///
/// The evaluators must be re-entrant: the bench runner calls them from
/// several threads at once.
struct ObjectiveProblem {
    std::string name;
    int n = 0;
    std::function<double(const Vector&)> f;
    std::function<Vector(const Vector&)> grad;
    Vector x0;
    std::optional<double> f_star;
};

enum class TauStrategy { Adaptive, B, H, One };
enum class DirectionScheme { SMCG, HZ, DK, Steepest };

struct SolverOptions {
    double eps_grad = 1e-6;

    double xi1 = 0.75;
    double xi2 = 0.5;
    double xi2_bar = 10.0;
    double xi2_bbar = 0.2;
    double xi3 = 7.5e-5;
    double xi4 = 9e-4;
    double xi5 = 0.9;
    double xi6 = 10.0;
    double eta1 = 0.99;
    double eta2 = 3.0;

    // improved Wolfe line search
    double delta = 0.1;
    double sigma = 0.9;
    double eps_f = 1e-6;
    double eta_bar_scale = 1e-3;
    double phi = 2.0;

    // restart counters
    double eps1 = 1e-8;
    int max_restart = 80;
    int min_quad = 3;

    int max_iter = 200000;
    TauStrategy tau_strategy = TauStrategy::Adaptive;
    DirectionScheme direction_scheme = DirectionScheme::SMCG;

    bool operator==(const SolverOptions&) const = default;
};

/// Throws OptionsError naming the first violated constraint; returns the
/// options unchanged otherwise.
SolverOptions validate_options(const SolverOptions& opts);

/// Rolling window of the iteration. `s_prev`/`y_prev` are only meaningful
/// for k >= 1.
struct IterateState {
    int k = 0;
    Vector x;
    double f_k = 0.0;
    Vector g_k;
    double f_prev = 0.0;
    Vector g_prev;
    Vector s_prev;
    Vector y_prev;
    Vector d_prev;
    double alpha_prev = 0.0;
    double mu_prev = std::numeric_limits<double>::infinity();
    int iter_restart = 0;
    int iter_quad = 0;
};

/// Accepts a step: shifts the current point into the `_prev` slots and
/// stores s = x_new - x, y = g_new - g from the stored values.
void advance_state(IterateState& state, const Vector& x_new, double f_new, const Vector& g_new,
                   const Vector& d, double alpha);

enum class SolverStatus { Converged, MaxIter, LineSearchFailure };

enum class RestartReason {
    FirstIter,
    NearParallel,
    OrthogonalityFail,
    CurvatureFail,
    CounterRestart,
    DescentGuard,
    LineSearchFallback,
};

enum class DirectionKind { Steepest, Subspace, Conjugate };

enum class LineSearchStatus { ExactWolfe, ImprovedWolfe, FallbackBest, Failed };

/// One row of the optional per-iteration trace.
struct IterationRecord {
    int k = 0;
    double f = 0.0;          // f at the start of iteration k
    double gnorm_inf = 0.0;  // of g_k
    double alpha = 0.0;
    DirectionKind direction_kind = DirectionKind::Steepest;
    std::optional<RestartReason> restart_reason;
    double u = 0.0;
    double v = 0.0;
    double tau = 0.0;
    double gtd = 0.0;
    int n_f_cum = 0;
    int n_g_cum = 0;

    // Line-search audit: enough to re-check both acceptance inequalities.
    LineSearchStatus ls_status = LineSearchStatus::Failed;
    double eta_bar = 0.0;
    double f_new = 0.0;
    double gtd_new = 0.0;  // g(x + alpha d)^T d
    double sy = 0.0;       // s_k^T y_k of the accepted step

    // Quadratic-likeness measures evaluated after the step.
    double mu = 0.0;
    double r = 0.0;
    double r_bar = 0.0;
    int iter_restart = 0;
    int iter_quad = 0;
};

struct SolverResult {
    Vector x_final;
    double f_final = 0.0;
    double gnorm_inf = 0.0;
    int n_iter = 0;
    int n_f = 0;
    int n_g = 0;
    SolverStatus status = SolverStatus::MaxIter;
    double zoutendijk_sum = 0.0;
    std::vector<IterationRecord> trace;
};

std::string to_string(TauStrategy t);
std::string to_string(DirectionScheme s);
std::string to_string(SolverStatus s);
std::string to_string(RestartReason r);
std::string to_string(DirectionKind k);
std::string to_string(LineSearchStatus s);

TauStrategy parse_tau_strategy(const std::string& s);
DirectionScheme parse_direction_scheme(const std::string& s);

// JSON (snake_case field names). Missing option fields keep their defaults;
// unknown fields are rejected.
void to_json(nlohmann::json& j, const SolverOptions& o);
void from_json(const nlohmann::json& j, SolverOptions& o);
void to_json(nlohmann::json& j, const IterationRecord& r);

/// One JSON object per line.
std::string trace_to_jsonl(const std::vector<IterationRecord>& trace);

}  // namespace smcg
