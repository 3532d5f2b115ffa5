#include "smcg/model.hpp"

#include <cmath>
#include <sstream>

namespace smcg {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw OptionsError(std::string(what) + " violated");
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

SolverOptions validate_options(const SolverOptions& o) {
    require(positive(o.eps_grad), "eps_grad > 0");
    require(positive(o.delta), "delta > 0");
    require(o.sigma < 1.0, "sigma < 1");
    require(o.delta < o.sigma, "delta < sigma");
    require(positive(o.xi1) && o.xi1 < 1.0, "xi1 in (0,1)");
    require(positive(o.xi2), "xi2 > 0");
    require(positive(o.xi2_bar), "xi2_bar > 0");
    require(positive(o.xi2_bbar), "xi2_bbar > 0");
    require(positive(o.xi3), "xi3 > 0");
    require(positive(o.xi4), "xi4 > 0");
    require(o.xi3 < o.xi4, "xi3 < xi4");
    require(positive(o.xi5), "xi5 > 0");
    require(positive(o.xi6), "xi6 > 0");
    require(positive(o.eta1), "eta1 > 0");
    require(positive(o.eta2), "eta2 > 0");
    require(positive(o.eps_f), "eps_f > 0");
    require(positive(o.eps1), "eps1 > 0");
    require(positive(o.eta_bar_scale), "eta_bar_scale > 0");
    require(positive(o.phi), "phi > 0");
    require(o.max_restart >= 1, "max_restart >= 1");
    require(o.min_quad >= 1, "min_quad >= 1");
    require(o.max_iter >= 1, "max_iter >= 1");
    return o;
}

void advance_state(IterateState& st, const Vector& x_new, double f_new, const Vector& g_new,
                   const Vector& d, double alpha) {
    st.s_prev = x_new - st.x;
    st.y_prev = g_new - st.g_k;
    st.d_prev = d;
    st.alpha_prev = alpha;
    st.f_prev = st.f_k;
    st.g_prev = st.g_k;
    st.x = x_new;
    st.f_k = f_new;
    st.g_k = g_new;
    ++st.k;
}

std::string to_string(TauStrategy t) {
    switch (t) {
        case TauStrategy::Adaptive: return "adaptive";
        case TauStrategy::B: return "b";
        case TauStrategy::H: return "h";
        case TauStrategy::One: return "one";
    }
    return "?";
}

std::string to_string(DirectionScheme s) {
    switch (s) {
        case DirectionScheme::SMCG: return "smcg";
        case DirectionScheme::HZ: return "hz";
        case DirectionScheme::DK: return "dk";
        case DirectionScheme::Steepest: return "steepest";
    }
    return "?";
}

std::string to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::Converged: return "converged";
        case SolverStatus::MaxIter: return "max_iter";
        case SolverStatus::LineSearchFailure: return "line_search_failure";
    }
    return "?";
}

std::string to_string(RestartReason r) {
    switch (r) {
        case RestartReason::FirstIter: return "first_iter";
        case RestartReason::NearParallel: return "near_parallel";
        case RestartReason::OrthogonalityFail: return "orthogonality_fail";
        case RestartReason::CurvatureFail: return "curvature_fail";
        case RestartReason::CounterRestart: return "counter_restart";
        case RestartReason::DescentGuard: return "descent_guard";
        case RestartReason::LineSearchFallback: return "line_search_fallback";
    }
    return "?";
}

std::string to_string(DirectionKind k) {
    switch (k) {
        case DirectionKind::Steepest: return "steepest";
        case DirectionKind::Subspace: return "subspace";
        case DirectionKind::Conjugate: return "conjugate";
    }
    return "?";
}

std::string to_string(LineSearchStatus s) {
    switch (s) {
        case LineSearchStatus::ExactWolfe: return "exact_wolfe";
        case LineSearchStatus::ImprovedWolfe: return "improved_wolfe";
        case LineSearchStatus::FallbackBest: return "fallback_best";
        case LineSearchStatus::Failed: return "failed";
    }
    return "?";
}

TauStrategy parse_tau_strategy(const std::string& s) {
    if (s == "adaptive") return TauStrategy::Adaptive;
    if (s == "b") return TauStrategy::B;
    if (s == "h") return TauStrategy::H;
    if (s == "one") return TauStrategy::One;
    throw OptionsError("unknown tau_strategy '" + s + "'");
}

DirectionScheme parse_direction_scheme(const std::string& s) {
    if (s == "smcg") return DirectionScheme::SMCG;
    if (s == "hz") return DirectionScheme::HZ;
    if (s == "dk") return DirectionScheme::DK;
    if (s == "steepest") return DirectionScheme::Steepest;
    throw OptionsError("unknown direction_scheme '" + s + "'");
}

void to_json(nlohmann::json& j, const SolverOptions& o) {
    j = nlohmann::json{
        {"eps_grad", o.eps_grad},
        {"xi1", o.xi1},
        {"xi2", o.xi2},
        {"xi2_bar", o.xi2_bar},
        {"xi2_bbar", o.xi2_bbar},
        {"xi3", o.xi3},
        {"xi4", o.xi4},
        {"xi5", o.xi5},
        {"xi6", o.xi6},
        {"eta1", o.eta1},
        {"eta2", o.eta2},
        {"delta", o.delta},
        {"sigma", o.sigma},
        {"eps_f", o.eps_f},
        {"eps1", o.eps1},
        {"max_restart", o.max_restart},
        {"min_quad", o.min_quad},
        {"phi", o.phi},
        {"eta_bar_scale", o.eta_bar_scale},
        {"max_iter", o.max_iter},
        {"tau_strategy", to_string(o.tau_strategy)},
        {"direction_scheme", to_string(o.direction_scheme)},
    };
}

void from_json(const nlohmann::json& j, SolverOptions& o) {
    if (!j.is_object()) throw OptionsError("options document must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "eps_grad") o.eps_grad = value.get<double>();
        else if (key == "xi1") o.xi1 = value.get<double>();
        else if (key == "xi2") o.xi2 = value.get<double>();
        else if (key == "xi2_bar") o.xi2_bar = value.get<double>();
        else if (key == "xi2_bbar") o.xi2_bbar = value.get<double>();
        else if (key == "xi3") o.xi3 = value.get<double>();
        else if (key == "xi4") o.xi4 = value.get<double>();
        else if (key == "xi5") o.xi5 = value.get<double>();
        else if (key == "xi6") o.xi6 = value.get<double>();
        else if (key == "eta1") o.eta1 = value.get<double>();
        else if (key == "eta2") o.eta2 = value.get<double>();
        else if (key == "delta") o.delta = value.get<double>();
        else if (key == "sigma") o.sigma = value.get<double>();
        else if (key == "eps_f") o.eps_f = value.get<double>();
        else if (key == "eps1") o.eps1 = value.get<double>();
        else if (key == "max_restart") o.max_restart = value.get<int>();
        else if (key == "min_quad") o.min_quad = value.get<int>();
        else if (key == "phi") o.phi = value.get<double>();
        else if (key == "eta_bar_scale") o.eta_bar_scale = value.get<double>();
        else if (key == "max_iter") o.max_iter = value.get<int>();
        else if (key == "tau_strategy") o.tau_strategy = parse_tau_strategy(value.get<std::string>());
        else if (key == "direction_scheme")
            o.direction_scheme = parse_direction_scheme(value.get<std::string>());
        else throw OptionsError("unknown option field '" + key + "'");
    }
}

void to_json(nlohmann::json& j, const IterationRecord& r) {
    j = nlohmann::json{
        {"k", r.k},
        {"f", r.f},
        {"gnorm_inf", r.gnorm_inf},
        {"alpha", r.alpha},
        {"direction_kind", to_string(r.direction_kind)},
        {"restart_reason", r.restart_reason ? nlohmann::json(to_string(*r.restart_reason))
                                            : nlohmann::json(nullptr)},
        {"u", r.u},
        {"v", r.v},
        {"tau", r.tau},
        {"gtd", r.gtd},
        {"n_f_cum", r.n_f_cum},
        {"n_g_cum", r.n_g_cum},
        {"ls_status", to_string(r.ls_status)},
        {"eta_bar", r.eta_bar},
        {"f_new", r.f_new},
        {"gtd_new", r.gtd_new},
        {"sy", r.sy},
        {"mu", r.mu},
        {"r", r.r},
        {"r_bar", r.r_bar},
        {"iter_restart", r.iter_restart},
        {"iter_quad", r.iter_quad},
    };
}

std::string trace_to_jsonl(const std::vector<IterationRecord>& trace) {
    std::ostringstream out;
    for (const auto& rec : trace) {
        // Non-finite diagnostics (e.g. the mu sentinel) serialize as null.
        out << nlohmann::json(rec).dump() << '\n';
    }
    return out.str();
}

}  // namespace smcg
