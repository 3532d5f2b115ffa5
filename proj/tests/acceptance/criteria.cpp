#include "criteria.hpp"

#include "../support/oracles.hpp"

#include "smcg/bench.hpp"
#include "smcg/direction.hpp"
#include "smcg/linesearch.hpp"
#include "smcg/problems.hpp"
#include "smcg/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace smcg::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kSamples = 10000;
constexpr std::uint64_t kSampleSeed = 20240611;

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

CriterionResult timed(int id, std::string name, const std::function<CriterionResult()>& body) {
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.id = id;
    r.name = std::move(name);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

// Builds the k = 1 state whose previous pair is (s, y).
IterateState state_from(const oracle::Triple& t) {
    IterateState st;
    st.k = 1;
    st.x = Vector::Zero(t.g.size());
    st.g_k = t.g;
    st.g_prev = t.g - t.y;
    st.s_prev = t.s;
    st.y_prev = t.y;
    st.d_prev = t.s;
    st.alpha_prev = 1.0;
    return st;
}

// ---------------------------------------------------------------- 1

CriterionResult two_dim_termination() {
    SplitMix64 rng(7);
    int failures = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const double cond = std::pow(10.0, rng.uniform(0.0, 4.0));
        const SeededQuadratic q({2, cond, rng.next()});
        Vector x = q.start();
        Vector g = q.gradient(x);
        const double g0 = g.norm();

        // exact Cauchy step
        Vector d = -g;
        Vector x_new = x + oracle::exact_step(q, g, d) * d;
        Vector g_new = q.gradient(x_new);

        for (int k = 1; k < 3 && g_new.norm() > 0.0; ++k) {
            const Vector s = x_new - x;
            const Vector y = g_new - g;
            x = x_new;
            g = g_new;
            const auto [u, v] = project_uv(g, s, y, 1.0);
            d = u * g + v * s;
            x_new = x + d;
            g_new = q.gradient(x_new);
        }
        const double ratio = g_new.norm() / std::max(1.0, g0);
        worst = std::max(worst, ratio);
        if (!(ratio <= 1e-8)) ++failures;
    }
    CriterionResult r;
    r.pass = failures == 0;
    r.detail = "200 quadratics, failures=" + std::to_string(failures) +
               ", max ||g3||/max(1,||g0||)=" + sci(worst);
    return r;
}

// ---------------------------------------------------------------- 2

CriterionResult projection_oracle() {
    SplitMix64 rng(kSampleSeed);
    double err_normal = 0.0, err_rewritten = 0.0, err_orth = 0.0;
    int bad = 0;
    for (int i = 0; i < kSamples; ++i) {
        const auto t = oracle::random_triple(rng);
        const double tau = std::pow(10.0, rng.uniform(-2.0, 2.0));
        const Vector dps = oracle::perry_shanno_dense(t.g, t.s, t.y, tau);
        const auto ref = oracle::normal_equations_uv(t.g, t.s, dps);
        const auto uv = project_uv(t.g, t.s, t.y, tau);
        const auto uv2 = project_uv_rewritten(t.g, t.s, t.y, tau);

        const double e1 = oracle::coefficient_error(uv, ref, t.g, t.s);
        const double e2 = oracle::coefficient_error(uv, uv2, t.g, t.s);
        const Vector res = dps - (uv.u * t.g + uv.v * t.s);
        const double scale = dps.norm() + (uv.u * t.g + uv.v * t.s).norm();
        const double e3 = std::max(std::abs(res.dot(t.g)) / (scale * t.g.norm()),
                                   std::abs(res.dot(t.s)) / (scale * t.s.norm()));
        err_normal = std::max(err_normal, e1);
        err_rewritten = std::max(err_rewritten, e2);
        err_orth = std::max(err_orth, e3);
        if (!(e1 <= 1e-9 && e2 <= 1e-9 && e3 <= 1e-9)) ++bad;
    }
    CriterionResult r;
    r.pass = bad == 0;
    r.detail = std::to_string(kSamples) + " samples, violations=" + std::to_string(bad) +
               ", max err normal-eq=" + sci(err_normal) + " rewritten=" + sci(err_rewritten) +
               " orthogonality=" + sci(err_orth);
    return r;
}

// ---------------------------------------------------------------- 3

CriterionResult descent_suite() {
    SplitMix64 rng(kSampleSeed);
    const SolverOptions defaults;
    int bad_sign = 0, bad_assembled = 0, bad_closed = 0, bad_lambda = 0;
    double err_closed = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const auto t = oracle::random_triple(rng);
        rng.next();  // keep the stream aligned with the projection sample (tau draw)
        const double gg = t.g.squaredNorm();
        const IterateState st = state_from(t);

        const std::pair<TauStrategy, double> taus[] = {
            {TauStrategy::B, tau_b(t.s, t.y)},
            {TauStrategy::H, tau_h(t.s, t.y)},
            {TauStrategy::One, 1.0},
        };
        for (const auto& [strategy, tau] : taus) {
            const auto [u, v] = project_uv(t.g, t.s, t.y, tau);
            const Vector d = u * t.g + v * t.s;
            const double gtd = t.g.dot(d);
            if (!(gtd < 0.0)) ++bad_sign;

            const double gtd_dense = t.g.dot(oracle::perry_shanno_dense(t.g, t.s, t.y, tau));
            const double closed = gtd_closed_form(t.g, t.s, t.y, tau);
            const double e = std::max(oracle::relative_error(closed, gtd),
                                      oracle::relative_error(closed, gtd_dense));
            err_closed = std::max(err_closed, e);
            if (!(e <= 1e-9)) ++bad_closed;

            const double lambda = eigen_diagnostics(t.g, t.s, t.y, tau).lambda_min;
            if (!(-gtd >= lambda * gg * (1.0 - 1e-9))) ++bad_lambda;

            SolverOptions opts = defaults;
            opts.tau_strategy = strategy;
            const DirectionOutcome out = smcg_direction(st, opts);
            if (!(t.g.dot(out.d) <= -1e-12 * gg)) ++bad_assembled;
        }
    }
    CriterionResult r;
    r.pass = bad_sign + bad_assembled + bad_closed + bad_lambda == 0;
    r.detail = std::to_string(kSamples) + " samples x 3 tau: untruncated ascent=" +
               std::to_string(bad_sign) + ", assembled=" + std::to_string(bad_assembled) +
               ", closed form=" + std::to_string(bad_closed) + " (max rel " + sci(err_closed) +
               "), lambda_min bound=" + std::to_string(bad_lambda);
    return r;
}

// ---------------------------------------------------------------- 4

CriterionResult reduction_checks() {
    SplitMix64 rng(kSampleSeed + 1);
    int bad_hs = 0, bad_dl = 0;
    double worst_hs = 0.0, worst_dl = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        auto t = oracle::random_triple(rng);
        const double tau = std::pow(10.0, rng.uniform(-2.0, 2.0));

        // Dai-Liao on the untruncated direction
        const auto [u, v] = project_uv(t.g, t.s, t.y, tau);
        const double dy = u * t.g.dot(t.y) + v * t.s.dot(t.y);
        const double tdl = dai_liao_t(t.g, t.s, t.y, tau);
        const double gs = t.g.dot(t.s);
        const double scale = std::abs(u * t.g.dot(t.y)) + std::abs(v * t.s.dot(t.y)) +
                             std::abs(tdl * gs);
        const double e_dl = std::abs(dy - tdl * gs) / scale;
        worst_dl = std::max(worst_dl, e_dl);
        if (!(e_dl <= 1e-9)) ++bad_dl;

        // g orthogonal to s: Hestenes-Stiefel
        t.g -= t.g.dot(t.s) / t.s.squaredNorm() * t.s;
        const auto hs = project_uv(t.g, t.s, t.y, tau);
        const double v_hs = t.g.dot(t.y) / t.s.dot(t.y);
        const double e_hs = oracle::coefficient_error(hs, {-1.0, v_hs}, t.g, t.s);
        worst_hs = std::max(worst_hs, e_hs);
        if (!(e_hs <= 1e-12)) ++bad_hs;
    }
    CriterionResult r;
    r.pass = bad_hs + bad_dl == 0;
    r.detail = std::to_string(kSamples) + " samples: HS reduction violations=" +
               std::to_string(bad_hs) + " (max " + sci(worst_hs) + "), Dai-Liao violations=" +
               std::to_string(bad_dl) + " (max rel " + sci(worst_dl) + ")";
    return r;
}

// ---------------------------------------------------------------- 5, 6

struct TracedRun {
    std::string solver;
    std::string problem;
    SolverResult result;
};

std::vector<TracedRun> traced_corpus_runs(const std::vector<std::string>& solvers, int jobs) {
    const auto problems = corpus();
    SolverOptions base;
    base.max_iter = 50000;
    std::vector<TracedRun> runs;
    for (const auto& s : solvers)
        for (const auto& p : problems) runs.push_back({s, p.name, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            const auto& p = problems[i % problems.size()];
            const SolverOptions opts = bench::solver_options(runs[i].solver, base);
            try {
                runs[i].result = solve(p, opts, true);
            } catch (const std::exception&) {
                runs[i].result.status = SolverStatus::LineSearchFailure;
            }
        }
    };
    std::vector<std::jthread> pool;
    for (int j = 0; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
    pool.clear();
    return runs;
}

CriterionResult line_search_contract(const std::vector<TracedRun>& runs) {
    const SolverOptions o;
    long accepted = 0, fallback = 0, failed = 0;
    int armijo = 0, curvature = 0, curvature_pair = 0;
    for (const auto& run : runs) {
        for (const auto& rec : run.result.trace) {
            if (rec.ls_status == LineSearchStatus::FallbackBest) {
                ++fallback;
                continue;
            }
            if (rec.ls_status == LineSearchStatus::Failed) {
                ++failed;
                continue;
            }
            ++accepted;
            const double slack = std::min(o.eps_f * std::abs(rec.f),
                                          o.delta * rec.alpha * rec.gtd + rec.eta_bar);
            if (!(rec.f_new <= rec.f + slack)) ++armijo;
            if (!(rec.gtd_new >= o.sigma * rec.gtd)) ++curvature;
            if (!(rec.sy > 0.0)) ++curvature_pair;
        }
    }
    CriterionResult r;
    r.pass = armijo + curvature + curvature_pair == 0;
    r.detail = std::to_string(runs.size()) + " runs, " + std::to_string(accepted) +
               " accepted steps: sufficient-decrease violations=" + std::to_string(armijo) +
               ", curvature violations=" + std::to_string(curvature) +
               ", s^Ty<=0=" + std::to_string(curvature_pair) + " (fallback steps " +
               std::to_string(fallback) + ", failed searches " + std::to_string(failed) + ")";
    return r;
}

CriterionResult quadratic_zeros(const std::vector<TracedRun>& runs) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    long steps = 0;
    int bad = 0, n_runs = 0, above_floor = 0;
    std::set<std::string> where;
    double worst_mu = 0.0, worst_r = 0.0, worst_rbar = 0.0;
    for (const auto& run : runs) {
        if (run.problem.rfind("quadratic_", 0) != 0) continue;
        ++n_runs;
        for (const auto& rec : run.result.trace) {
            if (rec.ls_status == LineSearchStatus::Failed) continue;
            ++steps;
            worst_mu = std::max(worst_mu, std::abs(rec.mu));
            worst_r = std::max(worst_r, std::abs(rec.r));
            worst_rbar = std::max(worst_rbar, std::abs(rec.r_bar));
            if (std::abs(rec.mu) <= 1e-10 && std::abs(rec.r) <= 1e-10 &&
                std::abs(rec.r_bar) <= 1e-10)
                continue;
            ++bad;
            where.insert(run.problem);
            // What rounding of two double f values alone can produce.
            const double fscale = std::abs(rec.f) + std::abs(rec.f_new);
            const double df = std::abs(rec.f_new - rec.f);
            const double floor_r = 8.0 * eps * fscale / df;
            const double floor_mu = 16.0 * eps * fscale / rec.sy;
            const double floor_rbar = 8.0 * eps * (fscale + std::abs(rec.alpha * rec.gtd));
            if (std::abs(rec.r) > std::max(1e-10, floor_r) ||
                std::abs(rec.mu) > std::max(1e-10, floor_mu) ||
                std::abs(rec.r_bar) > std::max(1e-10, floor_rbar))
                ++above_floor;
        }
    }
    CriterionResult r;
    r.pass = n_runs > 0 && bad == 0;
    r.detail = std::to_string(n_runs) + " quadratic runs, " + std::to_string(steps) +
               " steps, violations=" + std::to_string(bad) + ": max |mu|=" + sci(worst_mu) +
               " |r|=" + sci(worst_r) + " |r_bar|=" + sci(worst_rbar);
    if (bad > 0) {
        std::string names;
        for (const auto& w : where) names += (names.empty() ? "" : ",") + w;
        r.detail += "; violating problems: " + names + "; violations above the f-rounding floor=" +
                    std::to_string(above_floor);
    }
    return r;
}

// ---------------------------------------------------------------- 7

CriterionResult finite_termination() {
    const SolverOptions opts;
    int worst_iter = 0, failures = 0;
    const int n_trials = 20;
    for (int trial = 0; trial < n_trials; ++trial) {
        const SeededQuadratic q({20, 100.0, 1000 + static_cast<std::uint64_t>(trial)});
        IterateState st;
        st.x = q.start();
        st.f_k = q.value(st.x);
        st.g_k = q.gradient(st.x);
        int iter = 0;
        while (st.g_k.norm() > 1e-8 && iter < 100) {
            const DirectionOutcome dir = smcg_direction(st, opts);
            const double alpha = oracle::exact_step(q, st.g_k, dir.d);
            const Vector x_new = st.x + alpha * dir.d;
            advance_state(st, x_new, q.value(x_new), q.gradient(x_new), dir.d, alpha);
            ++iter;
        }
        worst_iter = std::max(worst_iter, iter);
        if (iter > 25) ++failures;
    }
    CriterionResult r;
    r.pass = failures == 0;
    r.detail = std::to_string(n_trials) + " quadratics n=20 cond=100, max iterations to ||g||<=1e-8: " +
               std::to_string(worst_iter);
    return r;
}

// ---------------------------------------------------------------- 8, 9, 10

bool profile_well_formed(const bench::Profile& p) {
    for (const auto& c : p.curves) {
        double tau = 1.0, rho = 0.0;
        for (const auto& pt : c.points) {
            if (!(pt.tau >= tau) || !(pt.rho >= rho) || pt.rho > 1.0) return false;
            tau = pt.tau;
            rho = pt.rho;
        }
    }
    return true;
}

CriterionResult corpus_convergence(const CriteriaConfig& cfg, std::vector<bench::Profile>& all) {
    bench::MatrixConfig mc;
    mc.solvers = {"smcg", "hz", "dk"};
    mc.problems = {"all"};
    mc.base.eps_grad = 1e-6;
    mc.base.max_iter = 50000;
    mc.jobs = cfg.jobs;
    const bench::Study study = bench::run_study(mc, cfg.out_dir, "corpus");
    all.insert(all.end(), study.profiles.begin(), study.profiles.end());

    int total = 0, solved = 0;
    std::string unsolved;
    for (const auto& rec : study.records) {
        if (rec.solver != "smcg") continue;
        ++total;
        if (rec.success) ++solved;
        else unsolved += (unsolved.empty() ? "" : ",") + rec.problem;
    }
    const bool profiles_ok = study.profiles.size() == bench::all_metrics().size() &&
                             std::all_of(study.profiles.begin(), study.profiles.end(),
                                         [](const bench::Profile& p) { return p.curves.size() == 3; });
    const double frac = total > 0 ? static_cast<double>(solved) / total : 0.0;

    CriterionResult r;
    r.pass = total >= 25 && frac >= 0.9 && study.wall_seconds <= 300.0 && profiles_ok;
    r.detail = "smcg solved " + std::to_string(solved) + "/" + std::to_string(total) + " in " +
               sci(study.wall_seconds) + " s for smcg+hz+dk" +
               (unsolved.empty() ? "" : ", unsolved: " + unsolved);
    return r;
}

CriterionResult tau_study(const CriteriaConfig& cfg, std::vector<bench::Profile>& all) {
    bench::MatrixConfig mc;
    mc.solvers = {"smcg", "smcg_tau_b", "smcg_tau_h", "smcg_tau_one"};
    mc.problems = {"all"};
    mc.base.max_iter = 50000;
    mc.jobs = cfg.jobs;
    const bench::Study study = bench::run_study(mc, cfg.out_dir, "tau");
    all.insert(all.end(), study.profiles.begin(), study.profiles.end());

    const auto n_problems = corpus().size();
    bool complete = study.records.size() == 4 * n_problems;
    for (const auto& p : study.profiles) {
        if (p.curves.size() != 4) complete = false;
        for (const auto& c : p.curves)
            if (c.points.empty()) complete = false;
    }
    std::ostringstream solved;
    for (const auto& s : mc.solvers) {
        const auto n = std::count_if(study.records.begin(), study.records.end(),
                                     [&](const bench::RunRecord& r) { return r.solver == s && r.success; });
        solved << (s == mc.solvers.front() ? "" : " ") << s << "=" << n;
    }
    CriterionResult r;
    r.pass = complete && study.profiles.size() == bench::all_metrics().size();
    r.detail = std::to_string(study.profiles.size()) + " metrics x 4 curves written to " +
               cfg.out_dir.string() + "; solved " + solved.str();
    return r;
}

CriterionResult profile_correctness(const std::vector<bench::Profile>& generated) {
    std::vector<bench::RunRecord> fixture = {
        {"A", "p1", 2, 0, 0, 0.0, true, 0.0},
        {"A", "p2", 4, 0, 0, 0.0, true, 0.0},
        {"B", "p1", 4, 0, 0, 0.0, true, 0.0},
        {"B", "p2", 4, 0, 0, 0.0, true, 0.0},
    };
    const bench::Profile p = bench::perf_profile(fixture, bench::Metric::Iter);
    const bool exact = p.rho("A", 1.0) == 1.0 && p.rho("B", 1.0) == 0.5 && p.rho("B", 2.0) == 1.0;

    int malformed = 0;
    for (const auto& g : generated)
        if (!profile_well_formed(g)) ++malformed;
    if (!profile_well_formed(p)) ++malformed;

    CriterionResult r;
    r.pass = exact && malformed == 0 && !generated.empty();
    r.detail = std::string("fixture ") + (exact ? "exact" : "MISMATCH") + " (rho_A(1)=" +
               sci(p.rho("A", 1.0)) + " rho_B(1)=" + sci(p.rho("B", 1.0)) + " rho_B(2)=" +
               sci(p.rho("B", 2.0)) + "); " + std::to_string(generated.size()) +
               " generated profiles, non-monotone=" + std::to_string(malformed);
    return r;
}

}  // namespace

std::vector<CriterionResult> run_criteria(const CriteriaConfig& cfg) {
    std::vector<CriterionResult> out;
    out.push_back(timed(1, "three-step termination on 2-D quadratics", [] {
        auto r = two_dim_termination();
        return r;
    }));
    out.back().pass = out.back().pass && out.back().seconds < 1.0;

    out.push_back(timed(2, "projection oracle", projection_oracle));
    out.push_back(timed(3, "descent suite", descent_suite));
    out.push_back(timed(4, "HS reduction and Dai-Liao identity", reduction_checks));

    std::vector<TracedRun> traced;
    out.push_back(timed(5, "line-search contract", [&] {
        traced = traced_corpus_runs({"smcg", "hz", "dk"}, cfg.jobs);
        return line_search_contract(traced);
    }));
    out.push_back(timed(6, "quadratic-measure zeros", [&] { return quadratic_zeros(traced); }));
    traced.clear();

    out.push_back(timed(7, "finite termination n=20", finite_termination));

    std::vector<bench::Profile> profiles;
    out.push_back(timed(8, "corpus convergence", [&] { return corpus_convergence(cfg, profiles); }));
    out.push_back(timed(9, "tau-strategy study", [&] { return tau_study(cfg, profiles); }));
    out.push_back(timed(10, "profile correctness", [&] { return profile_correctness(profiles); }));
    return out;
}

std::string format(const CriterionResult& r) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    return std::string(r.pass ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name +
           ": " + r.detail + " (" + secs + " s)";
}

}  // namespace smcg::acceptance
