// bench: run solver matrices, build performance profiles, run the checks.

#include "criteria.hpp"

#include "smcg/bench.hpp"
#include "smcg/problems.hpp"
#include "smcg/solver.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

int jobs_from_env(int fallback) {
    if (const char* env = std::getenv("BENCH_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    return fallback;
}

int default_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SMCG solver benchmark"};
    app.require_subcommand(1);

    // run
    std::string solvers = "smcg,hz,dk,steepest", problems = "all", out = "results.csv";
    double tol = 1e-6;
    int max_iter = 50000, jobs = 1;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "Solve every (solver, problem) pair");
    run->add_option("--solvers", solvers, "Comma-separated solver names")->capture_default_str();
    run->add_option("--problems", problems, "Comma-separated problem names or 'all'")
        ->capture_default_str();
    run->add_option("--tol", tol, "Gradient tolerance (inf-norm)")->capture_default_str();
    run->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();
    run->add_option("--out", out, "Records file (.csv or .json)")->capture_default_str();
    run->add_option("--jobs", jobs, "Worker threads (BENCH_JOBS overrides)")->capture_default_str();
    run->add_option("--seed", seed, "Corpus seed")->capture_default_str();

    // profile
    std::string metric = "nf_plus_3ng", in = "results.csv", svg, csv;
    auto* profile = app.add_subcommand("profile", "Performance profile from a records file");
    profile->add_option("--metric", metric, "iter, nf, ng, nf_plus_3ng or time")
        ->capture_default_str();
    profile->add_option("--in", in, "Records file")->capture_default_str();
    profile->add_option("--svg", svg, "SVG output path");
    profile->add_option("--csv", csv, "CSV output path");

    // check
    std::string check_dir = "acceptance_out";
    auto* check = app.add_subcommand("check", "Run the acceptance suite");
    check->add_option("--out-dir", check_dir, "Where generated profiles go")->capture_default_str();

    // tau-study
    std::string tau_dir = "tau_study";
    auto* tau = app.add_subcommand("tau-study", "Profiles for the four tau strategies");
    tau->add_option("--out-dir", tau_dir, "Output directory")->capture_default_str();
    tau->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();

    // solve
    std::string problem_name = "rosenbrock_2", options_path, trace_path, solver_name = "smcg";
    auto* solve_cmd = app.add_subcommand("solve", "Solve one problem and print a summary");
    solve_cmd->add_option("--problem", problem_name, "Corpus problem")->capture_default_str();
    solve_cmd->add_option("--solver", solver_name, "Solver name")->capture_default_str();
    solve_cmd->add_option("--options", options_path, "SolverOptions JSON file");
    solve_cmd->add_option("--trace", trace_path, "Write the iteration trace as JSONL");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            smcg::bench::MatrixConfig cfg;
            cfg.solvers = split_list(solvers);
            cfg.problems = split_list(problems);
            cfg.base.eps_grad = tol;
            cfg.base.max_iter = max_iter;
            cfg.jobs = jobs_from_env(jobs);
            cfg.seed = seed;
            const auto records = smcg::bench::run_matrix(cfg);
            smcg::bench::write_records(records, out);
            const auto solved = std::count_if(records.begin(), records.end(),
                                              [](const auto& r) { return r.success; });
            std::cout << records.size() << " runs, " << solved << " solved -> " << out << '\n';
        } else if (*profile) {
            const auto p = smcg::bench::perf_profile(smcg::bench::read_records(in),
                                                     smcg::bench::parse_metric(metric));
            for (const auto& name : p.excluded)
                std::cerr << "warning: " << name << " excluded (zero cost for every solver)\n";
            if (!csv.empty()) smcg::bench::write_text(csv, smcg::bench::profile_csv(p));
            if (!svg.empty()) smcg::bench::write_text(svg, smcg::bench::profile_svg(p));
            if (csv.empty() && svg.empty()) std::cout << smcg::bench::profile_csv(p);
        } else if (*check) {
            smcg::acceptance::CriteriaConfig cfg;
            cfg.out_dir = check_dir;
            cfg.jobs = jobs_from_env(default_jobs());
            bool all = true;
            for (const auto& r : smcg::acceptance::run_criteria(cfg)) {
                std::cout << smcg::acceptance::format(r) << std::endl;
                all = all && r.pass;
            }
            return all ? 0 : 1;
        } else if (*tau) {
            smcg::bench::MatrixConfig cfg;
            cfg.solvers = {"smcg", "smcg_tau_b", "smcg_tau_h", "smcg_tau_one"};
            cfg.problems = {"all"};
            cfg.base.max_iter = max_iter;
            cfg.jobs = jobs_from_env(default_jobs());
            const auto study = smcg::bench::run_study(cfg, tau_dir, "tau");
            std::cout << study.records.size() << " runs, " << study.profiles.size()
                      << " profiles -> " << tau_dir << '\n';
        } else if (*solve_cmd) {
            smcg::SolverOptions base;
            if (!options_path.empty())
                base = nlohmann::json::parse(smcg::bench::read_text(options_path))
                           .get<smcg::SolverOptions>();
            const auto opts = smcg::bench::solver_options(solver_name, base);
            const auto problems_all = smcg::corpus();
            auto it = std::find_if(problems_all.begin(), problems_all.end(),
                                   [&](const auto& p) { return p.name == problem_name; });
            if (it == problems_all.end()) throw smcg::Error("unknown problem '" + problem_name + "'");
            const auto res = smcg::solve(*it, opts, !trace_path.empty());
            if (!trace_path.empty())
                smcg::bench::write_text(trace_path, smcg::trace_to_jsonl(res.trace));
            std::cout << "status=" << smcg::to_string(res.status) << " iter=" << res.n_iter
                      << " nf=" << res.n_f << " ng=" << res.n_g << " f=" << res.f_final
                      << " |g|inf=" << res.gnorm_inf << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
