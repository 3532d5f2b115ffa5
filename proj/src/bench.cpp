#include "smcg/bench.hpp"

#include "smcg/problems.hpp"
#include "smcg/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace smcg::bench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

void to_json(nlohmann::json& j, const RunRecord& r) {
    j = nlohmann::json{{"solver", r.solver}, {"problem", r.problem}, {"n_iter", r.n_iter},
                       {"n_f", r.n_f},       {"n_g", r.n_g},         {"t_cpu", r.t_cpu},
                       {"success", r.success}, {"final_gnorm", r.final_gnorm}};
}

void from_json(const nlohmann::json& j, RunRecord& r) {
    r.solver = j.at("solver").get<std::string>();
    r.problem = j.at("problem").get<std::string>();
    r.n_iter = j.at("n_iter").get<int>();
    r.n_f = j.at("n_f").get<int>();
    r.n_g = j.at("n_g").get<int>();
    r.t_cpu = j.at("t_cpu").get<double>();
    r.success = j.at("success").get<bool>();
    // JSON has no infinity; a non-finite norm is written as null
    r.final_gnorm = j.at("final_gnorm").is_null() ? kInf : j.at("final_gnorm").get<double>();
}

const std::vector<std::string>& solver_names() {
    static const std::vector<std::string> names = {
        "smcg", "smcg_tau_b", "smcg_tau_h", "smcg_tau_one", "hz", "dk", "steepest"};
    return names;
}

SolverOptions solver_options(const std::string& solver, const SolverOptions& base) {
    SolverOptions o = base;
    o.direction_scheme = DirectionScheme::SMCG;
    o.tau_strategy = TauStrategy::Adaptive;
    if (solver == "smcg") return o;
    if (solver == "smcg_tau_b") o.tau_strategy = TauStrategy::B;
    else if (solver == "smcg_tau_h") o.tau_strategy = TauStrategy::H;
    else if (solver == "smcg_tau_one") o.tau_strategy = TauStrategy::One;
    else if (solver == "hz") o.direction_scheme = DirectionScheme::HZ;
    else if (solver == "dk") o.direction_scheme = DirectionScheme::DK;
    else if (solver == "steepest") o.direction_scheme = DirectionScheme::Steepest;
    else throw Error("unknown solver '" + solver + "'");
    return o;
}

std::vector<RunRecord> run_matrix(const MatrixConfig& config) {
    validate_options(config.base);
    std::vector<SolverOptions> solver_opts;
    for (const auto& s : config.solvers) solver_opts.push_back(solver_options(s, config.base));

    std::vector<ObjectiveProblem> all = corpus(config.seed);
    std::vector<ObjectiveProblem> chosen;
    const bool everything =
        std::find(config.problems.begin(), config.problems.end(), "all") != config.problems.end();
    if (everything) {
        chosen = all;
    } else {
        for (const auto& name : config.problems) {
            auto it = std::find_if(all.begin(), all.end(),
                                   [&](const ObjectiveProblem& p) { return p.name == name; });
            if (it == all.end()) throw Error("unknown problem '" + name + "'");
            chosen.push_back(*it);
        }
    }

    struct Task {
        std::size_t solver;
        std::size_t problem;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < config.solvers.size(); ++s)
        for (std::size_t p = 0; p < chosen.size(); ++p) tasks.push_back({s, p});

    std::vector<RunRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto& task = tasks[i];
            const auto& problem = chosen[task.problem];
            RunRecord rec;
            rec.solver = config.solvers[task.solver];
            rec.problem = problem.name;
            const double t0 = thread_cpu_seconds();
            try {
                const SolverResult res = solve(problem, solver_opts[task.solver]);
                rec.n_iter = res.n_iter;
                rec.n_f = res.n_f;
                rec.n_g = res.n_g;
                rec.final_gnorm = res.gnorm_inf;
                rec.success = res.status == SolverStatus::Converged;
            } catch (const std::exception& e) {
                std::cerr << "warning: " << rec.solver << " on " << rec.problem << ": " << e.what()
                          << '\n';
                rec.final_gnorm = kInf;
                rec.success = false;
            }
            rec.t_cpu = thread_cpu_seconds() - t0;
            records[i] = std::move(rec);
        }
    };

    const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.solver, a.problem) < std::tie(b.solver, b.problem);
    });
    return records;
}

Metric parse_metric(const std::string& s) {
    if (s == "iter") return Metric::Iter;
    if (s == "nf") return Metric::Nf;
    if (s == "ng") return Metric::Ng;
    if (s == "nf_plus_3ng") return Metric::NfPlus3Ng;
    if (s == "time") return Metric::Time;
    throw Error("unknown metric '" + s + "'");
}

std::string to_string(Metric m) {
    switch (m) {
        case Metric::Iter: return "iter";
        case Metric::Nf: return "nf";
        case Metric::Ng: return "ng";
        case Metric::NfPlus3Ng: return "nf_plus_3ng";
        case Metric::Time: return "time";
    }
    return "?";
}

double metric_value(const RunRecord& r, Metric m) {
    if (!r.success) return kInf;
    switch (m) {
        case Metric::Iter: return r.n_iter;
        case Metric::Nf: return r.n_f;
        case Metric::Ng: return r.n_g;
        case Metric::NfPlus3Ng: return r.n_f + 3.0 * r.n_g;
        case Metric::Time: return r.t_cpu;
    }
    return kInf;
}

double Profile::rho(const std::string& solver, double tau) const {
    for (const auto& c : curves) {
        if (c.solver != solver) continue;
        double value = 0.0;
        for (const auto& p : c.points) {
            if (p.tau <= tau) value = p.rho;
            else break;
        }
        return value;
    }
    throw Error("solver '" + solver + "' not in profile");
}

Profile perf_profile(const std::vector<RunRecord>& records, Metric metric) {
    std::set<std::string> solver_set;
    std::map<std::string, std::map<std::string, double>> cost;  // problem -> solver -> m
    for (const auto& r : records) {
        solver_set.insert(r.solver);
        cost[r.problem][r.solver] = metric_value(r, metric);
    }
    if (solver_set.empty()) throw Error("performance profile needs at least one record");

    Profile prof;
    prof.metric = metric;
    std::map<std::string, std::vector<double>> ratios;
    for (const auto& [problem, by_solver] : cost) {
        double best = kInf;
        bool all_zero = true;
        for (const auto& s : solver_set) {
            const auto it = by_solver.find(s);
            const double m = it == by_solver.end() ? kInf : it->second;
            best = std::min(best, m);
            all_zero = all_zero && m == 0.0;
        }
        if (all_zero) {
            std::cerr << "warning: metric " << to_string(metric) << " is zero for every solver on "
                      << problem << "; excluded from the profile\n";
            prof.excluded.push_back(problem);
            continue;
        }
        ++prof.n_problems;
        for (const auto& s : solver_set) {
            const auto it = by_solver.find(s);
            const double m = it == by_solver.end() ? kInf : it->second;
            double ratio = kInf;
            if (std::isfinite(m)) ratio = m == best ? 1.0 : m / best;
            ratios[s].push_back(ratio);
        }
    }

    std::set<double> breaks{1.0};
    for (const auto& [s, rs] : ratios)
        for (double r : rs)
            if (std::isfinite(r)) breaks.insert(r);

    for (const auto& s : solver_set) {
        SolverProfile curve;
        curve.solver = s;
        std::vector<double> rs = ratios[s];
        std::sort(rs.begin(), rs.end());
        for (double tau : breaks) {
            const auto count = std::upper_bound(rs.begin(), rs.end(), tau) - rs.begin();
            const double rho =
                prof.n_problems > 0 ? static_cast<double>(count) / prof.n_problems : 0.0;
            curve.points.push_back({tau, rho});
        }
        prof.curves.push_back(std::move(curve));
    }
    return prof;
}

std::string records_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os << "solver,problem,n_iter,n_f,n_g,t_cpu,success,final_gnorm\n";
    for (const auto& r : records) {
        char t[32];
        std::snprintf(t, sizeof t, "%.6f", r.t_cpu);
        os << r.solver << ',' << r.problem << ',' << r.n_iter << ',' << r.n_f << ',' << r.n_g
           << ',' << t << ',' << (r.success ? "true" : "false") << ','
           << fmt_double(r.final_gnorm) << '\n';
    }
    return os.str();
}

std::vector<RunRecord> parse_records_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "solver,problem,n_iter,n_f,n_g,t_cpu,success,final_gnorm")
        throw Error("records CSV: unexpected header");
    std::vector<RunRecord> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 8)
            throw Error("records CSV line " + std::to_string(lineno) + ": expected 8 columns");
        RunRecord r;
        try {
            r.solver = cols[0];
            r.problem = cols[1];
            r.n_iter = std::stoi(cols[2]);
            r.n_f = std::stoi(cols[3]);
            r.n_g = std::stoi(cols[4]);
            r.t_cpu = std::stod(cols[5]);
            if (cols[6] != "true" && cols[6] != "false") throw Error("bad success flag");
            r.success = cols[6] == "true";
            r.final_gnorm = std::stod(cols[7]);
        } catch (const std::exception& e) {
            throw Error("records CSV line " + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string profile_csv(const Profile& profile) {
    std::ostringstream os;
    os << "solver,tau,rho\n";
    for (const auto& c : profile.curves)
        for (const auto& p : c.points) os << c.solver << ',' << fmt_double(p.tau) << ',' << fmt_double(p.rho) << '\n';
    return os.str();
}

std::string profile_svg(const Profile& profile) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    constexpr double W = 640, H = 420, L = 60, R = 160, T = 30, B = 50;
    const double pw = W - L - R;
    const double ph = H - T - B;

    double tau_max = 2.0;
    for (const auto& c : profile.curves)
        for (const auto& p : c.points) tau_max = std::max(tau_max, p.tau);
    const double lx_max = std::log2(tau_max) * 1.05;
    auto sx = [&](double tau) { return L + pw * std::log2(tau) / lx_max; };
    auto sy = [&](double rho) { return T + ph * (1.0 - rho); };

    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << L << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
       << "Performance profile (" << to_string(profile.metric) << ", " << profile.n_problems
       << " problems)</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double rho = 0.25 * i;
        os << "<text x=\"" << L - 8 << "\" y=\"" << sy(rho) + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << rho
           << "</text>\n";
    }
    for (int e = 0; e <= static_cast<int>(lx_max); ++e) {
        os << "<text x=\"" << sx(std::exp2(e)) << "\" y=\"" << T + ph + 16
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
           << static_cast<long long>(std::exp2(e)) << "</text>\n";
    }
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10
       << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">tau (log2 scale)</text>\n";

    for (std::size_t i = 0; i < profile.curves.size(); ++i) {
        const auto& c = profile.curves[i];
        const char* color = palette[i % std::size(palette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        double prev = 0.0;
        for (std::size_t k = 0; k < c.points.size(); ++k) {
            const auto& p = c.points[k];
            if (k > 0) os << sx(p.tau) << ',' << sy(prev) << ' ';
            os << sx(p.tau) << ',' << sy(p.rho) << ' ';
            prev = p.rho;
        }
        os << sx(std::exp2(lx_max)) << ',' << sy(prev) << "\"/>\n";
        const double ly = T + 20.0 * static_cast<double>(i + 1);
        os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 35
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 40 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << c.solver << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_records(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
    if (path.extension() == ".json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : records) {
            nlohmann::json row = r;
            if (!std::isfinite(r.final_gnorm)) row["final_gnorm"] = nullptr;
            j.push_back(std::move(row));
        }
        write_text(path, j.dump(2) + "\n");
    } else {
        write_text(path, records_csv(records));
    }
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    if (path.extension() == ".json") {
        try {
            return nlohmann::json::parse(text).get<std::vector<RunRecord>>();
        } catch (const nlohmann::json::exception& e) {
            throw Error("'" + path.string() + "': " + e.what());
        }
    }
    try {
        return parse_records_csv(text);
    } catch (const Error& e) {
        throw Error("'" + path.string() + "': " + e.what());
    }
}

Study run_study(const MatrixConfig& config, const std::filesystem::path& out_dir,
                const std::string& prefix) {
    Study study;
    const auto t0 = std::chrono::steady_clock::now();
    study.records = run_matrix(config);
    study.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(out_dir);
    write_records(study.records, out_dir / (prefix + "_records.csv"));
    for (Metric m : all_metrics()) {
        Profile p = perf_profile(study.records, m);
        const std::string stem = prefix + "_" + to_string(m);
        write_text(out_dir / (stem + ".csv"), profile_csv(p));
        write_text(out_dir / (stem + ".svg"), profile_svg(p));
        study.profiles.push_back(std::move(p));
    }
    return study;
}

}  // namespace smcg::bench
