#pragma once

#include "smcg/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace smcg::bench {

struct RunRecord {
    std::string solver;
    std::string problem;
    int n_iter = 0;
    int n_f = 0;
    int n_g = 0;
    double t_cpu = 0.0;
    bool success = false;
    double final_gnorm = 0.0;

    bool operator==(const RunRecord&) const = default;
};

void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

/// Known solver names: smcg (adaptive tau), smcg_tau_b, smcg_tau_h,
/// smcg_tau_one, hz, dk, steepest.
const std::vector<std::string>& solver_names();

/// Options for a named solver on top of `base`. Throws for unknown names.
SolverOptions solver_options(const std::string& solver, const SolverOptions& base);

struct MatrixConfig {
    std::vector<std::string> solvers;
    std::vector<std::string> problems;  // {"all"} selects the whole corpus
    SolverOptions base;                 // eps_grad and max_iter come from here
    int jobs = 1;
    std::uint64_t seed = 0;
};

/// Solves every (solver, problem) pair. Unknown names throw before any run;
/// a failing run is recorded and never stops the matrix. Records come back
/// sorted by (solver, problem).
std::vector<RunRecord> run_matrix(const MatrixConfig& config);

enum class Metric { Iter, Nf, Ng, NfPlus3Ng, Time };

Metric parse_metric(const std::string& s);
std::string to_string(Metric m);
double metric_value(const RunRecord& r, Metric m);  // +inf for failed runs

struct ProfilePoint {
    double tau = 1.0;
    double rho = 0.0;
};

struct SolverProfile {
    std::string solver;
    std::vector<ProfilePoint> points;  // one per breakpoint, tau ascending
};

struct Profile {
    Metric metric = Metric::Iter;
    int n_problems = 0;  // problems that entered the ratios
    std::vector<std::string> excluded;
    std::vector<SolverProfile> curves;

    /// rho_s(tau) for a solver; right-continuous step function.
    double rho(const std::string& solver, double tau) const;
};

/// Performance profile over the records: ratio r_ps = m_ps / min_s m_ps and
/// rho_s(tau) = |{p : r_ps <= tau}| / |P|. Problems where every solver
/// scores 0 are excluded (listed in Profile::excluded).
Profile perf_profile(const std::vector<RunRecord>& records, Metric metric);

std::string records_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_records_csv(const std::string& text);
std::string profile_csv(const Profile& profile);
std::string profile_svg(const Profile& profile);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

void write_records(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> read_records(const std::filesystem::path& path);  // by extension

inline const std::vector<Metric>& all_metrics() {
    static const std::vector<Metric> m{Metric::Iter, Metric::Nf, Metric::Ng, Metric::NfPlus3Ng,
                                       Metric::Time};
    return m;
}

struct Study {
    std::vector<RunRecord> records;
    std::vector<Profile> profiles;  // one per metric, in all_metrics() order
    double wall_seconds = 0.0;      // run_matrix only
};

/// Runs the matrix and writes <prefix>_records.csv plus
/// <prefix>_<metric>.csv / .svg for every metric into out_dir.
Study run_study(const MatrixConfig& config, const std::filesystem::path& out_dir,
                const std::string& prefix);

}  // namespace smcg::bench
