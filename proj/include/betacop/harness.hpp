#pragma once

#include "betacop/copulas.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace betacop {

enum class ExperimentKind { Covariance, KendallCI, SpearmanCI, ParamCI, SymmetrySize, SymmetryPower };

ExperimentKind experiment_from_string(const std::string& s);
std::string experiment_name(ExperimentKind k);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Declarative description of one Monte Carlo study. Exactly one of
/// theta/tau/rho fixes the dependence strength; delta wraps the family with
/// Khoudraji's device (symmetry_power).
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::KendallCI;
    Family family = Family::Clayton;
    std::optional<double> theta;
    std::optional<double> tau;
    std::optional<double> rho;
    std::optional<double> delta;
    std::vector<int> n_values;
    int runs = 1000;  // Monte Carlo runs M
    int boot = 1000;  // bootstrap replications B
    double level = 0.95;
    double alpha = 0.05;
    std::vector<std::string> schemes;
    std::vector<std::string> statistics;  // symmetry experiments
    std::uint64_t seed = 20240101;
    int threads = 0;                // 0: BETACOP_THREADS env, then hardware
    std::vector<double> truth;      // covariance: optional 10 upper-tri truth values
    bool progress = true;

    double resolved_theta() const;  // from theta | tau | rho
};

/// Parse the flat key=value config format (section headers in [brackets]
/// are allowed and ignored; # and ; start comments). Throws ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Validates field combinations for the experiment kind. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

struct ReportRow {
    std::string experiment;
    std::string family;
    double theta = 0.0;
    std::optional<double> delta;
    std::string scheme;
    int n = 0;
    std::string metric;
    double value = 0.0;
    double mc_se = 0.0;
    int failures = 0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    double wall_seconds = 0.0;
};

/// Runs the study: for each Monte Carlo run, one fresh sample, every
/// requested scheme applied to that same sample (paired comparison).
/// Deterministic for fixed (config, seed) regardless of thread count.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// CSV with header experiment,family,theta,delta,scheme,n,metric,value,
/// mc_se,failures; values at 6 significant digits. Throws IoError.
void emit_report(const ExperimentReport& report, const std::string& path);
void write_report(const ExperimentReport& report, std::ostream& out);

enum class Scale { Desk, Full };

/// Preset configs reproducing one of the eight reference tables. Full scale
/// matches the source grids with M = B = 1000 (multi-hour); desk scale cuts
/// the grid and replication counts to something a workstation finishes.
std::vector<ExperimentConfig> table_preset(int table, Scale scale);

/// The paper grid {(i/3, j/3)} used by the covariance experiment.
std::vector<std::vector<double>> covariance_grid();

}  // namespace betacop
