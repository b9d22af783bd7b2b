#pragma once
#include <cstdint>
#include <optional>
#include <string>

#include "colucb/analysis.hpp"
#include "colucb/core.hpp"
#include "colucb/flow.hpp"
#include "colucb/sim.hpp"

namespace colucb {

/// File formats (all JSON with "format" and "version" fields; doubles
/// round-trip exactly):
///   colucb-instance v1: { num_arms, groups: [[arm,...],...],
///                         rewards?: [{kind, mean, variance?}, ...] }
///   colucb-experiment v1: { instance: <path or inline object>, policies,
///                           horizon, num_seeds, base_seed, const_scale,
///                           default_arm, coupled_streams, downsample_points }
/// Structure-only files are instances without "rewards".

/// Instance or bare structure loaded from disk.
struct LoadedInstance {
    GroupStructure structure;
    std::optional<Instance> instance;   // present when the file had rewards
    const Instance& require_rewards(const std::string& context) const;
};

LoadedInstance load_instance_file(const std::string& path);
LoadedInstance parse_instance_json(const std::string& text, const std::string& origin);
std::string instance_to_json(const Instance& instance);
std::string structure_to_json(const GroupStructure& structure);
void save_instance_file(const Instance& instance, const std::string& path);

/// Experiment file; `base_dir` resolves a relative instance path.
ExperimentConfig load_experiment_file(const std::string& path);
ExperimentConfig parse_experiment_json(const std::string& text, const std::string& base_dir,
                                       const std::string& origin);
std::string experiment_to_json(const ExperimentConfig& config);

// --------------------------------------------------------------- reports

std::string report_to_json(const ExperimentReport& report);
/// Human-readable summary table; stderr column shows "NA" for single seeds.
std::string report_summary_text(const ExperimentReport& report);

/// curves.csv: policy,t,mean_regret,stderr_regret,mean_contention,mean_q
/// (floats with 17 significant digits; "NA" for NaN).
std::string curves_to_csv(const ExperimentReport& report);

/// trajectory CSV: t,group,action,regret_increment,contention_size,q_value,eps_t
std::string trajectory_to_csv(const Instance& instance, const Trajectory& trajectory);

/// schedule CSV: round,group,arm
std::string schedule_to_csv(const BurninSchedule& schedule);

/// Mean-regret curves with ±2 stderr bands as a standalone SVG.  The
/// generation timestamp comment is suppressed when reproducible = true.
std::string report_to_svg(const ExperimentReport& report, bool reproducible);

// --------------------------------------------------------------- workflows
// The command-level entry points the C API and CLI are built on.  Every
// workflow writes a manifest.json into out_dir echoing the fully-resolved
// configuration that produced the outputs.

struct SimulateOptions {
    std::string out_dir;
    bool write_svg = true;
    bool reproducible = false;
    unsigned dump_trajectories = 0;  // write per-seed trajectory CSVs for the
                                     // first N seeds of every policy
};

/// Runs the experiment and writes manifest.json, report.json, curves.csv,
/// optional curves.svg and trajectory dumps.  Returns the report.
ExperimentReport simulate_to_dir(const ExperimentConfig& config, const SimulateOptions& opt);

struct AnalyzeOptions {
    std::uint64_t horizon = 0;       // 0 = skip horizon-dependent quantities
    double const_scale = 1.0;
    double sigma = 1.0;
    unsigned grid_points = 32;       // eps grid for the M/T/R tables
    bool force = false;              // override the subset-enumeration cap
    std::optional<double> c1;        // run condition_check when both are set
    std::optional<double> alpha;
    double improvement_alpha = 1.0;  // threshold constant for the h1 test
};

/// Full analysis of a structure (+ instance-level quantities when rewards are
/// present) as a JSON document: sharing quantities, t0/t_min, bar_ht with the
/// minimax-envelope [T^(2/3)/barht_plus^(1/3), T^(2/3) log T/barht_minus^(1/3)],
/// gap breakpoints, contention/M/T/R tables, eps_t, eps_star, phi grid,
/// condition and improvement verdicts.
std::string analyze_to_json(const LoadedInstance& loaded, const AnalyzeOptions& opt);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Serializes a double with enough digits to round-trip (17 significant).
std::string format_double(double v);

} // namespace colucb
