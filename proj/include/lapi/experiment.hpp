#pragma once

#include "lapi/bounds.hpp"
#include "lapi/driver.hpp"
#include "lapi/features.hpp"
#include "lapi/mdp.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lapi {

/**
 * Everything needed to reproduce an experiment. The config file is flat
 * `key = value` text whose keys are exactly these field names; `#` starts a
 * comment. Unknown keys are rejected.
 */
struct ExperimentSpec {
    // MDP source
    std::string mdp_source = "garnet";   ///< file | garnet | chain
    std::string mdp_path;
    std::size_t num_states = 10;
    std::size_t num_actions = 2;
    std::size_t branching = 3;
    std::uint64_t mdp_seed = 1;
    double discount = 0.9;
    double cost_noise = 0.0;

    // features and anchors
    std::string features = "identity";   ///< identity | aggregation | file
    std::size_t feature_groups = 1;
    std::string feature_path;
    std::string anchors = "all";         ///< all | groups | list
    std::vector<int> anchor_list;
    std::size_t anchors_per_group = 1;

    // run configuration
    std::string algorithm = "least_squares";  ///< least_squares | gradient_descent
    int lookahead_h = 1;
    int iterations = 1000;
    std::string gamma_schedule = "harmonic";  ///< harmonic | constant
    double gamma_c = 1.0;
    double gamma_k0 = 1.0;
    double gamma_value = 0.1;
    double beta = 0.5;
    std::string eta_schedule = "linear";      ///< linear | log | constant
    long eta_a = 1;
    long eta_b = 1;
    int truncation_len = 0;                   ///< 0 picks default_truncation(discount, tail_tol)
    double tail_tol = 1e-9;
    int trajectories_per_state = 1;
    std::uint64_t seed = 0;
    bool allow_diagnostic_schedules = false;
    bool diagnostics = false;

    // bound checking
    std::string delta2_mode = "enumerate";    ///< enumerate | sample | none
    std::size_t delta2_samples = 1000;
    std::uint64_t delta2_seed = 0;

    // execution
    std::string output_dir = "out";
    int repetitions = 1;                      ///< seeds seed, seed+1, ...
    int jobs = 1;

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

ExperimentSpec parse_config(std::istream& in);
ExperimentSpec load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentSpec& spec);

/// Assigns one field from its textual value; throws ParseError(line) on unknown keys or bad values.
void set_field(ExperimentSpec& spec, const std::string& key, const std::string& value, std::size_t line = 0);

/// The resolved (Mdp, FeatureProjector, RunConfig) triple.
struct ResolvedExperiment {
    Mdp mdp;
    FeatureProjector projector;
    RunConfig run;
};

/// Built from the spec; a run's seed is spec.seed + repetition index. Throws AssumptionViolation
/// if the anchors break the rank condition.
ResolvedExperiment resolve(const ExperimentSpec& spec);

/// Features named by the spec: identity, aggregation with feature_groups, or a file.
Eigen::MatrixXd resolve_features(const ExperimentSpec& spec, std::size_t num_states);
std::vector<int> resolve_anchors(const ExperimentSpec& spec, std::size_t num_states);

/// One row per iteration: k,gamma_k,sup_error,bellman_residual,noise_sup,policy_hash
void write_run_csv(std::ostream& out, const RunRecord& record);

struct RunCsvRow {
    std::size_t k = 0;
    double gamma_k = 0.0;
    double sup_error = 0.0;
    double bellman_residual = 0.0;
    double noise_sup = 0.0;
    std::uint64_t policy_hash = 0;
};
std::vector<RunCsvRow> read_run_csv(std::istream& in);

/// k,actions (space separated) for k = 0, 100, 200, ... and the last iteration.
void write_policy_csv(std::ostream& out, const RunRecord& record);

inline constexpr std::size_t kPolicyStride = 100;

struct RunOutcome {
    RunRecord record;
    std::optional<BoundReport> bounds;  ///< absent for H = 1 or delta2_mode = none
};

struct ExperimentResult {
    int exit_code = 0;   ///< 0 ok, 1 I/O / parse / usage, 2 assumption violation
    std::string message;
    std::optional<Delta2Result> delta2;
    std::vector<RunOutcome> runs;
};

/// Runs every repetition, writes run_<seed>.csv, policies_<seed>.csv and summary.csv into
/// spec.output_dir. Never throws for expected failures; they become exit codes.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace lapi
