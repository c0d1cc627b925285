#pragma once

#include "lapi/features.hpp"
#include "lapi/mdp.hpp"
#include "lapi/rollout.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lapi {

/// Outer step sizes gamma_k, shared by all states and clamped to (0, 1].
class Schedule {
public:
    enum class Kind { harmonic, constant };

    /// gamma_k = min(1, c / (k + k0)); satisfies sum gamma = inf, sum gamma^2 < inf.
    static Schedule harmonic(double c, double k0);
    /// gamma_k = gamma for all k. Violates the square-summability condition; diagnostics only.
    static Schedule constant(double gamma);

    double operator()(std::size_t k) const noexcept;
    Kind kind() const noexcept { return kind_; }
    bool satisfies_step_size_conditions() const noexcept { return kind_ == Kind::harmonic; }
    std::string describe() const;

private:
    Schedule(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
    Kind kind_;
    double a_;
    double b_;
};

/// make_schedule("harmonic", {c, k0}) / make_schedule("constant", {gamma}).
Schedule make_schedule(const std::string& kind, const std::vector<double>& params);

/// Inner gradient step counts eta_k.
class EtaSchedule {
public:
    enum class Kind { linear, log, constant };

    /// eta_k = a + b k
    static EtaSchedule linear(long a, long b);
    /// eta_k = a * ceil(log2(k + 2))
    static EtaSchedule log(long a);
    /// eta_k = c; not growing, diagnostics only.
    static EtaSchedule constant(long c);

    long operator()(std::size_t k) const noexcept;
    Kind kind() const noexcept { return kind_; }
    bool growing() const noexcept { return kind_ != Kind::constant; }
    std::string describe() const;

private:
    EtaSchedule(Kind kind, long a, long b) : kind_(kind), a_(a), b_(b) {}
    Kind kind_;
    long a_;
    long b_;
};

struct EtaScheduleResult {
    EtaSchedule schedule;
    bool growing;
};

/// make_eta_schedule("linear", {a, b}) / ("log", {a}) / ("constant", {c}).
EtaScheduleResult make_eta_schedule(const std::string& kind, const std::vector<long>& params);

struct GdConfig {
    double beta = 1.0;
    EtaSchedule eta = EtaSchedule::linear(1, 1);
};

enum class Algorithm { least_squares, gradient_descent };

std::string to_string(Algorithm a);

struct RunConfig {
    Algorithm algorithm = Algorithm::least_squares;
    int lookahead_h = 1;
    int iterations = 1;
    Schedule gamma = Schedule::harmonic(1.0, 1.0);
    GdConfig gd;
    RolloutConfig rollout;
    /// Must match the projector's anchors when non-empty; empty means "use the projector's".
    std::vector<int> anchors;
    std::optional<ValueVector> v0;  ///< defaults to zero
    std::uint64_t seed = 0;         ///< iteration k draws from RandomStream(seed).derive(k)

    /// Accept constant gamma / constant eta schedules (they break the convergence conditions).
    bool allow_diagnostic_schedules = false;
    /// Per-iteration exact J^mu: noise statistics and the projected-value Bellman residual.
    bool diagnostics = false;
};

struct IterationRecord {
    std::size_t k = 0;
    double gamma = 0.0;
    long eta = 0;                      ///< inner steps (gradient variant only)
    Policy policy;                     ///< mu_{k+1}
    std::vector<double> estimates;     ///< J_hat on the anchors
    Eigen::VectorXd theta;             ///< theta_{k+1} or theta_{k+1, eta_k}
    ValueVector fitted;                ///< Phi theta
    ValueVector value;                 ///< V_{k+1}
    double sup_error = 0.0;            ///< ||V_k - J*||_inf (NaN without oracle)
    double min_gap = 0.0;              ///< min_i (V_k(i) - J*(i)) (NaN without oracle)
    double bellman_residual = 0.0;     ///< ||T V_k - V_k||_inf
    std::optional<NoiseStats> noise;   ///< diagnostics only
    double lemma2_lhs = 0.0;           ///< ||T_greedy(V_{k+1}) M J^mu - M J^mu||_inf, NaN unless diagnostics
};

struct RunSummary {
    std::size_t tail_start = 0;       ///< first iteration of the tail window (last 20%)
    double tail_max_error = 0.0;      ///< max over the window of sup_error
    double tail_min_gap = 0.0;        ///< min over the window of min_gap
    double final_sup_error = 0.0;     ///< ||V_K - J*||_inf
    double max_abs_value = 0.0;       ///< max over k of ||V_k||_inf
    double max_noise_sup = 0.0;       ///< diagnostics only
    double max_lemma2_lhs = 0.0;      ///< diagnostics only
    bool step_sizes_ok = false;       ///< gamma schedule meets the summability conditions
    bool eta_growing = false;         ///< gradient variant only
    double alpha_prime = 0.0;         ///< gradient variant only, NaN otherwise
};

struct RunRecord {
    Algorithm algorithm = Algorithm::least_squares;
    int lookahead_h = 1;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    bool has_oracle = false;
    ValueVector v0;
    std::vector<IterationRecord> iterations;
    ValueVector final_value;
    RunSummary summary;
};

/// Number of iterations in the tail window: ceil(0.2 K), at least 1.
std::size_t tail_window_length(std::size_t iterations);

/// Least-squares variant. Throws AssumptionViolation before iteration 0 if a checked
/// assumption fails and InvalidInput for malformed configurations.
RunRecord run_algorithm_ls(const Mdp& mdp, const FeatureProjector& fp, const RunConfig& cfg,
                           const ValueVector* oracle = nullptr);

/// Gradient-descent variant: eta_k gradient steps from theta = 0 replace the exact fit.
RunRecord run_algorithm_gd(const Mdp& mdp, const FeatureProjector& fp, const RunConfig& cfg,
                           const ValueVector* oracle = nullptr);

/// Dispatches on cfg.algorithm.
RunRecord run_algorithm(const Mdp& mdp, const FeatureProjector& fp, const RunConfig& cfg,
                        const ValueVector* oracle = nullptr);

/// 64-bit FNV-1a over the action list.
std::uint64_t policy_hash(const Policy& mu);

}  // namespace lapi
