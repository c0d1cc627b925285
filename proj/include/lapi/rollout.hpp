#pragma once

#include "lapi/mdp.hpp"
#include "lapi/random.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lapi {

struct RolloutConfig {
    int truncation_len = 1;          ///< L, steps simulated per trajectory
    int trajectories_per_state = 1;  ///< N, independent rollouts averaged per anchor
    std::uint64_t seed = 0;

    void validate() const;
};

/// Rollout noise w = J_hat - J^mu over the anchor set (computed only for diagnostics).
struct NoiseStats {
    std::vector<double> mean;    ///< per-anchor sample mean of the per-trajectory noise
    std::vector<double> stddev;  ///< per-anchor sample standard deviation (0 if N == 1)
    double sup_norm = 0.0;       ///< max_i |J_hat(i) - J^mu(i)|
};

struct AnchorEvaluation {
    std::vector<double> estimates;   ///< J_hat(i) in anchor order
    std::optional<NoiseStats> noise; ///< present when exact values were supplied
};

/// Trajectory sampler for one fixed policy. Precomputes the cumulative rows of P_mu
/// restricted to their support so each step costs O(branching).
class PolicySimulator {
public:
    PolicySimulator(const Mdp& mdp, const Policy& mu);

    /// One discounted cost sum of `length` steps from `start`.
    double trajectory(int start, int length, RandomStream& rng) const;

    /// Mean of N trajectories; trajectory t draws from rng.derive(t).
    double estimate(int start, const RolloutConfig& cfg, const RandomStream& rng) const;

    const Mdp& mdp() const noexcept { return *mdp_; }

private:
    struct Row {
        std::vector<int> next;
        std::vector<double> cdf;
    };
    const Mdp* mdp_;
    Policy policy_;
    std::vector<Row> rows_;
    std::vector<double> cost_;
};

/// Average of N truncated discounted-cost trajectories under `mu` from `start_state`.
double rollout_estimate(const Mdp& mdp, const Policy& mu, int start_state, const RolloutConfig& cfg,
                        const RandomStream& rng);

/// Uses RandomStream(cfg.seed).
double rollout_estimate(const Mdp& mdp, const Policy& mu, int start_state, const RolloutConfig& cfg);

/// J_hat on each anchor; anchor at position p uses rng.derive(p). When `exact` is given
/// (J^mu, length |S|) the noise statistics are filled in as well.
AnchorEvaluation evaluate_on_anchors(const Mdp& mdp, const Policy& mu, const std::vector<int>& anchors,
                                     const RolloutConfig& cfg, const RandomStream& rng,
                                     const ValueVector* exact = nullptr);

/// Smallest L >= 1 with alpha^L / (1 - alpha) <= tail_tol.
int default_truncation(double alpha, double tail_tol);

/// Throws InvalidInput if the list is empty, has duplicates, or holds an invalid state.
void check_anchor_set(const std::vector<int>& anchors, std::size_t num_states);

}  // namespace lapi
