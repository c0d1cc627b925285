#include "lapi/rollout.hpp"

#include "lapi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace lapi {

void RolloutConfig::validate() const {
    if (truncation_len < 1) throw InvalidInput("rollout: truncation_len must be >= 1");
    if (trajectories_per_state < 1) throw InvalidInput("rollout: trajectories_per_state must be >= 1");
}

void check_anchor_set(const std::vector<int>& anchors, std::size_t num_states) {
    if (anchors.empty()) throw InvalidInput("anchor set is empty");
    std::unordered_set<int> seen;
    for (int a : anchors) {
        if (a < 0 || static_cast<std::size_t>(a) >= num_states)
            throw InvalidInput("anchor " + std::to_string(a) + " is not a valid state");
        if (!seen.insert(a).second) throw InvalidInput("duplicate anchor " + std::to_string(a));
    }
}

PolicySimulator::PolicySimulator(const Mdp& mdp, const Policy& mu) : mdp_(&mdp), policy_(mu) {
    mdp.check_policy(mu);
    const std::size_t n = mdp.num_states();
    rows_.resize(n);
    cost_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = mdp.transition(mu[i]);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double pij = p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (pij > 0.0) {
                acc += pij;
                rows_[i].next.push_back(static_cast<int>(j));
                rows_[i].cdf.push_back(acc);
            }
        }
        cost_[i] = mdp.cost(i, mu[i]);
    }
}

double PolicySimulator::trajectory(int start, int length, RandomStream& rng) const {
    const double alpha = mdp_->discount();
    const double rho = mdp_->cost_noise_halfwidth();
    int x = start;
    double total = 0.0;
    double weight = 1.0;
    for (int t = 0; t < length; ++t) {
        double c = cost_[x];
        if (rho > 0.0) c += rho * (2.0 * rng.uniform() - 1.0);
        total += weight * c;
        weight *= alpha;
        if (t + 1 == length) break;
        const Row& row = rows_[x];
        if (row.next.size() == 1) {
            x = row.next.front();
            continue;
        }
        // scale by the row total so rounding in the cumulative sum never falls off the end
        const double u = rng.uniform() * row.cdf.back();
        const auto it = std::upper_bound(row.cdf.begin(), row.cdf.end(), u);
        const auto k = std::min<std::ptrdiff_t>(it - row.cdf.begin(),
                                                static_cast<std::ptrdiff_t>(row.cdf.size()) - 1);
        x = row.next[static_cast<std::size_t>(k)];
    }
    return total;
}

double PolicySimulator::estimate(int start, const RolloutConfig& cfg, const RandomStream& rng) const {
    if (start < 0 || static_cast<std::size_t>(start) >= mdp_->num_states())
        throw InvalidInput("rollout: start state " + std::to_string(start) + " is not valid");
    cfg.validate();
    double sum = 0.0;
    for (int t = 0; t < cfg.trajectories_per_state; ++t) {
        RandomStream sub = rng.derive(static_cast<std::uint64_t>(t));
        sum += trajectory(start, cfg.truncation_len, sub);
    }
    return sum / cfg.trajectories_per_state;
}

double rollout_estimate(const Mdp& mdp, const Policy& mu, int start_state, const RolloutConfig& cfg,
                        const RandomStream& rng) {
    return PolicySimulator(mdp, mu).estimate(start_state, cfg, rng);
}

double rollout_estimate(const Mdp& mdp, const Policy& mu, int start_state, const RolloutConfig& cfg) {
    return rollout_estimate(mdp, mu, start_state, cfg, RandomStream(cfg.seed));
}

AnchorEvaluation evaluate_on_anchors(const Mdp& mdp, const Policy& mu, const std::vector<int>& anchors,
                                     const RolloutConfig& cfg, const RandomStream& rng,
                                     const ValueVector* exact) {
    check_anchor_set(anchors, mdp.num_states());
    cfg.validate();
    if (exact) mdp.check_vector(*exact);
    const PolicySimulator sim(mdp, mu);
    AnchorEvaluation out;
    out.estimates.reserve(anchors.size());
    NoiseStats stats;
    const int n = cfg.trajectories_per_state;
    for (std::size_t p = 0; p < anchors.size(); ++p) {
        const RandomStream anchor_rng = rng.derive(p);
        if (!exact) {
            out.estimates.push_back(sim.estimate(anchors[p], cfg, anchor_rng));
            continue;
        }
        // same draws as PolicySimulator::estimate, but keep the per-trajectory spread
        const double truth = (*exact)(anchors[p]);
        double sum = 0.0, sq = 0.0;
        for (int t = 0; t < n; ++t) {
            RandomStream sub = anchor_rng.derive(static_cast<std::uint64_t>(t));
            const double value = sim.trajectory(anchors[p], cfg.truncation_len, sub);
            sum += value;
            sq += (value - truth) * (value - truth);
        }
        const double est = sum / n;
        const double w = est - truth;
        out.estimates.push_back(est);
        stats.mean.push_back(w);
        stats.stddev.push_back(n > 1 ? std::sqrt(std::max(0.0, (sq - n * w * w) / (n - 1))) : 0.0);
        stats.sup_norm = std::max(stats.sup_norm, std::abs(w));
    }
    if (exact) out.noise = std::move(stats);
    return out;
}

int default_truncation(double alpha, double tail_tol) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("default_truncation: alpha must lie in (0,1)");
    if (!(tail_tol > 0.0)) throw InvalidInput("default_truncation: tail_tol must be positive");
    const double guess = std::ceil(std::log(tail_tol * (1.0 - alpha)) / std::log(alpha));
    int len = std::max(1, static_cast<int>(std::min(guess, 1e9)));
    auto tail = [&](int l) { return std::pow(alpha, l) / (1.0 - alpha); };
    // the closed form can be off by one in floating point; settle it exactly
    while (len > 1 && tail(len - 1) <= tail_tol) --len;
    while (tail(len) > tail_tol) ++len;
    return len;
}

}  // namespace lapi
