#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace lapi {

/// Real vector indexed by states (V_k, J^mu, J*).
using ValueVector = Eigen::VectorXd;

/// Deterministic stationary policy: one action index per state.
struct Policy {
    std::vector<int> actions;

    Policy() = default;
    explicit Policy(std::vector<int> a) : actions(std::move(a)) {}
    Policy(std::size_t num_states, int action) : actions(num_states, action) {}

    std::size_t size() const noexcept { return actions.size(); }
    int operator[](std::size_t i) const { return actions[i]; }
    int& operator[](std::size_t i) { return actions[i]; }

    friend bool operator==(const Policy&, const Policy&) = default;
};

/**
 * Finite discounted-cost MDP with dense transition kernel.
 *
 * Costs are expectations g(i,u) in [rho, 1 - rho]. rho is the half-width of a
 * uniform additive noise applied only by the simulator, so every sampled cost
 * stays in [0, 1]. The constructor validates all invariants and throws
 * InvalidInput on failure; an Mdp object is therefore always well-formed.
 */
class Mdp {
public:
    static constexpr double kRowSumTol = 1e-12;

    /// `transitions[u]` is the |S| x |S| matrix P(u) with rows indexed by the current state.
    /// `costs` is |S| x |A|.
    Mdp(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd costs, double discount,
        double cost_noise_halfwidth = 0.0, double row_sum_tol = kRowSumTol);

    std::size_t num_states() const noexcept { return static_cast<std::size_t>(costs_.rows()); }
    std::size_t num_actions() const noexcept { return transitions_.size(); }
    double discount() const noexcept { return discount_; }
    double cost_noise_halfwidth() const noexcept { return rho_; }

    const Eigen::MatrixXd& transition(int action) const { return transitions_.at(action); }
    double prob(std::size_t i, int u, std::size_t j) const { return transitions_[u](i, j); }
    double cost(std::size_t i, int u) const { return costs_(i, u); }
    const Eigen::MatrixXd& costs() const noexcept { return costs_; }

    /// g_mu
    ValueVector policy_costs(const Policy& mu) const;
    /// P_mu
    Eigen::MatrixXd policy_transitions(const Policy& mu) const;

    /// Throws InvalidInput unless `mu` has |S| entries, each a valid action.
    void check_policy(const Policy& mu) const;
    void check_vector(const ValueVector& v) const;

    friend bool operator==(const Mdp& a, const Mdp& b);

private:
    std::vector<Eigen::MatrixXd> transitions_;
    Eigen::MatrixXd costs_;
    double discount_;
    double rho_;
};

/// T_mu v = g_mu + alpha P_mu v.
ValueVector bellman_policy_apply(const Mdp& mdp, const Policy& mu, const ValueVector& v);

/// (T v, greedy policy). Ties go to the lowest action index.
std::pair<ValueVector, Policy> bellman_optimality_apply(const Mdp& mdp, const ValueVector& v);

/// J^mu from the linear system (I - alpha P_mu) J = g_mu.
ValueVector exact_policy_value(const Mdp& mdp, const Policy& mu);

struct OptimalSolution {
    ValueVector value;
    Policy policy;
    std::size_t iterations = 0;
};

/// Value iteration from zero. Stops once ||TV - V||_inf <= tol (1 - alpha) / alpha,
/// which guarantees ||V - J*||_inf <= tol. Requires tol > 0.
OptimalSolution optimal_value(const Mdp& mdp, double tol);

/// Greedy policy of T^{h-1} v, i.e. the mu with T_mu T^{h-1} v = T^h v. Requires h >= 1.
Policy lookahead_policy(const Mdp& mdp, const ValueVector& v, int h);

double sup_norm(const ValueVector& v);

}  // namespace lapi
