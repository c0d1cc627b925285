#pragma once

#include "lapi/mdp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace lapi {

/**
 * Linear architecture over a fixed anchor set D.
 *
 * Holds Phi (|S| x d), Phi_D (rows of Phi at the anchors), the 0/1 selector
 * (|D| x |S|) and the oblique projector
 *
 *     M = Phi (Phi_D^T Phi_D)^{-1} Phi_D^T Selector,
 *
 * which maps a full vector to the feature-space least-squares fit of its anchor
 * values. Construction fails with AssumptionViolation(3) unless Phi_D has full
 * column rank. Immutable after construction.
 */
class FeatureProjector {
public:
    static constexpr double kRankTol = 1e-10;

    FeatureProjector(Eigen::MatrixXd phi, std::vector<int> anchors);

    std::size_t num_states() const noexcept { return static_cast<std::size_t>(phi_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(phi_.cols()); }

    const Eigen::MatrixXd& phi() const noexcept { return phi_; }
    const std::vector<int>& anchors() const noexcept { return anchors_; }
    const Eigen::MatrixXd& phi_d() const noexcept { return phi_d_; }
    const Eigen::MatrixXd& selector() const noexcept { return selector_; }
    const Eigen::MatrixXd& projector() const noexcept { return m_; }
    /// Phi_D^T Phi_D
    const Eigen::MatrixXd& gram() const noexcept { return gram_; }

    /// theta = (Phi_D^T Phi_D)^{-1} Phi_D^T targets
    Eigen::VectorXd solve_weights(const Eigen::VectorXd& targets) const;

    /// M v
    ValueVector project(const ValueVector& v) const;

private:
    Eigen::MatrixXd phi_;
    std::vector<int> anchors_;
    Eigen::MatrixXd phi_d_;
    Eigen::MatrixXd selector_;
    Eigen::MatrixXd gram_;
    Eigen::LLT<Eigen::MatrixXd> gram_factor_;
    Eigen::MatrixXd m_;
};

FeatureProjector build_projector(Eigen::MatrixXd phi, std::vector<int> anchors);

struct LinearFit {
    Eigen::VectorXd theta;
    ValueVector fitted;  ///< Phi theta
};

/// Exact minimizer of sum_{i in D} ((Phi theta)(i) - target_i)^2.
LinearFit least_squares_fit(const FeatureProjector& fp, const std::vector<double>& targets);

/// ||I_d - beta Phi_D^T Phi_D||_2 from the eigenvalues of the (symmetric) Gram matrix.
double alpha_prime(const FeatureProjector& fp, double beta);

/// `steps` exact gradient steps on c(theta) = 1/2 sum_{i in D} ((Phi theta)(i) - target_i)^2
/// from theta = 0. Throws AssumptionViolation(5) if alpha_prime(fp, beta) >= 1.
LinearFit gd_inner_loop(const FeatureProjector& fp, const std::vector<double>& targets, double beta,
                        int steps);

/// Same recursion, reporting every iterate theta_1 .. theta_steps (diagnostics and tests).
std::vector<Eigen::VectorXd> gd_inner_trajectory(const FeatureProjector& fp,
                                                 const std::vector<double>& targets, double beta,
                                                 int steps);

/// Which policies the sup in delta_2 = sup_mu ||M J^mu - J^mu||_inf ranges over.
struct Delta2Mode {
    enum class Kind { enumerate, sample, observed };

    Kind kind = Kind::enumerate;
    std::size_t samples = 0;          ///< sample mode
    std::uint64_t seed = 0;           ///< sample mode
    std::vector<Policy> policies;     ///< observed mode

    static Delta2Mode enumerate_all() { return {}; }
    static Delta2Mode sample(std::size_t n, std::uint64_t seed);
    static Delta2Mode observed(std::vector<Policy> policies);
};

struct Delta2Result {
    double delta2 = 0.0;
    bool is_exact = false;
    std::size_t policies_checked = 0;
};

/// Cap on |A|^|S| for exhaustive enumeration.
inline constexpr double kMaxEnumeratedPolicies = 1e6;

/// Max over the chosen policy set of ||M J^mu - J^mu||_inf. Only enumerate mode is exact;
/// the others give a lower bound. Enumerate mode over the cap throws SizeLimitExceeded.
Delta2Result delta2_estimate(const Mdp& mdp, const FeatureProjector& fp, const Delta2Mode& mode);

/// Calls f(policy) for every deterministic policy, in lexicographic order
/// (state 0 is the most significant digit). Refuses more than kMaxEnumeratedPolicies.
template <typename F>
void for_each_policy(std::size_t num_states, std::size_t num_actions, F&& f);

double policy_count(std::size_t num_states, std::size_t num_actions);

}  // namespace lapi

#include "lapi/detail/for_each_policy.hpp"
