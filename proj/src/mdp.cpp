#include "lapi/mdp.hpp"

#include "lapi/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lapi {

namespace {

std::string where(std::size_t i, int u) {
    return "(state " + std::to_string(i) + ", action " + std::to_string(u) + ")";
}

}  // namespace

Mdp::Mdp(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd costs, double discount,
         double cost_noise_halfwidth, double row_sum_tol)
    : transitions_(std::move(transitions)),
      costs_(std::move(costs)),
      discount_(discount),
      rho_(cost_noise_halfwidth) {
    const auto n = costs_.rows();
    if (n < 1) throw InvalidInput("Mdp: need at least one state");
    if (transitions_.empty()) throw InvalidInput("Mdp: need at least one action");
    if (costs_.cols() != static_cast<Eigen::Index>(transitions_.size()))
        throw InvalidInput("Mdp: cost matrix has " + std::to_string(costs_.cols()) +
                           " columns but there are " + std::to_string(transitions_.size()) +
                           " actions");
    if (!(discount_ > 0.0 && discount_ < 1.0))
        throw InvalidInput("Mdp: discount must lie in (0,1), got " + std::to_string(discount_));
    if (!(rho_ >= 0.0) || !std::isfinite(rho_))
        throw InvalidInput("Mdp: cost noise half-width must be >= 0");

    for (std::size_t u = 0; u < transitions_.size(); ++u) {
        const auto& p = transitions_[u];
        if (p.rows() != n || p.cols() != n)
            throw InvalidInput("Mdp: transition matrix for action " + std::to_string(u) +
                               " is not |S| x |S|");
        for (Eigen::Index i = 0; i < n; ++i) {
            double sum = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double pij = p(i, j);
                if (!(pij >= 0.0 && pij <= 1.0))
                    throw InvalidInput("Mdp: transition probability out of [0,1] at " +
                                       where(i, static_cast<int>(u)));
                sum += pij;
            }
            if (std::abs(sum - 1.0) > row_sum_tol)
                throw InvalidInput("Mdp: transition row " + where(i, static_cast<int>(u)) +
                                   " sums to " + std::to_string(sum));
            const double g = costs_(i, static_cast<Eigen::Index>(u));
            if (!(g >= rho_ && g <= 1.0 - rho_))
                throw InvalidInput("Mdp: cost " + std::to_string(g) + " at " +
                                   where(i, static_cast<int>(u)) + " is outside [rho, 1-rho]");
        }
    }
}

void Mdp::check_policy(const Policy& mu) const {
    if (mu.size() != num_states())
        throw InvalidInput("policy has " + std::to_string(mu.size()) + " entries, expected " +
                           std::to_string(num_states()));
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu[i] < 0 || static_cast<std::size_t>(mu[i]) >= num_actions())
            throw InvalidInput("policy action " + std::to_string(mu[i]) + " at state " +
                               std::to_string(i) + " is not a valid action");
}

void Mdp::check_vector(const ValueVector& v) const {
    if (static_cast<std::size_t>(v.size()) != num_states())
        throw InvalidInput("value vector has " + std::to_string(v.size()) +
                           " entries, expected " + std::to_string(num_states()));
}

ValueVector Mdp::policy_costs(const Policy& mu) const {
    check_policy(mu);
    ValueVector g(costs_.rows());
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = costs_(i, mu[i]);
    return g;
}

Eigen::MatrixXd Mdp::policy_transitions(const Policy& mu) const {
    check_policy(mu);
    Eigen::MatrixXd p(costs_.rows(), costs_.rows());
    for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) = transitions_[mu[i]].row(i);
    return p;
}

bool operator==(const Mdp& a, const Mdp& b) {
    if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions()) return false;
    if (a.discount_ != b.discount_ || a.rho_ != b.rho_ || a.costs_ != b.costs_) return false;
    for (std::size_t u = 0; u < a.num_actions(); ++u)
        if (a.transitions_[u] != b.transitions_[u]) return false;
    return true;
}

double sup_norm(const ValueVector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

ValueVector bellman_policy_apply(const Mdp& mdp, const Policy& mu, const ValueVector& v) {
    mdp.check_policy(mu);
    mdp.check_vector(v);
    const std::size_t n = mdp.num_states();
    ValueVector out(n);
    for (std::size_t i = 0; i < n; ++i)
        out(i) = mdp.cost(i, mu[i]) + mdp.discount() * mdp.transition(mu[i]).row(i).dot(v);
    return out;
}

std::pair<ValueVector, Policy> bellman_optimality_apply(const Mdp& mdp, const ValueVector& v) {
    mdp.check_vector(v);
    const std::size_t n = mdp.num_states();
    const double alpha = mdp.discount();
    ValueVector out(n);
    Policy greedy(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t u = 0; u < mdp.num_actions(); ++u) {
            const int a = static_cast<int>(u);
            const double q = mdp.cost(i, a) + alpha * mdp.transition(a).row(i).dot(v);
            // strict comparison keeps the lowest index on ties
            if (q < best) {
                best = q;
                arg = a;
            }
        }
        out(i) = best;
        greedy[i] = arg;
    }
    return {std::move(out), std::move(greedy)};
}

ValueVector exact_policy_value(const Mdp& mdp, const Policy& mu) {
    const Eigen::MatrixXd p = mdp.policy_transitions(mu);
    const ValueVector g = mdp.policy_costs(mu);
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - mdp.discount() * p;
    ValueVector j = system.partialPivLu().solve(g);
    // one step of iterative refinement
    const ValueVector r = g - system * j;
    j += system.partialPivLu().solve(r);
    return j;
}

OptimalSolution optimal_value(const Mdp& mdp, double tol) {
    if (!(tol > 0.0)) throw InvalidInput("optimal_value: tol must be positive");
    const double alpha = mdp.discount();
    const double stop = tol * (1.0 - alpha) / alpha;
    OptimalSolution sol;
    ValueVector v = ValueVector::Zero(mdp.num_states());
    for (;;) {
        ValueVector tv = bellman_optimality_apply(mdp, v).first;
        ++sol.iterations;
        const double residual = sup_norm(tv - v);
        v = std::move(tv);
        // Below ~1e-15 relative the residual is rounding noise; stop rather than spin.
        if (residual <= stop || residual <= 4 * std::numeric_limits<double>::epsilon() * (1.0 + sup_norm(v)))
            break;
    }
    sol.policy = bellman_optimality_apply(mdp, v).second;
    sol.value = std::move(v);
    return sol;
}

Policy lookahead_policy(const Mdp& mdp, const ValueVector& v, int h) {
    if (h < 1) throw InvalidInput("lookahead_policy: h must be >= 1, got " + std::to_string(h));
    mdp.check_vector(v);
    ValueVector w = v;
    for (int step = 1; step < h; ++step) w = bellman_optimality_apply(mdp, w).first;
    return bellman_optimality_apply(mdp, w).second;
}

}  // namespace lapi
