#pragma once

#include "lapi/mdp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace lapi {

/// Garnet ensemble: for every (i,u), `branching` distinct successors chosen uniformly with
/// normalized uniform weights; costs uniform in [rho, 1 - rho]. Deterministic given seed.
Mdp generate_garnet(std::size_t num_states, std::size_t num_actions, std::size_t branching,
                    std::uint64_t seed, double discount = 0.9, double rho = 0.0);

/// Single action; i -> i+1 with cost 1, the last state self-loops at cost 0.
Mdp generate_chain(std::size_t num_states, double discount);

/// Closed-form J for generate_chain: J(i) = sum_{t < n-1-i} alpha^t.
ValueVector chain_value(std::size_t num_states, double discount);

Eigen::MatrixXd identity_features(std::size_t num_states);

/// Group of state i among `groups` contiguous blocks: floor(i * groups / num_states).
std::size_t aggregation_group(std::size_t state, std::size_t num_states, std::size_t groups);

/// One-hot group membership, |S| x groups.
Eigen::MatrixXd aggregation_features(std::size_t num_states, std::size_t groups);

/// The first `per_group` states of every aggregation group, ascending.
std::vector<int> group_representatives(std::size_t num_states, std::size_t groups, std::size_t per_group = 1);

std::vector<int> all_states(std::size_t num_states);

}  // namespace lapi
