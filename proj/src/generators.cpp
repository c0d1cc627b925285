#include "lapi/generators.hpp"

#include "lapi/errors.hpp"
#include "lapi/random.hpp"

#include <numeric>
#include <string>

namespace lapi {

Mdp generate_garnet(std::size_t num_states, std::size_t num_actions, std::size_t branching,
                    std::uint64_t seed, double discount, double rho) {
    if (num_states < 1 || num_actions < 1) throw InvalidInput("garnet: need at least one state and action");
    if (branching < 1 || branching > num_states)
        throw InvalidInput("garnet: branching must lie in [1, num_states], got " + std::to_string(branching));
    if (!(rho >= 0.0 && rho <= 0.5)) throw InvalidInput("garnet: rho must lie in [0, 0.5]");

    const auto n = static_cast<Eigen::Index>(num_states);
    const RandomStream root(seed);
    std::vector<Eigen::MatrixXd> p(num_actions, Eigen::MatrixXd::Zero(n, n));
    Eigen::MatrixXd g(n, static_cast<Eigen::Index>(num_actions));
    std::vector<int> perm(num_states);

    for (std::size_t i = 0; i < num_states; ++i) {
        for (std::size_t u = 0; u < num_actions; ++u) {
            RandomStream rng = root.derive(i * num_actions + u);
            // partial Fisher-Yates: the first `branching` slots are a uniform subset
            std::iota(perm.begin(), perm.end(), 0);
            for (std::size_t b = 0; b < branching; ++b) {
                const std::size_t pick = b + rng.below(num_states - b);
                std::swap(perm[b], perm[pick]);
            }
            std::vector<double> w(branching);
            double total = 0.0;
            for (auto& x : w) {
                x = 1.0 - rng.uniform();  // (0, 1], never an accidental zero
                total += x;
            }
            for (std::size_t b = 0; b < branching; ++b)
                p[u](static_cast<Eigen::Index>(i), perm[b]) = w[b] / total;
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(u)) = rho + (1.0 - 2.0 * rho) * rng.uniform();
        }
    }
    return Mdp(std::move(p), std::move(g), discount, rho);
}

Mdp generate_chain(std::size_t num_states, double discount) {
    if (num_states < 1) throw InvalidInput("chain: need at least one state");
    const auto n = static_cast<Eigen::Index>(num_states);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        p(i, i + 1) = 1.0;
        g(i, 0) = 1.0;
    }
    p(n - 1, n - 1) = 1.0;
    return Mdp({p}, g, discount);
}

ValueVector chain_value(std::size_t num_states, double discount) {
    ValueVector j = ValueVector::Zero(static_cast<Eigen::Index>(num_states));
    for (std::size_t i = 0; i < num_states; ++i) {
        double w = 1.0;
        for (std::size_t t = 0; t + 1 + i < num_states; ++t) {
            j(static_cast<Eigen::Index>(i)) += w;
            w *= discount;
        }
    }
    return j;
}

Eigen::MatrixXd identity_features(std::size_t num_states) {
    const auto n = static_cast<Eigen::Index>(num_states);
    return Eigen::MatrixXd::Identity(n, n);
}

std::size_t aggregation_group(std::size_t state, std::size_t num_states, std::size_t groups) {
    return state * groups / num_states;
}

Eigen::MatrixXd aggregation_features(std::size_t num_states, std::size_t groups) {
    if (groups < 1 || groups > num_states)
        throw InvalidInput("aggregation: group count must lie in [1, num_states], got " + std::to_string(groups));
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_states), static_cast<Eigen::Index>(groups));
    for (std::size_t i = 0; i < num_states; ++i)
        phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(aggregation_group(i, num_states, groups))) = 1.0;
    return phi;
}

std::vector<int> group_representatives(std::size_t num_states, std::size_t groups, std::size_t per_group) {
    if (groups < 1 || groups > num_states)
        throw InvalidInput("aggregation: group count must lie in [1, num_states], got " + std::to_string(groups));
    if (per_group < 1) throw InvalidInput("aggregation: need at least one representative per group");
    std::vector<std::size_t> taken(groups, 0);
    std::vector<int> reps;
    for (std::size_t i = 0; i < num_states; ++i) {
        const std::size_t grp = aggregation_group(i, num_states, groups);
        if (taken[grp] < per_group) {
            ++taken[grp];
            reps.push_back(static_cast<int>(i));
        }
    }
    return reps;
}

std::vector<int> all_states(std::size_t num_states) {
    std::vector<int> s(num_states);
    std::iota(s.begin(), s.end(), 0);
    return s;
}

}  // namespace lapi
