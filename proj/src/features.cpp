#include "lapi/features.hpp"

#include "lapi/errors.hpp"
#include "lapi/random.hpp"
#include "lapi/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lapi {

FeatureProjector::FeatureProjector(Eigen::MatrixXd phi, std::vector<int> anchors)
    : phi_(std::move(phi)), anchors_(std::move(anchors)) {
    if (phi_.rows() < 1 || phi_.cols() < 1) throw InvalidInput("feature matrix must be non-empty");
    if (!phi_.allFinite()) throw InvalidInput("feature matrix has non-finite entries");
    check_anchor_set(anchors_, num_states());

    const auto n = phi_.rows();
    const auto d = phi_.cols();
    const auto nd = static_cast<Eigen::Index>(anchors_.size());
    if (nd < d)
        throw AssumptionViolation(3, "anchor set has " + std::to_string(nd) +
                                         " states but the features have dimension " +
                                         std::to_string(d) + "; rank(Phi_D) = d is impossible");

    phi_d_.resize(nd, d);
    selector_ = Eigen::MatrixXd::Zero(nd, n);
    for (Eigen::Index p = 0; p < nd; ++p) {
        phi_d_.row(p) = phi_.row(anchors_[p]);
        selector_(p, anchors_[p]) = 1.0;
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi_d_);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smax > 0.0) || smin <= kRankTol * smax)
        throw AssumptionViolation(3, "anchor features Phi_D are rank deficient (singular values " +
                                         std::to_string(smax) + " .. " + std::to_string(smin) +
                                         "); rank(Phi_D) must equal d = " + std::to_string(d));

    gram_ = phi_d_.transpose() * phi_d_;
    gram_factor_.compute(gram_);
    if (gram_factor_.info() != Eigen::Success)
        throw AssumptionViolation(3, "Phi_D^T Phi_D is not positive definite");
    const Eigen::MatrixXd weights_map = gram_factor_.solve(phi_d_.transpose());  // d x |D|
    m_ = phi_ * weights_map * selector_;
}

Eigen::VectorXd FeatureProjector::solve_weights(const Eigen::VectorXd& targets) const {
    if (targets.size() != static_cast<Eigen::Index>(anchors_.size()))
        throw InvalidInput("expected " + std::to_string(anchors_.size()) + " anchor targets, got " +
                           std::to_string(targets.size()));
    return gram_factor_.solve(phi_d_.transpose() * targets);
}

ValueVector FeatureProjector::project(const ValueVector& v) const {
    if (v.size() != phi_.rows())
        throw InvalidInput("project: vector has " + std::to_string(v.size()) + " entries, expected " +
                           std::to_string(phi_.rows()));
    return m_ * v;
}

FeatureProjector build_projector(Eigen::MatrixXd phi, std::vector<int> anchors) {
    return FeatureProjector(std::move(phi), std::move(anchors));
}

namespace {

Eigen::VectorXd as_vector(const std::vector<double>& xs) {
    return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

void check_targets(const FeatureProjector& fp, const std::vector<double>& targets) {
    if (targets.size() != fp.anchors().size())
        throw InvalidInput("expected " + std::to_string(fp.anchors().size()) + " anchor targets, got " +
                           std::to_string(targets.size()));
}

void check_gd_args(const FeatureProjector& fp, double beta, int steps) {
    if (!(beta > 0.0)) throw InvalidInput("gradient step size beta must be positive");
    if (steps < 1) throw InvalidInput("gradient descent needs at least one step");
    const double ap = alpha_prime(fp, beta);
    if (!(ap < 1.0))
        throw AssumptionViolation(5, "||I - beta Phi_D^T Phi_D||_2 = " + std::to_string(ap) +
                                         " >= 1 for beta = " + std::to_string(beta));
}

}  // namespace

LinearFit least_squares_fit(const FeatureProjector& fp, const std::vector<double>& targets) {
    check_targets(fp, targets);
    LinearFit fit;
    fit.theta = fp.solve_weights(as_vector(targets));
    fit.fitted = fp.phi() * fit.theta;
    return fit;
}

double alpha_prime(const FeatureProjector& fp, double beta) {
    if (!(beta > 0.0)) throw InvalidInput("alpha_prime: beta must be positive");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fp.gram(), Eigen::EigenvaluesOnly);
    double norm = 0.0;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k)
        norm = std::max(norm, std::abs(1.0 - beta * eig.eigenvalues()(k)));
    return norm;
}

LinearFit gd_inner_loop(const FeatureProjector& fp, const std::vector<double>& targets, double beta,
                        int steps) {
    check_targets(fp, targets);
    check_gd_args(fp, beta, steps);
    const Eigen::VectorXd rhs = fp.phi_d().transpose() * as_vector(targets);
    const Eigen::MatrixXd& gram = fp.gram();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fp.dim()));
    for (int l = 0; l < steps; ++l) theta -= beta * (gram * theta - rhs);
    LinearFit fit;
    fit.fitted = fp.phi() * theta;
    fit.theta = std::move(theta);
    return fit;
}

std::vector<Eigen::VectorXd> gd_inner_trajectory(const FeatureProjector& fp,
                                                 const std::vector<double>& targets, double beta,
                                                 int steps) {
    check_targets(fp, targets);
    check_gd_args(fp, beta, steps);
    const Eigen::VectorXd rhs = fp.phi_d().transpose() * as_vector(targets);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fp.dim()));
    std::vector<Eigen::VectorXd> path;
    path.reserve(static_cast<std::size_t>(steps));
    for (int l = 0; l < steps; ++l) {
        theta -= beta * (fp.gram() * theta - rhs);
        path.push_back(theta);
    }
    return path;
}

Delta2Mode Delta2Mode::sample(std::size_t n, std::uint64_t seed) {
    Delta2Mode m;
    m.kind = Kind::sample;
    m.samples = n;
    m.seed = seed;
    return m;
}

Delta2Mode Delta2Mode::observed(std::vector<Policy> policies) {
    Delta2Mode m;
    m.kind = Kind::observed;
    m.policies = std::move(policies);
    return m;
}

double policy_count(std::size_t num_states, std::size_t num_actions) {
    return std::pow(static_cast<double>(num_actions), static_cast<double>(num_states));
}

Delta2Result delta2_estimate(const Mdp& mdp, const FeatureProjector& fp, const Delta2Mode& mode) {
    if (fp.num_states() != mdp.num_states())
        throw InvalidInput("delta2: features cover " + std::to_string(fp.num_states()) +
                           " states but the MDP has " + std::to_string(mdp.num_states()));
    Delta2Result res;
    auto visit = [&](const Policy& mu) {
        const ValueVector j = exact_policy_value(mdp, mu);
        res.delta2 = std::max(res.delta2, sup_norm(fp.project(j) - j));
        ++res.policies_checked;
    };
    switch (mode.kind) {
        case Delta2Mode::Kind::enumerate:
            for_each_policy(mdp.num_states(), mdp.num_actions(), visit);
            res.is_exact = true;
            break;
        case Delta2Mode::Kind::sample: {
            const RandomStream root(mode.seed);
            for (std::size_t s = 0; s < mode.samples; ++s) {
                RandomStream rng = root.derive(s);
                Policy mu(mdp.num_states(), 0);
                for (std::size_t i = 0; i < mu.size(); ++i)
                    mu[i] = static_cast<int>(rng.below(mdp.num_actions()));
                visit(mu);
            }
            break;
        }
        case Delta2Mode::Kind::observed:
            for (const auto& mu : mode.policies) visit(mu);
            break;
    }
    return res;
}

}  // namespace lapi
