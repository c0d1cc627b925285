#include "lapi/errors.hpp"
#include "lapi/generators.hpp"
#include "lapi/rollout.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lapi;

namespace {

RolloutConfig cfg_of(int l, int n, std::uint64_t seed = 0) {
    RolloutConfig c;
    c.truncation_len = l;
    c.trajectories_per_state = n;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Rollout, GeometricPartialSum) {
    const Mdp mdp = test::single_state({1.0}, 0.5);
    for (int n : {1, 7}) {
        EXPECT_DOUBLE_EQ(rollout_estimate(mdp, Policy(1, 0), 0, cfg_of(20, n)), 2.0 * (1.0 - std::ldexp(1.0, -20)));
    }
}

TEST(Rollout, ZeroCostIsZero) {
    std::mt19937_64 gen(1);
    const Mdp base = test::random_mdp(gen, 4, 2, 0.9);
    const Mdp zero({base.transition(0), base.transition(1)}, Eigen::MatrixXd::Zero(4, 2), 0.9);
    for (std::uint64_t seed : {0u, 5u, 99u})
        EXPECT_EQ(rollout_estimate(zero, Policy(4, 1), 2, cfg_of(13, 4, seed)), 0.0);
}

TEST(Rollout, DeterministicChainCostsOnlyFirstStep) {
    EXPECT_EQ(rollout_estimate(generate_chain(2, 0.5), Policy(2, 0), 0, cfg_of(30, 3)), 1.0);
}

TEST(Rollout, InvalidStart) {
    const Mdp mdp = generate_chain(2, 0.5);
    EXPECT_THROW(rollout_estimate(mdp, Policy(2, 0), 2, cfg_of(3, 1)), InvalidInput);
    EXPECT_THROW(rollout_estimate(mdp, Policy(2, 0), -1, cfg_of(3, 1)), InvalidInput);
}

TEST(Rollout, InvalidConfig) {
    const Mdp mdp = generate_chain(2, 0.5);
    EXPECT_THROW(rollout_estimate(mdp, Policy(2, 0), 0, cfg_of(0, 1)), InvalidInput);
    EXPECT_THROW(rollout_estimate(mdp, Policy(2, 0), 0, cfg_of(1, 0)), InvalidInput);
}

TEST(Anchors, ZeroCost) {
    const Mdp zero({Eigen::MatrixXd::Ones(1, 1)}, Eigen::MatrixXd::Zero(1, 1), 0.5);
    const auto ev = evaluate_on_anchors(zero, Policy(1, 0), {0}, cfg_of(5, 2), RandomStream(3));
    ASSERT_EQ(ev.estimates.size(), 1u);
    EXPECT_EQ(ev.estimates[0], 0.0);
    EXPECT_FALSE(ev.noise.has_value());
}

TEST(Anchors, GeometricPartialSum) {
    const auto ev = evaluate_on_anchors(test::single_state({1.0}, 0.5), Policy(1, 0), {0}, cfg_of(20, 1), RandomStream(0));
    EXPECT_DOUBLE_EQ(ev.estimates[0], 2.0 * (1.0 - std::ldexp(1.0, -20)));
}

TEST(Anchors, IdenticalSeedsGiveIdenticalEstimates) {
    std::mt19937_64 gen(4);
    const Mdp mdp = test::random_mdp(gen, 6, 3, 0.8, 0.1);
    const Policy mu = test::random_policy(gen, mdp);
    const std::vector<int> d = {4, 0, 2};
    const auto a = evaluate_on_anchors(mdp, mu, d, cfg_of(25, 5), RandomStream(77));
    const auto b = evaluate_on_anchors(mdp, mu, d, cfg_of(25, 5), RandomStream(77));
    const auto c = evaluate_on_anchors(mdp, mu, d, cfg_of(25, 5), RandomStream(78));
    EXPECT_EQ(a.estimates, b.estimates);
    EXPECT_NE(a.estimates, c.estimates);
}

TEST(Anchors, EstimateMatchesSingleStateRollout) {
    // anchor at position p draws from rng.derive(p)
    std::mt19937_64 gen(6);
    const Mdp mdp = test::random_mdp(gen, 5, 2, 0.7);
    const Policy mu = test::random_policy(gen, mdp);
    const RandomStream root(12);
    const auto ev = evaluate_on_anchors(mdp, mu, {3, 1}, cfg_of(15, 4), root);
    EXPECT_EQ(ev.estimates[0], rollout_estimate(mdp, mu, 3, cfg_of(15, 4), root.derive(0)));
    EXPECT_EQ(ev.estimates[1], rollout_estimate(mdp, mu, 1, cfg_of(15, 4), root.derive(1)));
}

TEST(Anchors, NoiseStatsAgainstExactValue) {
    std::mt19937_64 gen(7);
    const Mdp mdp = test::random_mdp(gen, 5, 2, 0.6, 0.2);
    const Policy mu = test::random_policy(gen, mdp);
    const ValueVector j = exact_policy_value(mdp, mu);
    const std::vector<int> d = {0, 1, 2, 3, 4};
    const auto plain = evaluate_on_anchors(mdp, mu, d, cfg_of(40, 8), RandomStream(2));
    const auto ev = evaluate_on_anchors(mdp, mu, d, cfg_of(40, 8), RandomStream(2), &j);
    ASSERT_TRUE(ev.noise.has_value());
    EXPECT_EQ(plain.estimates, ev.estimates);
    double sup = 0.0;
    for (std::size_t p = 0; p < d.size(); ++p) {
        EXPECT_DOUBLE_EQ(ev.noise->mean[p], ev.estimates[p] - j(d[p]));
        EXPECT_GE(ev.noise->stddev[p], 0.0);
        sup = std::max(sup, std::abs(ev.estimates[p] - j(d[p])));
    }
    EXPECT_DOUBLE_EQ(ev.noise->sup_norm, sup);
    EXPECT_LE(ev.noise->sup_norm, 2.0 / (1.0 - 0.6));
}

TEST(Anchors, RejectsBadSets) {
    const Mdp mdp = generate_chain(3, 0.5);
    const RandomStream rng(0);
    EXPECT_THROW(evaluate_on_anchors(mdp, Policy(3, 0), {}, cfg_of(2, 1), rng), InvalidInput);
    EXPECT_THROW(evaluate_on_anchors(mdp, Policy(3, 0), {1, 1}, cfg_of(2, 1), rng), InvalidInput);
    EXPECT_THROW(evaluate_on_anchors(mdp, Policy(3, 0), {0, 3}, cfg_of(2, 1), rng), InvalidInput);
}

TEST(DefaultTruncation, Examples) {
    EXPECT_EQ(default_truncation(0.5, std::ldexp(1.0, -20)), 21);
    EXPECT_EQ(default_truncation(0.5, 1.0), 1);
    EXPECT_EQ(default_truncation(0.5, 100.0), 1);
}

TEST(DefaultTruncation, MatchesBruteForceScan) {
    for (double alpha : {0.1, 0.5, 0.9, 0.99})
        for (double tol : {1.0, 1e-3, 1e-6, 1e-9}) {
            int l = 1;
            while (std::pow(alpha, l) / (1.0 - alpha) > tol) ++l;
            EXPECT_EQ(default_truncation(alpha, tol), l) << alpha << " " << tol;
        }
}

TEST(DefaultTruncation, RejectsBadArguments) {
    EXPECT_THROW(default_truncation(1.0, 1e-3), InvalidInput);
    EXPECT_THROW(default_truncation(0.5, 0.0), InvalidInput);
}

TEST(RolloutProperties, UnbiasedUpToTruncation) {
    std::mt19937_64 gen(10);
    const Mdp mdp = test::random_mdp(gen, 5, 2, 0.8);
    const Policy mu = test::random_policy(gen, mdp);
    const ValueVector j = exact_policy_value(mdp, mu);
    const int l = 40;
    const int reps = 4000;
    const PolicySimulator sim(mdp, mu);
    const RandomStream root(2024);
    for (int i = 0; i < 5; ++i) {
        double sum = 0.0, sq = 0.0;
        for (int r = 0; r < reps; ++r) {
            RandomStream s = root.derive(static_cast<std::uint64_t>(i)).derive(static_cast<std::uint64_t>(r));
            const double x = sim.trajectory(i, l, s);
            sum += x;
            sq += x * x;
        }
        const double mean = sum / reps;
        const double sd = std::sqrt(std::max(0.0, (sq - reps * mean * mean) / (reps - 1)));
        EXPECT_LE(std::abs(mean - j(i)), std::pow(0.8, l) / 0.2 + 3.0 * sd / std::sqrt(reps) + 1e-12) << "state " << i;
    }
}

TEST(RolloutProperties, EstimatesStayInRange) {
    std::mt19937_64 gen(12);
    for (int t = 0; t < 30; ++t) {
        const double alpha = t % 2 ? 0.9 : 0.5;
        const Mdp mdp = test::random_mdp(gen, 6, 3, alpha, 0.25);
        const Policy mu = test::random_policy(gen, mdp);
        const ValueVector j = exact_policy_value(mdp, mu);
        const auto ev = evaluate_on_anchors(mdp, mu, {0, 1, 2, 3, 4, 5}, cfg_of(60, 1), RandomStream(t), &j);
        for (double e : ev.estimates) {
            EXPECT_GE(e, 0.0);
            EXPECT_LE(e, 1.0 / (1.0 - alpha));
        }
        EXPECT_LE(ev.noise->sup_norm, 2.0 / (1.0 - alpha));
    }
}

TEST(RandomStreams, DerivedStreamsAreReproducibleAndDistinct) {
    const RandomStream root(42);
    RandomStream a = root.derive(3), b = root.derive(3), c = root.derive(4);
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    RandomStream u(9);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
        EXPECT_LT(u.below(7), 7u);
    }
}
