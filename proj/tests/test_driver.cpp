#include "lapi/bounds.hpp"
#include "lapi/driver.hpp"
#include "lapi/errors.hpp"
#include "lapi/generators.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lapi;

namespace {

RunConfig base_config(int iterations, std::uint64_t seed = 0) {
    RunConfig cfg;
    cfg.iterations = iterations;
    cfg.rollout.truncation_len = 40;
    cfg.rollout.trajectories_per_state = 1;
    cfg.seed = seed;
    return cfg;
}

/// Deterministic transitions: each (i,u) moves to one successor.
Mdp random_deterministic_mdp(std::mt19937_64& gen, std::size_t n, std::size_t a, double alpha) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Eigen::MatrixXd> p(a, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(a));
    for (std::size_t u = 0; u < a; ++u)
        for (std::size_t i = 0; i < n; ++i) {
            p[u](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(gen() % n)) = 1.0;
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(u)) = unif(gen);
        }
    return Mdp(p, g, alpha);
}

Mdp zero_cost(const Mdp& m) {
    std::vector<Eigen::MatrixXd> p;
    for (std::size_t u = 0; u < m.num_actions(); ++u) p.push_back(m.transition(static_cast<int>(u)));
    return Mdp(p, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.num_states()), static_cast<Eigen::Index>(m.num_actions())),
               m.discount());
}

}  // namespace

TEST(Schedules, Harmonic) {
    const Schedule s = make_schedule("harmonic", {1.0, 1.0});
    EXPECT_EQ(s(0), 1.0);
    EXPECT_EQ(s(1), 0.5);
    EXPECT_DOUBLE_EQ(s(2), 1.0 / 3.0);
    EXPECT_TRUE(s.satisfies_step_size_conditions());
    EXPECT_EQ(make_schedule("harmonic", {2.0, 1.0})(0), 1.0);
    EXPECT_EQ(make_schedule("harmonic", {2.0, 1.0})(3), 0.5);
}

TEST(Schedules, ConstantIsFlagged) {
    const Schedule s = make_schedule("constant", {0.1});
    for (std::size_t k : {0u, 1u, 1000u}) EXPECT_EQ(s(k), 0.1);
    EXPECT_FALSE(s.satisfies_step_size_conditions());
}

TEST(Schedules, RejectsBadParameters) {
    EXPECT_THROW(make_schedule("harmonic", {0.0, 1.0}), InvalidInput);
    EXPECT_THROW(make_schedule("harmonic", {1.0, -1.0}), InvalidInput);
    EXPECT_THROW(make_schedule("harmonic", {1.0}), InvalidInput);
    EXPECT_THROW(make_schedule("constant", {0.0}), InvalidInput);
    EXPECT_THROW(make_schedule("cosine", {1.0}), InvalidInput);
}

TEST(EtaSchedules, Examples) {
    const auto lin = make_eta_schedule("linear", {1, 1});
    EXPECT_EQ(lin.schedule(0), 1);
    EXPECT_EQ(lin.schedule(5), 6);
    EXPECT_TRUE(lin.growing);
    EXPECT_FALSE(make_eta_schedule("constant", {3}).growing);
    EXPECT_EQ(make_eta_schedule("constant", {3}).schedule(9), 3);
    const auto lg = make_eta_schedule("log", {2});
    EXPECT_EQ(lg.schedule(0), 2);
    EXPECT_EQ(lg.schedule(6), 6);
    EXPECT_TRUE(lg.growing);
}

TEST(EtaSchedules, LogMatchesCeilLog2) {
    const auto lg = make_eta_schedule("log", {3}).schedule;
    for (std::size_t k = 0; k < 5000; ++k) {
        long c = 0;
        while ((1UL << c) < k + 2) ++c;
        ASSERT_EQ(lg(k), 3 * c) << k;
    }
}

TEST(EtaSchedules, RejectsBadParameters) {
    EXPECT_THROW(make_eta_schedule("linear", {0, 1}), InvalidInput);
    EXPECT_THROW(make_eta_schedule("log", {-2}), InvalidInput);
    EXPECT_THROW(make_eta_schedule("constant", {0}), InvalidInput);
    EXPECT_THROW(make_eta_schedule("linear", {1}), InvalidInput);
}

TEST(Driver, TailWindow) {
    EXPECT_EQ(tail_window_length(1), 1u);
    EXPECT_EQ(tail_window_length(4), 1u);
    EXPECT_EQ(tail_window_length(10), 2u);
    EXPECT_EQ(tail_window_length(11), 3u);
    EXPECT_EQ(tail_window_length(20000), 4000u);
}

TEST(Driver, ZeroCostStaysAtZero) {
    std::mt19937_64 gen(1);
    const Mdp mdp = zero_cost(test::random_mdp(gen, 5, 2, 0.8));
    const FeatureProjector fp(aggregation_features(5, 2), {0, 3});
    const ValueVector jstar = ValueVector::Zero(5);
    for (Algorithm alg : {Algorithm::least_squares, Algorithm::gradient_descent}) {
        RunConfig cfg = base_config(30);
        cfg.algorithm = alg;
        cfg.lookahead_h = 2;
        cfg.gd.beta = 0.5;
        const RunRecord rec = run_algorithm(mdp, fp, cfg, &jstar);
        for (const auto& it : rec.iterations) {
            EXPECT_EQ(sup_norm(it.value), 0.0);
            EXPECT_EQ(it.sup_error, 0.0);
        }
        const BoundReport rep = check_run(rec, 0.0, true, 0.8, 2);
        EXPECT_EQ(rep.empirical_tail_error, 0.0);
        EXPECT_TRUE(rep.thm1_satisfied && rep.thm2_satisfied && rep.liminf_satisfied);
    }
}

TEST(Driver, UnitStepTabularIsPolicyIteration) {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = random_deterministic_mdp(gen, 3, 2, 0.7);
        const FeatureProjector fp(identity_features(3), all_states(3));
        RunConfig cfg = base_config(8);
        cfg.gamma = Schedule::constant(1.0);
        cfg.allow_diagnostic_schedules = true;
        cfg.rollout.truncation_len = default_truncation(0.7, 1e-12);
        cfg.rollout.trajectories_per_state = 3;
        const RunRecord rec = run_algorithm_ls(mdp, fp, cfg);

        // oracle: exact policy iteration with the same greedy rule, from V_0 = 0
        ValueVector v = ValueVector::Zero(3);
        for (const auto& it : rec.iterations) {
            const Policy mu = bellman_optimality_apply(mdp, v).second;
            EXPECT_EQ(it.policy, mu) << "trial " << trial << " k " << it.k;
            v = exact_policy_value(mdp, mu);
            EXPECT_LE(sup_norm(it.value - v), 1e-10);
        }
        const ValueVector jstar = exact_policy_value(mdp, test::reference_policy_iteration(mdp));
        EXPECT_LE(sup_norm(exact_policy_value(mdp, rec.iterations.back().policy) - jstar), 1e-12);
    }
}

TEST(Driver, SeedDeterminism) {
    std::mt19937_64 gen(3);
    const Mdp mdp = test::random_mdp(gen, 6, 2, 0.8, 0.1);
    const FeatureProjector fp(aggregation_features(6, 3), {0, 2, 4, 5});
    RunConfig cfg = base_config(50, 9);
    cfg.lookahead_h = 3;
    const RunRecord a = run_algorithm_ls(mdp, fp, cfg);
    const RunRecord b = run_algorithm_ls(mdp, fp, cfg);
    cfg.seed = 10;
    const RunRecord c = run_algorithm_ls(mdp, fp, cfg);
    ASSERT_EQ(a.iterations.size(), b.iterations.size());
    for (std::size_t k = 0; k < a.iterations.size(); ++k) {
        EXPECT_EQ(a.iterations[k].estimates, b.iterations[k].estimates);
        EXPECT_EQ(a.iterations[k].value, b.iterations[k].value);
        EXPECT_EQ(a.iterations[k].policy, b.iterations[k].policy);
    }
    EXPECT_NE(a.final_value, c.final_value);
}

TEST(Driver, UpdateIdentityHoldsExactly) {
    std::mt19937_64 gen(4);
    const Mdp mdp = test::random_mdp(gen, 7, 3, 0.9, 0.05);
    const FeatureProjector fp(aggregation_features(7, 3), {0, 1, 3, 6});
    for (Algorithm alg : {Algorithm::least_squares, Algorithm::gradient_descent}) {
        RunConfig cfg = base_config(60, 2);
        cfg.algorithm = alg;
        cfg.lookahead_h = 2;
        cfg.gd.beta = 0.4;
        const RunRecord rec = run_algorithm(mdp, fp, cfg);
        ValueVector prev = rec.v0;
        for (const auto& it : rec.iterations) {
            EXPECT_EQ(it.fitted, fp.phi() * it.theta);
            EXPECT_EQ(it.value, ((1.0 - it.gamma) * prev + it.gamma * fp.phi() * it.theta).eval());
            if (alg == Algorithm::gradient_descent) EXPECT_EQ(it.eta, static_cast<long>(1 + it.k));
            prev = it.value;
        }
        EXPECT_EQ(rec.final_value, prev);
    }
}

TEST(Driver, PolicyIsLookaheadOfPreviousValue) {
    std::mt19937_64 gen(5);
    const Mdp mdp = test::random_mdp(gen, 5, 3, 0.6);
    const FeatureProjector fp(identity_features(5), all_states(5));
    RunConfig cfg = base_config(20);
    cfg.lookahead_h = 4;
    const RunRecord rec = run_algorithm_ls(mdp, fp, cfg);
    ValueVector prev = rec.v0;
    for (const auto& it : rec.iterations) {
        EXPECT_EQ(it.policy, lookahead_policy(mdp, prev, 4));
        EXPECT_DOUBLE_EQ(it.bellman_residual, sup_norm(bellman_optimality_apply(mdp, prev).first - prev));
        prev = it.value;
    }
}

TEST(Driver, UnitStepScalarGradientMatchesLeastSquaresBitForBit) {
    std::mt19937_64 gen(6);
    const Mdp mdp = test::random_mdp(gen, 4, 2, 0.8, 0.1);
    const FeatureProjector fp(Eigen::MatrixXd::Ones(4, 1), {2});
    RunConfig ls = base_config(100, 5);
    ls.lookahead_h = 2;
    RunConfig gd = ls;
    gd.algorithm = Algorithm::gradient_descent;
    gd.gd.beta = 1.0;
    const RunRecord a = run_algorithm_ls(mdp, fp, ls);
    const RunRecord b = run_algorithm_gd(mdp, fp, gd);
    for (std::size_t k = 0; k < a.iterations.size(); ++k) {
        EXPECT_EQ(a.iterations[k].estimates, b.iterations[k].estimates);
        EXPECT_EQ(a.iterations[k].value, b.iterations[k].value);
    }
}

TEST(Driver, LongInnerLoopTracksLeastSquares) {
    std::mt19937_64 gen(7);
    const Mdp mdp = test::random_mdp(gen, 6, 2, 0.8);
    const FeatureProjector fp(aggregation_features(6, 2), {0, 1, 3, 4});
    RunConfig ls = base_config(40, 8);
    ls.lookahead_h = 2;
    RunConfig gd = ls;
    gd.algorithm = Algorithm::gradient_descent;
    gd.gd.beta = 0.3;
    gd.gd.eta = EtaSchedule::constant(2000);
    gd.allow_diagnostic_schedules = true;
    const RunRecord a = run_algorithm_ls(mdp, fp, ls);
    const RunRecord b = run_algorithm_gd(mdp, fp, gd);
    for (std::size_t k = 0; k < a.iterations.size(); ++k)
        EXPECT_LE(sup_norm(a.iterations[k].value - b.iterations[k].value), 1e-9);
}

TEST(Driver, GradientFitsApproachLeastSquaresGeometrically) {
    std::mt19937_64 gen(8);
    const Mdp mdp = test::random_mdp(gen, 6, 2, 0.7);
    const FeatureProjector fp(aggregation_features(6, 3), {0, 2, 3, 5});
    const double beta = 0.25;
    const double ap = alpha_prime(fp, beta);
    RunConfig ls = base_config(1, 4);
    const RunRecord ref = run_algorithm_ls(mdp, fp, ls);
    double prev_err = std::numeric_limits<double>::infinity();
    for (long eta : {1L, 2L, 4L, 8L, 16L}) {
        RunConfig gd = ls;
        gd.algorithm = Algorithm::gradient_descent;
        gd.gd.beta = beta;
        gd.gd.eta = EtaSchedule::constant(eta);
        gd.allow_diagnostic_schedules = true;
        const RunRecord r = run_algorithm_gd(mdp, fp, gd);
        const double err = sup_norm(r.iterations[0].fitted - ref.iterations[0].fitted);
        EXPECT_LE(err, std::pow(ap, static_cast<double>(eta)) * sup_norm(ref.iterations[0].fitted) * (1 + 1e-9) + 1e-15);
        EXPECT_LE(err, prev_err);
        prev_err = err;
    }
}

TEST(Driver, DiagnosticsObeyLemma2AndBoundedness) {
    std::mt19937_64 gen(9);
    const Mdp mdp = test::random_mdp(gen, 6, 2, 0.7, 0.1);
    const FeatureProjector fp(aggregation_features(6, 2), {0, 3});
    const double delta2 = delta2_estimate(mdp, fp, Delta2Mode::enumerate_all()).delta2;
    RunConfig cfg = base_config(200, 3);
    cfg.lookahead_h = 2;
    cfg.diagnostics = true;
    const RunRecord rec = run_algorithm_ls(mdp, fp, cfg);
    for (const auto& it : rec.iterations) {
        ASSERT_TRUE(it.noise.has_value());
        EXPECT_LE(it.lemma2_lhs, lemma2_bound(delta2, 0.7) + 1e-12);
        EXPECT_LE(it.noise->sup_norm, 2.0 / 0.3);
    }
    EXPECT_LE(rec.summary.max_abs_value, 2.0 / 0.3 + 2.0 * delta2);
    EXPECT_FALSE(std::isnan(rec.summary.max_lemma2_lhs));

    cfg.diagnostics = false;
    const RunRecord plain = run_algorithm_ls(mdp, fp, cfg);
    EXPECT_TRUE(std::isnan(plain.iterations[0].lemma2_lhs));
    EXPECT_FALSE(plain.iterations[0].noise.has_value());
    EXPECT_EQ(plain.final_value, rec.final_value);  // diagnostics never change the trajectory
}

TEST(Driver, OracleFieldsAreNaNWithoutOracle) {
    const Mdp mdp = generate_chain(3, 0.5);
    const FeatureProjector fp(identity_features(3), all_states(3));
    const RunRecord rec = run_algorithm_ls(mdp, fp, base_config(5));
    EXPECT_FALSE(rec.has_oracle);
    EXPECT_TRUE(std::isnan(rec.iterations[0].sup_error));
    EXPECT_TRUE(std::isnan(rec.summary.tail_max_error));
    EXPECT_THROW(check_run(rec, 0.0, true, 0.5, 2), InvalidInput);
}

TEST(Driver, SupErrorRefersToIncomingValue) {
    const Mdp mdp = generate_chain(3, 0.5);
    const ValueVector jstar = chain_value(3, 0.5);
    const FeatureProjector fp(identity_features(3), all_states(3));
    const RunRecord rec = run_algorithm_ls(mdp, fp, base_config(5), &jstar);
    EXPECT_EQ(rec.iterations[0].sup_error, sup_norm(jstar));
    EXPECT_EQ(rec.iterations[1].sup_error, sup_norm(rec.iterations[0].value - jstar));
    EXPECT_EQ(rec.summary.final_sup_error, sup_norm(rec.final_value - jstar));
    EXPECT_EQ(rec.summary.tail_start, 4u);
}

TEST(Driver, AssumptionChecksRunBeforeIterationZero) {
    const Mdp mdp = generate_chain(3, 0.5);
    const FeatureProjector fp(identity_features(3), all_states(3));

    RunConfig cfg = base_config(5);
    cfg.gamma = Schedule::constant(0.5);
    try {
        run_algorithm_ls(mdp, fp, cfg);
        FAIL();
    } catch (const AssumptionViolation& e) {
        EXPECT_EQ(e.assumption(), 4);
    }

    RunConfig gd = base_config(5);
    gd.algorithm = Algorithm::gradient_descent;
    gd.gd.beta = 2.5;
    try {
        run_algorithm_gd(mdp, fp, gd);
        FAIL();
    } catch (const AssumptionViolation& e) {
        EXPECT_EQ(e.assumption(), 5);
    }

    gd.gd.beta = 0.5;
    gd.gd.eta = EtaSchedule::constant(3);
    try {
        run_algorithm_gd(mdp, fp, gd);
        FAIL();
    } catch (const AssumptionViolation& e) {
        EXPECT_EQ(e.assumption(), 7);
    }
}

TEST(Driver, RejectsMalformedConfigurations) {
    const Mdp mdp = generate_chain(3, 0.5);
    const FeatureProjector fp(identity_features(3), all_states(3));
    RunConfig cfg = base_config(5);
    cfg.lookahead_h = 0;
    EXPECT_THROW(run_algorithm_ls(mdp, fp, cfg), InvalidInput);
    cfg = base_config(0);
    EXPECT_THROW(run_algorithm_ls(mdp, fp, cfg), InvalidInput);
    cfg = base_config(5);
    cfg.anchors = {0, 1};
    EXPECT_THROW(run_algorithm_ls(mdp, fp, cfg), InvalidInput);
    cfg = base_config(5);
    cfg.v0 = ValueVector::Zero(2);
    EXPECT_THROW(run_algorithm_ls(mdp, fp, cfg), InvalidInput);
    cfg = base_config(5);
    EXPECT_THROW(run_algorithm_gd(mdp, fp, cfg), InvalidInput);
    EXPECT_THROW(run_algorithm_ls(generate_chain(4, 0.5), fp, cfg), InvalidInput);
}

TEST(Driver, PolicyHashIsFnv1a) {
    // FNV-1a of no bytes is the offset basis
    EXPECT_EQ(policy_hash(Policy()), 0xcbf29ce484222325ULL);
    // one action 0 -> four zero bytes
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int b = 0; b < 4; ++b) h *= 0x100000001b3ULL;
    EXPECT_EQ(policy_hash(Policy(1, 0)), h);
    EXPECT_NE(policy_hash(Policy(std::vector<int>{0, 1})), policy_hash(Policy(std::vector<int>{1, 0})));
}
