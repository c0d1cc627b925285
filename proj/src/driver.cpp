#include "lapi/driver.hpp"

#include "lapi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace lapi {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_num(double x) {
    std::string s = std::to_string(x);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}
}  // namespace

Schedule Schedule::harmonic(double c, double k0) {
    if (!(c > 0.0) || !(k0 > 0.0) || !std::isfinite(c) || !std::isfinite(k0))
        throw InvalidInput("harmonic schedule needs c > 0 and k0 > 0");
    return {Kind::harmonic, c, k0};
}

Schedule Schedule::constant(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidInput("constant step size must lie in (0,1]");
    return {Kind::constant, gamma, 0.0};
}

double Schedule::operator()(std::size_t k) const noexcept {
    if (kind_ == Kind::constant) return a_;
    return std::min(1.0, a_ / (static_cast<double>(k) + b_));
}

std::string Schedule::describe() const {
    if (kind_ == Kind::constant) return "constant(" + fmt_num(a_) + ")";
    return "harmonic(" + fmt_num(a_) + "," + fmt_num(b_) + ")";
}

Schedule make_schedule(const std::string& kind, const std::vector<double>& params) {
    if (kind == "harmonic") {
        if (params.size() != 2) throw InvalidInput("harmonic schedule takes (c, k0)");
        return Schedule::harmonic(params[0], params[1]);
    }
    if (kind == "constant") {
        if (params.size() != 1) throw InvalidInput("constant schedule takes (gamma)");
        return Schedule::constant(params[0]);
    }
    throw InvalidInput("unknown step-size schedule '" + kind + "'");
}

EtaSchedule EtaSchedule::linear(long a, long b) {
    if (a <= 0 || b <= 0) throw InvalidInput("linear eta schedule needs a > 0 and b > 0");
    return {Kind::linear, a, b};
}

EtaSchedule EtaSchedule::log(long a) {
    if (a <= 0) throw InvalidInput("log eta schedule needs a > 0");
    return {Kind::log, a, 0};
}

EtaSchedule EtaSchedule::constant(long c) {
    if (c <= 0) throw InvalidInput("constant eta schedule needs c > 0");
    return {Kind::constant, c, 0};
}

long EtaSchedule::operator()(std::size_t k) const noexcept {
    switch (kind_) {
        case Kind::linear:
            return a_ + b_ * static_cast<long>(k);
        case Kind::log: {
            // ceil(log2(k + 2)) without floating point: bit width of (k + 1)
            std::size_t x = k + 1;
            long bits = 0;
            while (x) {
                ++bits;
                x >>= 1;
            }
            return a_ * bits;
        }
        case Kind::constant:
            break;
    }
    return a_;
}

std::string EtaSchedule::describe() const {
    switch (kind_) {
        case Kind::linear:
            return "linear(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
        case Kind::log:
            return "log(" + std::to_string(a_) + ")";
        case Kind::constant:
            break;
    }
    return "constant(" + std::to_string(a_) + ")";
}

EtaScheduleResult make_eta_schedule(const std::string& kind, const std::vector<long>& params) {
    auto build = [&]() -> EtaSchedule {
        if (kind == "linear") {
            if (params.size() != 2) throw InvalidInput("linear eta schedule takes (a, b)");
            return EtaSchedule::linear(params[0], params[1]);
        }
        if (kind == "log") {
            if (params.size() != 1) throw InvalidInput("log eta schedule takes (a)");
            return EtaSchedule::log(params[0]);
        }
        if (kind == "constant") {
            if (params.size() != 1) throw InvalidInput("constant eta schedule takes (c)");
            return EtaSchedule::constant(params[0]);
        }
        throw InvalidInput("unknown eta schedule '" + kind + "'");
    };
    EtaSchedule s = build();
    return {s, s.growing()};
}

std::string to_string(Algorithm a) {
    return a == Algorithm::least_squares ? "least_squares" : "gradient_descent";
}

std::size_t tail_window_length(std::size_t iterations) {
    return std::max<std::size_t>(1, (iterations * 2 + 9) / 10);
}

std::uint64_t policy_hash(const Policy& mu) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int a : mu.actions) {
        auto x = static_cast<std::uint32_t>(a);
        for (int b = 0; b < 4; ++b) {
            h ^= (x >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

namespace {

using FitStep = std::function<LinearFit(std::size_t k, const std::vector<double>& targets, long& eta)>;

void check_common(const Mdp& mdp, const FeatureProjector& fp, const RunConfig& cfg,
                  const ValueVector* oracle) {
    if (fp.num_states() != mdp.num_states())
        throw InvalidInput("features cover " + std::to_string(fp.num_states()) +
                           " states but the MDP has " + std::to_string(mdp.num_states()));
    if (cfg.lookahead_h < 1) throw InvalidInput("lookahead H must be >= 1");
    if (cfg.iterations < 1) throw InvalidInput("iteration count K must be >= 1");
    cfg.rollout.validate();
    if (!cfg.anchors.empty() && cfg.anchors != fp.anchors())
        throw InvalidInput("run anchors differ from the anchors the projector was built on");
    if (cfg.v0) mdp.check_vector(*cfg.v0);
    if (oracle) mdp.check_vector(*oracle);
    if (!cfg.gamma.satisfies_step_size_conditions() && !cfg.allow_diagnostic_schedules)
        throw AssumptionViolation(4, "step-size schedule " + cfg.gamma.describe() +
                                         " is not square-summable; mark the run diagnostics-only to allow it");
}

RunRecord run_loop(const Mdp& mdp, const FeatureProjector& fp, const RunConfig& cfg,
                   const ValueVector* oracle, const FitStep& fit_step) {
    const std::size_t n = mdp.num_states();
    const auto iterations = static_cast<std::size_t>(cfg.iterations);

    RunRecord rec;
    rec.algorithm = cfg.algorithm;
    rec.lookahead_h = cfg.lookahead_h;
    rec.alpha = mdp.discount();
    rec.seed = cfg.seed;
    rec.has_oracle = oracle != nullptr;
    rec.v0 = cfg.v0 ? *cfg.v0 : ValueVector::Zero(static_cast<Eigen::Index>(n));
    rec.iterations.reserve(iterations);
    rec.summary.step_sizes_ok = cfg.gamma.satisfies_step_size_conditions();

    const RandomStream root(cfg.seed);
    ValueVector v = rec.v0;
    double max_abs = sup_norm(v);

    for (std::size_t k = 0; k < iterations; ++k) {
        IterationRecord it;
        it.k = k;
        it.gamma = cfg.gamma(k);

        auto [tv, greedy_v] = bellman_optimality_apply(mdp, v);
        it.bellman_residual = sup_norm(tv - v);
        if (oracle) {
            const ValueVector diff = v - *oracle;
            it.sup_error = sup_norm(diff);
            it.min_gap = diff.minCoeff();
        } else {
            it.sup_error = kNaN;
            it.min_gap = kNaN;
        }

        // mu_{k+1}: greedy policy of T^{H-1} V_k; T V_k is already in hand
        it.policy = cfg.lookahead_h == 1 ? std::move(greedy_v) : lookahead_policy(mdp, tv, cfg.lookahead_h - 1);

        ValueVector exact_j;
        if (cfg.diagnostics) exact_j = exact_policy_value(mdp, it.policy);
        AnchorEvaluation eval = evaluate_on_anchors(mdp, it.policy, fp.anchors(), cfg.rollout,
                                                    root.derive(k), cfg.diagnostics ? &exact_j : nullptr);
        it.estimates = std::move(eval.estimates);
        it.noise = std::move(eval.noise);

        LinearFit fit = fit_step(k, it.estimates, it.eta);
        it.theta = std::move(fit.theta);
        it.fitted = std::move(fit.fitted);

        it.value = (1.0 - it.gamma) * v + it.gamma * it.fitted;

        if (cfg.diagnostics) {
            const ValueVector mj = fp.project(exact_j);
            const Policy greedy_next = bellman_optimality_apply(mdp, it.value).second;
            it.lemma2_lhs = sup_norm(bellman_policy_apply(mdp, greedy_next, mj) - mj);
            rec.summary.max_lemma2_lhs = std::max(rec.summary.max_lemma2_lhs, it.lemma2_lhs);
            rec.summary.max_noise_sup = std::max(rec.summary.max_noise_sup, it.noise->sup_norm);
        } else {
            it.lemma2_lhs = kNaN;
        }

        v = it.value;
        max_abs = std::max(max_abs, sup_norm(v));
        rec.iterations.push_back(std::move(it));
    }

    rec.final_value = v;
    auto& s = rec.summary;
    s.max_abs_value = max_abs;
    s.tail_start = iterations - tail_window_length(iterations);
    if (oracle) {
        s.final_sup_error = sup_norm(v - *oracle);
        s.tail_max_error = 0.0;
        s.tail_min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t k = s.tail_start; k < iterations; ++k) {
            s.tail_max_error = std::max(s.tail_max_error, rec.iterations[k].sup_error);
            s.tail_min_gap = std::min(s.tail_min_gap, rec.iterations[k].min_gap);
        }
    } else {
        s.final_sup_error = s.tail_max_error = s.tail_min_gap = kNaN;
    }
    if (!cfg.diagnostics) s.max_noise_sup = s.max_lemma2_lhs = kNaN;
    return rec;
}

}  // namespace

RunRecord run_algorithm_ls(const Mdp& mdp, const FeatureProjector& fp, const RunConfig& cfg,
                           const ValueVector* oracle) {
    if (cfg.algorithm != Algorithm::least_squares)
        throw InvalidInput("run_algorithm_ls called with a gradient_descent configuration");
    check_common(mdp, fp, cfg, oracle);
    RunRecord rec = run_loop(mdp, fp, cfg, oracle, [&](std::size_t, const std::vector<double>& targets, long& eta) {
        eta = 0;
        return least_squares_fit(fp, targets);
    });
    rec.summary.eta_growing = false;
    rec.summary.alpha_prime = kNaN;
    return rec;
}

RunRecord run_algorithm_gd(const Mdp& mdp, const FeatureProjector& fp, const RunConfig& cfg,
                           const ValueVector* oracle) {
    if (cfg.algorithm != Algorithm::gradient_descent)
        throw InvalidInput("run_algorithm_gd called with a least_squares configuration");
    check_common(mdp, fp, cfg, oracle);
    if (!(cfg.gd.beta > 0.0)) throw InvalidInput("gradient step size beta must be positive");
    const double ap = alpha_prime(fp, cfg.gd.beta);
    if (!(ap < 1.0))
        throw AssumptionViolation(5, "||I - beta Phi_D^T Phi_D||_2 = " + std::to_string(ap) +
                                         " >= 1 for beta = " + std::to_string(cfg.gd.beta));
    if (!cfg.gd.eta.growing() && !cfg.allow_diagnostic_schedules)
        throw AssumptionViolation(7, "inner step schedule " + cfg.gd.eta.describe() +
                                         " does not grow without bound; mark the run diagnostics-only to allow it");
    RunRecord rec = run_loop(mdp, fp, cfg, oracle, [&](std::size_t k, const std::vector<double>& targets, long& eta) {
        eta = cfg.gd.eta(k);
        return gd_inner_loop(fp, targets, cfg.gd.beta, static_cast<int>(eta));
    });
    rec.summary.eta_growing = cfg.gd.eta.growing();
    rec.summary.alpha_prime = ap;
    return rec;
}

RunRecord run_algorithm(const Mdp& mdp, const FeatureProjector& fp, const RunConfig& cfg,
                        const ValueVector* oracle) {
    return cfg.algorithm == Algorithm::least_squares ? run_algorithm_ls(mdp, fp, cfg, oracle)
                                                     : run_algorithm_gd(mdp, fp, cfg, oracle);
}

}  // namespace lapi
