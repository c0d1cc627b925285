#include "lapi/bounds.hpp"

#include "lapi/errors.hpp"

#include <cmath>
#include <string>

namespace lapi {

namespace {

void check_args(double delta2, double alpha, int h) {
    if (!(delta2 >= 0.0)) throw InvalidInput("delta2 must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0,1)");
    if (h < 2)
        throw UnsupportedInput("lookahead bound needs H >= 2 (1 - alpha^{H-1} vanishes at H = 1), got H = " +
                               std::to_string(h));
}

}  // namespace

double theorem1_bound(double delta2, double alpha, int h) {
    check_args(delta2, alpha, h);
    const double a = std::pow(alpha, h - 1);
    return delta2 / (1.0 - a) +
           a * ((1.0 + alpha) * (delta2 + 1.0 / (1.0 - alpha))) / ((1.0 - alpha) * (1.0 - a));
}

double theorem2_bound(double delta2, double alpha, int h) {
    check_args(delta2, alpha, h);
    const double a = std::pow(alpha, h - 1);
    return (1.0 / (1.0 - a)) * (delta2 + a * ((1.0 + alpha) * (delta2 + 1.0 / (1.0 - alpha))) / (1.0 - alpha));
}

double corollary1_bound(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0,1)");
    return (1.0 + alpha) / (1.0 - alpha);
}

double lemma2_bound(double delta2, double alpha) {
    if (!(delta2 >= 0.0)) throw InvalidInput("delta2 must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0,1)");
    return (1.0 / (1.0 - alpha) + delta2) * (1.0 + alpha);
}

double default_margin(const RunRecord& record) {
    const auto& its = record.iterations;
    const std::size_t start = record.summary.tail_start;
    const std::size_t n = its.size() - start;
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (std::size_t k = start; k < its.size(); ++k) mean += its[k].sup_error;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t k = start; k < its.size(); ++k) ss += (its[k].sup_error - mean) * (its[k].sup_error - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return 3.0 * sd / std::sqrt(static_cast<double>(n));
}

BoundReport check_run(const RunRecord& record, double delta2, bool delta2_exact, double alpha, int h,
                      std::optional<double> margin) {
    if (!record.has_oracle) throw InvalidInput("check_run: the run was recorded without J*");
    if (record.iterations.empty()) throw InvalidInput("check_run: empty run record");
    BoundReport rep;
    rep.delta2 = delta2;
    rep.delta2_exact = delta2_exact;
    rep.alpha = alpha;
    rep.h = h;
    rep.thm1_bound = theorem1_bound(delta2, alpha, h);
    rep.thm2_bound = theorem2_bound(delta2, alpha, h);
    rep.empirical_tail_error = record.summary.tail_max_error;
    rep.tail_min_gap = record.summary.tail_min_gap;
    rep.margin = margin ? *margin : default_margin(record);
    rep.thm1_satisfied = rep.empirical_tail_error <= rep.thm1_bound + kBoundTolerance + rep.margin;
    rep.thm2_satisfied = rep.empirical_tail_error <= rep.thm2_bound + kBoundTolerance + rep.margin;
    rep.liminf_satisfied = rep.tail_min_gap >= -delta2 - kBoundTolerance - rep.margin;
    return rep;
}

}  // namespace lapi
