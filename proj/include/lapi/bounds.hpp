#pragma once

#include "lapi/driver.hpp"

#include <optional>

namespace lapi {

/// Asymptotic sup-norm error bound for the least-squares variant:
///   delta2 / (1 - a) + a (1 + alpha)(delta2 + 1/(1 - alpha)) / ((1 - alpha)(1 - a)),  a = alpha^{H-1}.
/// Throws UnsupportedInput for H < 2.
double theorem1_bound(double delta2, double alpha, int h);

/// Bound for the gradient-descent variant:
///   (1 / (1 - a)) [delta2 + a (1 + alpha)(delta2 + 1/(1 - alpha)) / (1 - alpha)].
double theorem2_bound(double delta2, double alpha, int h);

/// sup over policy pairs of ||T_mu~ J^mu - J^mu||_inf is at most (1 + alpha)/(1 - alpha).
double corollary1_bound(double alpha);

/// sup over policy pairs of ||T_mu~ M J^mu - M J^mu||_inf is at most (1/(1 - alpha) + delta2)(1 + alpha).
double lemma2_bound(double delta2, double alpha);

inline constexpr double kBoundTolerance = 1e-9;

struct BoundReport {
    double delta2 = 0.0;
    bool delta2_exact = false;
    double alpha = 0.0;
    int h = 2;
    double thm1_bound = 0.0;
    double thm2_bound = 0.0;
    double empirical_tail_error = 0.0;
    double tail_min_gap = 0.0;   ///< min over the tail of min_i (V_k - J*)(i)
    double margin = 0.0;         ///< statistical slack added to each comparison
    bool thm1_satisfied = false;
    bool thm2_satisfied = false;
    bool liminf_satisfied = false;  ///< tail_min_gap >= -delta2 - margin
    /// True when delta2 is only a lower bound; the flags are then advisory.
    bool advisory() const noexcept { return !delta2_exact; }
};

/// Three standard errors of the tail-window sup errors: 3 * sd / sqrt(window length).
double default_margin(const RunRecord& record);

/// Compares the run's tail window against both theorem bounds. Throws InvalidInput if the
/// record has no oracle and UnsupportedInput if H < 2. `margin` defaults to default_margin().
BoundReport check_run(const RunRecord& record, double delta2, bool delta2_exact, double alpha, int h,
                      std::optional<double> margin = std::nullopt);

}  // namespace lapi
