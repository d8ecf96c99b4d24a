#pragma once

#include <span>

namespace orgsim::stats {

double mean(std::span<const double> xs);

/// Sample variance (n - 1 denominator); 0 for fewer than two values.
double variance(std::span<const double> xs);

struct WelchResult {
    double mean_diff = 0.0;
    double t = 0.0;
    double df = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

/// Welch's unequal-variance t for mean(a) - mean(b), Welch-Satterthwaite
/// degrees of freedom and a Student-t 95% interval. When both samples have
/// zero variance the interval collapses to the difference and t is 0 for a
/// zero difference (signed infinity otherwise). Throws
/// InsufficientReplications when either side has fewer than two values.
WelchResult welch(std::span<const double> a, std::span<const double> b);

struct MannWhitneyResult {
    double u = 0.0;
    double z = 0.0;
    /// One-sided p-value for "a tends to be smaller than b".
    double p_less = 1.0;
};

/// Mann-Whitney U with midranks for ties, tie-corrected normal
/// approximation and continuity correction. U counts pairs with a > b.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b);

} // namespace orgsim::stats
