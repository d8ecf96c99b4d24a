#include "orgsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "orgsim/errors.hpp"

namespace orgsim::stats {

double mean(std::span<const double> xs)
{
    if (xs.empty()) {
        return 0.0;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs)
{
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(xs.size() - 1);
}

WelchResult welch(std::span<const double> a, std::span<const double> b)
{
    if (a.size() < 2 || b.size() < 2) {
        throw InsufficientReplications("comparison needs at least 2 replications per side (got "
            + std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = variance(a) / na;
    const double vb = variance(b) / nb;

    WelchResult r;
    r.mean_diff = mean(a) - mean(b);
    const double se2 = va + vb;
    if (se2 == 0.0) {
        r.t = r.mean_diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
        r.df = na + nb - 2.0;
        r.ci95_low = r.ci95_high = r.mean_diff;
        return r;
    }
    const double se = std::sqrt(se2);
    r.t = r.mean_diff / se;
    r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    const boost::math::students_t dist(r.df);
    const double q = boost::math::quantile(dist, 0.975);
    r.ci95_low = r.mean_diff - q * se;
    r.ci95_high = r.mean_diff + q * se;
    return r;
}

MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b)
{
    MannWhitneyResult r;
    if (a.empty() || b.empty()) {
        return r;
    }
    struct Item {
        double value;
        bool from_a;
    };
    std::vector<Item> all;
    all.reserve(a.size() + b.size());
    for (double x : a) {
        all.push_back({x, true});
    }
    for (double x : b) {
        all.push_back({x, false});
    }
    std::sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.value < y.value; });

    const double n = static_cast<double>(all.size());
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) {
            ++j;
        }
        // Positions i..j-1 share the midrank.
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].from_a) {
                rank_sum_a += midrank;
            }
        }
        i = j;
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    r.u = rank_sum_a - na * (na + 1.0) / 2.0;
    const double mu = na * nb / 2.0;
    const double sigma2 = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (sigma2 <= 0.0) {
        r.z = 0.0;
        r.p_less = 0.5;
        return r;
    }
    r.z = (r.u - mu + 0.5) / std::sqrt(sigma2);
    r.p_less = 0.5 * std::erfc(-r.z / std::sqrt(2.0));
    return r;
}

} // namespace orgsim::stats
