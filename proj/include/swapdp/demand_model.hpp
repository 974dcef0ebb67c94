#pragma once

#include <array>
#include <vector>

#include "swapdp/common.hpp"
#include "swapdp/rng.hpp"

namespace swapdp {

/// Smallest d_max with P(Poisson(lambda) > d_max) < eps; eps must be in (0,1).
int truncation_bound(double lambda, double eps);

/**
 * Poisson demand for one class and epoch, truncated at d_max and renormalized
 * so the cached pmf sums to exactly 1.
 *
 * Solver and simulator share this truncated support: closed-form transition
 * probabilities, enumeration checks, and inverse-CDF sampling all see the same
 * distribution, so they agree to floating-point rounding rather than to the
 * truncation tolerance.
 */
class EpochDemandDistribution {
public:
    static EpochDemandDistribution poisson(double lambda, double trunc_eps = 1e-9);

    double lambda() const { return lambda_; }
    int d_max() const { return static_cast<int>(pmf_.size()) - 1; }

    /// P(D = x); x must lie in [0, d_max].
    double pmf(int x) const {
        check_range(x);
        return pmf_[x];
    }

    /// P(D >= x); x must lie in [0, d_max]. tail(0) == 1 by construction.
    double tail(int x) const {
        check_range(x);
        return tail_[x];
    }

    double pmf_or_zero(int x) const {
        return (x >= 0 && x <= d_max()) ? pmf_[x] : 0.0;
    }
    double tail_or_zero(int x) const {
        if (x <= 0) return 1.0;
        return x <= d_max() ? tail_[x] : 0.0;
    }

    /// Inverse-CDF draw from the truncated support.
    int sample(Rng& rng) const;

private:
    void check_range(int x) const;

    double lambda_ = 0.0;
    std::vector<double> pmf_;
    std::vector<double> tail_;
};

/**
 * Per-class, per-epoch demand distributions for one day of operations.
 *
 * Rates factor as lambda[c][t] = daily_flights[c] * arrival_shape[t], with the
 * shape weights summing to 1, so each class's rates sum back to its daily
 * flight total. Distributions are immutable after construction; sampling takes
 * an explicit Rng so there is no hidden state.
 */
struct DemandSchedule {
    int horizon = 2;                          // N; decision epochs are 1..N-1
    std::array<double, 2> daily_flights{};    // per-class flights per day
    std::vector<double> arrival_shape;        // N-1 weights, sum 1
    std::array<std::vector<EpochDemandDistribution>, 2> dists;  // [class-1][t-1]

    /// demand_class is 1 or 2; t in 1..N-1.
    const EpochDemandDistribution& dist(int demand_class, int t) const;

    int sample(int demand_class, int t, Rng& rng) const {
        return dist(demand_class, t).sample(rng);
    }

    double rate(int demand_class, int t) const { return dist(demand_class, t).lambda(); }
};

/**
 * Default within-day arrival profile: a piecewise-linear curve over epoch start
 * times that bottoms out at 06:00, peaks at noon, and decays overnight;
 * normalized to sum 1. Stands in for hospital arrival-pattern fits when no
 * shape is configured.
 */
std::vector<double> default_arrival_shape(int n_epochs, int epoch_minutes);

/// Schedule with rates daily_flights[c] * shape[t-1].
DemandSchedule make_schedule(double daily_class1, double daily_class2,
                             std::vector<double> arrival_shape, double trunc_eps);

/// Schedule from explicit per-epoch rates (both vectors sized N-1).
DemandSchedule make_schedule_from_rates(const std::vector<double>& rates_class1,
                                        const std::vector<double>& rates_class2,
                                        double trunc_eps);

}  // namespace swapdp
