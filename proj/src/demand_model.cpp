#include "swapdp/demand_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swapdp {

int truncation_bound(double lambda, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw validation_error("truncation eps must be in (0,1)");
    if (lambda < 0.0) throw validation_error("Poisson rate must be >= 0");
    if (lambda == 0.0) return 0;

    // Walk the pmf recurrence until the remaining tail drops below eps.
    double p = std::exp(-lambda);
    double cum = p;
    int x = 0;
    while (1.0 - cum >= eps) {
        ++x;
        p *= lambda / x;
        cum += p;
        if (x > 100000000) throw std::logic_error("truncation_bound failed to converge");
    }
    return x;
}

EpochDemandDistribution EpochDemandDistribution::poisson(double lambda, double trunc_eps) {
    const int d_max = truncation_bound(lambda, trunc_eps);

    EpochDemandDistribution d;
    d.lambda_ = lambda;
    d.pmf_.resize(d_max + 1);
    if (lambda == 0.0) {
        d.pmf_[0] = 1.0;
    } else {
        // Log-space evaluation keeps large x / large lambda terms stable.
        KahanSum mass;
        const double log_lambda = std::log(lambda);
        for (int x = 0; x <= d_max; ++x) {
            d.pmf_[x] = std::exp(-lambda + x * log_lambda - std::lgamma(x + 1.0));
            mass.add(d.pmf_[x]);
        }
        const double z = mass.value();
        for (double& p : d.pmf_) p /= z;
    }

    // Suffix sums give tails consistent with the pmf to rounding error.
    d.tail_.assign(d_max + 1, 0.0);
    double acc = 0.0;
    for (int x = d_max; x >= 0; --x) {
        acc += d.pmf_[x];
        d.tail_[x] = acc;
    }
    return d;
}

int EpochDemandDistribution::sample(Rng& rng) const {
    const double u = rng.next_double();
    // Find the smallest x with CDF(x) > u, scanning the short cached support.
    double cum = 0.0;
    const int top = d_max();
    for (int x = 0; x < top; ++x) {
        cum += pmf_[x];
        if (u < cum) return x;
    }
    return top;
}

void EpochDemandDistribution::check_range(int x) const {
    if (x < 0 || x > d_max())
        throw validation_error("demand value " + std::to_string(x) +
                               " outside truncated support [0," + std::to_string(d_max()) + "]");
}

const EpochDemandDistribution& DemandSchedule::dist(int demand_class, int t) const {
    if (demand_class < 1 || demand_class > 2)
        throw validation_error("demand class must be 1 or 2");
    if (t < 1 || t >= horizon)
        throw validation_error("decision epoch " + std::to_string(t) + " outside 1.." +
                               std::to_string(horizon - 1));
    return dists[demand_class - 1][t - 1];
}

std::vector<double> default_arrival_shape(int n_epochs, int epoch_minutes) {
    if (n_epochs < 1) throw validation_error("arrival shape needs at least one epoch");
    std::vector<double> w(n_epochs);
    double total = 0.0;
    for (int t = 0; t < n_epochs; ++t) {
        const double hour = (t * epoch_minutes) / 60.0;
        // Hours since 06:00, wrapped to [0, 24): ramp up to the noon peak in the
        // first 6 hours, then ramp down over the remaining 18.
        const double x = std::fmod(hour - 6.0 + 24.0, 24.0);
        w[t] = (x <= 6.0) ? 0.2 + 0.8 * (x / 6.0) : 0.2 + 0.8 * (1.0 - (x - 6.0) / 18.0);
        total += w[t];
    }
    for (double& v : w) v /= total;
    return w;
}

namespace {

void validate_shape(const std::vector<double>& shape) {
    double sum = 0.0;
    for (double v : shape) {
        if (v < 0.0) throw validation_error("arrival shape weights must be >= 0");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw validation_error("arrival shape weights must sum to 1 (got " + format_double(sum) +
                               ")");
}

}  // namespace

DemandSchedule make_schedule(double daily_class1, double daily_class2,
                             std::vector<double> arrival_shape, double trunc_eps) {
    if (daily_class1 < 0 || daily_class2 < 0)
        throw validation_error("daily flight totals must be >= 0");
    validate_shape(arrival_shape);
    // Remove the residual rounding of user-provided weights so per-epoch rates
    // add back to the daily totals exactly.
    double sum = 0.0;
    for (double v : arrival_shape) sum += v;
    for (double& v : arrival_shape) v /= sum;

    DemandSchedule s;
    s.horizon = static_cast<int>(arrival_shape.size()) + 1;
    s.daily_flights = {daily_class1, daily_class2};
    s.arrival_shape = arrival_shape;
    for (int c = 0; c < 2; ++c) {
        s.dists[c].reserve(arrival_shape.size());
        for (double w : arrival_shape)
            s.dists[c].push_back(
                EpochDemandDistribution::poisson(s.daily_flights[c] * w, trunc_eps));
    }
    return s;
}

DemandSchedule make_schedule_from_rates(const std::vector<double>& rates_class1,
                                        const std::vector<double>& rates_class2,
                                        double trunc_eps) {
    if (rates_class1.size() != rates_class2.size() || rates_class1.empty())
        throw validation_error("per-class rate vectors must be nonempty and equal length");

    DemandSchedule s;
    s.horizon = static_cast<int>(rates_class1.size()) + 1;
    const std::array<const std::vector<double>*, 2> rates = {&rates_class1, &rates_class2};
    for (int c = 0; c < 2; ++c) {
        double total = 0.0;
        for (double r : *rates[c]) {
            if (r < 0) throw validation_error("Poisson rate must be >= 0");
            total += r;
        }
        s.daily_flights[c] = total;
        s.dists[c].reserve(rates[c]->size());
        for (double r : *rates[c])
            s.dists[c].push_back(EpochDemandDistribution::poisson(r, trunc_eps));
    }
    // Shape is only meaningful when a common profile exists; store the
    // normalized class-total profile for serialization round-trips.
    s.arrival_shape.resize(rates_class1.size());
    const double total = s.daily_flights[0] + s.daily_flights[1];
    for (std::size_t t = 0; t < rates_class1.size(); ++t)
        s.arrival_shape[t] =
            total > 0 ? (rates_class1[t] + rates_class2[t]) / total : 1.0 / rates_class1.size();
    return s;
}

}  // namespace swapdp
