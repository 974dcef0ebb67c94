#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swapdp/demand_model.hpp"
#include "swapdp/types.hpp"

namespace swapdp {

enum class DemandClass : int { na = 0, c1 = 1, c2 = 2 };

/**
 * Distance bands mapping a station->destination distance to a demand class.
 * Band i covers [upper[i-1], upper[i]); the final band is closed on the right
 * (a destination exactly at maximum range is still reachable). Distances past
 * the last bound are out of range and excluded from demand.
 */
struct Bands {
    std::vector<double> upper;  // ascending; one or two bands

    void validate() const;
};

DemandClass classify(double distance_km, const Bands& bands);

/// Great-circle distance in km (coordinates in degrees, Earth radius 6371 km).
double haversine_km(double lat1, double lon1, double lat2, double lon2);

/**
 * Daily flight demand of one facility: its served population needs
 * population * blood_need_fraction units per year; divided down to units per
 * day and packed into flights of units_per_flight, rounded up so partial loads
 * still dispatch a flight.
 */
int flights_per_day(double population, double blood_need_fraction, double units_per_flight);

struct HospitalRecord {
    std::string name;
    std::string district;
    double distance_km = 0.0;
    double population_served = 0.0;  // district population split over its hospitals
    int flights_day = 0;
    DemandClass demand_class = DemandClass::na;
};

/**
 * A fully derived problem instance: model parameters, per-epoch demand law,
 * and the facility table it was derived from. Values are immutable once built;
 * identical inputs produce byte-identical canonical JSON.
 */
struct Scenario {
    ModelConfig model;
    DemandSchedule schedule;
    std::vector<HospitalRecord> hospitals;
    Bands bands;
    int epoch_minutes = 90;
    double blood_need_fraction = 0.02;
    double units_per_flight = 2.0;
    double truncation_eps = 1e-9;
    bool initial_all_level2 = true;  // initial state (0, M), tracking M under sweeps
    State initial_explicit{};

    State initial_state() const {
        return initial_all_level2 ? State{0, model.fleet_size} : initial_explicit;
    }

    std::string to_json() const;  // canonical form; hash() fingerprints these bytes
    static Scenario from_json(const std::string& text);
    std::uint64_t hash() const { return fnv1a64(to_json()); }

    /// Per-epoch rates as CSV rows `t,lambda_c1,lambda_c2`.
    std::string rates_csv() const;

    /// Programmatic instance with explicit per-epoch rates (tests, sweeps).
    static Scenario synthetic(ModelConfig model, std::vector<double> rates_class1,
                              std::vector<double> rates_class2, double trunc_eps = 1e-9);
};

/**
 * Builds a scenario from hospital CSV text and a JSON config string.
 *
 * CSV header (exact): name,district,distance_km,population,lat,lon,distance_override_km
 * with lat/lon/override optional per row; population is the district total and
 * is split evenly over the district's rows before the blood-need rule.
 * Parse failures name the offending row and column.
 */
Scenario build_scenario(const std::string& hospitals_csv, const std::string& config_json);

}  // namespace swapdp
