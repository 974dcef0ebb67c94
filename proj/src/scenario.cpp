#include "swapdp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace swapdp {

using nlohmann::json;

void Bands::validate() const {
    if (upper.empty() || upper.size() > 2)
        throw validation_error("bands: expected one or two upper bounds");
    double prev = 0.0;
    for (double b : upper) {
        if (!(b > prev)) throw validation_error("bands: bounds must be positive and ascending");
        prev = b;
    }
}

DemandClass classify(double distance_km, const Bands& bands) {
    if (distance_km < 0) throw validation_error("distance must be >= 0");
    for (std::size_t i = 0; i < bands.upper.size(); ++i) {
        if (distance_km < bands.upper[i]) return static_cast<DemandClass>(i + 1);
    }
    // Maximum range itself is reachable.
    if (distance_km == bands.upper.back())
        return static_cast<DemandClass>(bands.upper.size());
    return DemandClass::na;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    if (std::abs(lat1) > 90 || std::abs(lat2) > 90 || std::abs(lon1) > 180 ||
        std::abs(lon2) > 180)
        throw validation_error("coordinates out of range");
    constexpr double earth_radius_km = 6371.0;
    constexpr double deg = std::numbers::pi / 180.0;
    const double dlat = (lat2 - lat1) * deg;
    const double dlon = (lon2 - lon1) * deg;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * deg) * std::cos(lat2 * deg) * std::sin(dlon / 2) *
                         std::sin(dlon / 2);
    return 2.0 * earth_radius_km * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

int flights_per_day(double population, double blood_need_fraction, double units_per_flight) {
    if (population < 0) throw validation_error("population must be >= 0");
    if (blood_need_fraction < 0 || units_per_flight <= 0)
        throw validation_error("need fraction must be >= 0 and flight capacity > 0");
    const double units_per_day = population * blood_need_fraction / 365.0;
    return static_cast<int>(std::ceil(units_per_day / units_per_flight));
}

namespace {

// ---------------------------------------------------------------------------
// Hospital CSV
// ---------------------------------------------------------------------------

struct CsvRow {
    int line = 0;
    std::string name, district;
    std::optional<double> distance_km;
    double population = 0.0;
    std::optional<double> lat, lon, distance_override_km;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

std::optional<double> parse_optional_double(const std::string& raw, int line,
                                            const char* column) {
    if (raw.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        const double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw validation_error("hospitals csv row " + std::to_string(line) + ": column '" +
                               column + "': expected a number, got '" + raw + "'");
    }
}

std::vector<CsvRow> parse_hospitals_csv(const std::string& text) {
    static const char* expected_header =
        "name,district,distance_km,population,lat,lon,distance_override_km";

    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw validation_error("hospitals csv: empty file, header required");
    {
        std::string header = line;
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (header != expected_header)
            throw validation_error("hospitals csv: header must be exactly '" +
                                   std::string(expected_header) + "'");
    }

    std::vector<CsvRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7)
            throw validation_error("hospitals csv row " + std::to_string(line_no) +
                                   ": expected 7 columns, got " + std::to_string(f.size()));
        CsvRow r;
        r.line = line_no;
        r.name = f[0];
        r.district = f[1];
        if (r.name.empty())
            throw validation_error("hospitals csv row " + std::to_string(line_no) +
                                   ": column 'name': must not be empty");
        if (r.district.empty())
            throw validation_error("hospitals csv row " + std::to_string(line_no) +
                                   ": column 'district': must not be empty");
        r.distance_km = parse_optional_double(f[2], line_no, "distance_km");
        const auto pop = parse_optional_double(f[3], line_no, "population");
        if (!pop)
            throw validation_error("hospitals csv row " + std::to_string(line_no) +
                                   ": column 'population': must not be empty");
        if (*pop < 0 || *pop != std::floor(*pop))
            throw validation_error("hospitals csv row " + std::to_string(line_no) +
                                   ": column 'population': expected a nonnegative integer");
        r.population = *pop;
        r.lat = parse_optional_double(f[4], line_no, "lat");
        r.lon = parse_optional_double(f[5], line_no, "lon");
        r.distance_override_km = parse_optional_double(f[6], line_no, "distance_override_km");
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw validation_error(std::string("config: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
    const double v = get_number(j, key, fallback);
    if (v != std::floor(v))
        throw validation_error(std::string("config: '") + key + "' must be an integer");
    return static_cast<int>(v);
}

}  // namespace

Scenario build_scenario(const std::string& hospitals_csv, const std::string& config_json) {
    json cfg;
    try {
        cfg = json::parse(config_json);
    } catch (const json::exception& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw validation_error("config: expected a JSON object");

    Scenario sc;
    sc.model.fleet_size = get_int(cfg, "fleet_size", 15);
    sc.epoch_minutes = get_int(cfg, "epoch_minutes", 90);
    if (sc.epoch_minutes <= 0) throw validation_error("config: epoch_minutes must be > 0");
    const int default_horizon =
        (1440 % sc.epoch_minutes == 0) ? 1440 / sc.epoch_minutes + 1 : 2;
    sc.model.horizon = get_int(cfg, "horizon_epochs", default_horizon);
    if (1440 % sc.epoch_minutes == 0 && sc.model.horizon != 1440 / sc.epoch_minutes + 1)
        throw validation_error("config: horizon_epochs must equal 1440/epoch_minutes + 1 (" +
                               std::to_string(1440 / sc.epoch_minutes + 1) + ")");
    sc.model.rho11 = get_number(cfg, "rho11", 1.0);
    sc.model.rho21 = get_number(cfg, "rho21", 0.5);
    sc.model.rho22 = get_number(cfg, "rho22", 1.0);
    sc.model.num_classes = get_int(cfg, "num_classes", 2);
    sc.model.validate();

    if (cfg.contains("bands")) {
        if (!cfg.at("bands").is_array())
            throw validation_error("config: 'bands' must be an array of upper bounds");
        sc.bands.upper = cfg.at("bands").get<std::vector<double>>();
    } else {
        sc.bands.upper = {40.0, 80.0};
    }
    sc.bands.validate();

    sc.blood_need_fraction = get_number(cfg, "blood_need_fraction", 0.02);
    sc.units_per_flight = get_number(cfg, "units_per_flight", 2.0);
    sc.truncation_eps = get_number(cfg, "truncation_eps", 1e-9);
    if (!(sc.truncation_eps > 0 && sc.truncation_eps < 1))
        throw validation_error("config: truncation_eps must be in (0,1)");

    std::vector<double> shape;
    if (cfg.contains("arrival_shape")) {
        if (!cfg.at("arrival_shape").is_array())
            throw validation_error("config: 'arrival_shape' must be an array");
        shape = cfg.at("arrival_shape").get<std::vector<double>>();
        if (static_cast<int>(shape.size()) != sc.model.horizon - 1)
            throw validation_error("config: arrival_shape must have horizon_epochs-1 = " +
                                   std::to_string(sc.model.horizon - 1) + " entries");
    } else {
        shape = default_arrival_shape(sc.model.horizon - 1, sc.epoch_minutes);
    }

    if (cfg.contains("initial_state")) {
        const auto& init = cfg.at("initial_state");
        if (init.is_string() && init.get<std::string>() == "all_level2") {
            sc.initial_all_level2 = true;
        } else if (init.is_array() && init.size() == 2) {
            sc.initial_all_level2 = false;
            sc.initial_explicit = State{init.at(0).get<int>(), init.at(1).get<int>()};
            require_valid_state(sc.initial_explicit, sc.model);
        } else {
            throw validation_error("config: initial_state must be \"all_level2\" or [s1,s2]");
        }
    }

    const bool has_station = cfg.contains("station_lat") && cfg.contains("station_lon");
    const double station_lat = has_station ? get_number(cfg, "station_lat", 0) : 0.0;
    const double station_lon = has_station ? get_number(cfg, "station_lon", 0) : 0.0;

    // Derive per-hospital demand from the facility table.
    const auto rows = parse_hospitals_csv(hospitals_csv);
    std::map<std::string, int> district_count;
    for (const auto& r : rows) ++district_count[r.district];

    double daily_flights[2] = {0.0, 0.0};
    int in_range = 0;
    for (const auto& r : rows) {
        HospitalRecord h;
        h.name = r.name;
        h.district = r.district;
        if (r.distance_override_km) {
            h.distance_km = *r.distance_override_km;
        } else if (r.distance_km) {
            h.distance_km = *r.distance_km;
        } else if (r.lat && r.lon && has_station) {
            h.distance_km = haversine_km(station_lat, station_lon, *r.lat, *r.lon);
        } else {
            throw validation_error("hospitals csv row " + std::to_string(r.line) +
                                   ": column 'distance_km': no distance given and no "
                                   "coordinates + station position to derive one");
        }
        if (h.distance_km < 0)
            throw validation_error("hospitals csv row " + std::to_string(r.line) +
                                   ": column 'distance_km': must be >= 0");
        h.population_served = r.population / district_count[r.district];
        h.flights_day =
            flights_per_day(h.population_served, sc.blood_need_fraction, sc.units_per_flight);
        h.demand_class = classify(h.distance_km, sc.bands);
        if (h.demand_class != DemandClass::na) {
            daily_flights[static_cast<int>(h.demand_class) - 1] += h.flights_day;
            ++in_range;
        }
        sc.hospitals.push_back(std::move(h));
    }

    if (in_range == 0) throw validation_error("no hospitals in range");

    sc.schedule = make_schedule(daily_flights[0], daily_flights[1], shape, sc.truncation_eps);
    return sc;
}

// ---------------------------------------------------------------------------
// Canonical JSON form
// ---------------------------------------------------------------------------

std::string Scenario::to_json() const {
    json j;
    j["format_version"] = 1;
    j["fleet_size"] = model.fleet_size;
    j["horizon_epochs"] = model.horizon;
    j["epoch_minutes"] = epoch_minutes;
    j["num_classes"] = model.num_classes;
    j["rho11"] = model.rho11;
    j["rho21"] = model.rho21;
    j["rho22"] = model.rho22;
    j["bands"] = bands.upper;
    j["blood_need_fraction"] = blood_need_fraction;
    j["units_per_flight"] = units_per_flight;
    j["truncation_eps"] = truncation_eps;
    if (initial_all_level2)
        j["initial_state"] = "all_level2";
    else
        j["initial_state"] = {initial_explicit.s1, initial_explicit.s2};
    j["arrival_shape"] = schedule.arrival_shape;
    j["class_daily_flights"] = {schedule.daily_flights[0], schedule.daily_flights[1]};
    std::vector<double> l1, l2;
    for (int t = 1; t < model.horizon; ++t) {
        l1.push_back(schedule.rate(1, t));
        l2.push_back(schedule.rate(2, t));
    }
    j["lambda_class1"] = l1;
    j["lambda_class2"] = l2;
    json hs = json::array();
    for (const auto& h : hospitals) {
        json e;
        e["name"] = h.name;
        e["district"] = h.district;
        e["distance_km"] = h.distance_km;
        e["population_served"] = h.population_served;
        e["flights_per_day"] = h.flights_day;
        e["class"] = static_cast<int>(h.demand_class);
        hs.push_back(e);
    }
    j["hospitals"] = hs;
    return j.dump(2) + "\n";
}

Scenario Scenario::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("scenario: invalid JSON: ") + e.what());
    }
    try {
        Scenario sc;
        sc.model.fleet_size = j.at("fleet_size").get<int>();
        sc.model.horizon = j.at("horizon_epochs").get<int>();
        sc.model.rho11 = j.at("rho11").get<double>();
        sc.model.rho21 = j.at("rho21").get<double>();
        sc.model.rho22 = j.at("rho22").get<double>();
        sc.model.num_classes = j.value("num_classes", 2);
        sc.model.validate();
        sc.epoch_minutes = j.at("epoch_minutes").get<int>();
        sc.bands.upper = j.at("bands").get<std::vector<double>>();
        sc.bands.validate();
        sc.blood_need_fraction = j.at("blood_need_fraction").get<double>();
        sc.units_per_flight = j.at("units_per_flight").get<double>();
        sc.truncation_eps = j.at("truncation_eps").get<double>();
        const auto& init = j.at("initial_state");
        if (init.is_string() && init.get<std::string>() == "all_level2") {
            sc.initial_all_level2 = true;
        } else {
            sc.initial_all_level2 = false;
            sc.initial_explicit = State{init.at(0).get<int>(), init.at(1).get<int>()};
            require_valid_state(sc.initial_explicit, sc.model);
        }
        const auto l1 = j.at("lambda_class1").get<std::vector<double>>();
        const auto l2 = j.at("lambda_class2").get<std::vector<double>>();
        if (static_cast<int>(l1.size()) != sc.model.horizon - 1 || l1.size() != l2.size())
            throw validation_error("scenario: lambda vectors must have horizon_epochs-1 entries");
        sc.schedule = make_schedule_from_rates(l1, l2, sc.truncation_eps);
        sc.schedule.arrival_shape = j.at("arrival_shape").get<std::vector<double>>();
        if (j.contains("hospitals")) {
            for (const auto& e : j.at("hospitals")) {
                HospitalRecord h;
                h.name = e.at("name").get<std::string>();
                h.district = e.at("district").get<std::string>();
                h.distance_km = e.at("distance_km").get<double>();
                h.population_served = e.at("population_served").get<double>();
                h.flights_day = e.at("flights_per_day").get<int>();
                h.demand_class = static_cast<DemandClass>(e.at("class").get<int>());
                sc.hospitals.push_back(std::move(h));
            }
        }
        return sc;
    } catch (const json::exception& e) {
        throw validation_error(std::string("scenario: missing or malformed field: ") + e.what());
    }
}

std::string Scenario::rates_csv() const {
    std::string out = "t,lambda_c1,lambda_c2\n";
    for (int t = 1; t < model.horizon; ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_double(schedule.rate(1, t));
        out += ',';
        out += format_double(schedule.rate(2, t));
        out += '\n';
    }
    return out;
}

Scenario Scenario::synthetic(ModelConfig model, std::vector<double> rates_class1,
                             std::vector<double> rates_class2, double trunc_eps) {
    model.validate();
    if (static_cast<int>(rates_class1.size()) != model.horizon - 1)
        throw validation_error("synthetic scenario: rate vectors must have horizon-1 entries");
    Scenario sc;
    sc.model = model;
    sc.truncation_eps = trunc_eps;
    sc.schedule = make_schedule_from_rates(rates_class1, rates_class2, trunc_eps);
    return sc;
}

}  // namespace swapdp
