#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swapdp/baseline_noclass.hpp"
#include "swapdp/scenario.hpp"
#include "swapdp/solver_exact.hpp"

namespace swapdp {

/// Met-demand share as a percentage; a path that saw no demand counts as 100
/// (no service failure occurred).
double pct_met_demand(long met, long realized);

/// 100 * |exact - approx| / exact; exact must be positive.
double optimality_gap(double exact_value, double approx_value);

/// Which decision rule drives a simulation.
struct PolicySpec {
    enum class Kind { table, benchmark, flat_table };
    Kind kind = Kind::benchmark;
    const PolicyTable* table = nullptr;          // kind == table
    const FlatPolicyTable* flat = nullptr;       // kind == flat_table

    static PolicySpec benchmark() { return PolicySpec{}; }
    static PolicySpec of(const PolicyTable& t) {
        return PolicySpec{Kind::table, &t, nullptr};
    }
    static PolicySpec of(const FlatPolicyTable& t) {
        return PolicySpec{Kind::flat_table, nullptr, &t};
    }
};

/// Totals and derived percentages of one sample path.
struct PathStats {
    long realized_c1 = 0, realized_c2 = 0;
    long met_c1_lvl1 = 0, met_c1_lvl2 = 0, met_c2 = 0;
    long a01 = 0, a02 = 0, a12 = 0;
    double reward = 0.0;  // epoch rewards plus terminal reward

    double met_pct_total = 0.0, met_pct_c1 = 0.0, met_pct_c2 = 0.0;
    double met_c1_lvl1_pct = 0.0, met_c1_lvl2_pct = 0.0;
};

/// One epoch of one path, for plot-ready dumps.
struct StepRecord {
    int t = 0;
    State s;
    Action a;
    Demand d;
    int met_c1_lvl1 = 0, met_c1_lvl2 = 0, met_c2 = 0;
    double reward = 0.0;
};

struct MetricsSummary {
    double avg_met_pct_total = 0.0;
    double avg_met_pct_c1 = 0.0;
    double avg_met_pct_c2 = 0.0;
    double avg_met_c1_lvl1_pct = 0.0;
    double avg_met_c1_lvl2_pct = 0.0;
    double avg_a01 = 0.0, avg_a02 = 0.0, avg_a12 = 0.0;
    double mean_reward = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
};

struct SimOptions {
    int threads = 0;          // 0 = all available
    bool keep_paths = false;  // retain per-path stats
    bool record_steps = false;  // retain per-epoch records (implies keep_paths)
};

struct SimulationResult {
    MetricsSummary summary;
    std::vector<PathStats> paths;               // when keep_paths
    std::vector<std::vector<StepRecord>> steps;  // when record_steps
};

/**
 * Seeded Monte Carlo rollout of a policy over n_paths independent demand
 * sample paths. Path p draws from the stream seed + p, so results are
 * reproducible bit-for-bit across runs and thread counts, and different
 * policies or parameter values evaluated with the same seed see identical
 * demand (common random numbers). Paths run in parallel; aggregation is a
 * serial reduction in path order.
 */
SimulationResult simulate_paths(const Scenario& scenario, const PolicySpec& policy,
                                long n_paths, std::uint64_t seed, const SimOptions& options = {});

/// Plain serial rollout kept as the reference for the parallel kernel.
SimulationResult simulate_paths_serial(const Scenario& scenario, const PolicySpec& policy,
                                       long n_paths, std::uint64_t seed,
                                       const SimOptions& options = {});

/// Mean per-path action totals (a01, a02, a12).
std::array<double, 3> avg_actions(const std::vector<PathStats>& paths);

enum class SweepParam { fleet_size, rho21 };
enum class SweepSolver { bi, rl, benchmark, flat };

struct SweepRow {
    double param_value = 0.0;
    MetricsSummary summary;
    std::vector<PathStats> paths;  // retained for tolerance computations
};

struct RLConfig;  // solver_rl.hpp

/**
 * Re-solves and re-evaluates the scenario at each parameter value with
 * identical seeds across values. fleet_size sweeps keep an "all full" initial
 * state tracking the swept fleet; rho21 sweeps only reweight rewards.
 */
std::vector<SweepRow> sweep(const Scenario& scenario, SweepParam param,
                            const std::vector<double>& values, SweepSolver solver, long n_paths,
                            std::uint64_t seed, const SimOptions& options = {},
                            const RLConfig* rl_config = nullptr,
                            const SolveOptions& solve_options = {});

/// Metrics CSV rows with the spec'd column order.
std::string metrics_csv(const std::vector<SweepRow>& rows, const std::string& solver);

/// Per-path dump rows `path,t,s1,...`; includes a terminal row per path.
std::string path_dump_csv(const SimulationResult& result, const Scenario& scenario);

}  // namespace swapdp
