#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "swapdp/baseline_noclass.hpp"
#include "swapdp/sim_eval.hpp"
#include "swapdp/solver_exact.hpp"
#include "swapdp/solver_rl.hpp"

namespace swapdp {

/**
 * Artifact files.
 *
 * CSV tables start with a metadata comment line
 *   # scenario_hash=<hex16>,solver=<id>,fleet=<M>,horizon=<N>
 * followed by the documented header and rows in canonical state order. The
 * binary container is a little-endian dump with an 8-byte magic, a version,
 * and the same metadata; it round-trips tables exactly.
 */

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

std::string value_table_csv(const ValueTable& table);
std::string policy_table_csv(const PolicyTable& table);
std::string flat_value_table_csv(const FlatValueTable& table);
std::string flat_policy_table_csv(const FlatPolicyTable& table);
std::string approx_value_table_csv(const ApproxValueTable& table);
std::string trace_csv(const ApproxValueTable& table);

void write_value_bin(const std::filesystem::path& path, const ValueTable& table);
void write_policy_bin(const std::filesystem::path& path, const PolicyTable& table);
void write_flat_value_bin(const std::filesystem::path& path, const FlatValueTable& table);
void write_flat_policy_bin(const std::filesystem::path& path, const FlatPolicyTable& table);
void write_approx_value_bin(const std::filesystem::path& path, const ApproxValueTable& table);

ValueTable read_value_bin(const std::filesystem::path& path);
ApproxValueTable read_approx_value_bin(const std::filesystem::path& path);

/// Any loadable decision rule: classified or flat.
using LoadedPolicy = std::variant<PolicyTable, FlatPolicyTable>;

/**
 * Loads a policy artifact from a binary container or a metadata-tagged CSV;
 * the solver id distinguishes classified tables from flat ones.
 */
LoadedPolicy load_policy(const std::filesystem::path& path);

std::uint64_t policy_scenario_hash(const LoadedPolicy& policy);

/**
 * Run manifest: every command writes one next to its outputs. References all
 * written artifacts with content hashes; together with the recorded command,
 * configuration, and seeds it suffices to reproduce the run bit-identically.
 * Timings and peak memory are diagnostics and naturally vary between runs.
 */
class ManifestBuilder {
public:
    ManifestBuilder(std::string command, std::vector<std::string> argv);

    void set_config_json(const std::string& json_text);
    void set_seed(std::uint64_t seed);
    void set_threads(int threads);
    void add_note(const std::string& key, const std::string& value);
    void add_artifact(const std::filesystem::path& path);
    void add_timing_ms(const std::string& label, double ms);

    void write(const std::filesystem::path& path) const;

private:
    std::string command_;
    std::vector<std::string> argv_;
    std::string config_json_;
    std::vector<std::pair<std::string, std::string>> notes_;
    std::vector<std::pair<std::string, std::uint64_t>> artifacts_;
    std::vector<std::pair<std::string, double>> timings_;
    std::uint64_t seed_ = 0;
    bool has_seed_ = false;
    int threads_ = 0;
};

/// Peak resident set size of this process in kilobytes (0 when unavailable).
long peak_rss_kb();

}  // namespace swapdp
