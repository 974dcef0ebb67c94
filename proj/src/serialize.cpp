#include "swapdp/serialize.hpp"

#include <sys/resource.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swapdp {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw validation_error("failed writing '" + path.string() + "'");
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::uint64_t fnv1a64_file(const fs::path& path) { return fnv1a64(read_text_file(path)); }

namespace {

std::string meta_line(std::uint64_t hash, const std::string& solver, int fleet, int horizon) {
    return "# scenario_hash=" + hash_hex(hash) + ",solver=" + solver +
           ",fleet=" + std::to_string(fleet) + ",horizon=" + std::to_string(horizon) + "\n";
}

struct CsvMeta {
    std::uint64_t scenario_hash = 0;
    std::string solver;
    int fleet = 0;
    int horizon = 0;
};

CsvMeta parse_meta_line(const std::string& line, const fs::path& path) {
    CsvMeta meta;
    if (line.rfind("# ", 0) != 0)
        throw validation_error("'" + path.string() + "': missing metadata comment line");
    std::istringstream in(line.substr(2));
    std::string kv;
    while (std::getline(in, kv, ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "scenario_hash")
            meta.scenario_hash = std::stoull(value, nullptr, 16);
        else if (key == "solver")
            meta.solver = value;
        else if (key == "fleet")
            meta.fleet = std::stoi(value);
        else if (key == "horizon")
            meta.horizon = std::stoi(value);
    }
    if (meta.solver.empty() || meta.horizon < 2)
        throw validation_error("'" + path.string() + "': malformed metadata line");
    return meta;
}

}  // namespace

std::string value_table_csv(const ValueTable& table) {
    const StateSpace space(table.fleet);
    std::string out =
        meta_line(table.scenario_hash, table.solver_id, table.fleet, table.horizon);
    out += "t,s1,s2,value\n";
    for (int t = 1; t <= table.horizon; ++t)
        for (int i = 0; i < space.size(); ++i) {
            const State s = space.state(i);
            out += std::to_string(t) + ',' + std::to_string(s.s1) + ',' + std::to_string(s.s2) +
                   ',' + format_double(table.at(t, i)) + '\n';
        }
    return out;
}

std::string policy_table_csv(const PolicyTable& table) {
    const StateSpace space(table.fleet);
    std::string out =
        meta_line(table.scenario_hash, table.solver_id, table.fleet, table.horizon);
    out += "t,s1,s2,a01,a02,a12\n";
    for (int t = 1; t < table.horizon; ++t)
        for (int i = 0; i < space.size(); ++i) {
            const State s = space.state(i);
            const Action a = table.at(t, i);
            out += std::to_string(t) + ',' + std::to_string(s.s1) + ',' + std::to_string(s.s2) +
                   ',' + std::to_string(a.a01) + ',' + std::to_string(a.a02) + ',' +
                   std::to_string(a.a12) + '\n';
        }
    return out;
}

std::string flat_value_table_csv(const FlatValueTable& table) {
    std::string out = meta_line(table.scenario_hash, "flat", table.fleet, table.horizon);
    out += "t,s1,s2,value\n";
    for (int t = 1; t <= table.horizon; ++t)
        for (int s = 0; s <= table.fleet; ++s)
            out += std::to_string(t) + ',' + std::to_string(s) + ",0," +
                   format_double(table.at(t, s)) + '\n';
    return out;
}

std::string flat_policy_table_csv(const FlatPolicyTable& table) {
    std::string out = meta_line(table.scenario_hash, "flat", table.fleet, table.horizon);
    out += "t,s1,s2,a01,a02,a12\n";
    for (int t = 1; t < table.horizon; ++t)
        for (int s = 0; s <= table.fleet; ++s)
            out += std::to_string(t) + ',' + std::to_string(s) + ",0,0," +
                   std::to_string(table.at(t, s)) + ",0\n";
    return out;
}

std::string approx_value_table_csv(const ApproxValueTable& table) {
    const StateSpace space(table.fleet);
    std::string out = meta_line(table.scenario_hash, "rl", table.fleet, table.horizon);
    out += "t,s1,s2,value,visits\n";
    for (int t = 1; t <= table.horizon; ++t)
        for (int i = 0; i < space.size(); ++i) {
            const State s = space.state(i);
            const std::uint64_t visits = t < table.horizon ? table.visits_at(t, i) : 0;
            out += std::to_string(t) + ',' + std::to_string(s.s1) + ',' + std::to_string(s.s2) +
                   ',' + format_double(table.at(t, i)) + ',' + std::to_string(visits) + '\n';
        }
    return out;
}

std::string trace_csv(const ApproxValueTable& table) {
    std::string out = "iteration,value\n";
    for (const auto& [n, v] : table.trace)
        out += std::to_string(n) + ',' + format_double(v) + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Binary container
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'W', 'A', 'P', 'D', 'P', '0', '1'};
constexpr std::uint32_t kVersion = 1;

enum class BinKind : std::uint8_t {
    value = 1,
    policy = 2,
    flat_value = 3,
    flat_policy = 4,
    approx_value = 5,
};

class BinWriter {
public:
    explicit BinWriter(const fs::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw validation_error("cannot open '" + path.string() + "' for writing");
    }
    template <class T>
    void put(const T& v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_string(const std::string& s) {
        put(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    template <class T>
    void put_span(const std::vector<T>& v) {
        out_.write(reinterpret_cast<const char*>(v.data()),
                   static_cast<std::streamsize>(v.size() * sizeof(T)));
    }
    void header(BinKind kind, std::uint64_t hash, const std::string& solver, int fleet,
                int horizon) {
        out_.write(kMagic, sizeof(kMagic));
        put(static_cast<std::uint8_t>(kind));
        put(kVersion);
        put(hash);
        put(static_cast<std::uint32_t>(fleet));
        put(static_cast<std::uint32_t>(horizon));
        put_string(solver);
    }

private:
    std::ofstream out_;
};

class BinReader {
public:
    explicit BinReader(const fs::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw validation_error("cannot open '" + path.string() + "'");
    }
    bool try_magic() {
        char buf[8];
        in_.read(buf, sizeof(buf));
        return in_.gcount() == sizeof(buf) && std::memcmp(buf, kMagic, sizeof(buf)) == 0;
    }
    template <class T>
    T get() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        check();
        return v;
    }
    std::string get_string() {
        const auto n = get<std::uint32_t>();
        std::string s(n, '\0');
        in_.read(s.data(), n);
        check();
        return s;
    }
    template <class T>
    void get_span(std::vector<T>& v) {
        in_.read(reinterpret_cast<char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(T)));
        check();
    }

private:
    void check() const {
        if (!in_) throw validation_error("'" + path_.string() + "': truncated container");
    }
    std::ifstream in_;
    fs::path path_;
};

}  // namespace

void write_value_bin(const fs::path& path, const ValueTable& table) {
    BinWriter w(path);
    w.header(BinKind::value, table.scenario_hash, table.solver_id, table.fleet, table.horizon);
    w.put_span(table.v);
}

void write_policy_bin(const fs::path& path, const PolicyTable& table) {
    BinWriter w(path);
    w.header(BinKind::policy, table.scenario_hash, table.solver_id, table.fleet, table.horizon);
    std::vector<std::int32_t> flat;
    flat.reserve(table.d.size() * 3);
    for (const Action a : table.d) {
        flat.push_back(a.a01);
        flat.push_back(a.a02);
        flat.push_back(a.a12);
    }
    w.put_span(flat);
}

void write_flat_value_bin(const fs::path& path, const FlatValueTable& table) {
    BinWriter w(path);
    w.header(BinKind::flat_value, table.scenario_hash, "flat", table.fleet, table.horizon);
    w.put_span(table.v);
}

void write_flat_policy_bin(const fs::path& path, const FlatPolicyTable& table) {
    BinWriter w(path);
    w.header(BinKind::flat_policy, table.scenario_hash, "flat", table.fleet, table.horizon);
    std::vector<std::int32_t> flat(table.recharge.begin(), table.recharge.end());
    w.put_span(flat);
}

void write_approx_value_bin(const fs::path& path, const ApproxValueTable& table) {
    BinWriter w(path);
    w.header(BinKind::approx_value, table.scenario_hash, "rl", table.fleet, table.horizon);
    w.put_span(table.vbar);
    w.put_span(table.visits);
}

namespace {

struct BinHeader {
    BinKind kind;
    std::uint64_t hash;
    std::uint32_t fleet, horizon;
    std::string solver;
};

BinHeader read_header(BinReader& r, const fs::path& path) {
    BinHeader h;
    h.kind = static_cast<BinKind>(r.get<std::uint8_t>());
    const auto version = r.get<std::uint32_t>();
    if (version != kVersion)
        throw validation_error("'" + path.string() + "': unsupported container version " +
                               std::to_string(version));
    h.hash = r.get<std::uint64_t>();
    h.fleet = r.get<std::uint32_t>();
    h.horizon = r.get<std::uint32_t>();
    h.solver = r.get_string();
    return h;
}

}  // namespace

ValueTable read_value_bin(const fs::path& path) {
    BinReader r(path);
    if (!r.try_magic()) throw validation_error("'" + path.string() + "': not a container file");
    const BinHeader h = read_header(r, path);
    if (h.kind != BinKind::value)
        throw validation_error("'" + path.string() + "': not a value table");
    ValueTable t;
    t.fleet = static_cast<int>(h.fleet);
    t.horizon = static_cast<int>(h.horizon);
    t.scenario_hash = h.hash;
    t.solver_id = h.solver;
    t.v.resize(static_cast<std::size_t>(t.horizon) * t.nstates());
    r.get_span(t.v);
    return t;
}

ApproxValueTable read_approx_value_bin(const fs::path& path) {
    BinReader r(path);
    if (!r.try_magic()) throw validation_error("'" + path.string() + "': not a container file");
    const BinHeader h = read_header(r, path);
    if (h.kind != BinKind::approx_value)
        throw validation_error("'" + path.string() + "': not a learned value table");
    ApproxValueTable t;
    t.fleet = static_cast<int>(h.fleet);
    t.horizon = static_cast<int>(h.horizon);
    t.scenario_hash = h.hash;
    t.vbar.resize(static_cast<std::size_t>(t.horizon) * t.nstates());
    t.visits.resize(static_cast<std::size_t>(t.horizon - 1) * t.nstates());
    r.get_span(t.vbar);
    r.get_span(t.visits);
    return t;
}

namespace {

LoadedPolicy load_policy_bin(const fs::path& path) {
    BinReader r(path);
    r.try_magic();
    const BinHeader h = read_header(r, path);
    if (h.kind == BinKind::policy) {
        PolicyTable t;
        t.fleet = static_cast<int>(h.fleet);
        t.horizon = static_cast<int>(h.horizon);
        t.scenario_hash = h.hash;
        t.solver_id = h.solver;
        std::vector<std::int32_t> flat(static_cast<std::size_t>(t.horizon - 1) * t.nstates() * 3);
        r.get_span(flat);
        t.d.resize(flat.size() / 3);
        for (std::size_t i = 0; i < t.d.size(); ++i)
            t.d[i] = Action{flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
        return t;
    }
    if (h.kind == BinKind::flat_policy) {
        FlatPolicyTable t;
        t.fleet = static_cast<int>(h.fleet);
        t.horizon = static_cast<int>(h.horizon);
        t.scenario_hash = h.hash;
        std::vector<std::int32_t> flat(static_cast<std::size_t>(t.horizon - 1) * (t.fleet + 1));
        r.get_span(flat);
        t.recharge.assign(flat.begin(), flat.end());
        return t;
    }
    throw validation_error("'" + path.string() + "': not a policy table");
}

LoadedPolicy load_policy_csv(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line))
        throw validation_error("'" + path.string() + "': empty policy file");
    const CsvMeta meta = parse_meta_line(line, path);
    if (!std::getline(in, line) || line.rfind("t,s1,s2,a01", 0) != 0)
        throw validation_error("'" + path.string() + "': missing policy header row");

    const bool flat = meta.solver == "flat";
    PolicyTable table;
    FlatPolicyTable flat_table;
    if (flat) {
        flat_table.fleet = meta.fleet;
        flat_table.horizon = meta.horizon;
        flat_table.scenario_hash = meta.scenario_hash;
        flat_table.recharge.assign(
            static_cast<std::size_t>(meta.horizon - 1) * (meta.fleet + 1), 0);
    } else {
        table.fleet = meta.fleet;
        table.horizon = meta.horizon;
        table.scenario_hash = meta.scenario_hash;
        table.solver_id = meta.solver;
        table.d.assign(static_cast<std::size_t>(meta.horizon - 1) * table.nstates(), Action{});
    }
    const StateSpace space(meta.fleet);

    int line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        int t, s1, s2, a01, a02, a12;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%d,%d,%d", &t, &s1, &s2, &a01, &a02, &a12) != 6)
            throw validation_error("'" + path.string() + "' row " + std::to_string(line_no) +
                                   ": expected 6 integer columns");
        if (t < 1 || t >= meta.horizon)
            throw validation_error("'" + path.string() + "' row " + std::to_string(line_no) +
                                   ": epoch out of range");
        if (flat)
            flat_table.at(t, s1) = a02;
        else
            table.at(t, space.index(State{s1, s2})) = Action{a01, a02, a12};
    }
    if (flat) return flat_table;
    return table;
}

}  // namespace

LoadedPolicy load_policy(const fs::path& path) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw validation_error("cannot open '" + path.string() + "'");
        char buf[8] = {};
        probe.read(buf, sizeof(buf));
        if (probe.gcount() == 8 && std::memcmp(buf, kMagic, sizeof(buf)) == 0)
            return load_policy_bin(path);
    }
    return load_policy_csv(path);
}

std::uint64_t policy_scenario_hash(const LoadedPolicy& policy) {
    if (std::holds_alternative<PolicyTable>(policy))
        return std::get<PolicyTable>(policy).scenario_hash;
    return std::get<FlatPolicyTable>(policy).scenario_hash;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

ManifestBuilder::ManifestBuilder(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)) {}

void ManifestBuilder::set_config_json(const std::string& json_text) { config_json_ = json_text; }
void ManifestBuilder::set_seed(std::uint64_t seed) {
    seed_ = seed;
    has_seed_ = true;
}
void ManifestBuilder::set_threads(int threads) { threads_ = threads; }
void ManifestBuilder::add_note(const std::string& key, const std::string& value) {
    notes_.emplace_back(key, value);
}
void ManifestBuilder::add_artifact(const fs::path& path) {
    artifacts_.emplace_back(path.filename().string(), fnv1a64_file(path));
}
void ManifestBuilder::add_timing_ms(const std::string& label, double ms) {
    timings_.emplace_back(label, ms);
}

void ManifestBuilder::write(const fs::path& path) const {
    json j;
    j["command"] = command_;
    j["argv"] = argv_;
    if (!config_json_.empty()) j["config"] = json::parse(config_json_);
    if (has_seed_) j["seed"] = seed_;
    j["threads"] = threads_;
    json notes = json::object();
    for (const auto& [k, v] : notes_) notes[k] = v;
    j["notes"] = notes;
    json arts = json::array();
    for (const auto& [name, hash] : artifacts_)
        arts.push_back({{"path", name}, {"fnv1a64", hash_hex(hash)}});
    j["artifacts"] = arts;
    json timings = json::object();
    for (const auto& [k, v] : timings_) timings[k] = v;
    j["timings_ms"] = timings;
    j["peak_rss_kb"] = peak_rss_kb();
    write_text_file(path, j.dump(2) + "\n");
}

long peak_rss_kb() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
    return usage.ru_maxrss;
}

}  // namespace swapdp
