#include "d2d/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "d2d/errors.hpp"

namespace d2d {

namespace {

constexpr std::string_view kTable1 = R"(# Baseline parameter set
name = table1
reference_disk_radius_m = 500
lambda_m_n_per_reference_disk = 10
lambda_d_n_per_reference_disk = 100
lambda_u_n_per_reference_disk = 200
p_m_dbm = 30
p_d_dbm = 23
w_m_mhz = 7
w_d_mhz = 3
alpha = 4
tau_m_db = 30
tau_d_db = 30
noise_dbm = -110
beta = 0.8
library_size = 10000
zeta = 0.8
cache_mbs = 500
cache_d2d = 20
schemes = NS,US
k = 1..10
c = 1
trials = 100000
seed = 1
)";

// Keys in dump order. Groups list mutually exclusive spellings of one quantity.
const std::vector<std::vector<std::string>>& key_groups() {
    static const std::vector<std::vector<std::string>> groups = {
        {"name"},
        {"reference_disk_radius_m"},
        {"lambda_m_per_km2", "lambda_m_n_per_reference_disk"},
        {"lambda_d_per_km2", "lambda_d_n_per_reference_disk"},
        {"lambda_u_per_km2", "lambda_u_n_per_reference_disk"},
        {"p_m_dbm", "p_m_w"},
        {"p_d_dbm", "p_d_w"},
        {"w_m_mhz"},
        {"w_d_mhz"},
        {"alpha"},
        {"tau_m_db"},
        {"tau_d_db"},
        {"noise_dbm", "noise_w"},
        {"beta"},
        {"library_size"},
        {"zeta"},
        {"cache_mbs"},
        {"cache_d2d"},
        {"schemes"},
        {"k"},
        {"c"},
        {"tau_db"},
        {"trials"},
        {"seed"},
        {"measurement_factor"},
        {"window_factor"},
        {"edge_policy"},
        {"us_variant"},
        {"workers"},
        {"chunk"},
        {"method"},
        {"k_max"},
        {"grid_points"},
        {"norm_tolerance"},
        {"renormalize"},
        {"omega2_form"},
        {"containment_form"},
    };
    return groups;
}

const std::vector<std::string>* group_of(const std::string& key) {
    for (const auto& g : key_groups()) {
        if (std::find(g.begin(), g.end(), key) != g.end()) return &g;
    }
    return nullptr;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(std::string_view origin, const std::string& msg) {
    throw ConfigError(std::string(origin) + ": " + msg);
}

double to_double(std::string_view origin, const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end || !std::isfinite(out)) fail(origin, "key '" + key + "': '" + v + "' is not a finite number");
    return out;
}

std::int64_t to_int(std::string_view origin, const std::string& key, const std::string& v) {
    const double d = to_double(origin, key, v);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) fail(origin, "key '" + key + "': '" + v + "' is not an integer");
    return static_cast<std::int64_t>(d);
}

bool to_bool(std::string_view origin, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(origin, "key '" + key + "': '" + v + "' is not a boolean");
}

using Entries = std::map<std::string, std::string>;

void set_entry(Entries& e, std::string_view origin, const std::string& key, const std::string& value,
               std::set<std::string>* seen_groups) {
    const auto* group = group_of(key);
    if (group == nullptr) fail(origin, "unknown key '" + key + "'");
    if (seen_groups != nullptr) {
        if (!seen_groups->insert(group->front()).second) {
            fail(origin, "'" + key + "' given more than once (or together with an alternative spelling)");
        }
    }
    for (const auto& alt : *group) e.erase(alt);
    e[key] = value;
}

Entries read_entries(std::string_view text, std::string_view origin, int depth);

Entries resolve_base(const std::string& name, std::string_view origin, int depth) {
    if (depth > 8) fail(origin, "base chain deeper than 8 profiles");
    namespace fs = std::filesystem;
    const fs::path as_path(name);
    if (fs::is_regular_file(as_path)) {
        std::ifstream in(as_path);
        std::stringstream ss;
        ss << in.rdbuf();
        return read_entries(ss.str(), as_path.string(), depth + 1);
    }
    if (const char* dir = std::getenv("D2DOFFLOAD_PROFILE_DIR"); dir != nullptr && *dir != '\0') {
        const fs::path p = fs::path(dir) / (name + ".profile");
        if (fs::is_regular_file(p)) {
            std::ifstream in(p);
            std::stringstream ss;
            ss << in.rdbuf();
            return read_entries(ss.str(), p.string(), depth + 1);
        }
    }
    return read_entries(builtin_profile(name), name, depth + 1);
}

Entries read_entries(std::string_view text, std::string_view origin, int depth) {
    Entries e;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool body_started = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        const std::string where = std::string(origin) + ":" + std::to_string(lineno);
        if (eq == std::string::npos) fail(where, "expected 'key = value', got '" + t + "'");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) fail(where, "empty key");
        if (key == "base") {
            if (body_started) fail(where, "'base' must come before any other key");
            e = resolve_base(value, where, depth);
            continue;
        }
        body_started = true;
        set_entry(e, where, key, value, &seen);
    }
    return e;
}

std::optional<std::string> get(const Entries& e, const std::string& key) {
    if (auto it = e.find(key); it != e.end()) return it->second;
    return std::nullopt;
}

double density(const Entries& e, std::string_view origin, const std::string& sym, double ref_radius) {
    const std::string abs_key = "lambda_" + sym + "_per_km2";
    const std::string n_key = "lambda_" + sym + "_n_per_reference_disk";
    if (auto v = get(e, abs_key)) return to_double(origin, abs_key, *v) * 1e-6;
    if (auto v = get(e, n_key)) return to_double(origin, n_key, *v) / (std::numbers::pi * ref_radius * ref_radius);
    fail(origin, "missing density: give '" + abs_key + "' or '" + n_key + "'");
}

double power(const Entries& e, std::string_view origin, const std::string& stem) {
    if (auto v = get(e, stem + "_dbm")) return dbm_to_watt(to_double(origin, stem + "_dbm", *v));
    if (auto v = get(e, stem + "_w")) return to_double(origin, stem + "_w", *v);
    fail(origin, "missing power: give '" + stem + "_dbm' or '" + stem + "_w'");
}

double required(const Entries& e, std::string_view origin, const std::string& key) {
    auto v = get(e, key);
    if (!v) fail(origin, "missing required key '" + key + "'");
    return to_double(origin, key, *v);
}

std::int64_t required_int(const Entries& e, std::string_view origin, const std::string& key) {
    auto v = get(e, key);
    if (!v) fail(origin, "missing required key '" + key + "'");
    return to_int(origin, key, *v);
}

ExperimentConfig materialize(const Entries& e, std::string_view origin) {
    ExperimentConfig cfg;
    cfg.entries = e;
    if (auto v = get(e, "name")) cfg.name = *v;

    try {
        const double ref = get(e, "reference_disk_radius_m")
                               ? to_double(origin, "reference_disk_radius_m", *get(e, "reference_disk_radius_m"))
                               : 500.0;
        if (!(ref > 0.0)) fail(origin, "reference_disk_radius_m must be > 0");
        NetworkParams& n = cfg.network;
        n.lambda_m = density(e, origin, "m", ref);
        n.lambda_d = density(e, origin, "d", ref);
        n.lambda_u = density(e, origin, "u", ref);
        n.p_m = power(e, origin, "p_m");
        n.p_d = power(e, origin, "p_d");
        n.w_m = required(e, origin, "w_m_mhz") * 1e6;
        n.w_d = required(e, origin, "w_d_mhz") * 1e6;
        n.alpha = required(e, origin, "alpha");
        n.tau_m = db_to_linear(required(e, origin, "tau_m_db"));
        n.tau_d = db_to_linear(required(e, origin, "tau_d_db"));
        n.sigma2 = power(e, origin, "noise");
        n.beta = required(e, origin, "beta");
        n.validate();

        cfg.cache = CacheParams(required_int(e, origin, "library_size"), required(e, origin, "zeta"),
                                required_int(e, origin, "cache_mbs"), required_int(e, origin, "cache_d2d"));

        if (auto v = get(e, "schemes")) {
            std::stringstream ss(*v);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!trim(item).empty()) cfg.sweep.schemes.push_back(parse_scheme(trim(item)));
            }
        }
        if (auto v = get(e, "k")) {
            for (auto k : parse_int_list(*v)) {
                if (k < 1 || k > 1000) fail(origin, "k values must lie in [1, 1000]");
                cfg.sweep.k.push_back(static_cast<int>(k));
            }
        }
        if (auto v = get(e, "c")) {
            for (auto c : parse_int_list(*v)) {
                if (c < 1 || c > cfg.cache.library_size()) fail(origin, "c values must lie in [1, library_size]");
                cfg.sweep.c.push_back(c);
            }
        }
        if (auto v = get(e, "tau_db")) cfg.sweep.tau_db = parse_double_list(*v);
        if (cfg.sweep.schemes.empty()) cfg.sweep.schemes = {SelectionScheme::NS};
        if (cfg.sweep.k.empty()) cfg.sweep.k = {1};
        if (cfg.sweep.c.empty()) cfg.sweep.c = {1};

        mc::SimConfig& s = cfg.sim;
        if (auto v = get(e, "trials")) s.trials = to_int(origin, "trials", *v);
        if (auto v = get(e, "seed")) {
            const auto* end = v->data() + v->size();
            const auto [p, ec] = std::from_chars(v->data(), end, s.seed);
            if (ec != std::errc() || p != end) fail(origin, "key 'seed': '" + *v + "' is not an unsigned 64-bit integer");
        }
        if (auto v = get(e, "measurement_factor")) s.measurement_factor = to_double(origin, "measurement_factor", *v);
        if (auto v = get(e, "window_factor")) s.window_factor = to_double(origin, "window_factor", *v);
        if (auto v = get(e, "edge_policy")) {
            if (*v == "oversized_window") s.edge = mc::EdgePolicy::oversized_window;
            else if (*v == "toroidal") s.edge = mc::EdgePolicy::toroidal;
            else fail(origin, "edge_policy must be oversized_window or toroidal");
        }
        if (auto v = get(e, "us_variant")) cfg.us_variant = mc::parse_us_variant(*v);
        if (auto v = get(e, "workers")) {
            const auto w = to_int(origin, "workers", *v);
            if (w < 1 || w > 1024) fail(origin, "workers must lie in [1, 1024]");
            s.workers = static_cast<unsigned>(w);
        }
        if (auto v = get(e, "chunk")) s.chunk = to_int(origin, "chunk", *v);
        s.validate();

        if (auto v = get(e, "method")) {
            if (*v == "exact") cfg.method = Method::exact;
            else if (*v == "bound") cfg.method = Method::bound;
            else fail(origin, "method must be exact or bound");
        }
        if (auto v = get(e, "k_max")) cfg.model.k_max = static_cast<int>(to_int(origin, "k_max", *v));
        if (cfg.model.k_max < 1) fail(origin, "k_max must be >= 1");
        if (auto v = get(e, "grid_points")) cfg.model.grid.points = static_cast<int>(to_int(origin, "grid_points", *v));
        if (cfg.model.grid.points < 16) fail(origin, "grid_points must be >= 16");
        if (auto v = get(e, "norm_tolerance")) cfg.model.grid.norm_tolerance = to_double(origin, "norm_tolerance", *v);
        if (auto v = get(e, "renormalize")) cfg.model.renormalize = to_bool(origin, "renormalize", *v);
        if (auto v = get(e, "omega2_form")) {
            if (*v == "standard") cfg.model.grid.omega2 = Omega2Form::standard;
            else if (*v == "linear_variant") cfg.model.grid.omega2 = Omega2Form::linear_variant;
            else fail(origin, "omega2_form must be standard or linear_variant");
        }
        if (auto v = get(e, "containment_form")) {
            if (*v == "standard") cfg.model.grid.containment = ContainmentForm::standard;
            else if (*v == "printed_variant") cfg.model.grid.containment = ContainmentForm::printed_variant;
            else fail(origin, "containment_form must be standard or printed_variant");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        fail(origin, ex.what());
    }
    return cfg;
}

}  // namespace

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<std::int64_t> parse_int_list(std::string_view s) {
    std::vector<std::int64_t> out;
    std::stringstream ss{std::string(s)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        if (const auto dots = item.find(".."); dots != std::string::npos) {
            const auto lo = to_int("list", item, trim(std::string_view(item).substr(0, dots)));
            const auto hi = to_int("list", item, trim(std::string_view(item).substr(dots + 2)));
            if (hi < lo) throw ConfigError("list: empty range '" + item + "'");
            if (hi - lo > 1'000'000) throw ConfigError("list: range '" + item + "' too long");
            for (auto v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(to_int("list", item, item));
        }
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view s) {
    std::vector<double> out;
    std::stringstream ss{std::string(s)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double("list", item, item));
    }
    return out;
}

std::vector<std::string> builtin_profile_names() { return {"table1"}; }

std::string builtin_profile(std::string_view name) {
    if (name == "table1") return std::string(kTable1);
    throw ConfigError("unknown profile '" + std::string(name) + "'");
}

ExperimentConfig parse_profile(std::string_view text, std::string_view origin) {
    return materialize(read_entries(text, origin, 0), origin);
}

ExperimentConfig load_profile(const std::string& name_or_path) {
    return materialize(resolve_base(name_or_path, name_or_path, 0), name_or_path);
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "': expected key=value");
    Entries e = cfg.entries;
    set_entry(e, "override", trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), nullptr);
    cfg = materialize(e, "override");
}

std::string dump_profile(const ExperimentConfig& cfg) {
    std::ostringstream out;
    for (const auto& group : key_groups()) {
        for (const auto& key : group) {
            if (auto it = cfg.entries.find(key); it != cfg.entries.end()) out << key << " = " << it->second << '\n';
        }
    }
    return out.str();
}

}  // namespace d2d
