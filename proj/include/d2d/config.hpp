#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "d2d/content_model.hpp"
#include "d2d/mc_oracle.hpp"
#include "d2d/mode_selection.hpp"
#include "d2d/performance.hpp"

namespace d2d {

struct Sweep {
    std::vector<SelectionScheme> schemes;
    std::vector<int> k;
    std::vector<std::int64_t> c;
    std::vector<double> tau_db;  // link-level threshold axis
};

/// Everything one CLI invocation needs, converted to linear SI units.
struct ExperimentConfig {
    std::string name = "custom";
    NetworkParams network;
    CacheParams cache{10000, 0.8, 500, 20};
    mc::SimConfig sim;
    mc::UsVariant us_variant = mc::UsVariant::select_then_check;
    ModelOptions model;
    Method method = Method::exact;
    Sweep sweep;
    // Canonical key/value pairs as parsed, for `profile dump`.
    std::map<std::string, std::string> entries;
};

/// Flat `key = value` text; `#` starts a comment. Unit suffixes in key names:
///   lambda_{m,d,u}_per_km2 or lambda_{m,d,u}_n_per_reference_disk (+ reference_disk_radius_m),
///   p_{m,d}_dbm or p_{m,d}_w, w_{m,d}_mhz, tau_{m,d}_db, noise_dbm or noise_w.
/// `base = <profile>` inherits every key of another profile first.
/// Unknown keys and missing required keys raise ConfigError.
ExperimentConfig parse_profile(std::string_view text, std::string_view origin = "<string>");

/// Resolves a profile by path, then $D2DOFFLOAD_PROFILE_DIR/<name>.profile,
/// then the built-in set.
ExperimentConfig load_profile(const std::string& name_or_path);

/// Text of a built-in profile; throws ConfigError for unknown names.
std::string builtin_profile(std::string_view name);
std::vector<std::string> builtin_profile_names();

/// Applies one `key=value` override with the same rules as the profile file.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Canonical profile text; parse_profile(dump_profile(c)) reproduces c.
std::string dump_profile(const ExperimentConfig& cfg);

/// "1..8", "1,2,4,8" or a mix such as "1..4,8".
std::vector<std::int64_t> parse_int_list(std::string_view s);
std::vector<double> parse_double_list(std::string_view s);

double dbm_to_watt(double dbm);
double db_to_linear(double db);

}  // namespace d2d
