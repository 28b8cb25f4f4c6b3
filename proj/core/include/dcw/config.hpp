#pragma once

#include "dcw/macro_ode.hpp"
#include "dcw/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dcw {

enum class Engine { Particles, Ode, Pde, Cycle, Scan, Chaos };

const char* to_string(Engine e);
std::optional<Engine> engine_from_string(const std::string& name);

/// Fully resolved run description. Parsed from the plain-text
/// `key = value` format with one optional `[engine]` section; unknown keys
/// are rejected and every error is reported, not just the first.
struct RunConfig {
    Engine engine = Engine::Ode;
    ModelParams params{3.0, 1.0, 0.0, 1000};
    double lambda0 = 3.0;
    double m0 = 0.0;
    double horizon = 0.0;
    double cadence = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    // [particles]
    std::string method = "thinning"; // or "euler"
    double euler_dt = 1e-3;
    bool event_log = false;

    // [ode]
    double rtol = 1e-9;
    double atol = 1e-12;
    Coordinates coords = Coordinates::Macro;

    // [pde]
    int n_cells = 0;              // 0 = automatic
    double domain_half_width = 0; // 0 = automatic
    std::vector<double> snapshot_times;

    // [scan]
    double beta_lo = 0.0;
    double beta_hi = 0.0;
    double beta_step = 0.0;

    // [chaos]
    std::vector<int> chaos_sizes{250, 1000, 4000};
    int replicas = 16;

    bool operator==(const RunConfig&) const = default;
};

struct ParseOutcome {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
};

/// Parses and validates; on failure `config` is empty and `errors` lists
/// every problem found.
ParseOutcome parse_config(const std::string& text);

/// Same, but throws ConfigError with the joined error list.
RunConfig parse_config_or_throw(const std::string& text);

/// Parses with an extra layer of `key = value` overrides (CLI flags). Override
/// keys may be global ("alpha") or section-qualified ("pde.n_cells").
ParseOutcome parse_config_with_overrides(
    const std::string& text, const std::vector<std::pair<std::string, std::string>>& overrides);

/// Config text that reproduces exactly this RunConfig (the manifest body).
std::string serialize_config(const RunConfig& config);

/// Named parameter sets for the reference figures (fig5, fig7, fig9, fig11); the
/// *-noiseless variants run the macroscopic ODE instead of the PDE.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name); // throws ConfigError if unknown

} // namespace dcw
