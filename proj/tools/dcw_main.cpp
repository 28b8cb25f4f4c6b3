// dcw: dissipative Curie-Weiss model toolbox.
//
// One subcommand per engine:
//   particles  N-particle jump-diffusion (Poisson thinning, or the Euler oracle)
//   ode        noiseless macroscopic system
//   pde        Fokker-Planck system for the noisy case
//   cycle      limit-cycle detection in the Lienard plane
//   scan       bifurcation scan across beta = alpha/2 + 1
//   chaos      shared-noise coupling study (propagation of chaos)
//
// Parameters come from --preset, --config file and flags, in that order of
// increasing precedence. Every run writes a manifest.txt that can be fed back
// through --config.

#include "CLI11.hpp"

#include "dcw/config.hpp"
#include "dcw/runner.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

struct CommonFlags {
    std::string preset;
    std::string config_file;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--preset", flags.preset, "named parameter set (fig5, fig7, fig9, fig11, *-noiseless)");
    cmd->add_option("--config", flags.config_file, "plain-text key = value configuration file");

    const auto forward = [&flags](const std::string& key) {
        return [&flags, key](const std::string& value) { flags.overrides.emplace_back(key, value); };
    };
    cmd->add_option_function<std::string>("--alpha", forward("alpha"), "dissipation rate");
    cmd->add_option_function<std::string>("--sigma", forward("sigma"), "intensity diffusion");
    cmd->add_option_function<std::string>("--lambda0", forward("lambda0"), "initial intensity");
    cmd->add_option_function<std::string>("--m0", forward("m0"), "initial magnetization");
    cmd->add_option_function<std::string>("-T,--horizon", forward("horizon"), "simulation horizon");
    cmd->add_option_function<std::string>("--cadence", forward("cadence"), "observation cadence");
    cmd->add_option_function<std::string>("--seed", forward("seed"), "random seed (default: DCW_SEED or 0)");
    cmd->add_option_function<std::string>("--out", forward("out_dir"), "output directory (default: DCW_OUT or .)");
}

int finish(const CommonFlags& flags, const std::string& engine) {
    std::string base;
    try {
        if (!flags.preset.empty()) base += dcw::preset_text(flags.preset);
    } catch (const dcw::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dcw::kExitConfigError;
    }
    if (!flags.config_file.empty()) {
        std::ifstream in(flags.config_file);
        if (!in) {
            std::cerr << "error: cannot read config file " << flags.config_file << "\n";
            return dcw::kExitConfigError;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        base += "\n" + ss.str();
    }

    auto overrides = flags.overrides;
    overrides.emplace_back("engine", engine);

    // flatten: re-parse base into one text (later keys win) by appending the
    // overrides to the parsed map via parse_config_with_overrides
    const auto outcome = dcw::parse_config_with_overrides(base, overrides);
    if (!outcome.config) {
        std::cerr << "invalid configuration:\n";
        for (const auto& e : outcome.errors) std::cerr << "  - " << e << "\n";
        return dcw::kExitConfigError;
    }
    return dcw::run(*outcome.config, std::cout);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dissipative Curie-Weiss model: particles, macroscopic ODE, Fokker-Planck"};
    app.require_subcommand(1);

    CommonFlags particles_flags, ode_flags, pde_flags, cycle_flags, scan_flags, chaos_flags;

    auto* particles = app.add_subcommand("particles", "microscopic N-particle simulation");
    add_common(particles, particles_flags);
    const auto fwd = [](CommonFlags& flags, const std::string& key) {
        return [&flags, key](const std::string& value) { flags.overrides.emplace_back(key, value); };
    };
    particles->add_option_function<std::string>("--beta", fwd(particles_flags, "beta"), "interaction strength");
    particles->add_option_function<std::string>("--n", fwd(particles_flags, "particles.n_particles"), "number of particles");
    particles->add_option_function<std::string>("--method", fwd(particles_flags, "particles.method"), "thinning|euler");
    particles->add_option_function<std::string>("--dt", fwd(particles_flags, "particles.euler_dt"), "Euler step (method=euler)");
    particles->add_option_function<std::string>("--event-log", fwd(particles_flags, "particles.event_log"), "record per-event detail (true|false)");

    auto* ode = app.add_subcommand("ode", "noiseless macroscopic system");
    add_common(ode, ode_flags);
    ode->add_option_function<std::string>("--beta", fwd(ode_flags, "beta"), "interaction strength");
    ode->add_option_function<std::string>("--rtol", fwd(ode_flags, "ode.rtol"), "relative tolerance");
    ode->add_option_function<std::string>("--atol", fwd(ode_flags, "ode.atol"), "absolute tolerance");
    ode->add_option_function<std::string>("--coords", fwd(ode_flags, "ode.coords"), "macro|lienard");

    auto* pde = app.add_subcommand("pde", "Fokker-Planck system (sigma > 0)");
    add_common(pde, pde_flags);
    pde->add_option_function<std::string>("--beta", fwd(pde_flags, "beta"), "interaction strength");
    pde->add_option_function<std::string>("--cells", fwd(pde_flags, "pde.n_cells"), "grid cells (0 = auto)");
    pde->add_option_function<std::string>("--domain", fwd(pde_flags, "pde.domain_half_width"), "domain half width L (0 = auto)");
    pde->add_option_function<std::string>("--snapshots", fwd(pde_flags, "pde.snapshot_times"), "comma-separated snapshot times");

    auto* cycle = app.add_subcommand("cycle", "limit-cycle detection");
    add_common(cycle, cycle_flags);
    cycle->add_option_function<std::string>("--beta", fwd(cycle_flags, "beta"), "interaction strength");

    auto* scan = app.add_subcommand("scan", "bifurcation scan over beta");
    add_common(scan, scan_flags);
    std::string scan_range;
    scan->add_option("--beta", scan_range, "beta range lo:hi:step (e.g. 2.0:3.0:0.05)");

    auto* chaos = app.add_subcommand("chaos", "propagation-of-chaos coupling study");
    add_common(chaos, chaos_flags);
    chaos->add_option_function<std::string>("--beta", fwd(chaos_flags, "beta"), "interaction strength");
    chaos->add_option_function<std::string>("--sizes", fwd(chaos_flags, "chaos.sizes"), "comma-separated system sizes");
    chaos->add_option_function<std::string>("--replicas", fwd(chaos_flags, "chaos.replicas"), "replicas per size");

    auto* presets = app.add_subcommand("presets", "list the named parameter sets");

    CLI11_PARSE(app, argc, argv);

    if (presets->parsed()) {
        for (const auto& name : dcw::preset_names()) std::cout << name << "\n";
        return 0;
    }
    if (particles->parsed()) return finish(particles_flags, "particles");
    if (ode->parsed()) return finish(ode_flags, "ode");
    if (pde->parsed()) return finish(pde_flags, "pde");
    if (cycle->parsed()) return finish(cycle_flags, "cycle");
    if (scan->parsed()) {
        if (!scan_range.empty()) {
            const auto c1 = scan_range.find(':');
            const auto c2 = scan_range.find(':', c1 == std::string::npos ? 0 : c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos) {
                std::cerr << "error: --beta expects lo:hi:step\n";
                return dcw::kExitConfigError;
            }
            scan_flags.overrides.emplace_back("scan.beta_lo", scan_range.substr(0, c1));
            scan_flags.overrides.emplace_back("scan.beta_hi", scan_range.substr(c1 + 1, c2 - c1 - 1));
            scan_flags.overrides.emplace_back("scan.beta_step", scan_range.substr(c2 + 1));
            scan_flags.overrides.emplace_back("beta", scan_range.substr(0, c1));
        }
        return finish(scan_flags, "scan");
    }
    if (chaos->parsed()) return finish(chaos_flags, "chaos");
    return 0;
}
