#include "dcw/runner.hpp"

#include "dcw/chaos.hpp"
#include "dcw/csv.hpp"
#include "dcw/cycle.hpp"
#include "dcw/errors.hpp"
#include "dcw/fokker_planck.hpp"
#include "dcw/macro_ode.hpp"
#include "dcw/particle.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace dcw {

namespace fs = std::filesystem;

std::string param_tag(const ModelParams& params) {
    const auto g = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    return "alpha" + g(params.alpha) + "_beta" + g(params.beta) + "_sigma" + g(params.sigma);
}

namespace {

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
}

// Phase plots show the expected value of lambda versus m; the
// generated script puts m on the x axis and <lambda> on the y axis.
void write_phase_plot_script(const fs::path& dir, const std::string& csv_name, int m_col,
                             int lambda_col) {
    std::string body;
    body += "# gnuplot script; run: gnuplot plot.gp\n";
    body += "# phase plot: x axis = m (magnetization), y axis = <lambda> (mean intensity)\n";
    body += "set datafile separator ','\n";
    body += "set xlabel 'm'\n";
    body += "set ylabel 'mean lambda'\n";
    body += "set grid\n";
    body += "set term pngcairo size 800,600\n";
    body += "set output 'phase.png'\n";
    body += "plot '" + csv_name + "' using " + std::to_string(m_col) + ":" +
            std::to_string(lambda_col) + " every ::1 with lines title 'trajectory'\n";
    write_file(dir / "plot.gp", body);
}

void run_particles(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const InitialCondition init{c.m0, c.lambda0};
    const std::string tag = param_tag(c.params) + "_seed" + std::to_string(c.seed);
    SimResult result;
    if (c.method == "euler") {
        result = simulate_reference_euler(c.params, init, c.horizon, c.euler_dt, c.seed);
    } else {
        ParticleSystem final_state;
        result = simulate(c.params, init, c.horizon, c.cadence, c.seed,
                          c.event_log ? &final_state : nullptr, c.event_log);
        if (c.event_log) {
            CsvWriter ecsv((dir / ("particles_events_" + tag + ".csv")).string(),
                           "t,particle,spin_before");
            for (const auto& e : final_state.log().events)
                ecsv.row({cell(e.time), cell(e.particle), cell(static_cast<int>(e.spin_before))});
        }
    }
    const std::string name = "particles_series_" + tag + ".csv";
    CsvWriter csv((dir / name).string(), "t,m,lambda_mean,lambda_var,flips");
    for (const auto& row : result.series)
        csv.row({cell(row.t), cell(row.m), cell(row.lambda_mean), cell(row.lambda_var),
                 cell(row.flips)});
    csv.close();
    write_phase_plot_script(dir, name, 2, 3);
    log << "particles: " << result.total_flips << " flips / " << result.total_proposals
        << " proposals, series -> " << name << "\n";
}

void run_ode(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    MacroOdeOptions opts;
    opts.ode.rtol = c.rtol;
    opts.ode.atol = c.atol;
    opts.sample_dt = c.cadence;
    opts.keep_dense = false;

    const std::string name = "ode_series_" + param_tag(c.params) + ".csv";
    if (c.coords == Coordinates::Macro) {
        const auto traj = integrate({c.m0, c.lambda0}, c.params, c.horizon, opts);
        CsvWriter csv((dir / name).string(), "t,m,lambda");
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            csv.row({cell(traj.times[i]), cell(traj.states[i][0]), cell(traj.states[i][1])});
        csv.close();
        write_phase_plot_script(dir, name, 2, 3);
    } else {
        const auto start = to_lienard({c.m0, c.lambda0}, c.params);
        const auto traj = integrate_lienard(start, c.params, c.horizon, opts);
        CsvWriter csv((dir / name).string(), "t,y,lambda");
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            csv.row({cell(traj.times[i]), cell(traj.states[i][0]), cell(traj.states[i][1])});
        csv.close();
    }
    log << "ode: series -> " << name << "\n";
}

void run_pde(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const Grid grid = Grid::automatic(c.params, c.lambda0, c.n_cells, c.domain_half_width);
    const DensityPair initial = mollified_delta(grid, c.lambda0, c.m0);
    const FpResult result = solve(initial, c.params, c.horizon, c.cadence, c.snapshot_times);

    const std::string tag = param_tag(c.params);
    const std::string name = "pde_series_" + tag + ".csv";
    CsvWriter csv((dir / name).string(), "t,m,lambda_mean,lambda_var,g");
    for (const auto& row : result.series)
        csv.row({cell(row.t), cell(row.m), cell(row.lambda_mean), cell(row.lambda_var),
                 cell(row.g)});
    csv.close();

    for (const auto& snap : result.snapshots) {
        char tbuf[32];
        std::snprintf(tbuf, sizeof(tbuf), "%g", snap.time);
        CsvWriter scsv((dir / ("pde_snapshot_" + tag + "_t" + tbuf + ".csv")).string(),
                       "lambda,nu,mu");
        for (int i = 0; i < snap.grid.n_cells; ++i)
            scsv.row({cell(snap.grid.centers[i]), cell(snap.nu[i]), cell(snap.mu[i])});
        scsv.close();
    }
    write_phase_plot_script(dir, name, 2, 3);
    log << "pde: " << result.steps << " steps (dt=" << result.dt << ", cells=" << grid.n_cells
        << ", L=" << grid.half_width << ", delta mollified to std=" << 2.0 * grid.d_lambda
        << "), max mass drift " << result.max_mass_drift << ", series -> " << name << "\n";
}

void run_cycle(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const auto result = find_limit_cycle(c.params);
    if (!result.has_cycle) {
        log << "cycle: no cycle (origin " << to_string(classify_origin(c.params))
            << "; threshold beta = alpha/2 + 1 = " << c.params.alpha / 2.0 + 1.0 << ")\n";
        write_file(dir / "cycle_summary.txt",
                   "has_cycle = false\nclassification = " +
                       std::string(to_string(classify_origin(c.params))) + "\n");
        return;
    }
    const LimitCycle& cycle = *result.cycle;
    const std::string name = "cycle_orbit_" + param_tag(c.params) + ".csv";
    CsvWriter csv((dir / name).string(), "t,y,lambda");
    for (std::size_t i = 0; i < cycle.orbit.size(); ++i)
        csv.row({cell(cycle.times[i]), cell(cycle.orbit[i].y), cell(cycle.orbit[i].lambda)});
    csv.close();

    std::string plot;
    plot += "# gnuplot script; run: gnuplot plot.gp\n";
    plot += "# the closed orbit in the Lienard plane (x = y, y = lambda)\n";
    plot += "set datafile separator ','\n";
    plot += "set xlabel 'y'\nset ylabel 'lambda'\nset grid\nset size ratio -1\n";
    plot += "set term pngcairo size 800,600\nset output 'cycle.png'\n";
    plot += "plot '" + name + "' using 2:3 every ::1 with lines title 'limit cycle'\n";
    write_file(dir / "plot.gp", plot);
    write_file(dir / "cycle_summary.txt",
               "has_cycle = true\ny0_p = " + format_double(cycle.y0_p) +
                   "\nperiod = " + format_double(cycle.period) +
                   "\namplitude_m = " + format_double(cycle.amplitude_m) +
                   "\nclosure_error = " + format_double(cycle.closure_error) + "\n");
    log << "cycle: y0_p=" << cycle.y0_p << " period=" << cycle.period
        << " amplitude_m=" << cycle.amplitude_m << " -> " << name << "\n";
}

void run_scan(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const auto rows = bifurcation_scan(c.params.alpha, c.beta_lo, c.beta_hi, c.beta_step);
    char abuf[32];
    std::snprintf(abuf, sizeof(abuf), "%g", c.params.alpha);
    const std::string name = "scan_alpha" + std::string(abuf) + ".csv";
    CsvWriter csv((dir / name).string(),
                  "beta,classification,re_eig,im_eig,has_cycle,y0_p,period,amplitude_m");
    for (const auto& row : rows)
        csv.row({cell(row.beta), to_string(row.classification), cell(row.re_eig),
                 cell(row.im_eig), cell(row.has_cycle), cell(row.y0_p), cell(row.period),
                 cell(row.amplitude_m)});
    csv.close();

    std::string plot;
    plot += "# gnuplot script; run: gnuplot plot.gp\n";
    plot += "# cycle amplitude in m against beta; the onset sits at beta = alpha/2 + 1\n";
    plot += "set datafile separator ','\n";
    plot += "set xlabel 'beta'\nset ylabel 'amplitude of m'\nset grid\n";
    plot += "set term pngcairo size 800,600\nset output 'scan.png'\n";
    plot += "plot '" + name + "' using 1:8 every ::1 with linespoints title 'amplitude_m'\n";
    write_file(dir / "plot.gp", plot);
    log << "scan: " << rows.size() << " beta points -> " << name << "\n";
}

void run_chaos(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const InitialCondition init{c.m0, c.lambda0};
    const auto study =
        convergence_study(c.params, init, c.horizon, c.chaos_sizes, c.replicas, c.seed);
    const std::string name = "chaos_study_" + param_tag(c.params) + ".csv";
    CsvWriter csv((dir / name).string(), "n,replicas,d_n,stderr");
    for (const auto& row : study.rows)
        csv.row({cell(row.n), cell(row.replicas), cell(row.d_n), cell(row.standard_error)});
    csv.close();
    write_file(dir / "chaos_summary.txt",
               "slope = " + format_double(study.slope) +
                   "\nintercept = " + format_double(study.intercept) + "\n");

    std::string plot;
    plot += "# gnuplot script; run: gnuplot plot.gp\n";
    plot += "# coupling distance against system size on log-log axes; the\n";
    plot += "# mean-field limit predicts slope -1/2\n";
    plot += "set datafile separator ','\n";
    plot += "set logscale xy\nset xlabel 'N'\nset ylabel 'd_N'\nset grid\n";
    plot += "set term pngcairo size 800,600\nset output 'chaos.png'\n";
    plot += "plot '" + name + "' using 1:3:4 every ::1 with yerrorlines title 'd_N', \\\n";
    plot += "     exp(" + format_double(study.intercept) + ") * x**(" +
            format_double(study.slope) + ") title 'fit'\n";
    write_file(dir / "plot.gp", plot);
    log << "chaos: fitted slope " << study.slope << " -> " << name << "\n";
}

} // namespace

int run(const RunConfig& config, std::ostream& log) {
    fs::path dir;
    try {
        dir = config.out_dir;
        fs::create_directories(dir);
        write_file(dir / "manifest.txt", serialize_config(config));
    } catch (const std::exception& e) {
        log << "error: cannot prepare output directory: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        switch (config.engine) {
            case Engine::Particles: run_particles(config, dir, log); break;
            case Engine::Ode: run_ode(config, dir, log); break;
            case Engine::Pde: run_pde(config, dir, log); break;
            case Engine::Cycle: run_cycle(config, dir, log); break;
            case Engine::Scan: run_scan(config, dir, log); break;
            case Engine::Chaos: run_chaos(config, dir, log); break;
        }
    } catch (const ConfigError& e) {
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const NoConvergence& e) {
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        log << "no convergence: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const NumericalFailure& e) {
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const std::domain_error& e) {
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    return kExitOk;
}

} // namespace dcw
