#pragma once

#include "dcw/model.hpp"

#include <vector>

namespace dcw {

/// Uniform cell-centered grid on [-L, L]. Centers are built symmetrically,
/// (i + 1/2 - n/2) * d_lambda, so that mirror cells are exact negations.
struct Grid {
    int n_cells = 0;
    double d_lambda = 0.0;
    double half_width = 0.0; // L = (n/2) * d_lambda
    std::vector<double> centers;

    static Grid make(double half_width, int n_cells);

    /// Default truncation L = max(2 |lambda0|, 6 sigma / sqrt(2 alpha) + 4 beta/alpha + 2)
    /// and a resolution tied to the stationary width sigma / sqrt(2 alpha).
    /// Pass n_cells = 0 to pick the resolution automatically.
    static Grid automatic(const ModelParams& params, double lambda0, int n_cells = 0,
                          double half_width_override = 0.0);

    double edge(int j) const { return (j - n_cells / 2) * d_lambda; }
};

/// Grid samples of the pair (nu, mu): nu is the density of the intensity
/// marginal, mu the signed spin-weighted density with integral m(t).
struct DensityPair {
    Grid grid;
    std::vector<double> nu;
    std::vector<double> mu;
    double time = 0.0;
};

/// Delta initial data mollified as a Gaussian of standard deviation
/// width_cells * d_lambda (2 cells by default), discretely normalized;
/// mu = m0 * nu.
DensityPair mollified_delta(const Grid& grid, double lambda0, double m0,
                            double width_cells = 2.0);

struct FpMoments {
    double mass_nu;
    double m;
    double lambda_mean;
    double lambda_var;
};

/// Midpoint-rule moments of (nu, mu).
FpMoments moments(const DensityPair& density);

/// Self-consistent mean field g = <nu, tanh(lambda)> + m.
double compute_g(const DensityPair& density);

struct FpOptions {
    double cfl = 0.4;
    double mass_drift_tol = 1e-6;
    double negativity_tol = 1e-10;
    double boundary_mass_tol = 1e-8;
};

/// Largest stable explicit step for the given grid and parameters
/// (advection bound uses |g| <= 2, so the step is state-independent).
double stable_dt(const Grid& grid, const ModelParams& params, double cfl = 0.4);

/// One SSP-RK2 step of the coupled system in conservative finite-volume form:
///   d nu/dt = d/dl [(alpha l - 2 beta g) nu] + (sigma^2/2) d^2 nu/dl^2
///   d mu/dt = same transport - 2 mu - 2 tanh(l) nu
/// with van-Leer-limited upwind advective fluxes, centered diffusive fluxes
/// and zero-flux boundaries. Throws NumericalFailure if dt violates the CFL
/// bound (the message carries a usable dt).
void fp_step(DensityPair& density, double dt, const ModelParams& params,
             const FpOptions& opts = {});

struct FpSeriesRow {
    double t;
    double m;
    double lambda_mean;
    double lambda_var;
    double g;
};

struct FpResult {
    std::vector<FpSeriesRow> series;
    std::vector<DensityPair> snapshots;
    DensityPair final_state;
    double dt = 0.0;
    std::uint64_t steps = 0;
    double max_mass_drift = 0.0;
};

/// Advances the pair until t_final, recording moments at the given cadence
/// and density snapshots at the requested times. Aborts with NumericalFailure
/// on mass drift, negativity of nu or boundary mass beyond the tolerances.
/// sigma = 0 is rejected (the hyperbolic limit belongs to the macroscopic ODE).
FpResult solve(const DensityPair& initial, const ModelParams& params, double t_final,
               double cadence, const std::vector<double>& snapshot_times = {},
               const FpOptions& opts = {});

} // namespace dcw
