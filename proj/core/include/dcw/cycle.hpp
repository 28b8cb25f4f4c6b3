#pragma once

#include "dcw/macro_ode.hpp"
#include "dcw/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dcw {

/// One application of the half-return map on the section lambda = 0 of the
/// Lienard plane: start at (y0, 0) with y0 > 0, integrate until the first
/// transversal crossing of lambda = 0 with y < 0.
struct HalfReturn {
    double y0 = 0.0;
    double y1 = 0.0;           // < 0
    double transit_time = 0.0; // > 0
};

/// The unique attracting periodic orbit of the supercritical regime.
struct LimitCycle {
    double y0_p = 0.0;    // positive y-axis intersection (fixed point of the return map)
    double period = 0.0;
    double amplitude_m = 0.0; // max |m| along the cycle after mapping back
    double closure_error = 0.0;
    double delta_w_residual = 0.0;
    std::vector<double> times;
    std::vector<LienardState> orbit; // one full period, uniformly sampled
};

struct CycleSearchResult {
    bool has_cycle = false;
    std::optional<LimitCycle> cycle;
};

struct CycleOptions {
    IntegratorOptions ode{1e-12, 1e-14};
    double crossing_tol = 1e-10;   // |lambda| at the refined section crossing
    double delta_w_tol = 1e-12;    // target |Delta W| at the root
    double bracket_start = 1e-2;   // first y0 probed
    double bracket_cap = 1e3;      // expansion limit before giving up
    double max_return_time = 200.0;
    double closure_tol = 1e-6;
    int orbit_samples = 2048;
};

/// Integrates eq. (lien)-form dynamics from (y0, 0) to the first crossing of
/// lambda = 0 with y < 0, localizing the crossing on the dense output.
/// Throws NoConvergence if the orbit does not return before max_return_time
/// (which happens subcritically when the origin is a node rather than a focus).
HalfReturn half_return(double y0, const ModelParams& params, const CycleOptions& opts = {});

/// Energy change over a half orbit: (y1^2 - y0^2) / (4 alpha). Its unique
/// positive zero is the limit cycle.
double delta_w(double y0, const ModelParams& params, const CycleOptions& opts = {});

/// Locates the periodic orbit by bracketing the sign change of delta_w and
/// refining with a secant/bisection hybrid. Subcritical parameters yield
/// has_cycle = false without integrating.
CycleSearchResult find_limit_cycle(const ModelParams& params, const CycleOptions& opts = {});

struct ScanRow {
    double beta = 0.0;
    OriginStability classification = OriginStability::Stable;
    double re_eig = 0.0;
    double im_eig = 0.0;
    bool has_cycle = false;
    double y0_p = 0.0;      // NaN when absent
    double period = 0.0;    // NaN when absent
    double amplitude_m = 0.0;
    std::string status = "ok"; // per-point failure note, not part of the CSV schema
};

/// Sweeps beta over [beta_lo, beta_hi] in the given step, classifying the
/// origin and probing for the cycle at each point. Per-point failures are
/// recorded in the row status instead of aborting the scan.
std::vector<ScanRow> bifurcation_scan(double alpha, double beta_lo, double beta_hi,
                                      double beta_step, const CycleOptions& opts = {});

} // namespace dcw
