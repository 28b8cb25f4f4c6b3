#include "dcw/cycle.hpp"

#include "dcw/errors.hpp"
#include "dcw/ode.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dcw {

namespace {

struct LienardField {
    ModelParams params;
    void operator()(double, const std::array<double, 2>& y, std::array<double, 2>& dydt) const {
        dydt[0] = -2.0 * params.alpha * y[1];
        dydt[1] = y[0] - ((2.0 + params.alpha) * y[1] - 2.0 * params.beta * std::tanh(y[1]));
    }
};

// Bisection on the dense output of one accepted step for the time at which
// lambda crosses zero. The crossing is transversal away from the origin, so
// plain bisection on the sign is reliable.
template <class Stepper>
double refine_crossing(const Stepper& stepper, double crossing_tol) {
    double t_lo = stepper.t_prev();
    double t_hi = stepper.t();
    double lam_lo = stepper.y_prev()[1];
    for (int it = 0; it < 200; ++it) {
        const double t_mid = 0.5 * (t_lo + t_hi);
        const double lam_mid = stepper.dense(t_mid)[1];
        if (std::abs(lam_mid) < crossing_tol || (t_hi - t_lo) < 1e-15 * std::max(1.0, t_hi))
            return t_mid;
        if ((lam_lo < 0.0) == (lam_mid < 0.0)) {
            t_lo = t_mid;
            lam_lo = lam_mid;
        } else {
            t_hi = t_mid;
        }
    }
    return 0.5 * (t_lo + t_hi);
}

} // namespace

HalfReturn half_return(double y0, const ModelParams& params, const CycleOptions& opts) {
    if (!(y0 > 0.0)) throw std::domain_error("half_return: y0 must be > 0");
    if (!(params.alpha > 0.0)) throw std::domain_error("half_return: alpha must be > 0");

    Dopri5<2, LienardField> stepper(LienardField{params}, opts.ode);
    stepper.init(0.0, {y0, 0.0}, opts.max_return_time);

    // At (y0, 0) the flow points into lambda > 0; the first return is the
    // crossing back through lambda = 0 with y < 0.
    while (stepper.step()) {
        const double lam_prev = stepper.y_prev()[1];
        const double lam_cur = stepper.y()[1];
        if (stepper.t_prev() > 0.0 && lam_prev > 0.0 && lam_cur <= 0.0) {
            const double t_cross = refine_crossing(stepper, opts.crossing_tol);
            const auto state = stepper.dense(t_cross);
            if (!(state[0] < 0.0))
                throw NumericalFailure("half_return: non-transversal section crossing at y=" +
                                       std::to_string(state[0]));
            return {y0, state[0], t_cross};
        }
    }
    throw NoConvergence("half_return: no return to the section within t=" +
                        std::to_string(opts.max_return_time) + " from y0=" +
                        std::to_string(y0));
}

double delta_w(double y0, const ModelParams& params, const CycleOptions& opts) {
    const HalfReturn half = half_return(y0, params, opts);
    return (half.y1 * half.y1 - y0 * y0) / (4.0 * params.alpha);
}

namespace {

LimitCycle assemble_cycle(double y0_p, const ModelParams& params, const CycleOptions& opts) {
    LimitCycle cycle;
    cycle.y0_p = y0_p;
    cycle.delta_w_residual = delta_w(y0_p, params, opts);

    const HalfReturn half = half_return(y0_p, params, opts);
    cycle.period = 2.0 * half.transit_time; // odd symmetry of the field

    // Integrate the full period once for the orbit record and the closure check.
    Dopri5<2, LienardField> stepper(LienardField{params}, opts.ode);
    stepper.init(0.0, {y0_p, 0.0}, cycle.period);
    DenseTrajectory<2> dense;
    while (stepper.step())
        dense.push({stepper.t_prev(), stepper.t(), stepper.dense_coefficients()});

    const auto end = stepper.y();
    cycle.closure_error = std::hypot(end[0] - y0_p, end[1]);
    if (cycle.closure_error > opts.closure_tol)
        throw NumericalFailure("find_limit_cycle: orbit closure error " +
                               std::to_string(cycle.closure_error) + " exceeds tolerance");

    cycle.times.resize(opts.orbit_samples);
    cycle.orbit.resize(opts.orbit_samples);
    double amp_m = 0.0;
    for (int i = 0; i < opts.orbit_samples; ++i) {
        const double t = cycle.period * i / opts.orbit_samples;
        const auto s = dense.eval(t);
        cycle.times[i] = t;
        cycle.orbit[i] = {s[0], s[1]};
        // supercritical implies beta > 1, so the inverse map is available
        amp_m = std::max(amp_m, std::abs(from_lienard({s[0], s[1]}, params).m));
    }
    cycle.amplitude_m = amp_m;
    return cycle;
}

} // namespace

CycleSearchResult find_limit_cycle(const ModelParams& params, const CycleOptions& opts) {
    if (!params.supercritical()) return {false, std::nullopt};

    // Bracket the root of delta_w. The origin is repelling, so delta_w > 0 for
    // small y0; expand geometrically until it turns negative.
    double lo = opts.bracket_start;
    double f_lo = delta_w(lo, params, opts);
    while (f_lo <= 0.0) {
        lo /= 4.0;
        if (lo < 1e-9)
            throw NoConvergence("find_limit_cycle: delta_w not positive near the origin");
        f_lo = delta_w(lo, params, opts);
    }
    double hi = lo;
    double f_hi = f_lo;
    while (f_hi > 0.0) {
        hi *= 2.0;
        if (hi > opts.bracket_cap)
            throw NoConvergence("find_limit_cycle: no sign change of delta_w below y0=" +
                                std::to_string(opts.bracket_cap));
        f_hi = delta_w(hi, params, opts);
    }

    // Secant/bisection hybrid on [lo, hi].
    double root = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double cand = lo - f_lo * (hi - lo) / (f_hi - f_lo); // secant through bracket
        const double width = hi - lo;
        if (!(cand > lo + 1e-3 * width) || !(cand < hi - 1e-3 * width))
            cand = 0.5 * (lo + hi);
        const double f_cand = delta_w(cand, params, opts);
        root = cand;
        if (std::abs(f_cand) < opts.delta_w_tol) break;
        if (f_cand > 0.0) {
            lo = cand;
            f_lo = f_cand;
        } else {
            hi = cand;
            f_hi = f_cand;
        }
        // integration noise floor: the bracket cannot shrink meaningfully further
        if (hi - lo < 1e-12 * std::max(1.0, hi)) {
            root = 0.5 * (lo + hi);
            break;
        }
    }

    return {true, assemble_cycle(root, params, opts)};
}

std::vector<ScanRow> bifurcation_scan(double alpha, double beta_lo, double beta_hi,
                                      double beta_step, const CycleOptions& opts) {
    if (!(beta_step > 0.0) || !(beta_hi >= beta_lo))
        throw std::domain_error("bifurcation_scan: bad beta range");

    std::vector<ScanRow> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const long n_steps = std::lround((beta_hi - beta_lo) / beta_step);
    for (long k = 0; k <= n_steps; ++k) {
        const double beta = beta_lo + static_cast<double>(k) * beta_step;
        ModelParams params{alpha, beta, 0.0, 1};
        ScanRow row;
        row.beta = beta;
        row.classification = classify_origin(params);
        const auto eigs = linearization_eigenvalues(params);
        row.re_eig = eigs.first.real();
        row.im_eig = eigs.first.imag();
        row.y0_p = nan;
        row.period = nan;
        row.amplitude_m = nan;
        try {
            const auto result = find_limit_cycle(params, opts);
            row.has_cycle = result.has_cycle;
            if (result.has_cycle) {
                row.y0_p = result.cycle->y0_p;
                row.period = result.cycle->period;
                row.amplitude_m = result.cycle->amplitude_m;
            }
        } catch (const NoConvergence& e) {
            row.has_cycle = false;
            row.status = e.what();
        } catch (const NumericalFailure& e) {
            row.has_cycle = false;
            row.status = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace dcw
