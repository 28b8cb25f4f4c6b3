#pragma once

#include "dcw/model.hpp"
#include "dcw/ode.hpp"

#include <array>
#include <vector>

namespace dcw {

/// Phase-plane point of the noiseless macroscopic system: magnetization m
/// and common intensity lambda.
struct MacroState {
    double m = 0.0;
    double lambda = 0.0;
};

/// Same point in Lienard coordinates, y = 2(lambda + beta m).
struct LienardState {
    double y = 0.0;
    double lambda = 0.0;
};

/// (dm/dt, dlambda/dt) = (-2(m + tanh lambda), 2 beta (m + tanh lambda) - alpha lambda).
std::array<double, 2> vector_field_dyn0(const MacroState& s, const ModelParams& params);

/// (dy/dt, dlambda/dt) = (-2 alpha lambda, y - g(lambda)).
std::array<double, 2> vector_field_lienard(const LienardState& s, const ModelParams& params);

LienardState to_lienard(const MacroState& s, const ModelParams& params);

/// Inverse map; requires beta > 0 (the change of variables loses m otherwise).
MacroState from_lienard(const LienardState& s, const ModelParams& params);

/// W(lambda, y) = lambda^2/2 + y^2/(4 alpha). Requires alpha > 0.
double lyapunov_w(const LienardState& s, const ModelParams& params);

/// Orbital derivative of W along the flow: -lambda * g(lambda).
double lyapunov_w_dot(const LienardState& s, const ModelParams& params);

enum class Coordinates { Macro, Lienard };

/// Integrated orbit: uniform samples plus the exact piecewise interpolant
/// and the integrator's step statistics.
struct Trajectory {
    Coordinates coords = Coordinates::Macro;
    std::vector<double> times;
    std::vector<std::array<double, 2>> states; // (m, lambda) or (y, lambda)
    DenseTrajectory<2> dense;
    IntegratorStats stats;

    std::array<double, 2> at(double t) const { return dense.eval(t); }
};

struct MacroOdeOptions {
    IntegratorOptions ode;
    double sample_dt = 0.05;        // cadence of the stored samples
    bool keep_dense = true;         // retain per-step interpolants
    double m_bound_slack = 1e-6;    // |m| <= 1 is monitored, not projected
};

/// Integrates either form of the macroscopic system over [0, T].
/// In Macro coordinates a drift of |m| beyond 1 + slack aborts with a
/// NumericalFailure: the flow preserves [-1,1] analytically, so a violation
/// indicates an integration bug rather than a state to clamp.
Trajectory integrate(const MacroState& initial, const ModelParams& params, double t_final,
                     const MacroOdeOptions& opts = {});

Trajectory integrate_lienard(const LienardState& initial, const ModelParams& params,
                             double t_final, const MacroOdeOptions& opts = {});

} // namespace dcw
