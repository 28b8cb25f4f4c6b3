#include "dcw/macro_ode.hpp"

#include "dcw/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dcw {

std::array<double, 2> vector_field_dyn0(const MacroState& s, const ModelParams& params) {
    const double drive = s.m + std::tanh(s.lambda);
    return {-2.0 * drive, 2.0 * params.beta * drive - params.alpha * s.lambda};
}

std::array<double, 2> vector_field_lienard(const LienardState& s, const ModelParams& params) {
    return {-2.0 * params.alpha * s.lambda, s.y - lienard_g(s.lambda, params)};
}

LienardState to_lienard(const MacroState& s, const ModelParams& params) {
    return {2.0 * (s.lambda + params.beta * s.m), s.lambda};
}

MacroState from_lienard(const LienardState& s, const ModelParams& params) {
    if (params.beta <= 0.0)
        throw std::domain_error("from_lienard: beta must be > 0 to invert the map");
    return {(s.y / 2.0 - s.lambda) / params.beta, s.lambda};
}

double lyapunov_w(const LienardState& s, const ModelParams& params) {
    if (params.alpha <= 0.0)
        throw std::domain_error("lyapunov_w: alpha must be > 0");
    return s.lambda * s.lambda / 2.0 + s.y * s.y / (4.0 * params.alpha);
}

double lyapunov_w_dot(const LienardState& s, const ModelParams& params) {
    if (params.alpha <= 0.0)
        throw std::domain_error("lyapunov_w_dot: alpha must be > 0");
    return -s.lambda * lienard_g(s.lambda, params);
}

namespace {

template <class Field>
Trajectory run_integration(Coordinates coords, const std::array<double, 2>& y0,
                           double t_final, const MacroOdeOptions& opts, Field field,
                           double m_slack) {
    if (!(t_final > 0.0)) throw std::domain_error("integrate: T must be > 0");
    if (!(opts.ode.rtol > 0.0) || !(opts.ode.atol > 0.0))
        throw std::domain_error("integrate: tolerances must be positive");

    Trajectory out;
    out.coords = coords;

    Dopri5<2, Field> stepper(field, opts.ode);
    stepper.init(0.0, y0, t_final);

    out.times.push_back(0.0);
    out.states.push_back(y0);
    long sample_index = 1;
    double next_sample = opts.sample_dt;

    while (stepper.step()) {
        if (opts.keep_dense) {
            out.dense.push({stepper.t_prev(), stepper.t(), stepper.dense_coefficients()});
        }
        while (next_sample <= stepper.t() + 1e-14 && next_sample <= t_final + 1e-14) {
            const double ts = std::min(next_sample, t_final);
            out.times.push_back(ts);
            out.states.push_back(stepper.dense(ts));
            next_sample = opts.sample_dt * static_cast<double>(++sample_index);
        }
        if (coords == Coordinates::Macro) {
            const double m = stepper.y()[0];
            if (std::abs(m) > 1.0 + m_slack)
                throw NumericalFailure("integrate: |m| exceeded 1 by " +
                                       std::to_string(std::abs(m) - 1.0) +
                                       " at t=" + std::to_string(stepper.t()));
        }
    }
    if (out.times.back() != t_final) {
        out.times.push_back(t_final);
        out.states.push_back(stepper.y());
    }
    out.stats = stepper.stats();
    return out;
}

} // namespace

Trajectory integrate(const MacroState& initial, const ModelParams& params, double t_final,
                     const MacroOdeOptions& opts) {
    auto field = [params](double, const std::array<double, 2>& y, std::array<double, 2>& dydt) {
        const double drive = y[0] + std::tanh(y[1]);
        dydt[0] = -2.0 * drive;
        dydt[1] = 2.0 * params.beta * drive - params.alpha * y[1];
    };
    return run_integration(Coordinates::Macro, {initial.m, initial.lambda}, t_final, opts,
                           field, opts.m_bound_slack);
}

Trajectory integrate_lienard(const LienardState& initial, const ModelParams& params,
                             double t_final, const MacroOdeOptions& opts) {
    auto field = [params](double, const std::array<double, 2>& y, std::array<double, 2>& dydt) {
        dydt[0] = -2.0 * params.alpha * y[1];
        dydt[1] = y[0] - ((2.0 + params.alpha) * y[1] - 2.0 * params.beta * std::tanh(y[1]));
    };
    return run_integration(Coordinates::Lienard, {initial.y, initial.lambda}, t_final, opts,
                           field, 0.0);
}

} // namespace dcw
