#include "dcw/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dcw {

void ModelParams::validate() const {
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw std::domain_error("alpha must be finite and >= 0");
    if (!std::isfinite(beta) || beta < 0.0)
        throw std::domain_error("beta must be finite and >= 0");
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw std::domain_error("sigma must be finite and >= 0");
    if (n_particles < 1)
        throw std::domain_error("n_particles must be >= 1");
}

Spin::Spin(int value) : value_(static_cast<std::int8_t>(value)) {
    if (value != 1 && value != -1)
        throw std::domain_error("spin value must be -1 or +1, got " + std::to_string(value));
}

double flip_rate(Spin s, double lambda) {
    if (!std::isfinite(lambda))
        throw std::domain_error("flip_rate: lambda must be finite");
    return 1.0 + std::tanh(s.value() * lambda);
}

double interaction_potential(double m, const ModelParams& params) {
    if (!std::isfinite(m) || std::abs(m) > 1.0)
        throw std::domain_error("interaction_potential: m must lie in [-1, 1]");
    return -params.beta * m;
}

double lienard_g(double lambda, const ModelParams& params) {
    if (!std::isfinite(lambda))
        throw std::domain_error("lienard_g: lambda must be finite");
    return (2.0 + params.alpha) * lambda - 2.0 * params.beta * std::tanh(lambda);
}

std::pair<std::complex<double>, std::complex<double>>
linearization_eigenvalues(const ModelParams& params) {
    const double trace_half = params.beta - 1.0 - params.alpha / 2.0;
    const double disc = trace_half * trace_half - 2.0 * params.alpha;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return {std::complex<double>(trace_half + root, 0.0),
                std::complex<double>(trace_half - root, 0.0)};
    }
    const double imag = std::sqrt(-disc);
    return {std::complex<double>(trace_half, imag),
            std::complex<double>(trace_half, -imag)};
}

OriginStability classify_origin(const ModelParams& params, double tolerance) {
    const double margin = params.beta - (params.alpha / 2.0 + 1.0);
    if (margin > tolerance) return OriginStability::Unstable;
    if (margin < -tolerance) return OriginStability::Stable;
    return OriginStability::Critical;
}

const char* to_string(OriginStability s) {
    switch (s) {
        case OriginStability::Stable: return "stable";
        case OriginStability::Critical: return "critical";
        case OriginStability::Unstable: return "unstable";
    }
    return "unknown";
}

} // namespace dcw
