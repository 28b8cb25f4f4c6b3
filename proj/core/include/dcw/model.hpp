#pragma once

#include <complex>
#include <cstdint>
#include <utility>

namespace dcw {

/// The (alpha, beta, sigma, N) quadruple shared by every engine.
/// alpha: dissipation rate on the intensities, beta: mean-field coupling,
/// sigma: intensity diffusion, n_particles: microscopic system size.
struct ModelParams {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma = 0.0;
    int n_particles = 1;

    /// True iff beta > alpha/2 + 1, i.e. the origin of the macroscopic flow
    /// is unstable and a limit cycle exists.
    bool supercritical() const { return beta > alpha / 2.0 + 1.0; }

    /// Throws std::domain_error if any field is out of range.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

/// A single spin, restricted to {-1, +1}.
class Spin {
public:
    constexpr Spin() : value_(1) {}
    explicit Spin(int value);

    constexpr int value() const { return value_; }
    constexpr Spin flipped() const { return Spin(static_cast<std::int8_t>(-value_)); }

    static constexpr Spin up() { return Spin(std::int8_t{1}); }
    static constexpr Spin down() { return Spin(std::int8_t{-1}); }

    constexpr bool operator==(const Spin&) const = default;

private:
    constexpr explicit Spin(std::int8_t raw) : value_(raw) {}
    std::int8_t value_;
};

/// Transition rate 1 + tanh(s * lambda) of a spin with intensity lambda.
/// Always strictly inside (0, 2). Throws std::domain_error on non-finite lambda.
double flip_rate(Spin s, double lambda);

/// Mean-field interaction potential phi(m) = -beta * m, for m in [-1, 1].
double interaction_potential(double m, const ModelParams& params);

/// g(lambda) = (2 + alpha) * lambda - 2 * beta * tanh(lambda), the damping
/// function of the Lienard form. Odd in lambda; its positive zero (present
/// only in the supercritical regime) bounds the limit cycle.
double lienard_g(double lambda, const ModelParams& params);

/// Eigenvalues of the linearization of the noiseless macroscopic system at
/// the origin: x = (beta - 1 - alpha/2) +- sqrt((beta - 1 - alpha/2)^2 - 2 alpha).
std::pair<std::complex<double>, std::complex<double>>
linearization_eigenvalues(const ModelParams& params);

enum class OriginStability { Stable, Critical, Unstable };

/// Classifies the origin by comparing beta against alpha/2 + 1 exactly.
/// The threshold is a theorem, not an estimate, so no tolerance is applied;
/// callers needing fuzzy classification pass one explicitly.
OriginStability classify_origin(const ModelParams& params, double tolerance = 0.0);

const char* to_string(OriginStability s);

} // namespace dcw
