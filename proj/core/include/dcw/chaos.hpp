#pragma once

#include "dcw/fokker_planck.hpp"
#include "dcw/model.hpp"
#include "dcw/particle.hpp"

#include <cstdint>
#include <vector>

namespace dcw {

/// h(s) = (-1) v (s ^ 1), the spin clamp of the jump kernel.
double clamp_spin(double s);

/// Mean of the jump kernel q((s, lambda), u) under the envelope measure on
/// (0,2): -2 (h(s) + h(s)^2 tanh(lambda)), i.e. -2 (s + tanh lambda) on {-1,1}.
double coupling_jump_mean(double s, double lambda);

struct CoupledRunResult {
    int n = 0;
    double horizon = 0.0;
    double d_n = 0.0; // average over particles and replicas of sup_t (|s-sbar| + |lambda-lambdabar|)
    int replicas = 0;
    double standard_error = 0.0;
};

struct ChaosOptions {
    /// Grid on which the mean-field drift of the coupled comparison system is
    /// integrated (trapezoidal in the tanh average, exact in the spin average).
    double drift_grid_dt = 5e-3;
};

/// Runs the shared-noise coupling between the true N-particle system and the
/// system with the jump interaction replaced by its mean drift. Both systems
/// consume identical candidate times, thinning uniforms and Brownian
/// increments; with beta = 0 they are pathwise identical and d_n = 0 exactly.
CoupledRunResult coupled_run(const ModelParams& params, const InitialCondition& init,
                             double t_final, int replicas, std::uint64_t seed,
                             const ChaosOptions& opts = {});

struct StudyRow {
    int n;
    int replicas;
    double d_n;
    double standard_error;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    double slope = 0.0;     // log-log least-squares slope of d_n vs n
    double intercept = 0.0; // log-log intercept
};

/// coupled_run over a ladder of system sizes plus the fitted decay rate.
StudyResult convergence_study(const ModelParams& params, const InitialCondition& init,
                              double t_final, const std::vector<int>& n_list, int replicas,
                              std::uint64_t seed, const ChaosOptions& opts = {});

/// Wasserstein-1 distance between an empirical sample and a piecewise-constant
/// grid density (CDF-difference quadrature; the grid mass is renormalized).
double marginal_distance(std::vector<double> samples, const std::vector<double>& centers,
                         const std::vector<double>& nu, double d_lambda);

double marginal_distance(std::vector<double> samples, const DensityPair& reference);

/// Piecewise-linear mean-field input g(t), typically the g column of a
/// Fokker-Planck solve.
struct GPath {
    std::vector<double> times;
    std::vector<double> values;

    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    double at(double t) const;
};

struct TaggedResult {
    std::vector<std::int8_t> sigma;       // terminal spins
    std::vector<double> lambda;           // terminal intensities
    std::vector<std::uint32_t> flip_counts;
    std::vector<double> obs_times;        // filled when obs_cadence > 0
    std::vector<double> mean_rate;        // replica average of 1 + tanh(sigma lambda)
};

struct TaggedOptions {
    double obs_cadence = 0.0; // 0 disables the observation series
    double init_std = 0.0;    // Gaussian width of Lambda(0) around lambda0
};

/// Simulates the tagged nonlinear process with externally supplied mean field:
/// thinning at envelope rate 2 for the spin, exact OU-with-forcing transitions
/// for the intensity (drift -alpha Lambda + 2 beta g(t)).
/// Throws std::domain_error if the g path is shorter than the horizon.
TaggedResult simulate_tagged_nonlinear(const GPath& g_path, const ModelParams& params,
                                       double t_final, double lambda0, double m0,
                                       int replicas, std::uint64_t seed,
                                       const TaggedOptions& opts = {});

} // namespace dcw
