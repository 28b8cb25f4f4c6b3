#pragma once

#include "dcw/model.hpp"
#include "dcw/rng.hpp"

#include <cstdint>
#include <vector>

namespace dcw {

/// Exact sample of the Ornstein-Uhlenbeck transition over dt: Gaussian with
/// mean xi * exp(-alpha dt) and variance sigma^2 (1 - exp(-2 alpha dt)) / (2 alpha)
/// (sigma^2 dt in the alpha = 0 limit). Throws std::domain_error for dt < 0.
double ou_transition(double xi, double dt, const ModelParams& params, Rng& rng);

/// Stationary variance sigma^2 / (2 alpha) of the private OU component.
double ou_stationary_variance(const ModelParams& params);

struct EventRecord {
    double time;
    std::int32_t particle;
    std::int8_t spin_before;
};

struct EventLog {
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;
    std::vector<EventRecord> events; // filled only when detail is enabled
};

struct ProposalResult {
    double candidate_time;
    int particle;
    bool accepted;
    double lambda; // the particle's synchronized intensity at the candidate time
};

struct InitialCondition {
    double m0 = 0.0;      // spins i.i.d. with P(+1) = (1 + m0) / 2
    double lambda0 = 3.0; // point mass for every intensity
};

/// N-particle state with the common-field decomposition
///   lambda_i(t) = xi_i(t) + c(t),
/// where xi_i is a private OU process and c carries every mean-field jump kick
/// (all kicks are identical across particles) and decays at rate alpha between
/// flips. Each event costs O(1); particles synchronize lazily at their own
/// candidate times.
class ParticleSystem {
public:
    ParticleSystem() = default; // empty placeholder, to be assigned from simulate()
    ParticleSystem(const ModelParams& params, const InitialCondition& init,
                   std::uint64_t seed, bool keep_event_detail = false);

    const ModelParams& params() const { return params_; }
    double time() const { return time_; }
    int size() const { return static_cast<int>(spins_.size()); }

    Spin spin(int i) const { return spins_[i] > 0 ? Spin::up() : Spin::down(); }
    double common_field() const { return common_field_; }

    /// Incrementally maintained magnetization.
    double magnetization() const { return magnetization_; }
    /// Recomputed from scratch; for consistency checks.
    double magnetization_recomputed() const;

    /// Advances the global clock by an Exp(2N) holding time, picks a uniform
    /// particle, synchronizes it, and thins against the envelope rate 2.
    ProposalResult propose_and_thin();

    /// Next candidate time of the envelope Poisson(2N) clock. Drawn once and
    /// cached until consumed, so runs can be observed, stopped and resumed
    /// without disturbing the event stream.
    double peek_candidate();

    /// Thins at the pending candidate time and clears it.
    ProposalResult consume_candidate();

    /// Flips an accepted particle and applies the shared kick 2 beta s_i / N
    /// to the common field. Must be called at the current clock time.
    void apply_flip(int i);

    /// Synchronizes every particle to the current clock (used at observation
    /// times); returns (mean lambda, population variance of lambda).
    std::pair<double, double> synchronize_and_moments();

    /// Brings the whole system to time t >= time() without any event.
    void advance_clock(double t);

    /// Intensity of particle i synchronized to the current clock.
    double lambda_of(int i);

    const EventLog& log() const { return log_; }
    std::uint64_t flips() const { return log_.accepted; }

private:
    void sync_particle(int i);
    ProposalResult thin_at(double candidate_time);

    ModelParams params_;
    double time_ = 0.0;
    double common_field_ = 0.0;
    double magnetization_ = 0.0;
    double pending_candidate_ = 0.0;
    bool has_pending_candidate_ = false;
    std::vector<std::int8_t> spins_;
    std::vector<double> xi_;
    std::vector<double> xi_origin_; // sigma = 0 decay is evaluated from t = 0
    std::vector<double> xi_sync_time_;
    std::vector<Rng> particle_rng_;
    Rng global_rng_;
    EventLog log_;
    bool keep_event_detail_ = false;
};

struct SimObservation {
    double t;
    double m;
    double lambda_mean;
    double lambda_var;
    std::uint64_t flips;
};

struct SimResult {
    std::vector<SimObservation> series;
    std::uint64_t total_flips = 0;
    std::uint64_t total_proposals = 0;
};

/// Exact-in-law thinning simulation of the N-particle process, observed at a
/// fixed cadence. Deterministic given the seed.
SimResult simulate(const ModelParams& params, const InitialCondition& init, double t_final,
                   double cadence, std::uint64_t seed, ParticleSystem* final_state = nullptr,
                   bool keep_event_detail = false);

/// Continues an existing system for another stretch of time. Chained runs
/// concatenate bit-identically with a single longer run when the boundary is
/// an observation point; the first row repeats the resume state.
SimResult simulate_continue(ParticleSystem& system, double duration, double cadence);

/// Naive fixed-step reference scheme: per step each particle flips with
/// probability rate * dt and the intensities follow Euler-Maruyama plus jump
/// kicks. Used as a cross-validation oracle for the thinning simulator.
/// Refuses dt with 2 dt >= 0.1 (bias guard).
SimResult simulate_reference_euler(const ModelParams& params, const InitialCondition& init,
                                   double t_final, double dt, std::uint64_t seed);

} // namespace dcw
