#include "dcw/particle.hpp"

#include "dcw/errors.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace dcw {

double ou_transition(double xi, double dt, const ModelParams& params, Rng& rng) {
    if (dt < 0.0 || !std::isfinite(dt)) throw std::domain_error("ou_transition: dt must be >= 0");
    if (dt == 0.0) return xi;
    const double alpha = params.alpha;
    const double decay = std::exp(-alpha * dt);
    double variance;
    if (alpha > 0.0) {
        variance = params.sigma * params.sigma * (-std::expm1(-2.0 * alpha * dt)) / (2.0 * alpha);
    } else {
        variance = params.sigma * params.sigma * dt; // Brownian limit
    }
    const double mean = xi * decay;
    if (variance == 0.0) return mean;
    return mean + std::sqrt(variance) * rng.normal();
}

double ou_stationary_variance(const ModelParams& params) {
    if (!(params.alpha > 0.0))
        throw std::domain_error("ou_stationary_variance: alpha must be > 0");
    return params.sigma * params.sigma / (2.0 * params.alpha);
}

namespace {
constexpr std::uint64_t kGlobalStream = ~0ULL;
}

ParticleSystem::ParticleSystem(const ModelParams& params, const InitialCondition& init,
                               std::uint64_t seed, bool keep_event_detail)
    : params_(params), global_rng_(seed, kGlobalStream), keep_event_detail_(keep_event_detail) {
    params_.validate();
    if (!std::isfinite(init.lambda0)) throw std::domain_error("initial lambda0 must be finite");
    if (std::abs(init.m0) > 1.0) throw std::domain_error("initial m0 must lie in [-1, 1]");

    const int n = params_.n_particles;
    spins_.resize(n);
    xi_.assign(n, init.lambda0); // c(0) = 0, so xi_i(0) = lambda_i(0)
    xi_origin_ = xi_;
    xi_sync_time_.assign(n, 0.0);
    particle_rng_.reserve(n);
    const double p_up = (1.0 + init.m0) / 2.0;
    long sum = 0;
    for (int i = 0; i < n; ++i) {
        particle_rng_.emplace_back(seed, static_cast<std::uint64_t>(i));
        spins_[i] = global_rng_.uniform() < p_up ? std::int8_t{1} : std::int8_t{-1};
        sum += spins_[i];
    }
    magnetization_ = static_cast<double>(sum) / n;
}

double ParticleSystem::magnetization_recomputed() const {
    long sum = 0;
    for (const auto s : spins_) sum += s;
    return static_cast<double>(sum) / static_cast<double>(spins_.size());
}

void ParticleSystem::sync_particle(int i) {
    const double gap = time_ - xi_sync_time_[i];
    if (gap > 0.0) {
        if (params_.sigma == 0.0) {
            // deterministic decay evaluated from t = 0 in one shot, so equal
            // initial intensities stay bit-identical across particles no
            // matter how their sync times interleave
            xi_[i] = xi_origin_[i] * std::exp(-params_.alpha * time_);
        } else {
            xi_[i] = ou_transition(xi_[i], gap, params_, particle_rng_[i]);
        }
        xi_sync_time_[i] = time_;
    }
}

double ParticleSystem::lambda_of(int i) {
    sync_particle(i);
    return xi_[i] + common_field_;
}

void ParticleSystem::advance_clock(double t) {
    if (t < time_) throw std::domain_error("advance_clock: time must be non-decreasing");
    common_field_ *= std::exp(-params_.alpha * (t - time_));
    time_ = t;
}

double ParticleSystem::peek_candidate() {
    if (!has_pending_candidate_) {
        pending_candidate_ = time_ + global_rng_.exponential(2.0 * size());
        has_pending_candidate_ = true;
    }
    return pending_candidate_;
}

ProposalResult ParticleSystem::thin_at(double candidate_time) {
    advance_clock(candidate_time);
    const int i = static_cast<int>(global_rng_.uniform_index(size()));
    const double lambda = lambda_of(i);
    const double rate = 1.0 + std::tanh(spins_[i] * lambda);
    assert(rate > 0.0 && rate < 2.0); // thinning envelope never exceeded
    const double u = global_rng_.uniform_open(2.0);
    const bool accepted = u < rate;
    log_.proposed++;
    return {time_, i, accepted, lambda};
}

ProposalResult ParticleSystem::consume_candidate() {
    const double candidate = peek_candidate();
    has_pending_candidate_ = false;
    return thin_at(candidate);
}

ProposalResult ParticleSystem::propose_and_thin() {
    return consume_candidate();
}

void ParticleSystem::apply_flip(int i) {
    const std::int8_t before = spins_[i];
    spins_[i] = static_cast<std::int8_t>(-before);
    const int n = size();
    magnetization_ -= 2.0 * before / static_cast<double>(n);
    // eq-of-motion kick: every particle's intensity shifts by the same amount
    common_field_ += 2.0 * params_.beta * before / static_cast<double>(n);
    log_.accepted++;
    if (keep_event_detail_) log_.events.push_back({time_, i, before});
}

std::pair<double, double> ParticleSystem::synchronize_and_moments() {
    const int n = size();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sync_particle(i);
        sum += xi_[i];
    }
    const double xi_mean = sum / n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = xi_[i] - xi_mean;
        ss += d * d;
    }
    return {xi_mean + common_field_, ss / n};
}

namespace {

void validate_run_args(double t_final, double cadence) {
    if (!(t_final > 0.0)) throw std::domain_error("simulate: T must be > 0");
    if (!(cadence > 0.0)) throw std::domain_error("simulate: cadence must be > 0");
}

} // namespace

SimResult simulate_continue(ParticleSystem& system, double duration, double cadence) {
    validate_run_args(duration, cadence);
    const double t_start = system.time();
    const double t_final = t_start + duration;
    const std::uint64_t flips_before = system.flips();
    const std::uint64_t proposals_before = system.log().proposed;

    SimResult result;
    const auto observe = [&](double t_obs) {
        system.advance_clock(t_obs);
        const auto [mean, var] = system.synchronize_and_moments();
        result.series.push_back({t_obs, system.magnetization(), mean, var, system.flips()});
    };
    observe(t_start);

    long obs_index = 1;
    double next_obs = t_start + cadence;
    // The envelope is a homogeneous Poisson(2N) clock, independent of the
    // state, so the pending candidate stays valid across observation syncs.
    while (true) {
        const double candidate = system.peek_candidate();
        while (next_obs <= std::min(candidate, t_final) + 1e-15 && next_obs <= t_final + 1e-15) {
            observe(std::min(next_obs, t_final));
            next_obs = t_start + cadence * static_cast<double>(++obs_index);
        }
        if (candidate > t_final) break;
        const auto proposal = system.consume_candidate();
        if (proposal.accepted) system.apply_flip(proposal.particle);
    }
    if (result.series.back().t < t_final) observe(t_final);

    result.total_flips = system.flips() - flips_before;
    result.total_proposals = system.log().proposed - proposals_before;
    return result;
}

SimResult simulate(const ModelParams& params, const InitialCondition& init, double t_final,
                   double cadence, std::uint64_t seed, ParticleSystem* final_state,
                   bool keep_event_detail) {
    validate_run_args(t_final, cadence);
    ParticleSystem system(params, init, seed, keep_event_detail);
    SimResult result = simulate_continue(system, t_final, cadence);
    if (final_state) *final_state = std::move(system);
    return result;
}

SimResult simulate_reference_euler(const ModelParams& params, const InitialCondition& init,
                                   double t_final, double dt, std::uint64_t seed) {
    validate_run_args(t_final, dt);
    params.validate();
    if (2.0 * dt >= 0.1)
        throw std::invalid_argument(
            "simulate_reference_euler: dt too large (needs max-rate * dt = 2 dt < 0.1)");

    const int n = params.n_particles;
    Rng rng(seed, kGlobalStream);
    std::vector<std::int8_t> spins(n);
    std::vector<double> lambda(n, init.lambda0);
    std::vector<std::uint8_t> flip_now(n);
    const double p_up = (1.0 + init.m0) / 2.0;
    long spin_sum = 0;
    for (int i = 0; i < n; ++i) {
        spins[i] = rng.uniform() < p_up ? std::int8_t{1} : std::int8_t{-1};
        spin_sum += spins[i];
    }

    SimResult result;
    std::uint64_t flips = 0;
    const double sqrt_dt = std::sqrt(dt);
    const auto n_steps = static_cast<std::uint64_t>(std::llround(t_final / dt));
    const std::uint64_t obs_stride = std::max<std::uint64_t>(1, n_steps / 1000);

    const auto observe = [&](double t) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += lambda[i];
        mean /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) var += (lambda[i] - mean) * (lambda[i] - mean);
        var /= n;
        result.series.push_back({t, static_cast<double>(spin_sum) / n, mean, var, flips});
    };
    observe(0.0);

    for (std::uint64_t k = 0; k < n_steps; ++k) {
        // flip decisions frozen at the step start
        double kick = 0.0;
        for (int i = 0; i < n; ++i) {
            const double rate = 1.0 + std::tanh(spins[i] * lambda[i]);
            flip_now[i] = rng.uniform() < rate * dt;
            if (flip_now[i]) kick += 2.0 * params.beta * spins[i] / n;
        }
        for (int i = 0; i < n; ++i) {
            double noise = 0.0;
            if (params.sigma > 0.0) noise = params.sigma * sqrt_dt * rng.normal();
            lambda[i] += -params.alpha * lambda[i] * dt + noise + kick;
            if (flip_now[i]) {
                spin_sum -= 2 * spins[i];
                spins[i] = static_cast<std::int8_t>(-spins[i]);
                flips++;
            }
        }
        if ((k + 1) % obs_stride == 0 || k + 1 == n_steps)
            observe(static_cast<double>(k + 1) * dt);
    }
    result.total_flips = flips;
    result.total_proposals = n_steps * static_cast<std::uint64_t>(n);
    return result;
}

} // namespace dcw
