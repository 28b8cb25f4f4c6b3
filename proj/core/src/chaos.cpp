#include "dcw/chaos.hpp"

#include "dcw/errors.hpp"
#include "dcw/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcw {

double clamp_spin(double s) { return std::max(-1.0, std::min(s, 1.0)); }

double coupling_jump_mean(double s, double lambda) {
    const double h = clamp_spin(s);
    return -2.0 * (h + h * h * std::tanh(lambda));
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL);
    return splitmix64(state);
}

// exponential-integrator kernels: J0 = int_0^d e^{-a(d-x)} dx,
// J1 = int_0^d e^{-a(d-x)} x dx
double j0_kernel(double alpha, double delta) {
    return alpha > 0.0 ? -std::expm1(-alpha * delta) / alpha : delta;
}
double j1_kernel(double alpha, double delta) {
    return alpha > 0.0 ? (delta - j0_kernel(alpha, delta)) / alpha : 0.5 * delta * delta;
}

// One replica of the Appendix coupling. Both systems share the private OU
// components exactly: the jump kicks of the true system and the mean drift of
// the comparison system are particle-independent, so lambda_i - lambdabar_i
// is the same scalar c - cbar for every particle. The two spin configurations
// are thinned with the same candidate times and uniforms, which is the shared
// Poisson-measure construction; stream mismatch is impossible by layout.
double run_coupled_replica(const ModelParams& params, const InitialCondition& init,
                           double t_final, std::uint64_t replica_seed,
                           const ChaosOptions& opts) {
    const int n = params.n_particles;
    Rng global(replica_seed, ~0ULL);
    std::vector<Rng> particle_rng;
    particle_rng.reserve(n);
    for (int i = 0; i < n; ++i) particle_rng.emplace_back(replica_seed, i);

    std::vector<std::int8_t> s(n), sbar(n);
    std::vector<double> xi(n, init.lambda0), xi_time(n, 0.0);
    const double p_up = (1.0 + init.m0) / 2.0;
    double mbar = 0.0;
    for (int i = 0; i < n; ++i) {
        s[i] = global.uniform() < p_up ? std::int8_t{1} : std::int8_t{-1};
        sbar[i] = s[i];
        mbar += s[i];
    }
    mbar /= n;

    double c = 0.0, cbar = 0.0;
    double t = 0.0;

    // drift of the comparison system: D(t) = 2 beta (mbar + tanh-average)
    double tanh_avg = std::tanh(init.lambda0); // all xi identical at t = 0

    // sup bookkeeping on the event grid plus the drift grid
    double sup_b = 0.0;
    std::vector<std::int8_t> mismatched(n, 0);
    std::vector<double> epoch_max(n, 0.0), best(n, 0.0);
    std::vector<std::int8_t> ever(n, 0);
    std::vector<int> active;

    const auto sample_b = [&]() {
        const double b = std::abs(c - cbar);
        sup_b = std::max(sup_b, b);
        for (const int i : active) epoch_max[i] = std::max(epoch_max[i], b);
    };

    // advances both common fields over [t, t+delta] with the tanh part frozen
    const auto advance_fields = [&](double delta) {
        if (delta <= 0.0) return;
        const double decay = std::exp(-params.alpha * delta);
        c *= decay;
        cbar = cbar * decay +
               2.0 * params.beta * (mbar + tanh_avg) * j0_kernel(params.alpha, delta);
        t += delta;
    };

    double candidate = global.exponential(2.0 * n);
    const double grid_dt = opts.drift_grid_dt;
    double cell_start = 0.0;
    double cell_end = std::min(grid_dt, t_final);

    while (true) {
        // process candidates that fall inside the current cell
        while (candidate <= cell_end) {
            advance_fields(candidate - t);
            const int i = static_cast<int>(global.uniform_index(n));
            const double gap = t - xi_time[i];
            if (gap > 0.0) {
                xi[i] = ou_transition(xi[i], gap, params, particle_rng[i]);
                xi_time[i] = t;
            }
            const double u = global.uniform_open(2.0);
            const bool acc_true = u < 1.0 + std::tanh(s[i] * (xi[i] + c));
            const bool acc_bar = u < 1.0 + std::tanh(sbar[i] * (xi[i] + cbar));
            if (acc_true) {
                c += 2.0 * params.beta * s[i] / n;
                s[i] = static_cast<std::int8_t>(-s[i]);
            }
            if (acc_bar) {
                mbar -= 2.0 * sbar[i] / static_cast<double>(n);
                sbar[i] = static_cast<std::int8_t>(-sbar[i]);
            }
            const bool now_mismatched = s[i] != sbar[i];
            if (now_mismatched != static_cast<bool>(mismatched[i])) {
                if (now_mismatched) {
                    mismatched[i] = 1;
                    ever[i] = 1;
                    epoch_max[i] = 0.0;
                    active.push_back(i);
                } else {
                    mismatched[i] = 0;
                    best[i] = std::max(best[i], epoch_max[i]);
                    active.erase(std::find(active.begin(), active.end(), i));
                }
            }
            sample_b();
            candidate = t + global.exponential(2.0 * n);
        }

        // close the cell: land on the boundary, refresh the tanh average with
        // a trapezoidal correction (second order in the grid width)
        advance_fields(cell_end - t);
        double sum_tanh = 0.0;
        for (int i = 0; i < n; ++i) {
            const double gap = t - xi_time[i];
            if (gap > 0.0) {
                xi[i] = ou_transition(xi[i], gap, params, particle_rng[i]);
                xi_time[i] = t;
            }
            sum_tanh += std::tanh(xi[i] + cbar);
        }
        const double tanh_new = sum_tanh / n;
        const double width = cell_end - cell_start;
        if (width > 0.0)
            cbar += 2.0 * params.beta * (tanh_new - tanh_avg) *
                    j1_kernel(params.alpha, width) / width;
        tanh_avg = tanh_new;
        sample_b();

        if (cell_end >= t_final) break;
        cell_start = cell_end;
        cell_end = std::min(cell_end + grid_dt, t_final);
    }

    for (const int i : active) best[i] = std::max(best[i], epoch_max[i]);

    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += std::max(sup_b, ever[i] ? 2.0 + best[i] : 0.0);
    return acc / n;
}

} // namespace

CoupledRunResult coupled_run(const ModelParams& params, const InitialCondition& init,
                             double t_final, int replicas, std::uint64_t seed,
                             const ChaosOptions& opts) {
    params.validate();
    if (!(t_final > 0.0)) throw std::domain_error("coupled_run: T must be > 0");
    if (replicas < 1) throw std::domain_error("coupled_run: replicas must be >= 1");

    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < replicas; ++r) {
        const std::uint64_t rs =
            derive_seed(seed, (static_cast<std::uint64_t>(params.n_particles) << 20) ^
                                  static_cast<std::uint64_t>(r));
        const double d = run_coupled_replica(params, init, t_final, rs, opts);
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / replicas;
    double se = 0.0;
    if (replicas > 1) {
        const double var = std::max(0.0, (sum_sq - replicas * mean * mean) / (replicas - 1));
        se = std::sqrt(var / replicas);
    }
    return {params.n_particles, t_final, mean, replicas, se};
}

StudyResult convergence_study(const ModelParams& params, const InitialCondition& init,
                              double t_final, const std::vector<int>& n_list, int replicas,
                              std::uint64_t seed, const ChaosOptions& opts) {
    StudyResult result;
    for (const int n : n_list) {
        ModelParams p = params;
        p.n_particles = n;
        const auto row = coupled_run(p, init, t_final, replicas, seed, opts);
        result.rows.push_back({row.n, row.replicas, row.d_n, row.standard_error});
    }
    // least squares on (log n, log d_n) over the positive entries
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (const auto& row : result.rows) {
        if (row.d_n <= 0.0) continue;
        const double x = std::log(static_cast<double>(row.n));
        const double y = std::log(row.d_n);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        k++;
    }
    if (k >= 2) {
        result.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        result.intercept = (sy - result.slope * sx) / k;
    } else {
        result.slope = std::numeric_limits<double>::quiet_NaN();
        result.intercept = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

double marginal_distance(std::vector<double> samples, const std::vector<double>& centers,
                         const std::vector<double>& nu, double d_lambda) {
    if (samples.empty()) throw std::domain_error("marginal_distance: empty sample");
    if (centers.size() != nu.size() || centers.empty())
        throw std::domain_error("marginal_distance: bad reference grid");
    std::sort(samples.begin(), samples.end());

    const std::size_t n_cells = nu.size();
    std::vector<double> edges(n_cells + 1);
    for (std::size_t j = 0; j < n_cells; ++j) edges[j] = centers[j] - 0.5 * d_lambda;
    edges[n_cells] = centers[n_cells - 1] + 0.5 * d_lambda;

    double mass = 0.0;
    for (const double v : nu) mass += v * d_lambda;
    if (!(mass > 0.0)) throw std::domain_error("marginal_distance: reference has no mass");

    std::vector<double> cdf(n_cells + 1, 0.0);
    for (std::size_t j = 0; j < n_cells; ++j)
        cdf[j + 1] = cdf[j] + nu[j] * d_lambda / mass;
    cdf[n_cells] = 1.0;

    const auto ref_cdf = [&](double x) {
        if (x <= edges.front()) return 0.0;
        if (x >= edges.back()) return 1.0;
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - edges.begin()) - 1;
        const double frac = (x - edges[j]) / d_lambda;
        return cdf[j] + frac * (cdf[j + 1] - cdf[j]);
    };

    // integrate |F_emp - F_ref| over the merged breakpoints; between
    // breakpoints F_emp is constant and F_ref linear
    const double n_s = static_cast<double>(samples.size());
    double x = std::min(samples.front(), edges.front());
    double f_emp = 0.0;
    std::size_t is = 0, ie = 0;
    double total = 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    while (true) {
        const double xs = is < samples.size() ? samples[is] : inf;
        const double xe = ie < edges.size() ? edges[ie] : inf;
        const double nx = std::min(xs, xe);
        if (nx == inf) break;
        if (nx > x) {
            const double d1 = f_emp - ref_cdf(x);
            const double d2 = f_emp - ref_cdf(nx);
            const double len = nx - x;
            if (d1 * d2 >= 0.0) {
                total += 0.5 * (std::abs(d1) + std::abs(d2)) * len;
            } else {
                total += 0.5 * (d1 * d1 + d2 * d2) / (std::abs(d1) + std::abs(d2)) * len;
            }
            x = nx;
        }
        while (is < samples.size() && samples[is] <= nx) {
            f_emp += 1.0 / n_s;
            is++;
        }
        while (ie < edges.size() && edges[ie] <= nx) ie++;
    }
    return total;
}

double marginal_distance(std::vector<double> samples, const DensityPair& reference) {
    return marginal_distance(std::move(samples), reference.grid.centers, reference.nu,
                             reference.grid.d_lambda);
}

double GPath::at(double t) const {
    if (times.empty()) throw std::domain_error("GPath: empty path");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
    return values[j - 1] + w * (values[j] - values[j - 1]);
}

namespace {

// int_a^b e^{-alpha (b - s)} g(s) ds with g piecewise linear on its grid
double forcing_integral(const GPath& g, double a, double b, double alpha) {
    if (b <= a) return 0.0;
    double total = 0.0;
    // locate the first grid segment overlapping [a, b]
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(g.times.begin(), g.times.end(), a) - g.times.begin());
    if (j == 0) j = 1;
    double u0 = a;
    while (u0 < b - 1e-15) {
        const double seg_end = j < g.times.size() ? g.times[j] : b;
        const double u1 = std::min(seg_end, b);
        const double delta = u1 - u0;
        if (delta > 0.0) {
            const double g0 = g.at(u0);
            const double g1 = g.at(u1);
            const double slope = delta > 0.0 ? (g1 - g0) / delta : 0.0;
            total += std::exp(-alpha * (b - u1)) *
                     (g0 * j0_kernel(alpha, delta) + slope * j1_kernel(alpha, delta));
        }
        u0 = u1;
        j++;
    }
    return total;
}

} // namespace

TaggedResult simulate_tagged_nonlinear(const GPath& g_path, const ModelParams& params,
                                       double t_final, double lambda0, double m0,
                                       int replicas, std::uint64_t seed,
                                       const TaggedOptions& opts) {
    params.validate();
    if (g_path.times.size() < 2) throw std::domain_error("tagged: g path needs >= 2 points");
    if (t_final > g_path.horizon() + 1e-12)
        throw std::domain_error("tagged: g path shorter than the horizon");
    if (replicas < 1) throw std::domain_error("tagged: replicas must be >= 1");

    TaggedResult result;
    result.sigma.resize(replicas);
    result.lambda.resize(replicas);
    result.flip_counts.assign(replicas, 0);
    const bool observe = opts.obs_cadence > 0.0;
    if (observe) {
        for (double t = 0.0; t <= t_final + 1e-12; t += opts.obs_cadence)
            result.obs_times.push_back(std::min(t, t_final));
        result.mean_rate.assign(result.obs_times.size(), 0.0);
    }

    const double p_up = (1.0 + m0) / 2.0;
    for (int r = 0; r < replicas; ++r) {
        Rng rng(derive_seed(seed, 0x7a66edULL), static_cast<std::uint64_t>(r));
        int sig = rng.uniform() < p_up ? 1 : -1;
        double lam = lambda0 + (opts.init_std > 0.0 ? opts.init_std * rng.normal() : 0.0);
        double t = 0.0;
        std::uint32_t flips = 0;
        std::size_t obs_idx = 0;

        const auto evolve_to = [&](double target) {
            const double delta = target - t;
            if (delta <= 0.0) return;
            double next = lam * std::exp(-params.alpha * delta) +
                          2.0 * params.beta * forcing_integral(g_path, t, target, params.alpha);
            double variance;
            if (params.alpha > 0.0)
                variance = params.sigma * params.sigma *
                           (-std::expm1(-2.0 * params.alpha * delta)) / (2.0 * params.alpha);
            else
                variance = params.sigma * params.sigma * delta;
            if (variance > 0.0) next += std::sqrt(variance) * rng.normal();
            lam = next;
            t = target;
        };

        double candidate = rng.exponential(2.0);
        while (true) {
            if (observe) {
                while (obs_idx < result.obs_times.size() &&
                       result.obs_times[obs_idx] <= std::min(candidate, t_final) + 1e-15) {
                    evolve_to(result.obs_times[obs_idx]);
                    result.mean_rate[obs_idx] += 1.0 + std::tanh(sig * lam);
                    obs_idx++;
                }
            }
            if (candidate > t_final) break;
            evolve_to(candidate);
            const double u = rng.uniform_open(2.0);
            if (u < 1.0 + std::tanh(sig * lam)) {
                sig = -sig;
                flips++;
            }
            candidate = t + rng.exponential(2.0);
        }
        evolve_to(t_final);
        result.sigma[r] = static_cast<std::int8_t>(sig);
        result.lambda[r] = lam;
        result.flip_counts[r] = flips;
    }
    if (observe)
        for (double& v : result.mean_rate) v /= replicas;
    return result;
}

} // namespace dcw
