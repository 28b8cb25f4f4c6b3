#include "doctest.h"

#include "dcw/chaos.hpp"
#include "dcw/fokker_planck.hpp"
#include "dcw/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace dcw;

namespace {
// coupled_run(alpha=3, beta=1, sigma=0.1, n=1000, T=5, replicas=8, seed=7),
// frozen from the first verified run (standard error was 0.0259)
constexpr double kCoupledBaseline = 0.30288220384681508;
} // namespace

TEST_CASE("spin clamp h") {
    CHECK(clamp_spin(1.0) == 1.0);
    CHECK(clamp_spin(-1.0) == -1.0);
    CHECK(clamp_spin(3.0) == 1.0);
    CHECK(clamp_spin(-3.0) == -1.0);
    CHECK(clamp_spin(0.3) == 0.3);
}

TEST_CASE("mean jump of the kernel under the envelope measure") {
    // quadrature oracle: midpoint Riemann sum of q((s, lambda), u) du over (0, 2)
    const auto q_kernel = [](double s, double lambda, double u) {
        const double h = clamp_spin(s);
        return (u > 0.0 && u < 1.0 + h * std::tanh(lambda)) ? -2.0 * h : 0.0;
    };
    Rng rng(31, 0);
    const int quad_points = 200000;
    for (int k = 0; k < 1000; ++k) {
        const double lambda = -6.0 + 12.0 * rng.uniform();
        const double s = rng.uniform() < 0.5 ? -1.0 : 1.0;
        double integral = 0.0;
        for (int j = 0; j < quad_points; ++j) {
            const double u = 2.0 * (j + 0.5) / quad_points;
            integral += q_kernel(s, lambda, u);
        }
        integral *= 2.0 / quad_points;
        CHECK(integral == doctest::Approx(coupling_jump_mean(s, lambda)).epsilon(1e-4));
        CHECK(coupling_jump_mean(s, lambda) ==
              doctest::Approx(-2.0 * (s + std::tanh(lambda))).epsilon(1e-14));
    }
}

TEST_CASE("beta = 0 control: the coupled systems are pathwise identical") {
    const ModelParams params{3.0, 0.0, 0.1, 200};
    const auto result = coupled_run(params, {0.0, 3.0}, 2.0, 4, 99);
    CHECK(result.d_n == 0.0);
    CHECK(result.standard_error == 0.0);
}

TEST_CASE("coupled run regression baseline") {
    // frozen from the first verified run (seed 7, 8 replicas); guards against
    // silent changes in the coupling or stream derivation
    const ModelParams params{3.0, 1.0, 0.1, 1000};
    const auto result = coupled_run(params, {0.0, 3.0}, 5.0, 8, 7);
    CHECK(result.n == 1000);
    CHECK(result.d_n > 0.0);
    CHECK(result.standard_error > 0.0);
    CHECK(result.standard_error < result.d_n);
    CHECK(result.d_n == doctest::Approx(kCoupledBaseline).epsilon(1e-9));
}

TEST_CASE("coupling distance decays roughly like 1/sqrt(N)") {
    const ModelParams params{3.0, 1.0, 0.1, 1};
    const auto study = convergence_study(params, {0.0, 3.0}, 3.0, {250, 1000}, 8, 11);
    REQUIRE(study.rows.size() == 2);
    const double ratio = study.rows[1].d_n / study.rows[0].d_n;
    CHECK(ratio > 0.35);
    CHECK(ratio < 0.72);
    // non-increasing within two standard errors
    CHECK(study.rows[1].d_n <=
          study.rows[0].d_n + 2.0 * (study.rows[0].standard_error + study.rows[1].standard_error));
    CHECK(study.slope < 0.0);
    CHECK(study.rows[0].replicas == 8);
}

TEST_CASE("study is reproducible bit-for-bit") {
    const ModelParams params{3.0, 1.0, 0.1, 1};
    const auto a = convergence_study(params, {0.0, 3.0}, 1.0, {100, 200}, 4, 5);
    const auto b = convergence_study(params, {0.0, 3.0}, 1.0, {100, 200}, 4, 5);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].d_n == b.rows[i].d_n);
        CHECK(a.rows[i].standard_error == b.rows[i].standard_error);
    }
    CHECK(a.slope == b.slope);
}

TEST_CASE("wasserstein distance") {
    const auto grid = Grid::make(5.0, 500);

    SUBCASE("self-distance decays with the sample size") {
        const auto ref = mollified_delta(grid, 0.5, 0.0, 20.0); // wide Gaussian
        // inverse-CDF sampling from the grid density itself
        std::vector<double> cdf(grid.n_cells + 1, 0.0);
        for (int i = 0; i < grid.n_cells; ++i)
            cdf[i + 1] = cdf[i] + ref.nu[i] * grid.d_lambda;
        Rng rng(3, 1);
        const auto draw = [&]() {
            const double u = rng.uniform() * cdf.back();
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            const int j = std::max<int>(1, static_cast<int>(it - cdf.begin())) - 1;
            const double frac = (u - cdf[j]) / (cdf[j + 1] - cdf[j]);
            return grid.edge(j) + frac * grid.d_lambda;
        };
        std::vector<double> small(200), big(20000);
        for (auto& v : small) v = draw();
        for (auto& v : big) v = draw();
        const double d_small = marginal_distance(small, ref);
        const double d_big = marginal_distance(big, ref);
        CHECK(d_big < d_small);
        CHECK(d_big < 0.02);
    }

    SUBCASE("point masses: W1 is the separation") {
        // all reference mass in the cell containing b
        DensityPair ref;
        ref.grid = grid;
        ref.nu.assign(grid.n_cells, 0.0);
        ref.mu.assign(grid.n_cells, 0.0);
        const double b = grid.centers[300];
        ref.nu[300] = 1.0 / grid.d_lambda;
        const double a = grid.centers[100];
        const std::vector<double> sample(50, a);
        CHECK(marginal_distance(sample, ref) ==
              doctest::Approx(std::abs(a - b)).epsilon(0.0).scale(1.0).epsilon(grid.d_lambda));
    }

    SUBCASE("empty sample is rejected") {
        const auto ref = mollified_delta(grid, 0.0, 0.0);
        CHECK_THROWS_AS(marginal_distance({}, ref), std::domain_error);
    }
}

TEST_CASE("tagged nonlinear process with zero mean field is plain OU") {
    const ModelParams params{3.0, 2.0, 0.3, 1}; // beta is irrelevant when g = 0
    GPath g;
    g.times = {0.0, 5.0};
    g.values = {0.0, 0.0};
    const double t_final = 2.0;
    const int replicas = 20000;
    const auto result =
        simulate_tagged_nonlinear(g, params, t_final, 1.5, 0.0, replicas, 77);

    double sum = 0.0, sum2 = 0.0;
    for (const double l : result.lambda) {
        sum += l;
        sum2 += l * l;
    }
    const double mean = sum / replicas;
    const double var = sum2 / replicas - mean * mean;
    const double mean_exact = 1.5 * std::exp(-params.alpha * t_final);
    const double var_exact = params.sigma * params.sigma / (2.0 * params.alpha) *
                             (1.0 - std::exp(-2.0 * params.alpha * t_final));
    CHECK(mean == doctest::Approx(mean_exact).epsilon(1).scale(3.0 * std::sqrt(var_exact / replicas)));
    CHECK(var == doctest::Approx(var_exact).epsilon(3.0 * std::sqrt(2.0 / replicas)));
}

TEST_CASE("tagged flip count matches the rate integral") {
    const ModelParams params{2.0, 1.0, 0.3, 1};
    GPath g; // a nontrivial forcing path
    g.times = {0.0, 0.5, 1.0, 1.5, 2.0};
    g.values = {0.8, 0.5, 0.1, -0.2, -0.3};
    const int replicas = 20000;
    TaggedOptions opts;
    opts.obs_cadence = 0.02;
    const auto result = simulate_tagged_nonlinear(g, params, 2.0, 1.0, 0.0, replicas, 901, opts);

    double mean_flips = 0.0;
    for (const auto f : result.flip_counts) mean_flips += f;
    mean_flips /= replicas;

    // trapezoid of the replica-averaged instantaneous rate
    double integral = 0.0;
    for (std::size_t k = 1; k < result.obs_times.size(); ++k)
        integral += 0.5 * (result.mean_rate[k] + result.mean_rate[k - 1]) *
                    (result.obs_times[k] - result.obs_times[k - 1]);

    double var_flips = 0.0;
    for (const auto f : result.flip_counts) var_flips += (f - mean_flips) * (f - mean_flips);
    var_flips /= replicas;
    const double se = std::sqrt(var_flips / replicas);
    CHECK(std::abs(mean_flips - integral) < 4.0 * se + 0.01);
}

TEST_CASE("tagged process validates the g path") {
    const ModelParams params{1.0, 1.0, 0.1, 1};
    GPath g;
    g.times = {0.0, 1.0};
    g.values = {0.0, 0.0};
    CHECK_THROWS_AS(simulate_tagged_nonlinear(g, params, 2.0, 0.0, 0.0, 10, 1),
                    std::domain_error);
}

TEST_CASE("particle intensities match the PDE marginal across engines") {
    // W1 between the N-particle intensity sample and the solved nu at t = 5
    const ModelParams params{3.0, 1.0, 0.1, 10000};
    const double t_final = 5.0;

    ParticleSystem final_state;
    simulate(params, {0.0, 3.0}, t_final, 0.1, 321, &final_state);
    std::vector<double> sample(final_state.size());
    for (int i = 0; i < final_state.size(); ++i) sample[i] = final_state.lambda_of(i);

    const auto grid = Grid::automatic(params, 3.0, 1024);
    const auto pde = solve(mollified_delta(grid, 3.0, 0.0), params, t_final, 0.05);
    CHECK(marginal_distance(sample, pde.final_state) < 0.05);
}

TEST_CASE("tagged marginal matches the PDE at small scale") {
    const ModelParams params{3.0, 1.0, 0.1, 1};
    const double t_final = 1.5;
    const auto grid = Grid::automatic(params, 3.0, 1024);
    const auto pde = solve(mollified_delta(grid, 3.0, 0.0), params, t_final, 0.01);

    GPath g;
    for (const auto& row : pde.series) {
        g.times.push_back(row.t);
        g.values.push_back(row.g);
    }
    TaggedOptions opts;
    opts.init_std = 2.0 * grid.d_lambda; // same mollified start as the PDE
    const int replicas = 20000;
    const auto tagged =
        simulate_tagged_nonlinear(g, params, t_final, 3.0, 0.0, replicas, 4242, opts);

    CHECK(marginal_distance(tagged.lambda, pde.final_state) < 0.05);
    double mean_sigma = 0.0;
    for (const auto s : tagged.sigma) mean_sigma += s;
    mean_sigma /= replicas;
    CHECK(std::abs(mean_sigma - pde.series.back().m) < 0.03);
}
