#include "doctest.h"

#include "dcw/errors.hpp"
#include "dcw/macro_ode.hpp"

#include <cmath>
#include <random>

using namespace dcw;

namespace {
const ModelParams kSub{3.0, 1.0, 0.0, 1};
const ModelParams kSuper{3.0, 3.0, 0.0, 1};
} // namespace

TEST_CASE("vector fields at reference points") {
    const auto origin = vector_field_dyn0({0.0, 0.0}, kSub);
    CHECK(origin[0] == 0.0);
    CHECK(origin[1] == 0.0);

    const auto f = vector_field_dyn0({1.0, 0.0}, kSub);
    CHECK(f[0] == doctest::Approx(-2.0));
    CHECK(f[1] == doctest::Approx(2.0));

    const auto l0 = vector_field_lienard({0.0, 0.0}, kSub);
    CHECK(l0[0] == 0.0);
    CHECK(l0[1] == 0.0);

    // nullcline: y = g(lambda) makes dlambda/dt vanish
    const double lam = 0.7;
    const auto ln = vector_field_lienard({lienard_g(lam, kSuper), lam}, kSuper);
    CHECK(ln[1] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("field is odd") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> um(-1.0, 1.0), ul(-5.0, 5.0);
    for (int k = 0; k < 100; ++k) {
        const MacroState x{um(gen), ul(gen)};
        const auto f = vector_field_dyn0(x, kSuper);
        const auto fneg = vector_field_dyn0({-x.m, -x.lambda}, kSuper);
        CHECK(fneg[0] == doctest::Approx(-f[0]).epsilon(1e-13));
        CHECK(fneg[1] == doctest::Approx(-f[1]).epsilon(1e-13));
    }
}

TEST_CASE("coordinate change: round trip and pushforward consistency") {
    const ModelParams p{3.0, 3.0, 0.0, 1};
    CHECK(to_lienard({1.0, 0.0}, p).y == doctest::Approx(6.0));
    CHECK_THROWS_AS(from_lienard({1.0, 1.0}, {3.0, 0.0, 0.0, 1}), std::domain_error);

    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> um(-1.0, 1.0), ul(-5.0, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const MacroState x{um(gen), ul(gen)};
        const auto back = from_lienard(to_lienard(x, p), p);
        CHECK(back.m == doctest::Approx(x.m).epsilon(1e-15));
        CHECK(back.lambda == x.lambda);

        // d/dt of y = 2(lambda + beta m) along dyn0 equals the Lienard field
        const auto f = vector_field_dyn0(x, p);
        const auto fl = vector_field_lienard(to_lienard(x, p), p);
        CHECK(fl[0] == doctest::Approx(2.0 * (f[1] + p.beta * f[0])).epsilon(1e-12));
        CHECK(fl[1] == doctest::Approx(f[1]).epsilon(1e-12));
    }
}

TEST_CASE("subcritical trajectories reach the origin") {
    const auto traj = integrate({0.0, 3.0}, kSub, 50.0);
    const auto end = traj.states.back();
    CHECK(std::hypot(end[0], end[1]) < 1e-6);
}

TEST_CASE("supercritical trajectories settle into a bounded annulus") {
    const auto traj = integrate({0.0, 3.0}, kSuper, 50.0);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < 20.0) continue;
        const double norm = std::hypot(traj.states[i][0], traj.states[i][1]);
        CHECK(norm > 0.05);
        CHECK(norm < 5.0);
    }
}

TEST_CASE("trajectory from the negated start is the negated trajectory") {
    MacroOdeOptions opts;
    const auto a = integrate({0.3, 2.0}, kSuper, 10.0, opts);
    const auto b = integrate({-0.3, -2.0}, kSuper, 10.0, opts);
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        CHECK(b.states[i][0] == doctest::Approx(-a.states[i][0]).epsilon(1e-7).scale(1.0));
        CHECK(b.states[i][1] == doctest::Approx(-a.states[i][1]).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("lyapunov function and its orbital derivative") {
    CHECK(lyapunov_w({0.0, 0.0}, kSub) == 0.0);
    CHECK(lyapunov_w_dot({0.0, 0.0}, kSub) == 0.0);
    CHECK_THROWS_AS(lyapunov_w({1.0, 1.0}, {0.0, 1.0, 0.0, 1}), std::domain_error);

    SUBCASE("W decreases along the subcritical flow everywhere") {
        std::mt19937_64 gen(31);
        std::uniform_real_distribution<double> uy(-8.0, 8.0), ul(-4.0, 4.0);
        for (int k = 0; k < 10000; ++k) {
            const LienardState s{uy(gen), ul(gen)};
            const double wd = lyapunov_w_dot(s, kSub);
            CHECK(wd <= 0.0);
            if (std::abs(s.lambda) > 1e-6) CHECK(wd < 0.0);
        }
    }

    SUBCASE("finite differences of W along a trajectory converge to W_dot") {
        MacroOdeOptions opts;
        opts.ode.rtol = 1e-12;
        opts.ode.atol = 1e-14;
        const auto lstart = to_lienard({0.2, 1.5}, kSub);
        const auto traj = integrate_lienard(lstart, kSub, 5.0, opts);
        const double t0 = 1.0;
        const auto at = [&](double t) {
            const auto s = traj.at(t);
            return lyapunov_w({s[0], s[1]}, kSub);
        };
        const auto s0 = traj.at(t0);
        const double wd = lyapunov_w_dot({s0[0], s0[1]}, kSub);
        const double e1 = std::abs((at(t0 + 1e-3) - at(t0)) / 1e-3 - wd);
        const double e2 = std::abs((at(t0 + 1e-4) - at(t0)) / 1e-4 - wd);
        CHECK(e2 < e1); // first-order convergence or better
        CHECK(e2 < 1e-2 * std::abs(wd) + 1e-12);
    }

    SUBCASE("W is non-increasing along sampled subcritical output") {
        const auto lstart = to_lienard({0.5, -2.0}, kSub);
        const auto traj = integrate_lienard(lstart, kSub, 30.0);
        double prev = lyapunov_w({traj.states[0][0], traj.states[0][1]}, kSub);
        for (std::size_t i = 1; i < traj.states.size(); ++i) {
            const double w = lyapunov_w({traj.states[i][0], traj.states[i][1]}, kSub);
            CHECK(w <= prev + 1e-9);
            prev = w;
        }
    }
}

TEST_CASE("integrating in either coordinate system gives the same orbit") {
    MacroOdeOptions opts;
    for (const auto& params : {kSub, kSuper}) {
        const MacroState x0{0.0, 3.0};
        const auto tm = integrate(x0, params, 20.0, opts);
        const auto tl = integrate_lienard(to_lienard(x0, params), params, 20.0, opts);
        double sup = 0.0;
        for (std::size_t i = 0; i < tm.times.size(); ++i) {
            const auto sl = tl.at(tm.times[i]);
            const auto mapped = from_lienard({sl[0], sl[1]}, params);
            sup = std::max(sup, std::hypot(mapped.m - tm.states[i][0],
                                           mapped.lambda - tm.states[i][1]));
        }
        CHECK(sup < 10.0 * 1e-7);
    }
}

TEST_CASE("newton search from a grid of starts finds only the origin") {
    for (const auto& params : {kSub, kSuper}) {
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 50; ++j) {
                double m = -2.0 + 4.0 * i / 49.0;
                double lam = -2.0 + 4.0 * j / 49.0;
                bool converged = false;
                for (int it = 0; it < 100; ++it) {
                    const auto f = vector_field_dyn0({m, lam}, params);
                    if (std::hypot(f[0], f[1]) < 1e-13) {
                        converged = true;
                        break;
                    }
                    const double s = 1.0 - std::tanh(lam) * std::tanh(lam);
                    // J = [[-2, -2 s], [2 beta, 2 beta s - alpha]], det = 2 alpha
                    const double det = 2.0 * params.alpha;
                    const double dm = ((2.0 * params.beta * s - params.alpha) * f[0] + 2.0 * s * f[1]) / det;
                    const double dl = (-2.0 * params.beta * f[0] - 2.0 * f[1]) / det;
                    m -= dm;
                    lam -= dl;
                    if (!std::isfinite(m) || !std::isfinite(lam)) break;
                }
                if (converged) {
                    CHECK(std::abs(m) < 1e-6);
                    CHECK(std::abs(lam) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("observed linear rate near the origin matches the eigenvalues") {
    for (const auto& params : {kSub, kSuper}) {
        const auto eigs = linearization_eigenvalues(params);
        const double re = eigs.first.real();
        const double im = std::abs(eigs.first.imag());
        const double t_rot = 2.0 * M_PI / im; // integer rotations cancel the phase factor
        MacroOdeOptions opts;
        opts.ode.rtol = 1e-12;
        opts.ode.atol = 1e-16;
        const double scale = 1e-6;
        const auto traj = integrate({scale * 0.6, scale * 0.8}, params, 3.0 * t_rot, opts);
        const auto x0 = traj.at(0.0);
        const auto x1 = traj.at(3.0 * t_rot);
        const double observed =
            std::log(std::hypot(x1[0], x1[1]) / std::hypot(x0[0], x0[1])) / (3.0 * t_rot);
        CHECK(observed == doctest::Approx(re).epsilon(0.05));
    }
}

TEST_CASE("integration rejects bad arguments") {
    CHECK_THROWS_AS(integrate({0.0, 1.0}, kSub, -1.0), std::domain_error);
    MacroOdeOptions opts;
    opts.ode.rtol = -1.0;
    CHECK_THROWS_AS(integrate({0.0, 1.0}, kSub, 1.0, opts), std::domain_error);
}
