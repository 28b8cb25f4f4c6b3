#include "doctest.h"

#include "dcw/cycle.hpp"
#include "dcw/errors.hpp"
#include "dcw/macro_ode.hpp"
#include "dcw/ode.hpp"

#include <cmath>

using namespace dcw;

namespace {

const ModelParams kSub{3.0, 1.0, 0.0, 1};
const ModelParams kSuper{3.0, 3.0, 0.0, 1};

// regression baselines at (alpha=3, beta=3), derived with find_limit_cycle and
// confirmed by long integrations from y0_p/2 and 2*y0_p converging to the same
// crossing and period (tools/dcw cycle --alpha 3 --beta 3 reproduces them)
constexpr double kY0p = 2.28740813421571;
constexpr double kPeriod = 2.58589980805921;
constexpr double kAmplitudeM = 0.480195756302471;

struct LienardField {
    ModelParams params;
    void operator()(double, const std::array<double, 2>& y, std::array<double, 2>& dydt) const {
        dydt[0] = -2.0 * params.alpha * y[1];
        dydt[1] = y[0] - lienard_g(y[1], params);
    }
};

// direct full-return: integrate until the orbit comes back to the positive
// y-axis (second crossing of lambda = 0)
std::pair<double, double> direct_full_return(double y0, const ModelParams& params) {
    Dopri5<2, LienardField> stepper(LienardField{params}, {1e-12, 1e-14});
    stepper.init(0.0, {y0, 0.0}, 100.0);
    int crossings = 0;
    while (stepper.step()) {
        const double l0 = stepper.y_prev()[1];
        const double l1 = stepper.y()[1];
        if (stepper.t_prev() > 0.0 && ((l0 > 0.0 && l1 <= 0.0) || (l0 < 0.0 && l1 >= 0.0))) {
            crossings++;
            if (crossings == 2) {
                double lo = stepper.t_prev(), hi = stepper.t();
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if ((stepper.dense(mid)[1] < 0.0) == (l0 < 0.0))
                        lo = mid; // still on the starting side of the crossing
                    else
                        hi = mid;
                }
                const double t = 0.5 * (lo + hi);
                return {stepper.dense(t)[0], t};
            }
        }
    }
    FAIL("no full return");
    return {0.0, 0.0};
}

} // namespace

TEST_CASE("half return preconditions") {
    CHECK_THROWS_AS(half_return(-1.0, kSuper), std::domain_error);
    CHECK_THROWS_AS(half_return(0.0, kSuper), std::domain_error);
}

TEST_CASE("full return equals the composition of two half returns") {
    for (const double y0 : {0.5, 1.5, 3.0}) {
        const auto h1 = half_return(y0, kSuper);
        CHECK(h1.y1 < 0.0);
        CHECK(h1.transit_time > 0.0);
        // by oddness the second half is the mirrored first half from -y1
        const auto h2 = half_return(-h1.y1, kSuper);
        const auto [y_direct, t_direct] = direct_full_return(y0, kSuper);
        CHECK(y_direct == doctest::Approx(-h2.y1).epsilon(1e-8));
        CHECK(t_direct == doctest::Approx(h1.transit_time + h2.transit_time).epsilon(1e-8));
    }
}

TEST_CASE("subcritical map contracts, supercritical repels near the origin") {
    for (const double y0 : {0.5, 1.0, 2.0, 4.0}) {
        const auto h = half_return(y0, kSub);
        CHECK(std::abs(h.y1) < y0);
    }
    const auto h = half_return(0.01, kSuper);
    CHECK(std::abs(h.y1) > 0.01);
}

TEST_CASE("delta_w equals the direct W difference and has the right signs") {
    const CycleOptions opts;
    for (const double y0 : {0.5, 2.0, 5.0}) {
        const auto h = half_return(y0, kSuper, opts);
        const double via_formula = delta_w(y0, kSuper, opts);
        const double via_w = lyapunov_w({h.y1, 0.0}, kSuper) - lyapunov_w({y0, 0.0}, kSuper);
        CHECK(via_formula == doctest::Approx(via_w).epsilon(1e-14));
    }

    SUBCASE("positive below the cycle, negative and decreasing above") {
        CHECK(delta_w(kY0p / 4.0, kSuper) > 0.0);
        CHECK(delta_w(kY0p / 2.0, kSuper) > 0.0);
        double prev = 0.0;
        for (const double f : {1.5, 2.5, 4.0, 7.0, 10.0}) {
            const double dw = delta_w(f * kY0p, kSuper);
            CHECK(dw < 0.0);
            CHECK(dw < prev);
            prev = dw;
        }
    }
}

TEST_CASE("limit cycle at the reference supercritical point") {
    const auto result = find_limit_cycle(kSuper);
    REQUIRE(result.has_cycle);
    const auto& cycle = *result.cycle;
    CHECK(cycle.y0_p == doctest::Approx(kY0p).epsilon(1e-6));
    CHECK(cycle.period == doctest::Approx(kPeriod).epsilon(1e-6));
    CHECK(cycle.amplitude_m == doctest::Approx(kAmplitudeM).epsilon(1e-6));
    CHECK(std::abs(cycle.delta_w_residual) < 1e-12);
    CHECK(cycle.closure_error < 1e-6);
    CHECK(cycle.orbit.size() == 2048);

    SUBCASE("subcritical and critical parameters yield no cycle") {
        CHECK_FALSE(find_limit_cycle({3.0, 2.4, 0.0, 1}).has_cycle);
        CHECK_FALSE(find_limit_cycle({3.0, 2.5, 0.0, 1}).has_cycle);
    }

    SUBCASE("period from half transit agrees with direct closure") {
        const auto [y_back, t_full] = direct_full_return(cycle.y0_p, kSuper);
        CHECK(t_full == doctest::Approx(cycle.period).epsilon(1e-6));
        CHECK(y_back == doctest::Approx(cycle.y0_p).epsilon(1e-6));
    }
}

TEST_CASE("root finding from distinct brackets agrees") {
    for (const double alpha : {1.0, 3.0}) {
        for (const double shift : {1.5, 3.0}) {
            const ModelParams params{alpha, alpha / 2.0 + 1.0 + shift, 0.0, 1};
            double first = 0.0;
            for (const double start : {0.005, 0.02, 0.1, 0.5, 1.0}) {
                CycleOptions opts;
                opts.bracket_start = start;
                const auto result = find_limit_cycle(params, opts);
                REQUIRE(result.has_cycle);
                if (first == 0.0)
                    first = result.cycle->y0_p;
                else
                    CHECK(result.cycle->y0_p == doctest::Approx(first).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("rotation property: supercritical starts on the y-axis all return") {
    for (const double y0 : {0.05, 0.2, 1.0, 5.0, 20.0}) {
        CHECK_NOTHROW(half_return(y0, kSuper));
        CHECK_NOTHROW(half_return(y0, {1.0, 2.0, 0.0, 1}));
    }
}

TEST_CASE("bifurcation scan across the threshold") {
    const auto rows = bifurcation_scan(3.0, 2.4, 2.6, 0.01);
    REQUIRE(rows.size() == 21);
    for (const auto& row : rows) {
        const bool super = row.beta > 2.5;
        CHECK(row.has_cycle == super);
        CHECK((row.classification == OriginStability::Unstable) == super);
        CHECK((row.re_eig > 0.0) == super);
        if (row.beta == 2.5) {
            CHECK(row.classification == OriginStability::Critical);
            CHECK(row.re_eig == 0.0);
        }
    }

    SUBCASE("amplitude grows monotonically from the onset") {
        double prev = 0.0;
        for (const auto& row : rows) {
            if (!row.has_cycle) continue;
            CHECK(row.amplitude_m > prev);
            prev = row.amplitude_m;
        }
        CHECK(prev < 0.3); // still small this close to the threshold
    }

    SUBCASE("beta = 0 row: no cycle, real negative eigenvalues") {
        const auto zero = bifurcation_scan(3.0, 0.0, 0.0, 0.01);
        REQUIRE(zero.size() == 1);
        CHECK_FALSE(zero[0].has_cycle);
        CHECK(zero[0].im_eig == 0.0);
        CHECK(zero[0].re_eig == doctest::Approx(-2.0));
        CHECK(zero[0].classification == OriginStability::Stable);
    }
}
