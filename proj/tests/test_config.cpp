#include "doctest.h"

#include "dcw/config.hpp"
#include "dcw/errors.hpp"

#include <cstdlib>
#include <string>

using namespace dcw;

TEST_CASE("presets resolve to the figure parameter sets") {
    const auto fig5 = parse_config_or_throw(preset_text("fig5"));
    CHECK(fig5.engine == Engine::Pde);
    CHECK(fig5.params.alpha == 3.0);
    CHECK(fig5.params.beta == 1.0);
    CHECK(fig5.params.sigma == 0.1);
    CHECK(fig5.lambda0 == 3.0);
    CHECK(fig5.m0 == 0.0);

    const auto fig11 = parse_config_or_throw(preset_text("fig11"));
    CHECK(fig11.params.alpha == 3.0);
    CHECK(fig11.params.beta == 3.0);
    CHECK(fig11.params.sigma == 10.0);

    const auto noiseless = parse_config_or_throw(preset_text("fig5-noiseless"));
    CHECK(noiseless.engine == Engine::Ode);
    CHECK(noiseless.params.sigma == 0.0);

    CHECK_THROWS_AS(preset_text("fig42"), ConfigError);
    CHECK(preset_names().size() == 8);
}

TEST_CASE("validation failures are all reported with key names") {
    const std::string text =
        "engine = pde\nalpha = 3\nbeta = -1\nsigma = 0.1\nhorizon = 1\n";
    const auto outcome = parse_config(text);
    REQUIRE_FALSE(outcome.config.has_value());
    bool mentions_beta = false;
    for (const auto& e : outcome.errors)
        if (e.find("beta") != std::string::npos && e.find(">= 0") != std::string::npos)
            mentions_beta = true;
    CHECK(mentions_beta);

    SUBCASE("multiple problems are collected, not just the first") {
        const auto bad = parse_config("engine = pde\nalpha = -1\nbeta = -1\nsigma = x\n");
        CHECK(bad.errors.size() >= 3);
    }
    SUBCASE("unknown keys are rejected") {
        const auto bad = parse_config("engine = ode\nalpha = 3\nbeta = 1\nhorizon = 1\nbetta = 2\n");
        REQUIRE_FALSE(bad.config.has_value());
        bool found = false;
        for (const auto& e : bad.errors)
            if (e.find("unknown key 'betta'") != std::string::npos) found = true;
        CHECK(found);
    }
    SUBCASE("duplicate keys are rejected") {
        const auto bad = parse_config("engine = ode\nalpha = 3\nalpha = 4\nbeta = 1\nhorizon = 1\n");
        CHECK_FALSE(bad.config.has_value());
    }
    SUBCASE("sigma = 0 with the pde engine points to the ode engine") {
        const auto bad = parse_config("engine = pde\nalpha = 3\nbeta = 1\nsigma = 0\nhorizon = 1\n");
        REQUIRE_FALSE(bad.config.has_value());
        bool found = false;
        for (const auto& e : bad.errors)
            if (e.find("ode") != std::string::npos) found = true;
        CHECK(found);
    }
    SUBCASE("missing engine") {
        const auto bad = parse_config("alpha = 3\nbeta = 1\n");
        CHECK_FALSE(bad.config.has_value());
    }
    SUBCASE("non-finite numbers are refused") {
        const auto bad = parse_config("engine = ode\nalpha = inf\nbeta = 1\nhorizon = 1\n");
        CHECK_FALSE(bad.config.has_value());
    }
}

TEST_CASE("comments, sections and whitespace") {
    const std::string text =
        "# run configuration\n"
        "engine = particles   # trailing comment\n"
        "alpha = 3\n"
        "beta = 1\n"
        "sigma = 0.5\n"
        "horizon = 2\n"
        "\n"
        "[particles]\n"
        "n_particles = 64\n"
        "method = euler\n"
        "euler_dt = 0.002\n";
    const auto config = parse_config_or_throw(text);
    CHECK(config.engine == Engine::Particles);
    CHECK(config.params.n_particles == 64);
    CHECK(config.method == "euler");
    CHECK(config.euler_dt == 0.002);
    CHECK(config.cadence == doctest::Approx(0.002)); // horizon / 1000 default
}

TEST_CASE("manifest round trip reproduces the config exactly") {
    for (const auto& name : preset_names()) {
        const auto config = parse_config_or_throw(preset_text(name));
        const auto again = parse_config_or_throw(serialize_config(config));
        CHECK(again == config);
    }
    // an engine with section data and awkward numbers
    const auto scan = parse_config_or_throw(
        "engine = scan\nalpha = 0.30000000000000004\nbeta = 2\n[scan]\n"
        "beta_lo = 1.1\nbeta_hi = 1.2\nbeta_step = 0.010000000000000002\n");
    CHECK(parse_config_or_throw(serialize_config(scan)) == scan);

    const auto chaos = parse_config_or_throw(
        "engine = chaos\nalpha = 3\nbeta = 1\nsigma = 0.1\nhorizon = 5\n[chaos]\n"
        "sizes = 250, 1000, 4000\nreplicas = 16\n");
    CHECK(parse_config_or_throw(serialize_config(chaos)) == chaos);
    CHECK(chaos.chaos_sizes == std::vector<int>{250, 1000, 4000});
}

TEST_CASE("flag overrides take precedence") {
    const auto outcome = parse_config_with_overrides(
        preset_text("fig5"), {{"seed", "42"}, {"pde.n_cells", "512"}, {"beta", "1.5"}});
    REQUIRE(outcome.config.has_value());
    CHECK(outcome.config->seed == 42);
    CHECK(outcome.config->n_cells == 512);
    CHECK(outcome.config->params.beta == 1.5);
}

TEST_CASE("environment fallbacks") {
    setenv("DCW_SEED", "777", 1);
    setenv("DCW_OUT", "/tmp/dcw_env_out", 1);
    const auto config =
        parse_config_or_throw("engine = ode\nalpha = 3\nbeta = 1\nhorizon = 1\n");
    CHECK(config.seed == 777);
    CHECK(config.out_dir == "/tmp/dcw_env_out");
    unsetenv("DCW_SEED");
    unsetenv("DCW_OUT");

    const auto config2 =
        parse_config_or_throw("engine = ode\nalpha = 3\nbeta = 1\nhorizon = 1\nseed = 9\n");
    CHECK(config2.seed == 9);
    CHECK(config2.out_dir == ".");
}

TEST_CASE("scan configuration requires a sane range") {
    const auto bad = parse_config(
        "engine = scan\nalpha = 3\nbeta = 2\n[scan]\nbeta_lo = 3\nbeta_hi = 2\nbeta_step = 0.1\n");
    CHECK_FALSE(bad.config.has_value());
    const auto bad2 = parse_config(
        "engine = scan\nalpha = 3\nbeta = 2\n[scan]\nbeta_lo = 2\nbeta_hi = 3\nbeta_step = 0\n");
    CHECK_FALSE(bad2.config.has_value());
}
