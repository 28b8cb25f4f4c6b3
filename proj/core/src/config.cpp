#include "dcw/config.hpp"

#include "dcw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace dcw {

const char* to_string(Engine e) {
    switch (e) {
        case Engine::Particles: return "particles";
        case Engine::Ode: return "ode";
        case Engine::Pde: return "pde";
        case Engine::Cycle: return "cycle";
        case Engine::Scan: return "scan";
        case Engine::Chaos: return "chaos";
    }
    return "unknown";
}

std::optional<Engine> engine_from_string(const std::string& name) {
    if (name == "particles") return Engine::Particles;
    if (name == "ode") return Engine::Ode;
    if (name == "pde") return Engine::Pde;
    if (name == "cycle") return Engine::Cycle;
    if (name == "scan") return Engine::Scan;
    if (name == "chaos") return Engine::Chaos;
    return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// keys are stored section-qualified: "alpha", "pde.n_cells", ...
using KvMap = std::map<std::string, std::string>;

void parse_kv_lines(const std::string& text, KvMap& kv, std::vector<std::string>& errors) {
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!engine_from_string(section)) {
                errors.push_back("line " + std::to_string(line_no) + ": unknown section [" +
                                 section + "]");
                section.clear();
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            errors.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (kv.count(full))
            errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
        kv[full] = value;
    }
}

struct Reader {
    const KvMap& kv;
    std::vector<std::string>& errors;
    mutable std::vector<std::string> consumed;

    std::optional<std::string> raw(const std::string& key) const {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        consumed.push_back(key);
        return it->second;
    }

    double number(const std::string& key, double fallback, bool* present = nullptr) const {
        const auto v = raw(key);
        if (present) *present = v.has_value();
        if (!v) return fallback;
        char* end = nullptr;
        const double x = std::strtod(v->c_str(), &end);
        if (end == v->c_str() || *end != '\0' || !std::isfinite(x)) {
            errors.push_back("key '" + key + "': not a finite number: '" + *v + "'");
            return fallback;
        }
        return x;
    }

    long integer(const std::string& key, long fallback) const {
        const auto v = raw(key);
        if (!v) return fallback;
        char* end = nullptr;
        const long x = std::strtol(v->c_str(), &end, 10);
        if (end == v->c_str() || *end != '\0') {
            errors.push_back("key '" + key + "': not an integer: '" + *v + "'");
            return fallback;
        }
        return x;
    }

    std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
        const auto v = raw(key);
        if (!v) return fallback;
        char* end = nullptr;
        const unsigned long long x = std::strtoull(v->c_str(), &end, 10);
        if (end == v->c_str() || *end != '\0') {
            errors.push_back("key '" + key + "': not an unsigned integer: '" + *v + "'");
            return fallback;
        }
        return x;
    }

    bool boolean(const std::string& key, bool fallback) const {
        const auto v = raw(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        errors.push_back("key '" + key + "': not a boolean: '" + *v + "'");
        return fallback;
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        const auto v = raw(key);
        return v ? *v : fallback;
    }

    template <class T, class Parse>
    std::vector<T> list(const std::string& key, std::vector<T> fallback, Parse parse) const {
        const auto v = raw(key);
        if (!v) return fallback;
        std::vector<T> out;
        std::istringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            char* end = nullptr;
            out.push_back(parse(item.c_str(), &end));
            if (end == item.c_str() || *end != '\0') {
                errors.push_back("key '" + key + "': bad list entry '" + item + "'");
                return fallback;
            }
        }
        if (out.empty()) errors.push_back("key '" + key + "': empty list");
        return out;
    }
};

ParseOutcome build_config(const KvMap& kv) {
    ParseOutcome outcome;
    auto& errors = outcome.errors;
    Reader r{kv, errors, {}};

    RunConfig c;
    const auto engine_raw = r.raw("engine");
    if (!engine_raw) {
        errors.push_back("missing required key 'engine' (particles|ode|pde|cycle|scan|chaos)");
    } else {
        const auto e = engine_from_string(*engine_raw);
        if (!e)
            errors.push_back("key 'engine': unknown engine '" + *engine_raw + "'");
        else
            c.engine = *e;
    }

    bool has_alpha = false, has_beta = false, has_horizon = false;
    c.params.alpha = r.number("alpha", 0.0, &has_alpha);
    c.params.beta = r.number("beta", 0.0, &has_beta);
    c.params.sigma = r.number("sigma", 0.0);
    c.lambda0 = r.number("lambda0", 3.0);
    c.m0 = r.number("m0", 0.0);
    c.horizon = r.number("horizon", 0.0, &has_horizon);
    c.cadence = r.number("cadence", 0.0);

    if (const char* env_seed = std::getenv("DCW_SEED"); env_seed && !kv.count("seed")) {
        char* end = nullptr;
        c.seed = std::strtoull(env_seed, &end, 10);
    }
    c.seed = r.unsigned64("seed", c.seed);

    std::string out_default = ".";
    if (const char* env_out = std::getenv("DCW_OUT"); env_out && *env_out) out_default = env_out;
    c.out_dir = r.text("out_dir", out_default);

    c.params.n_particles = static_cast<int>(r.integer("particles.n_particles", 1000));
    c.method = r.text("particles.method", "thinning");
    c.euler_dt = r.number("particles.euler_dt", 1e-3);
    c.event_log = r.boolean("particles.event_log", false);

    c.rtol = r.number("ode.rtol", 1e-9);
    c.atol = r.number("ode.atol", 1e-12);
    const std::string coords = r.text("ode.coords", "macro");
    if (coords == "macro")
        c.coords = Coordinates::Macro;
    else if (coords == "lienard")
        c.coords = Coordinates::Lienard;
    else
        errors.push_back("key 'ode.coords': must be macro or lienard");

    c.n_cells = static_cast<int>(r.integer("pde.n_cells", 0));
    c.domain_half_width = r.number("pde.domain_half_width", 0.0);
    c.snapshot_times = r.list<double>("pde.snapshot_times", {}, [](const char* s, char** e) {
        return std::strtod(s, e);
    });

    c.beta_lo = r.number("scan.beta_lo", 0.0);
    c.beta_hi = r.number("scan.beta_hi", 0.0);
    c.beta_step = r.number("scan.beta_step", 0.0);

    c.chaos_sizes = r.list<int>("chaos.sizes", {250, 1000, 4000}, [](const char* s, char** e) {
        return static_cast<int>(std::strtol(s, e, 10));
    });
    c.replicas = static_cast<int>(r.integer("chaos.replicas", 16));

    // reject unknown keys (typo guard)
    std::sort(r.consumed.begin(), r.consumed.end());
    for (const auto& [key, value] : kv) {
        (void)value;
        if (!std::binary_search(r.consumed.begin(), r.consumed.end(), key))
            errors.push_back("unknown key '" + key + "'");
    }

    // semantic validation
    if (!has_alpha) errors.push_back("missing required key 'alpha'");
    if (!has_beta) errors.push_back("missing required key 'beta'");
    if (has_alpha && (c.params.alpha < 0.0))
        errors.push_back("key 'alpha': must be >= 0 (dissipation rate)");
    if (has_beta && (c.params.beta < 0.0))
        errors.push_back("key 'beta': must be >= 0 (interaction strength)");
    if (c.params.sigma < 0.0) errors.push_back("key 'sigma': must be >= 0");
    if (std::abs(c.m0) > 1.0) errors.push_back("key 'm0': must lie in [-1, 1]");
    if (c.params.n_particles < 1)
        errors.push_back("key 'particles.n_particles': must be >= 1");
    if (c.replicas < 1) errors.push_back("key 'chaos.replicas': must be >= 1");
    if (c.method != "thinning" && c.method != "euler")
        errors.push_back("key 'particles.method': must be thinning or euler");

    const bool needs_horizon = c.engine == Engine::Particles || c.engine == Engine::Ode ||
                               c.engine == Engine::Pde || c.engine == Engine::Chaos;
    if (needs_horizon && !(c.horizon > 0.0))
        errors.push_back("missing or non-positive 'horizon' for engine " +
                         std::string(to_string(c.engine)));
    if (c.cadence == 0.0 && c.horizon > 0.0) c.cadence = c.horizon / 1000.0;
    if (needs_horizon && !(c.cadence > 0.0))
        errors.push_back("key 'cadence': must be > 0");

    if (c.engine == Engine::Pde && c.params.sigma == 0.0)
        errors.push_back("engine pde requires sigma > 0; for the noiseless case use engine ode");
    if (c.engine == Engine::Scan) {
        if (!(c.beta_step > 0.0)) errors.push_back("key 'scan.beta_step': must be > 0");
        if (!(c.beta_hi >= c.beta_lo))
            errors.push_back("keys 'scan.beta_lo/beta_hi': need beta_lo <= beta_hi");
    }
    for (const int n : c.chaos_sizes)
        if (n < 1) errors.push_back("key 'chaos.sizes': entries must be >= 1");
    for (const double t : c.snapshot_times)
        if (!(t >= 0.0)) errors.push_back("key 'pde.snapshot_times': entries must be >= 0");

    if (errors.empty()) outcome.config = std::move(c);
    return outcome;
}

} // namespace

ParseOutcome parse_config(const std::string& text) {
    KvMap kv;
    std::vector<std::string> errors;
    parse_kv_lines(text, kv, errors);
    if (!errors.empty()) {
        ParseOutcome out;
        out.errors = std::move(errors);
        return out;
    }
    return build_config(kv);
}

RunConfig parse_config_or_throw(const std::string& text) {
    auto outcome = parse_config(text);
    if (!outcome.config) {
        std::string joined = "invalid configuration:";
        for (const auto& e : outcome.errors) joined += "\n  - " + e;
        throw ConfigError(joined);
    }
    return *outcome.config;
}

ParseOutcome parse_config_with_overrides(
    const std::string& text, const std::vector<std::pair<std::string, std::string>>& overrides) {
    KvMap kv;
    std::vector<std::string> errors;
    parse_kv_lines(text, kv, errors);
    if (!errors.empty()) {
        ParseOutcome out;
        out.errors = std::move(errors);
        return out;
    }
    for (const auto& [key, value] : overrides) kv[key] = value;
    return build_config(kv);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    const auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "engine = " << to_string(c.engine) << '\n';
    out << "alpha = " << num(c.params.alpha) << '\n';
    out << "beta = " << num(c.params.beta) << '\n';
    out << "sigma = " << num(c.params.sigma) << '\n';
    out << "lambda0 = " << num(c.lambda0) << '\n';
    out << "m0 = " << num(c.m0) << '\n';
    if (c.horizon > 0.0) out << "horizon = " << num(c.horizon) << '\n';
    if (c.cadence > 0.0) out << "cadence = " << num(c.cadence) << '\n';
    out << "seed = " << c.seed << '\n';
    out << "out_dir = " << c.out_dir << '\n';
    switch (c.engine) {
        case Engine::Particles:
            out << "[particles]\n";
            out << "n_particles = " << c.params.n_particles << '\n';
            out << "method = " << c.method << '\n';
            out << "euler_dt = " << num(c.euler_dt) << '\n';
            out << "event_log = " << (c.event_log ? "true" : "false") << '\n';
            break;
        case Engine::Ode:
            out << "[ode]\n";
            out << "rtol = " << num(c.rtol) << '\n';
            out << "atol = " << num(c.atol) << '\n';
            out << "coords = " << (c.coords == Coordinates::Macro ? "macro" : "lienard") << '\n';
            break;
        case Engine::Pde:
            out << "[pde]\n";
            if (c.n_cells > 0) out << "n_cells = " << c.n_cells << '\n';
            if (c.domain_half_width > 0.0)
                out << "domain_half_width = " << num(c.domain_half_width) << '\n';
            if (!c.snapshot_times.empty()) {
                out << "snapshot_times = ";
                for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
                    if (i) out << ", ";
                    out << num(c.snapshot_times[i]);
                }
                out << '\n';
            }
            break;
        case Engine::Cycle:
            break;
        case Engine::Scan:
            out << "[scan]\n";
            out << "beta_lo = " << num(c.beta_lo) << '\n';
            out << "beta_hi = " << num(c.beta_hi) << '\n';
            out << "beta_step = " << num(c.beta_step) << '\n';
            break;
        case Engine::Chaos:
            out << "[chaos]\n";
            out << "sizes = ";
            for (std::size_t i = 0; i < c.chaos_sizes.size(); ++i) {
                if (i) out << ", ";
                out << c.chaos_sizes[i];
            }
            out << '\n';
            out << "replicas = " << c.replicas << '\n';
            break;
    }
    return out.str();
}

namespace {

const std::vector<std::pair<std::string, std::string>>& preset_table() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"fig5",
         "engine = pde\nalpha = 3\nbeta = 1\nsigma = 0.1\nlambda0 = 3\nm0 = 0\n"
         "horizon = 15\ncadence = 0.01\n"},
        {"fig7",
         "engine = pde\nalpha = 3\nbeta = 3\nsigma = 0.1\nlambda0 = 3\nm0 = 0\n"
         "horizon = 40\ncadence = 0.01\n"},
        {"fig9",
         "engine = pde\nalpha = 3\nbeta = 1\nsigma = 10\nlambda0 = 3\nm0 = 0\n"
         "horizon = 10\ncadence = 0.005\n"},
        {"fig11",
         "engine = pde\nalpha = 3\nbeta = 3\nsigma = 10\nlambda0 = 3\nm0 = 0\n"
         "horizon = 10\ncadence = 0.005\n"},
        {"fig5-noiseless",
         "engine = ode\nalpha = 3\nbeta = 1\nsigma = 0\nlambda0 = 3\nm0 = 0\n"
         "horizon = 50\ncadence = 0.01\n"},
        {"fig7-noiseless",
         "engine = ode\nalpha = 3\nbeta = 3\nsigma = 0\nlambda0 = 3\nm0 = 0\n"
         "horizon = 50\ncadence = 0.01\n"},
        {"fig9-noiseless",
         "engine = ode\nalpha = 3\nbeta = 1\nsigma = 0\nlambda0 = 3\nm0 = 0\n"
         "horizon = 50\ncadence = 0.01\n"},
        {"fig11-noiseless",
         "engine = ode\nalpha = 3\nbeta = 3\nsigma = 0\nlambda0 = 3\nm0 = 0\n"
         "horizon = 50\ncadence = 0.01\n"},
    };
    return table;
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : preset_table()) {
        (void)text;
        names.push_back(name);
    }
    return names;
}

std::string preset_text(const std::string& name) {
    for (const auto& [preset, text] : preset_table())
        if (preset == name) return text;
    throw ConfigError("unknown preset '" + name + "'");
}

} // namespace dcw
