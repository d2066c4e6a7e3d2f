#include "kslab/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kslab/error.hpp"
#include "kslab/hashing.hpp"
#include "kslab/io.hpp"

namespace kslab {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

std::optional<double> to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

std::optional<long long> to_int(const std::string& s) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

std::vector<double> numbers_of(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        const auto v = to_double(tok);
        if (!v) throw FormatError("not a number: '" + tok + "'");
        out.push_back(*v);
    }
    return out;
}

const std::set<std::string> kKnownKeys = {
    "kind",          "chi",          "lambda",       "mu",          "dim",          "box",
    "grid",          "a.kind",       "a.params",     "b.kind",      "b.params",     "period",
    "initial",       "initial.value", "initial.radius", "initial.lo", "initial.hi",  "initial.modes",
    "initial.seed",  "horizon",      "out",          "resolutions", "dt",           "store_every",
    "chi_list",      "threshold",    "n_max",        "depths",      "pullback_unit"};

const std::set<std::string> kModelKeys = {"chi",    "lambda",   "mu",     "dim",      "box",   "grid",
                                          "a.kind", "a.params", "b.kind", "b.params", "period"};

Profile parse_profile(const std::string& kind, const std::string& text, int dim, const std::string& base_dir) {
    if (kind == "constant") {
        const auto v = numbers_of(text);
        if (v.size() != 1) throw FormatError("constant coefficient needs one value");
        return ConstantProfile{v[0]};
    }
    if (kind == "separable") {
        const auto parts = split(text, ';');
        if (parts.empty() || parts[0].empty()) throw FormatError("separable coefficient needs an offset");
        SeparableProfile p;
        const auto off = numbers_of(parts[0]);
        if (off.size() != 1) throw FormatError("separable offset must be one number");
        p.offset = off[0];
        const std::size_t per_term = dim == 2 ? 6 : 5;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            if (parts[i].empty()) continue;
            const auto v = numbers_of(parts[i]);
            if (v.size() != per_term)
                throw FormatError("separable term '" + parts[i] + "' needs " + std::to_string(per_term) + " numbers");
            Harmonic h;
            h.amplitude = v[0];
            h.wavenumber = {v[1], dim == 2 ? v[2] : 0.0};
            h.phase = v[per_term - 3];
            h.frequency = v[per_term - 2];
            h.time_phase = v[per_term - 1];
            p.terms.push_back(h);
        }
        return p;
    }
    if (kind == "tabulated") {
        std::filesystem::path path(trim(text));
        if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text(path.string()));
            TabulatedProfile t;
            t.dim = j.at("dim");
            t.nodes = j.at("nodes");
            t.half_length = j.at("half_length");
            t.times = j.at("times").get<std::vector<double>>();
            t.values = j.at("values").get<std::vector<std::vector<double>>>();
            return t;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
    }
    throw FormatError("unknown coefficient kind '" + kind + "'");
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s;
}

std::string join_numbers(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap map;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw FormatError("line " + std::to_string(number) + ": empty key");
        if (!map.emplace(key, value).second)
            throw FormatError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    return map;
}

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::entire: return "entire";
        case ExperimentKind::stability: return "stability";
        case ExperimentKind::spreading: return "spreading";
        case ExperimentKind::perturbation: return "perturbation";
        case ExperimentKind::oracle_audit: return "oracle-audit";
    }
    return "?";
}

ExperimentConfig parse_experiment(const ConfigMap& map, const std::string& base_dir) {
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    std::vector<std::string> problems;
    auto has = [&](const char* k) { return map.count(k) > 0; };
    auto get = [&](const char* k) -> const std::string& { return map.at(k); };
    auto number = [&](const char* k, double& dst) {
        if (!has(k)) return;
        if (auto v = to_double(get(k))) dst = *v;
        else problems.push_back(std::string(k) + ": not a number");
    };
    auto integer = [&](const char* k, int& dst) {
        if (!has(k)) return;
        if (auto v = to_int(get(k))) dst = static_cast<int>(*v);
        else problems.push_back(std::string(k) + ": not an integer");
    };

    for (const auto& [k, v] : map)
        if (!kKnownKeys.count(k)) problems.push_back("unknown key '" + k + "'");

    if (!has("kind")) {
        problems.push_back("kind: missing");
    } else {
        const std::string& k = get("kind");
        bool found = false;
        for (auto kind : {ExperimentKind::simulate, ExperimentKind::entire, ExperimentKind::stability,
                          ExperimentKind::spreading, ExperimentKind::perturbation, ExperimentKind::oracle_audit})
            if (k == to_string(kind)) {
                cfg.kind = kind;
                found = true;
            }
        if (!found) problems.push_back("kind: unknown experiment '" + k + "'");
    }

    number("chi", cfg.params.chi);
    number("lambda", cfg.params.lambda);
    number("mu", cfg.params.mu);
    integer("dim", cfg.params.dim);
    number("box", cfg.params.box_half_length);
    integer("grid", cfg.params.grid_points);
    try {
        cfg.params.validate();
    } catch (const PreconditionError& e) {
        problems.push_back(e.what());
    }

    if (has("a.kind")) cfg.a_kind = get("a.kind");
    if (has("a.params")) cfg.a_params = get("a.params");
    if (has("b.kind")) cfg.b_kind = get("b.kind");
    if (has("b.params")) cfg.b_params = get("b.params");
    if (has("period")) {
        double T = 0.0;
        number("period", T);
        if (!(T > 0.0)) problems.push_back("period: must be positive");
        cfg.period = T;
    }

    const bool needs_initial = cfg.kind != ExperimentKind::entire && cfg.kind != ExperimentKind::oracle_audit;
    if (has("initial")) {
        const std::string& k = get("initial");
        if (k == "constant") cfg.initial.kind = InitialSpec::Kind::constant;
        else if (k == "bump") cfg.initial.kind = InitialSpec::Kind::bump;
        else if (k == "random-band") cfg.initial.kind = InitialSpec::Kind::random_band;
        else problems.push_back("initial: unknown kind '" + k + "'");
    } else if (needs_initial) {
        problems.push_back("initial: missing for this experiment kind");
    }
    number("initial.value", cfg.initial.value);
    number("initial.radius", cfg.initial.radius);
    number("initial.lo", cfg.initial.lo);
    number("initial.hi", cfg.initial.hi);
    integer("initial.modes", cfg.initial.modes);
    if (has("initial.seed")) {
        const auto s = to_int(get("initial.seed"));
        if (s && *s >= 0) cfg.initial.seed = static_cast<std::uint64_t>(*s);
        else problems.push_back("initial.seed: must be a nonnegative integer");
    }
    if (cfg.initial.kind == InitialSpec::Kind::random_band) {
        if (!cfg.initial.seed) problems.push_back("initial.seed: mandatory for random-band initial data");
        if (!(cfg.initial.lo >= 0.0 && cfg.initial.hi >= cfg.initial.lo))
            problems.push_back("initial.lo/hi: need 0 <= lo <= hi");
        if (cfg.initial.modes < 1) problems.push_back("initial.modes: must be at least 1");
    }
    if (!(cfg.initial.value >= 0.0)) problems.push_back("initial.value: must be nonnegative");
    if (cfg.initial.kind == InitialSpec::Kind::bump && !(cfg.initial.radius > 0.0))
        problems.push_back("initial.radius: must be positive");

    number("horizon", cfg.horizon);
    if (!(cfg.horizon >= 0.0)) problems.push_back("horizon: must be nonnegative");
    const bool needs_horizon = cfg.kind == ExperimentKind::stability || cfg.kind == ExperimentKind::spreading ||
                               cfg.kind == ExperimentKind::perturbation;
    if (needs_horizon && !(cfg.horizon > 0.0)) problems.push_back("horizon: must be positive for this experiment kind");
    if (cfg.kind == ExperimentKind::simulate && !has("horizon")) problems.push_back("horizon: missing");
    if (has("out")) cfg.out = get("out");

    if (has("resolutions")) {
        for (const auto& item : split(get("resolutions"), ',')) {
            const auto v = to_int(item);
            if (!v || *v < 16 || *v % 2) problems.push_back("resolutions: '" + item + "' is not an even integer >= 16");
            else cfg.resolutions.push_back(static_cast<int>(*v));
        }
        for (std::size_t i = 1; i < cfg.resolutions.size(); ++i)
            if (cfg.resolutions[i] != 2 * cfg.resolutions[i - 1])
                problems.push_back("resolutions: each entry must double the previous one");
    }
    number("dt", cfg.dt_max);
    if (!(cfg.dt_max > 0.0)) problems.push_back("dt: must be positive");
    integer("store_every", cfg.store_every);
    if (cfg.store_every < 1) problems.push_back("store_every: must be at least 1");
    if (has("chi_list")) {
        for (const auto& item : split(get("chi_list"), ',')) {
            const auto v = to_double(item);
            if (!v || !(*v > 0.0)) problems.push_back("chi_list: '" + item + "' is not a positive number");
            else cfg.chi_list.push_back(*v);
        }
    }
    if (cfg.kind == ExperimentKind::perturbation && cfg.chi_list.empty()) problems.push_back("chi_list: missing");
    if (has("threshold")) {
        double thr = 0.0;
        number("threshold", thr);
        if (!(thr > 0.0)) problems.push_back("threshold: must be positive");
        cfg.threshold = thr;
    }
    integer("n_max", cfg.n_max);
    if (cfg.n_max < 1) problems.push_back("n_max: must be at least 1");
    if (has("depths")) {
        cfg.depths.clear();
        for (const auto& item : split(get("depths"), ',')) {
            const auto v = to_int(item);
            if (!v || *v < 1) problems.push_back("depths: '" + item + "' is not a positive integer");
            else cfg.depths.push_back(static_cast<int>(*v));
        }
    }
    number("pullback_unit", cfg.pullback_unit);
    if (!(cfg.pullback_unit > 0.0)) problems.push_back("pullback_unit: must be positive");

    if (problems.empty()) {
        try {
            build_coefficients(cfg).require_positive_bounded();
        } catch (const Error& e) {
            problems.push_back(std::string("coefficients: ") + e.what());
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid config (" + std::to_string(problems.size()) + " problems):";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw PreconditionError(msg);
    }
    return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
    const auto base = std::filesystem::path(path).parent_path().string();
    return parse_experiment(parse_config_text(read_text(path)), base);
}

ConfigMap to_config_map(const ExperimentConfig& c) {
    ConfigMap m;
    m["kind"] = to_string(c.kind);
    m["chi"] = format_number(c.params.chi);
    m["lambda"] = format_number(c.params.lambda);
    m["mu"] = format_number(c.params.mu);
    m["dim"] = std::to_string(c.params.dim);
    m["box"] = format_number(c.params.box_half_length);
    m["grid"] = std::to_string(c.params.grid_points);
    m["a.kind"] = c.a_kind;
    m["a.params"] = c.a_params;
    m["b.kind"] = c.b_kind;
    m["b.params"] = c.b_params;
    if (c.period) m["period"] = format_number(*c.period);
    static const char* kinds[] = {"constant", "bump", "random-band"};
    m["initial"] = kinds[static_cast<int>(c.initial.kind)];
    m["initial.value"] = format_number(c.initial.value);
    m["initial.radius"] = format_number(c.initial.radius);
    m["initial.lo"] = format_number(c.initial.lo);
    m["initial.hi"] = format_number(c.initial.hi);
    m["initial.modes"] = std::to_string(c.initial.modes);
    if (c.initial.seed) m["initial.seed"] = std::to_string(*c.initial.seed);
    m["horizon"] = format_number(c.horizon);
    if (!c.resolutions.empty()) m["resolutions"] = join_ints(c.resolutions);
    m["dt"] = format_number(c.dt_max);
    m["store_every"] = std::to_string(c.store_every);
    if (!c.chi_list.empty()) m["chi_list"] = join_numbers(c.chi_list);
    if (c.threshold) m["threshold"] = format_number(*c.threshold);
    m["n_max"] = std::to_string(c.n_max);
    m["depths"] = join_ints(c.depths);
    m["pullback_unit"] = format_number(c.pullback_unit);
    return m;
}

std::string serialize_config(const ConfigMap& map) {
    std::string out;
    for (const auto& [k, v] : map) out += k + " = " + v + "\n";
    return out;
}

std::string parameter_hash(const ExperimentConfig& config) {
    ConfigMap model;
    for (const auto& [k, v] : to_config_map(config))
        if (kModelKeys.count(k)) model[k] = v;
    return sha1_hex(serialize_config(model)).substr(0, 12);
}

CoefficientField build_coefficients(const ExperimentConfig& config) {
    const int dim = config.params.dim;
    return CoefficientField(parse_profile(config.a_kind, config.a_params, dim, config.base_dir),
                            parse_profile(config.b_kind, config.b_params, dim, config.base_dir), config.period);
}

ScalarField build_initial(const InitialSpec& spec, const Grid& grid) {
    ScalarField u(grid);
    switch (spec.kind) {
        case InitialSpec::Kind::constant:
            u = ScalarField(grid, spec.value);
            break;
        case InitialSpec::Kind::bump:
            // Gaussian rather than a compactly supported bump: its spectrum is
            // resolved to round-off, so the spectral heat flow leaves no far-field
            // ringing for logistic growth to amplify. It underflows to 0 a few
            // dozen radii out.
            for_each_node(grid, [&](std::size_t k, double x, double y) {
                u[k] = spec.value * std::exp(-(x * x + y * y) / (spec.radius * spec.radius));
            });
            break;
        case InitialSpec::Kind::random_band: {
            if (!spec.seed) throw PreconditionError("random-band initial data needs a seed");
            std::mt19937_64 rng(*spec.seed);
            auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
            const double base = std::numbers::pi / grid.half_length;
            const int ymax = grid.dim == 2 ? spec.modes : 0;
            struct Mode {
                int mx, my;
                double amp, phase;
            };
            std::vector<Mode> modes;
            for (int my = -ymax; my <= ymax; ++my)
                for (int mx = 0; mx <= spec.modes; ++mx) {
                    if (mx == 0 && my <= 0) continue;  // one representative per +/- pair, no mean
                    const double amp = (2.0 * unit() - 1.0) / (1.0 + std::hypot(mx, my));
                    modes.push_back({mx, my, amp, 2.0 * std::numbers::pi * unit()});
                }
            auto eval = [&](const Grid& g) {
                ScalarField f(g);
                for (const auto& m : modes)
                    for_each_node(g, [&](std::size_t k, double x, double y) {
                        f[k] += m.amp * std::cos(base * (m.mx * x + m.my * y) + m.phase);
                    });
                return f;
            };
            // Extrema from a fixed lattice, so the same seed gives the same
            // function at every resolution.
            const ScalarField ref = eval(Grid{grid.dim, 16 * (spec.modes + 1), grid.half_length});
            const double lo = ref.min(), hi = ref.max();
            u = eval(grid);
            for (double& v : u.data()) {
                v = hi > lo ? spec.lo + (spec.hi - spec.lo) * (v - lo) / (hi - lo) : 0.5 * (spec.lo + spec.hi);
                v = std::clamp(v, spec.lo, spec.hi);
            }
            break;
        }
    }
    return u;
}

}  // namespace kslab
