#include "kslab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "kslab/analysis.hpp"
#include "kslab/error.hpp"
#include "kslab/hashing.hpp"
#include "kslab/io.hpp"
#include "kslab/log.hpp"
#include "kslab/model.hpp"
#include "kslab/oracles.hpp"

namespace kslab {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Summary = std::vector<std::pair<std::string, double>>;

constexpr const char* kManifest = "manifest.json";
constexpr int kManifestFormat = 1;

std::string cell(double x) { return format_number(x); }

/// Owns an output directory and the blob hashes of what was written into it.
class RunDir {
public:
    RunDir(fs::path root, std::string param_hash) : root_(std::move(root)), hash_(std::move(param_hash)) {}

    const fs::path& root() const { return root_; }
    const std::map<std::string, std::string>& files() const { return files_; }

    void text(const std::string& rel, const std::string& content) {
        write_text((root_ / rel).string(), content);
        files_[rel] = git_blob_hash(content);
    }

    void csv(const std::string& rel, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) {
        std::string out = "param_hash";
        for (const auto& h : header) out += "," + h;
        out += "\n";
        for (const auto& row : rows) {
            out += hash_;
            for (const auto& c : row) out += "," + c;
            out += "\n";
        }
        text(rel, out);
    }

    void field(const std::string& rel, const ScalarField& f) {
        const auto path = root_ / rel;
        fs::create_directories(path.parent_path());
        write_field_binary(path.string(), f);
        files_[rel] = file_blob_hash(path.string());
    }

    /// Records every regular file below `rel` (written by a checkpoint routine).
    void adopt(const std::string& rel) {
        std::vector<fs::path> found;
        for (const auto& e : fs::recursive_directory_iterator(root_ / rel))
            if (e.is_regular_file()) found.push_back(e.path());
        for (const auto& p : found) files_[fs::relative(p, root_).generic_string()] = file_blob_hash(p.string());
    }

    RunDir sub(const std::string& rel) const { return RunDir(root_ / rel, hash_); }

    void merge(const RunDir& child, const std::string& prefix) {
        for (const auto& [k, v] : child.files_) files_[prefix + "/" + k] = v;
    }

    void summary(const Summary& values, const std::string& heading, const std::vector<std::string>& notes = {}) {
        std::vector<std::vector<std::string>> rows;
        std::string block = heading + "\n";
        for (const auto& [k, v] : values) {
            rows.push_back({k, cell(v)});
            block += "  " + k + " = " + cell(v) + "\n";
        }
        for (const auto& n : notes) block += "  note: " + n + "\n";
        csv("summary.csv", {"key", "value"}, rows);
        text("summary.txt", block);
    }

private:
    fs::path root_;
    std::string hash_;
    std::map<std::string, std::string> files_;
};

struct KindResult {
    Summary summary;
    std::vector<std::string> notes;
    /// Field compared across a resolution ladder; empty when the kind has none.
    std::optional<ScalarField> headline;
};

double flag(bool b) { return b ? 1.0 : 0.0; }

IntegratorOptions integrator_options(const ExperimentConfig& cfg) {
    IntegratorOptions o;
    o.dt_max = cfg.dt_max;
    o.store_every = cfg.store_every;
    return o;
}

EntireOptions entire_options(const ExperimentConfig& cfg) {
    EntireOptions o;
    o.depths = cfg.depths;
    o.pullback_unit = cfg.pullback_unit;
    return o;
}

KindResult run_simulate(const ExperimentConfig& cfg, RunDir& dir) {
    const auto coeffs = build_coefficients(cfg);
    const auto& p = cfg.params;
    coeffs.require_box_compatible(p.grid());
    const ScalarField u0 = build_initial(cfg.initial, p.grid());
    const auto traj = integrate(u0, 0.0, cfg.horizon, coeffs, p, integrator_options(cfg));
    save_trajectory((dir.root() / "trajectory").string(), traj);
    dir.adopt("trajectory");

    KindResult res;
    res.headline = traj.back().u;
    if (cfg.horizon == 0.0) return res;

    const auto hyp = validate_coefficients(coeffs, p);
    const double u0_sup = u0.max(), u0_inf = u0.min();
    const double a_sup = coeffs.envelope(Which::a).sup;
    const double sup_b = hyp.holds_h1 ? std::max(u0_sup, sup_bound(coeffs, p)) : NAN;
    const bool positive_start = u0_inf > 0.0;

    std::vector<std::vector<std::string>> diag, bounds;
    int sup_violations = 0, envelope_violations = 0, lower_violations = 0;
    auto bound_row = [&](double t, double lo, double hi) {
        const double env = u0_sup * std::exp(a_sup * t);
        const double lower = positive_start ? pointwise_lower_bound(u0_inf, u0_sup, cfg.horizon, std::min(t, cfg.horizon), coeffs)
                                   : 0.0;
        if (hyp.holds_h1 && hi > sup_b + 1e-6) ++sup_violations;
        if (hi > env * (1.0 + 1e-9)) ++envelope_violations;
        if (positive_start && lo < lower * (1.0 - 1e-9)) ++lower_violations;
        bounds.push_back({cell(t), cell(hi), hyp.holds_h1 ? cell(sup_b) : "", cell(env), cell(lo), cell(lower)});
    };
    bound_row(0.0, u0_inf, u0_sup);
    for (const auto& s : traj.steps) {
        diag.push_back({cell(s.t), cell(s.dt), cell(s.min_u), cell(s.max_u), std::to_string(s.transport_substeps)});
        bound_row(s.t, s.min_u, s.max_u);
    }
    dir.csv("diagnostics.csv", {"t", "dt", "min_u", "max_u", "transport_substeps"}, diag);
    dir.csv("bounds.csv", {"t", "max_u", "sup_bound", "growth_envelope", "min_u", "lower_bound"}, bounds);

    double running_min = u0_inf;
    for (const auto& s : traj.steps) running_min = std::min(running_min, s.min_u);
    res.summary = {{"final_time", traj.back().t},
                   {"steps", static_cast<double>(traj.steps.size())},
                   {"final_min_u", traj.back().u.min()},
                   {"final_max_u", traj.back().u.max()},
                   {"max_sup_norm", traj.max_sup_norm()},
                   {"observed_running_min", running_min},
                   {"sup_bound", sup_b},
                   {"sup_bound_violations", static_cast<double>(sup_violations)},
                   {"growth_envelope_violations", static_cast<double>(envelope_violations)},
                   {"lower_bound_violations", static_cast<double>(lower_violations)}};
    if (hyp.holds_h1) res.summary.push_back({"eventual_bound_from_running_min", eventual_sup_bound(running_min, coeffs, p)});
    if (hyp.holds_h2) {
        const auto rect = attraction_rectangle(coeffs, p);
        res.summary.push_back({"rectangle_lower", rect.lower});
        res.summary.push_back({"rectangle_upper", rect.upper});
    }
    res.notes.push_back("observed_running_min stands in for m(u0), which has no formula");
    return res;
}

void write_certification(RunDir& dir, const BoundsReport& cert) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : cert.checks)
        rows.push_back({c.name, cell(c.measured), cell(c.bound), cell(c.margin), c.pass ? "1" : "0"});
    dir.csv("certification.csv", {"check", "measured", "bound", "margin", "pass"}, rows);
}

KindResult run_entire(const ExperimentConfig& cfg, RunDir& dir) {
    const auto coeffs = build_coefficients(cfg);
    const auto& p = cfg.params;
    const auto sol = construct_entire_solution(coeffs, p, entire_options(cfg));
    save_entire((dir.root() / "entire").string(), sol);
    dir.adopt("entire");
    const auto cert = certify_entire_bounds(sol, coeffs, p);
    write_certification(dir, cert);
    std::vector<std::vector<std::string>> hist;
    for (std::size_t i = 0; i < sol.history.size(); ++i) hist.push_back({std::to_string(i), cell(sol.history[i])});
    dir.csv("history.csv", {"iteration", "value"}, hist);

    const double residual = entire_residual(sol, coeffs, p);
    KindResult res;
    res.headline = sol.states.front().u;
    res.summary = {{"representation", static_cast<double>(sol.representation)},
                   {"period", sol.period},
                   {"slices", static_cast<double>(sol.states.size())},
                   {"converged", flag(sol.converged)},
                   {"cauchy", flag(sol.cauchy)},
                   {"defect", sol.defect},
                   {"residual", residual},
                   {"u_inf", sol.stats.u_inf},
                   {"u_sup", sol.stats.u_sup},
                   {"grad_sup", sol.stats.grad_sup},
                   {"grad_log_sup", sol.stats.grad_log_sup},
                   {"certified", flag(cert.all_pass())}};
    res.notes.push_back(std::string("representation ") + to_string(sol.representation) +
                        " (0 steady, 1 periodic, 2 window)");
    return res;
}

KindResult run_stability(const ExperimentConfig& cfg, RunDir& dir) {
    const auto coeffs = build_coefficients(cfg);
    const auto& p = cfg.params;
    const auto sol = construct_entire_solution(coeffs, p, entire_options(cfg));
    if (sol.representation == Representation::window)
        throw PreconditionError("stability runs need autonomous or time-periodic coefficients");
    const auto traj = integrate(build_initial(cfg.initial, p.grid()), 0.0, cfg.horizon, coeffs, p,
                                integrator_options(cfg));
    const auto rep = stability_report(traj, sol, p, coeffs, cfg.n_max);

    std::vector<std::vector<std::string>> series;
    for (std::size_t i = 0; i < rep.series.times.size(); ++i)
        series.push_back({cell(rep.series.times[i]), cell(rep.series.u_gap[i]), cell(rep.series.v_gap[i])});
    dir.csv("series.csv", {"t", "u_gap", "v_gap"}, series);
    std::vector<std::vector<std::string>> levels;
    int passed = 0;
    for (const auto& l : rep.levels) {
        levels.push_back({std::to_string(l.n), cell(l.bound), to_string(l.status),
                          l.first_passage ? cell(*l.first_passage) : ""});
        if (l.status == LevelStatus::pass) ++passed;
    }
    dir.csv("levels.csv", {"n", "bound", "status", "first_passage"}, levels);

    KindResult res;
    res.headline = traj.back().u;
    res.summary = {{"alpha", rep.fit.alpha},
                   {"prefactor", rep.fit.prefactor},
                   {"fit_ok", flag(rep.fit.status == FitStatus::ok)},
                   {"fit_residual", rep.fit.residual},
                   {"fit_points", static_cast<double>(rep.fit.points)},
                   {"rho", rep.contraction.rho},
                   {"c0", rep.contraction.c0},
                   {"c1", rep.contraction.c1},
                   {"final_u_gap", rep.series.u_gap.back()},
                   {"final_v_gap", rep.series.v_gap.back()},
                   {"levels_checked", static_cast<double>(rep.levels.size())},
                   {"levels_passed", static_cast<double>(passed)}};
    res.notes.push_back("decay rate fitted on the tail half of the series above 1e-11");
    if (rep.levels.empty()) res.notes.push_back("rho >= 1: staircase levels not checked");
    return res;
}

KindResult run_spreading(const ExperimentConfig& cfg, RunDir& dir) {
    const auto coeffs = build_coefficients(cfg);
    const auto& p = cfg.params;
    const auto traj = integrate(build_initial(cfg.initial, p.grid()), 0.0, cfg.horizon, coeffs, p,
                                integrator_options(cfg));
    const double thr = cfg.threshold ? *cfg.threshold : default_front_threshold(coeffs, p);
    const auto front = front_speed(traj, thr);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < front.times.size(); ++i) rows.push_back({cell(front.times[i]), cell(front.positions[i])});
    dir.csv("front.csv", {"t", "position"}, rows);
    dir.field("final_u.ksf", traj.back().u);

    const auto speeds = spreading_speeds(coeffs, p);
    KindResult res;
    res.headline = traj.back().u;
    res.summary = {{"threshold", thr},
                   {"speed", front.speed},
                   {"intercept", front.intercept},
                   {"fit_residual", front.residual},
                   {"c_plus_star", speeds.c_plus_star},
                   {"slack_h3", speeds.slack_h3}};
    if (speeds.c_minus_applicable) {
        res.summary.push_back({"c_minus_star", speeds.c_minus_star});
        res.summary.push_back({"within_speed_band",
                               flag(front.speed >= speeds.c_minus_star - 0.2 && front.speed <= speeds.c_plus_star + 0.2)});
    } else {
        res.notes.push_back("spreading hypothesis fails: no lower speed");
    }
    return res;
}

KindResult run_perturbation(const ExperimentConfig& cfg, RunDir& dir, int workers) {
    const auto coeffs = build_coefficients(cfg);
    const auto& p = cfg.params;
    PerturbationOptions o;
    o.integrator = integrator_options(cfg);
    o.entire = entire_options(cfg);
    o.workers = workers;
    const auto rep = perturbation_study(build_initial(cfg.initial, p.grid()), cfg.chi_list, cfg.horizon, coeffs, p, o);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
        rows.push_back({cell(r.chi), cell(r.gap), cell(r.ratio), cell(r.entire_gap), cell(r.bound),
                        r.bound_holds ? "1" : "0", r.error});
    dir.csv("perturbation.csv", {"chi", "gap", "gap_over_chi", "entire_gap", "bound", "bound_holds", "error"}, rows);
    KindResult res;
    bool all_hold = true;
    for (const auto& r : rep.rows) all_hold = all_hold && r.error.empty() && r.bound_holds;
    res.summary = {{"K", rep.K},
                   {"uplus0_inf", rep.uplus0_inf},
                   {"uplus0_sup", rep.uplus0_sup},
                   {"complete", flag(rep.complete())},
                   {"ratio_spread", rep.ratio_spread()},
                   {"all_bounds_hold", flag(all_hold)}};
    res.notes.push_back("ratio_spread = (max - min) / min of gap/chi");
    return res;
}

KindResult run_audit(const ExperimentConfig& cfg, RunDir& dir) {
    KindResult res;
    res.summary = audit_table(cfg);
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, v] : res.summary) rows.push_back({k, cell(v)});
    dir.csv("audit.csv", {"quantity", "value"}, rows);
    return res;
}

KindResult run_kind(const ExperimentConfig& cfg, RunDir& dir, int workers) {
    switch (cfg.kind) {
        case ExperimentKind::simulate: return run_simulate(cfg, dir);
        case ExperimentKind::entire: return run_entire(cfg, dir);
        case ExperimentKind::stability: return run_stability(cfg, dir);
        case ExperimentKind::spreading: return run_spreading(cfg, dir);
        case ExperimentKind::perturbation: return run_perturbation(cfg, dir, workers);
        case ExperimentKind::oracle_audit: return run_audit(cfg, dir);
    }
    throw PreconditionError("unknown experiment kind");
}

/// sup |fine - coarse| over the coarse nodes; fine has twice the points per axis.
double nested_distance(const ScalarField& coarse, const ScalarField& fine) {
    const Grid& g = coarse.grid();
    if (fine.grid().points != 2 * g.points || fine.grid().dim != g.dim)
        throw PreconditionError("nested_distance: grids are not nested by a factor 2");
    double d = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < g.points; ++i) d = std::max(d, std::abs(fine[2 * i] - coarse[i]));
    } else {
        for (int iy = 0; iy < g.points; ++iy)
            for (int ix = 0; ix < g.points; ++ix) d = std::max(d, std::abs(fine.at(2 * iy, 2 * ix) - coarse.at(iy, ix)));
    }
    return d;
}

bool has_ladder(const ExperimentConfig& cfg) {
    return !cfg.resolutions.empty() && cfg.kind != ExperimentKind::oracle_audit &&
           cfg.kind != ExperimentKind::perturbation;
}

KindResult run_ladder(const ExperimentConfig& cfg, RunDir& dir, int workers) {
    std::vector<KindResult> results;
    for (int n : cfg.resolutions) {
        ExperimentConfig c = cfg;
        c.params.grid_points = n;
        const std::string name = "grid_" + std::to_string(n);
        RunDir sub = dir.sub(name);
        results.push_back(run_kind(c, sub, workers));
        sub.summary(results.back().summary, std::string(to_string(cfg.kind)) + " at " + std::to_string(n) + " points",
                    results.back().notes);
        dir.merge(sub, name);
    }
    std::vector<std::string> header{"grid"};
    for (const auto& [k, v] : results.front().summary) header.push_back(k);
    header.push_back("field_diff");
    header.push_back("observed_order");
    std::vector<std::vector<std::string>> rows;
    KindResult res;
    double prev_diff = NAN;
    for (std::size_t i = 0; i < results.size(); ++i) {
        std::vector<std::string> row{std::to_string(cfg.resolutions[i])};
        for (const auto& [k, v] : results[i].summary) row.push_back(cell(v));
        double diff = NAN, order = NAN;
        if (i > 0 && results[i].headline && results[i - 1].headline) {
            diff = nested_distance(*results[i - 1].headline, *results[i].headline);
            if (prev_diff > 0.0 && diff > 0.0) order = std::log2(prev_diff / diff);
            prev_diff = diff;
        }
        row.push_back(i > 0 ? cell(diff) : "");
        row.push_back(std::isfinite(order) ? cell(order) : "");
        rows.push_back(row);
    }
    dir.csv("ladder.csv", header, rows);
    res.summary = results.back().summary;
    res.summary.push_back({"finest_grid", static_cast<double>(cfg.resolutions.back())});
    if (std::isfinite(prev_diff)) res.summary.push_back({"convergence_estimate", prev_diff});
    res.notes = results.back().notes;
    res.notes.push_back("values are from the finest grid; convergence_estimate is the last successive field difference");
    return res;
}

json read_manifest(const fs::path& dir) {
    const auto path = dir / kManifest;
    if (!fs::exists(path)) throw PreconditionError(dir.string() + ": no " + kManifest);
    try {
        json j = json::parse(read_text(path.string()));
        if (j.at("format").get<int>() != kManifestFormat || !j.at("files").is_object() || !j.at("kind").is_string())
            throw PreconditionError(path.string() + ": unsupported manifest");
        return j;
    } catch (const json::exception& e) {
        throw PreconditionError(path.string() + ": malformed manifest: " + e.what());
    }
}

/// Leaves `root` empty of earlier run output, or refuses foreign content.
void prepare_directory(const fs::path& root) {
    std::error_code ec;
    fs::create_directories(root, ec);
    if (!fs::is_directory(root)) throw PreconditionError("output directory " + root.string() + " cannot be created");
    if (fs::is_empty(root)) return;
    if (!fs::exists(root / kManifest))
        throw PreconditionError("output directory " + root.string() + " is not empty and holds no run manifest");
    const json old = read_manifest(root);
    for (const auto& [rel, hash] : old.at("files").items()) fs::remove(root / rel, ec);
    fs::remove(root / kManifest, ec);
    // Drop directories emptied above, deepest first.
    std::vector<fs::path> dirs;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.rbegin(), dirs.rend());
    for (const auto& d : dirs)
        if (fs::is_empty(d)) fs::remove(d, ec);
}

void write_manifest(const fs::path& root, const ExperimentConfig& cfg, const std::string& status,
                    const std::string& error, const std::map<std::string, std::string>& files,
                    std::string* content_hash) {
    const ConfigMap config_map = to_config_map(cfg);
    std::vector<std::pair<std::string, std::string>> entries(files.begin(), files.end());
    entries.emplace_back("\x01config", git_blob_hash(serialize_config(config_map)));
    const std::string hash = combine_hashes(entries);
    json j;
    j["format"] = kManifestFormat;
    j["kind"] = to_string(cfg.kind);
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["param_hash"] = parameter_hash(cfg);
    j["config"] = config_map;
    j["files"] = files;
    j["content_hash"] = hash;
    write_text((root / kManifest).string(), j.dump(1) + "\n");
    if (content_hash) *content_hash = hash;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_csv(const fs::path& path) {
    Table t;
    std::istringstream in(read_text(path.string()));
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string c;
        std::istringstream ls(line);
        while (std::getline(ls, c, ',')) cells.push_back(c);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (first) t.header = std::move(cells);
        else t.rows.push_back(std::move(cells));
        first = false;
    }
    return t;
}

std::optional<double> numeric(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

void diff_csv(const std::string& rel, const fs::path& p1, const fs::path& p2, CompareResult& out) {
    const Table a = read_csv(p1), b = read_csv(p2);
    if (a.header != b.header) {
        out.notes.push_back(rel + ": column headers differ");
        return;
    }
    if (a.rows.size() != b.rows.size())
        out.notes.push_back(rel + ": " + std::to_string(a.rows.size()) + " vs " + std::to_string(b.rows.size()) +
                            " rows; comparing the common prefix");
    const std::size_t rows = std::min(a.rows.size(), b.rows.size());
    for (std::size_t col = 0; col < a.header.size(); ++col) {
        if (a.header[col] == "param_hash") continue;
        DiffEntry e{rel, a.header[col], 0.0, 0.0, rows};
        std::size_t text_mismatch = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            const std::string& x = col < a.rows[r].size() ? a.rows[r][col] : "";
            const std::string& y = col < b.rows[r].size() ? b.rows[r][col] : "";
            if (x == y) continue;
            const auto vx = numeric(x), vy = numeric(y);
            if (!vx || !vy) {
                ++text_mismatch;
                continue;
            }
            const double d = std::abs(*vx - *vy);
            if (!(d == d)) {  // one side NaN
                e.max_abs = e.max_rel = std::numeric_limits<double>::infinity();
                continue;
            }
            e.max_abs = std::max(e.max_abs, d);
            const double scale = std::max(std::abs(*vx), std::abs(*vy));
            if (scale > 0.0) e.max_rel = std::max(e.max_rel, d / scale);
        }
        if (e.max_abs > 0.0) out.entries.push_back(e);
        if (text_mismatch)
            out.notes.push_back(rel + ": column " + a.header[col] + " differs in " + std::to_string(text_mismatch) +
                                " text cells");
    }
}

void diff_field(const std::string& rel, const fs::path& p1, const fs::path& p2, CompareResult& out) {
    const ScalarField a = read_field_binary(p1.string()), b = read_field_binary(p2.string());
    double d = 0.0;
    if (a.grid() == b.grid()) d = sup_distance(a, b);
    else if (b.grid().points == 2 * a.grid().points && b.grid().dim == a.grid().dim) d = nested_distance(a, b);
    else if (a.grid().points == 2 * b.grid().points && b.grid().dim == a.grid().dim) d = nested_distance(b, a);
    else {
        out.notes.push_back(rel + ": grids are not comparable");
        return;
    }
    if (d > 0.0) {
        const double scale = std::max(a.max_abs(), b.max_abs());
        out.entries.push_back({rel, "u", d, scale > 0.0 ? d / scale : 0.0, a.size()});
    }
}

}  // namespace

std::vector<std::pair<std::string, double>> audit_table(const ExperimentConfig& cfg) {
    const auto coeffs = build_coefficients(cfg);
    const auto& p = cfg.params;
    const auto a = coeffs.envelope(Which::a), b = coeffs.envelope(Which::b);
    const auto hyp = validate_coefficients(coeffs, p);
    Summary t{{"chi", p.chi},       {"lambda", p.lambda},         {"mu", p.mu},
              {"dim", static_cast<double>(p.dim)},                {"a_inf", a.inf},
              {"a_sup", a.sup},     {"b_inf", b.inf},             {"b_sup", b.sup},
              {"slack_h1", hyp.slack_h1},                         {"slack_h2", hyp.slack_h2},
              {"slack_h3", hyp.slack_h3}};
    if (hyp.holds_h1) {
        t.push_back({"sup_bound", sup_bound(coeffs, p)});
        t.push_back({"rho_homogeneous", homogeneous_contraction_rho(coeffs, p)});
    }
    if (hyp.holds_h2) {
        const auto rect = attraction_rectangle(coeffs, p);
        t.push_back({"rectangle_lower", rect.lower});
        t.push_back({"rectangle_upper", rect.upper});
    }
    const auto speeds = spreading_speeds(coeffs, p);
    t.push_back({"c_plus_star", speeds.c_plus_star});
    if (speeds.c_minus_applicable) t.push_back({"c_minus_star", speeds.c_minus_star});
    t.push_back({"lower_threshold_T1", lower_bound_threshold(1.0, coeffs)});
    t.push_back({"dirichlet_eigenvalue_box", dirichlet_principal_eigenvalue(p.box_half_length, a.inf, p.dim)});
    t.push_back({"dirichlet_threshold_L0", dirichlet_negativity_threshold(a.inf, p.dim)});

    const ScalarField u0 = build_initial(cfg.initial, p.grid());
    if (u0.min() > 0.0) t.push_back({"pointwise_lower_bound_T1", pointwise_lower_bound(u0.min(), u0.max(), 1.0, 1.0, coeffs)});
    if (coeffs.kind() == CoefficientKind::constant && hyp.holds_h1) {
        // The chi = 0 entire solution is the constant a/b, so K = 2 and u+0 = a/b.
        const double uplus0 = a.inf / b.inf;
        t.push_back({"perturbation_K", perturbation_constant(0.0, p)});
        t.push_back({"perturbation_bound", perturbation_bound(p.chi, perturbation_constant(0.0, p), uplus0, uplus0,
                                                              coeffs, p)});
    }
    return t;
}

RunOutcome run_experiment(const ExperimentConfig& config, std::string out_dir, int workers) {
    if (out_dir.empty()) out_dir = config.out;
    if (out_dir.empty()) throw PreconditionError("no output directory given");
    const fs::path root(out_dir);
    prepare_directory(root);
    const std::string phash = parameter_hash(config);
    // Written first so that a crash still leaves a manifest behind.
    write_manifest(root, config, "running", "", {}, nullptr);

    RunOutcome outcome;
    outcome.dir = root.string();
    RunDir dir(root, phash);
    try {
        dir.text("config.txt", serialize_config(to_config_map(config)));
        KindResult res = has_ladder(config) ? run_ladder(config, dir, workers) : run_kind(config, dir, workers);
        const bool bare = config.kind == ExperimentKind::simulate && config.horizon == 0.0 && !has_ladder(config);
        if (!bare) dir.summary(res.summary, std::string(to_string(config.kind)) + " [" + phash + "]", res.notes);
        outcome.summary = std::move(res.summary);
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.error = e.what();
        log::warn(std::string("run failed: ") + e.what());
    }
    write_manifest(root, config, outcome.ok ? "ok" : "failed", outcome.error, dir.files(), &outcome.content_hash);
    return outcome;
}

bool CompareResult::within(double tolerance) const {
    if (!notes.empty()) return false;
    for (const auto& e : entries)
        if (!(e.max_abs <= tolerance)) return false;
    return true;
}

CompareResult compare_runs(const std::string& dir1, const std::string& dir2) {
    const json m1 = read_manifest(dir1), m2 = read_manifest(dir2);
    const std::string k1 = m1.at("kind"), k2 = m2.at("kind");
    if (k1 != k2) throw PreconditionError("incompatible kinds: " + k1 + " vs " + k2);
    CompareResult out;
    out.kind = k1;
    if (m1.at("status") != "ok" || m2.at("status") != "ok") out.notes.push_back("at least one run did not finish");
    if (m1.at("content_hash") == m2.at("content_hash")) return out;

    const auto& f1 = m1.at("files");
    const auto& f2 = m2.at("files");
    for (const auto& [rel, hash] : f1.items()) {
        if (!f2.contains(rel)) {
            out.notes.push_back(rel + ": only in " + dir1);
            continue;
        }
        if (f2.at(rel) == hash) continue;
        const fs::path p1 = fs::path(dir1) / rel, p2 = fs::path(dir2) / rel;
        const auto ext = fs::path(rel).extension();
        if (ext == ".csv") diff_csv(rel, p1, p2, out);
        else if (ext == ".ksf") diff_field(rel, p1, p2, out);
        else if (rel != "config.txt" && rel != "summary.txt" && fs::path(rel).filename() != "trajectory.json" &&
                 fs::path(rel).filename() != "entire.json")
            out.notes.push_back(rel + ": contents differ");
    }
    for (const auto& [rel, hash] : f2.items())
        if (!f1.contains(rel)) out.notes.push_back(rel + ": only in " + dir2);
    return out;
}

}  // namespace kslab
