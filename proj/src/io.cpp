#include "kslab/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "kslab/elliptic.hpp"
#include "kslab/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

namespace kslab {
namespace {

constexpr char kMagic[8] = {'K', 'S', 'F', 'I', 'E', 'L', 'D', '1'};

template <typename T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& pos, const std::string& path) {
    if (pos + sizeof(T) > buf.size()) throw FormatError(path + ": truncated header");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

std::string slice_name(std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "u_%05zu.ksf", i);
    return name;
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write failed for " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_field_binary(const std::string& path, const ScalarField& field) {
    const Grid& g = field.grid();
    std::string buf(kMagic, sizeof kMagic);
    put<std::int32_t>(buf, g.dim);
    for (int d = 0; d < g.dim; ++d) put<std::int32_t>(buf, g.points);
    put<double>(buf, g.spacing());
    put<double>(buf, g.half_length);
    buf.append(reinterpret_cast<const char*>(field.data().data()), field.size() * sizeof(double));
    write_text(path, buf);
}

ScalarField read_field_binary(const std::string& path) {
    const std::string buf = read_text(path);
    if (buf.size() < sizeof kMagic || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0)
        throw FormatError(path + ": not a field file");
    std::size_t pos = sizeof kMagic;
    const auto dim = take<std::int32_t>(buf, pos, path);
    if (dim != 1 && dim != 2) throw FormatError(path + ": unsupported dimension");
    const auto points = take<std::int32_t>(buf, pos, path);
    if (dim == 2 && take<std::int32_t>(buf, pos, path) != points)
        throw FormatError(path + ": only square grids are supported");
    const double spacing = take<double>(buf, pos, path);
    const double half_length = take<double>(buf, pos, path);
    if (points < 2 || !(half_length > 0.0)) throw FormatError(path + ": bad grid header");
    Grid grid{dim, points, half_length};
    if (std::abs(grid.spacing() - spacing) > 1e-12 * spacing) throw FormatError(path + ": spacing disagrees with box");
    const std::size_t bytes = grid.size() * sizeof(double);
    if (buf.size() - pos != bytes) throw FormatError(path + ": payload size mismatch");
    std::vector<double> values(grid.size());
    std::memcpy(values.data(), buf.data() + pos, bytes);
    return ScalarField(grid, std::move(values));
}

void write_field_csv(const std::string& path, const ScalarField& field) {
    const Grid& g = field.grid();
    if (g.size() > (1u << 16)) throw PreconditionError("write_field_csv: grid too large for CSV");
    std::string out = g.dim == 1 ? "x,u\n" : "x,y,u\n";
    for_each_node(g, [&](std::size_t k, double x, double y) {
        out += format_number(x) + ",";
        if (g.dim == 2) out += format_number(y) + ",";
        out += format_number(field[k]) + "\n";
    });
    write_text(path, out);
}

void save_trajectory(const std::string& dir, const Trajectory& traj) {
    json j;
    j["times"] = json::array();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        j["times"].push_back(traj.states[i].t);
        write_field_binary((fs::path(dir) / slice_name(i)).string(), traj.states[i].u);
    }
    json steps = json::array();
    for (const auto& s : traj.steps) steps.push_back({s.t, s.dt, s.min_u, s.max_u, s.transport_substeps});
    j["steps"] = std::move(steps);
    j["step_columns"] = {"t", "dt", "min_u", "max_u", "transport_substeps"};
    write_text((fs::path(dir) / "trajectory.json").string(), j.dump(1) + "\n");
}

Trajectory load_trajectory(const std::string& dir, const Params& params) {
    const json j = read_json((fs::path(dir) / "trajectory.json").string());
    Trajectory traj;
    try {
        const auto& times = j.at("times");
        for (std::size_t i = 0; i < times.size(); ++i) {
            ScalarField u = read_field_binary((fs::path(dir) / slice_name(i)).string());
            if (!(u.grid() == params.grid())) throw FormatError(dir + ": checkpoint grid differs from params");
            traj.states.push_back(make_state(std::move(u), times[i].get<double>(), params));
        }
        for (const auto& s : j.at("steps"))
            traj.steps.push_back({s[0].get<double>(), s[1].get<double>(), s[2].get<double>(), s[3].get<double>(),
                                  s[4].get<int>()});
    } catch (const json::exception& e) {
        throw FormatError(dir + ": " + e.what());
    }
    if (traj.states.empty()) throw FormatError(dir + ": no stored states");
    return traj;
}

Trajectory resume_trajectory(const Trajectory& partial, double t_end, const CoefficientField& coeffs,
                             const Params& params, const IntegratorOptions& options) {
    if (partial.states.empty()) throw PreconditionError("resume_trajectory: empty trajectory");
    const double t0 = partial.back().t;
    if (!(t_end >= t0)) throw PreconditionError("resume_trajectory: t_end precedes the checkpoint");
    Trajectory out = partial;
    const Trajectory more = integrate(partial.back().u, t0, t_end - t0, coeffs, params, options);
    out.states.insert(out.states.end(), more.states.begin() + 1, more.states.end());
    out.steps.insert(out.steps.end(), more.steps.begin(), more.steps.end());
    return out;
}

void save_entire(const std::string& dir, const EntireSolution& sol) {
    json j;
    j["representation"] = to_string(sol.representation);
    j["period"] = sol.period;
    j["converged"] = sol.converged;
    j["cauchy"] = sol.cauchy;
    j["defect"] = sol.defect;
    j["history"] = sol.history;
    j["stats"] = {{"u_inf", sol.stats.u_inf},
                  {"u_sup", sol.stats.u_sup},
                  {"grad_sup", sol.stats.grad_sup},
                  {"grad_log_sup", sol.stats.grad_log_sup}};
    j["times"] = json::array();
    for (std::size_t i = 0; i < sol.states.size(); ++i) {
        j["times"].push_back(sol.states[i].t);
        write_field_binary((fs::path(dir) / slice_name(i)).string(), sol.states[i].u);
    }
    write_text((fs::path(dir) / "entire.json").string(), j.dump(1) + "\n");
}

EntireSolution load_entire(const std::string& dir, const Params& params) {
    const json j = read_json((fs::path(dir) / "entire.json").string());
    EntireSolution sol;
    try {
        const std::string rep = j.at("representation");
        if (rep == "steady") sol.representation = Representation::steady;
        else if (rep == "periodic") sol.representation = Representation::periodic;
        else if (rep == "window") sol.representation = Representation::window;
        else throw FormatError(dir + ": unknown representation " + rep);
        sol.period = j.at("period");
        sol.converged = j.at("converged");
        sol.cauchy = j.at("cauchy");
        sol.defect = j.at("defect").is_null() ? std::numeric_limits<double>::infinity() : j.at("defect").get<double>();
        sol.history = j.at("history").get<std::vector<double>>();
        const auto& times = j.at("times");
        for (std::size_t i = 0; i < times.size(); ++i) {
            ScalarField u = read_field_binary((fs::path(dir) / slice_name(i)).string());
            if (!(u.grid() == params.grid())) throw FormatError(dir + ": checkpoint grid differs from params");
            sol.states.push_back(make_state(std::move(u), times[i].get<double>(), params));
        }
    } catch (const json::exception& e) {
        throw FormatError(dir + ": " + e.what());
    }
    if (sol.states.empty()) throw FormatError(dir + ": no stored slices");
    sol.stats = compute_stats(sol.states);
    return sol;
}

}  // namespace kslab
