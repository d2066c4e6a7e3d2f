#include "kslab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kslab/error.hpp"

namespace kslab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Relative tolerance for snapping sampled extremes onto the analytic bound.
constexpr double kEnvelopeMargin = 1e-9;

bool near_integer(double x, double tol = 1e-9) {
    return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

/// Smallest base such that every nonzero entry is an integer multiple of it.
std::optional<double> fundamental(const std::vector<double>& freqs) {
    double smallest = std::numeric_limits<double>::infinity();
    for (double f : freqs)
        if (f != 0.0) smallest = std::min(smallest, std::abs(f));
    if (!std::isfinite(smallest)) return std::nullopt;
    for (int j = 1; j <= 64; ++j) {
        const double base = smallest / j;
        bool ok = true;
        for (double f : freqs)
            if (f != 0.0 && !near_integer(std::abs(f) / base)) ok = false;
        if (ok) return base;
    }
    return std::nullopt;
}

/// Sample abscissae covering one common period of `freqs` (or a long window).
std::vector<double> sample_abscissae(const std::vector<double>& freqs, std::size_t budget) {
    double largest = 0.0;
    for (double f : freqs) largest = std::max(largest, std::abs(f));
    if (largest == 0.0) return {0.0};
    std::size_t count;
    double span;
    if (auto base = fundamental(freqs)) {
        span = kTwoPi / *base;
        count = std::max<std::size_t>(128, static_cast<std::size_t>(16.0 * largest / *base));
    } else {
        double smallest = largest;
        for (double f : freqs)
            if (f != 0.0) smallest = std::min(smallest, std::abs(f));
        span = 200.0 * kTwoPi / smallest;
        count = std::max<std::size_t>(8192, static_cast<std::size_t>(16.0 * span * largest / kTwoPi));
    }
    count = std::min(count, budget);
    std::vector<double> xs(count);
    for (std::size_t j = 0; j < count; ++j) xs[j] = span * static_cast<double>(j) / count;
    return xs;
}

double eval_separable(const SeparableProfile& p, const Point& x, double t) {
    double s = p.offset;
    for (const auto& h : p.terms) {
        const double spatial = std::cos(h.wavenumber[0] * x[0] + h.wavenumber[1] * x[1] + h.phase);
        const double temporal = h.frequency == 0.0 && h.time_phase == 0.0 ? 1.0 : std::cos(h.frequency * t + h.time_phase);
        s += h.amplitude * spatial * temporal;
    }
    return s;
}

Envelope separable_envelope(const SeparableProfile& p) {
    double spread = 0.0;
    std::vector<double> kx, ky, om;
    for (const auto& h : p.terms) {
        spread += std::abs(h.amplitude);
        kx.push_back(h.wavenumber[0]);
        ky.push_back(h.wavenumber[1]);
        om.push_back(h.frequency);
    }
    const double lo = p.offset - spread;
    const double hi = p.offset + spread;
    if (p.terms.empty()) return {p.offset, p.offset};

    const auto xs = sample_abscissae(kx, 1024);
    const auto ys = sample_abscissae(ky, 1024);
    auto ts = sample_abscissae(om, 16384);
    // Keep the product tractable.
    while (xs.size() * ys.size() * ts.size() > 20'000'000 && ts.size() > 128) ts.resize(ts.size() / 2);

    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (double t : ts)
        for (double y : ys)
            for (double x : xs) {
                const double w = eval_separable(p, {x, y}, t);
                mn = std::min(mn, w);
                mx = std::max(mx, w);
            }
    // Every point lies within half a sample spacing of a node. At an interior extremum the
    // gradient vanishes, so the sampled value is off by at most half the curvature bound.
    auto half_step = [](const std::vector<double>& s) { return s.size() > 1 ? 0.5 * (s[1] - s[0]) : 0.0; };
    const double dx = half_step(xs), dy = half_step(ys), dt = half_step(ts);
    double curvature = 0.0;
    for (const auto& h : p.terms) {
        const double reach = std::abs(h.wavenumber[0]) * dx + std::abs(h.wavenumber[1]) * dy + std::abs(h.frequency) * dt;
        curvature += 0.5 * std::abs(h.amplitude) * reach * reach;
    }
    const double pad = curvature + kEnvelopeMargin * std::max(std::abs(mn), std::abs(mx));
    Envelope env;
    env.inf = (mn - lo <= kEnvelopeMargin * std::max(1.0, std::abs(lo))) ? lo : std::max(lo, mn - pad);
    env.sup = (hi - mx <= kEnvelopeMargin * std::max(1.0, std::abs(hi))) ? hi : std::min(hi, mx + pad);
    return env;
}

Envelope tabulated_envelope(const TabulatedProfile& p) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (const auto& slab : p.values)
        for (double v : slab) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
    return {mn, mx};
}

Envelope envelope_of(const Profile& p) {
    return std::visit(
        [](const auto& q) -> Envelope {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, ConstantProfile>) return {q.value, q.value};
            else if constexpr (std::is_same_v<T, SeparableProfile>) return separable_envelope(q);
            else return tabulated_envelope(q);
        },
        p);
}

void check_profile(const Profile& p, std::optional<double> period, const char* name) {
    if (const auto* s = std::get_if<SeparableProfile>(&p)) {
        for (const auto& h : s->terms) {
            if (period && h.frequency != 0.0 && !near_integer(h.frequency * *period / kTwoPi))
                throw PreconditionError(std::string(name) + ": harmonic frequency is not a multiple of 2*pi/period");
        }
    } else if (const auto* tab = std::get_if<TabulatedProfile>(&p)) {
        const std::size_t per_slab = tab->dim == 2 ? static_cast<std::size_t>(tab->nodes) * tab->nodes
                                                   : static_cast<std::size_t>(tab->nodes);
        if (tab->nodes < 2 || tab->times.empty() || tab->times.size() != tab->values.size())
            throw PreconditionError(std::string(name) + ": tabulated profile needs >=2 nodes and one slab per time");
        for (const auto& slab : tab->values)
            if (slab.size() != per_slab) throw PreconditionError(std::string(name) + ": tabulated slab has wrong size");
        if (!std::is_sorted(tab->times.begin(), tab->times.end()) ||
            std::adjacent_find(tab->times.begin(), tab->times.end()) != tab->times.end())
            throw PreconditionError(std::string(name) + ": tabulated times must be strictly increasing");
        if (period && (tab->times.front() < 0.0 || tab->times.back() >= *period))
            throw PreconditionError(std::string(name) + ": periodic table times must lie in [0, period)");
    }
}

bool profile_autonomous(const Profile& p) {
    if (const auto* s = std::get_if<SeparableProfile>(&p)) {
        return std::all_of(s->terms.begin(), s->terms.end(),
                           [](const Harmonic& h) { return h.frequency == 0.0; });
    }
    if (const auto* tab = std::get_if<TabulatedProfile>(&p)) return tab->times.size() == 1;
    return true;
}

bool profile_homogeneous(const Profile& p) {
    if (const auto* s = std::get_if<SeparableProfile>(&p)) {
        return std::all_of(s->terms.begin(), s->terms.end(), [](const Harmonic& h) {
            return h.wavenumber[0] == 0.0 && h.wavenumber[1] == 0.0;
        });
    }
    if (const auto* tab = std::get_if<TabulatedProfile>(&p)) {
        for (const auto& slab : tab->values)
            if (std::any_of(slab.begin(), slab.end(), [&](double v) { return v != slab.front(); })) return false;
    }
    return true;
}

double interpolate_slab(const TabulatedProfile& p, const std::vector<double>& slab, const Point& x) {
    const double h = 2.0 * p.half_length / p.nodes;
    auto locate = [&](double coord, int& i0, double& frac) {
        double s = (coord + p.half_length) / h;
        s -= p.nodes * std::floor(s / p.nodes);
        i0 = static_cast<int>(std::floor(s));
        frac = s - i0;
        i0 %= p.nodes;
    };
    int ix;
    double fx;
    locate(x[0], ix, fx);
    const int ix1 = (ix + 1) % p.nodes;
    if (p.dim == 1) return (1.0 - fx) * slab[ix] + fx * slab[ix1];
    int iy;
    double fy;
    locate(x[1], iy, fy);
    const int iy1 = (iy + 1) % p.nodes;
    auto at = [&](int r, int c) { return slab[static_cast<std::size_t>(r) * p.nodes + c]; };
    return (1.0 - fy) * ((1.0 - fx) * at(iy, ix) + fx * at(iy, ix1)) + fy * ((1.0 - fx) * at(iy1, ix) + fx * at(iy1, ix1));
}

double eval_tabulated(const TabulatedProfile& p, std::optional<double> period, const Point& x, double t) {
    const auto& ts = p.times;
    if (ts.size() == 1) return interpolate_slab(p, p.values[0], x);
    if (period) {
        const double T = *period;
        double tt = t - T * std::floor(t / T);
        if (tt < ts.front() || tt >= ts.back()) {
            // Wrap segment between the last node and the first node + T.
            const double t0 = ts.back();
            double t1 = ts.front() + T;
            if (tt < ts.front()) tt += T;
            const double w = (tt - t0) / (t1 - t0);
            return (1.0 - w) * interpolate_slab(p, p.values.back(), x) + w * interpolate_slab(p, p.values.front(), x);
        }
        t = tt;
    } else if (t < ts.front() || t > ts.back()) {
        std::ostringstream msg;
        msg << "tabulated coefficient queried at t=" << t << " outside its table [" << ts.front() << ", " << ts.back() << "]";
        throw PreconditionError(msg.str());
    }
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j1 = static_cast<std::size_t>(it - ts.begin());
    if (j1 >= ts.size()) j1 = ts.size() - 1;
    const std::size_t j0 = j1 - 1;
    const double w = (t - ts[j0]) / (ts[j1] - ts[j0]);
    if (w == 0.0) return interpolate_slab(p, p.values[j0], x);
    if (w == 1.0) return interpolate_slab(p, p.values[j1], x);
    return (1.0 - w) * interpolate_slab(p, p.values[j0], x) + w * interpolate_slab(p, p.values[j1], x);
}

CoefficientKind kind_of(const Profile& p) {
    switch (p.index()) {
        case 0: return CoefficientKind::constant;
        case 1: return CoefficientKind::separable_periodic;
        default: return CoefficientKind::tabulated;
    }
}

}  // namespace

const char* to_string(CoefficientKind kind) {
    switch (kind) {
        case CoefficientKind::constant: return "constant";
        case CoefficientKind::separable_periodic: return "separable-periodic";
        case CoefficientKind::tabulated: return "tabulated";
    }
    return "?";
}

CoefficientField::CoefficientField(Profile a, Profile b, std::optional<double> period)
    : a_(std::move(a)), b_(std::move(b)), period_(period) {
    if (period_ && !(std::isfinite(*period_) && *period_ > 0.0)) throw PreconditionError("period must be > 0");
    check_profile(a_, period_, "a");
    check_profile(b_, period_, "b");
    a_env_ = envelope_of(a_);
    b_env_ = envelope_of(b_);
}

CoefficientField CoefficientField::constant(double a, double b) {
    return CoefficientField(ConstantProfile{a}, ConstantProfile{b});
}

CoefficientKind CoefficientField::kind(Which which) const { return kind_of(profile(which)); }

CoefficientKind CoefficientField::kind() const {
    return static_cast<CoefficientKind>(std::max(static_cast<int>(kind(Which::a)), static_cast<int>(kind(Which::b))));
}

bool CoefficientField::autonomous() const { return profile_autonomous(a_) && profile_autonomous(b_); }

bool CoefficientField::spatially_homogeneous() const { return profile_homogeneous(a_) && profile_homogeneous(b_); }

double CoefficientField::evaluate(Which which, const Point& x, double t) const {
    const Profile& p = profile(which);
    return std::visit(
        [&](const auto& q) -> double {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, ConstantProfile>) return q.value;
            else if constexpr (std::is_same_v<T, SeparableProfile>) return eval_separable(q, x, t);
            else return eval_tabulated(q, period_, x, t);
        },
        p);
}

void CoefficientField::fill(Which which, const Grid& grid, double t, ScalarField& out) const {
    if (!(out.grid() == grid)) out = ScalarField(grid);
    const Profile& p = profile(which);
    if (const auto* c = std::get_if<ConstantProfile>(&p)) {
        std::fill(out.data().begin(), out.data().end(), c->value);
        return;
    }
    if (const auto* s = std::get_if<SeparableProfile>(&p)) {
        std::fill(out.data().begin(), out.data().end(), s->offset);
        for (const auto& h : s->terms) {
            const double temporal = std::cos(h.frequency * t + h.time_phase);
            const double amp = h.amplitude * temporal;
            if (amp == 0.0) continue;
            for_each_node(grid, [&](std::size_t k, double x, double y) {
                out[k] += amp * std::cos(h.wavenumber[0] * x + h.wavenumber[1] * y + h.phase);
            });
        }
        return;
    }
    for_each_node(grid, [&](std::size_t k, double x, double y) { out[k] = evaluate(which, {x, y}, t); });
}

ScalarField CoefficientField::sample_grid(Which which, const Grid& grid, double t) const {
    ScalarField out(grid);
    fill(which, grid, t, out);
    return out;
}

void CoefficientField::require_positive_bounded() const {
    auto check = [](const Envelope& e, const char* name) {
        if (!(std::isfinite(e.inf) && e.inf > 0.0)) {
            std::ostringstream msg;
            msg << "hypothesis (H) violated: " << name << "_inf = " << e.inf << " is not positive";
            throw HypothesisViolation(msg.str());
        }
        if (!std::isfinite(e.sup)) throw HypothesisViolation(std::string("hypothesis (H) violated: ") + name + "_sup is unbounded");
    };
    check(a_env_, "a");
    check(b_env_, "b");
}

void CoefficientField::require_box_compatible(const Grid& grid) const {
    auto check = [&](const Profile& p, const char* name) {
        if (const auto* s = std::get_if<SeparableProfile>(&p)) {
            for (const auto& h : s->terms) {
                for (int d = 0; d < 2; ++d) {
                    const double k = h.wavenumber[d];
                    if (d >= grid.dim && k != 0.0)
                        throw PreconditionError(std::string(name) + ": wavenumber along an axis the grid does not have");
                    if (d < grid.dim && !near_integer(k * 2.0 * grid.half_length / kTwoPi, 1e-8))
                        throw PreconditionError(std::string(name) + ": spatial harmonic is not periodic on the box");
                }
            }
        } else if (const auto* tab = std::get_if<TabulatedProfile>(&p)) {
            if (tab->dim != grid.dim || std::abs(tab->half_length - grid.half_length) > 1e-12 * grid.half_length)
                throw PreconditionError(std::string(name) + ": tabulated lattice does not match the box");
        }
    };
    check(a_, "a");
    check(b_, "b");
}

double sample_coefficient(const CoefficientField& coeffs, Which which, const Point& x, double t, const Grid& grid) {
    for (int d = 0; d < grid.dim; ++d)
        if (!(x[d] >= -grid.half_length && x[d] < grid.half_length))
            throw PreconditionError("sample_coefficient: point outside the box");
    return coeffs.evaluate(which, x, t);
}

}  // namespace kslab
