#pragma once

// Phase-resetting interaction functions.
//
// An interaction function is a degree-one circle map f applied to a neighbour's
// phase whenever a pulse arrives. Each family exposes its continuous lift on
// [0,1] (used by the engine to detect threshold crossings), the wrapped circle
// map, and an analytic derivative.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "desync/error.hpp"
#include "desync/phase.hpp"

namespace desync {

/// Extension point: any type with a continuous lift on [0,1] and its
/// derivative can drive the engine and the map reductions.
template <class F>
concept InteractionFamily = requires(const F& f, double x) {
    { f.lift(x) } -> std::convertible_to<double>;
    { f.derivative(x) } -> std::convertible_to<double>;
    { f.describe() } -> std::convertible_to<std::string>;
};

/// Circle-map evaluation of any family: wrap(lift(x)).
template <InteractionFamily F>
double apply(const F& f, double x)
{
    return wrap_unit(f.lift(x));
}

namespace detail {
inline void require_finite(double v, const char* what)
{
    if (!std::isfinite(v))
        fail(ErrorKind::invalid_argument, std::string(what) + " must be finite");
}

inline void require_unit_closed(double x)
{
    require_finite(x, "phase");
    if (x < 0.0 || x > 1.0) {
        std::ostringstream os;
        os << "phase " << x << " outside [0,1]";
        fail(ErrorKind::invalid_argument, os.str());
    }
}
}  // namespace detail

/// f(x) = (ln(1 + (e^g - 1) x) - ln(1 + (e^-g - 1) x)) / (2g).
/// Fixed points at 0, 1/2 and 1 for every gain g > 0; g = 2 is the
/// canonical member.
class SmoothLog {
public:
    explicit SmoothLog(double gain = 2.0) : gain_(gain)
    {
        detail::require_finite(gain, "gain");
        if (gain <= 0.0)
            fail(ErrorKind::invalid_argument, "gain must be positive");
        up_ = std::expm1(gain);
        down_ = std::expm1(-gain);
    }

    double gain() const noexcept { return gain_; }

    double lift(double x) const
    {
        if (x == 1.0)
            return 1.0;  // exact threshold, so a pulse at threshold fires at once
        return (std::log1p(up_ * x) - std::log1p(down_ * x)) / (2.0 * gain_);
    }

    double derivative(double x) const
    {
        return (up_ / (1.0 + up_ * x) - down_ / (1.0 + down_ * x)) / (2.0 * gain_);
    }

    std::string describe() const
    {
        std::ostringstream os;
        os << "smooth_log{gain=" << gain_ << "}";
        return os.str();
    }

private:
    double gain_;
    double up_ = 0.0;
    double down_ = 0.0;
};

/// Raw evaluation of the smooth log family on the closed interval [0,1].
inline double eval_smooth_log(double x, double gain)
{
    detail::require_unit_closed(x);
    return SmoothLog(gain).lift(x);
}

struct CubicCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

namespace detail {
// Interpolation: cubic(0) = 0, cubic(1) = 1, cubic(1/2) = 1/2 + tau and
// cubic'(1/2) = beta.
inline CubicCoefficients cubic_coefficients_unchecked(double tau, double beta)
{
    return {4.0 * (1.0 - beta), 6.0 * beta - 4.0 * tau - 6.0, 4.0 * tau - 2.0 * beta + 3.0};
}

inline double cubic_slope(const CubicCoefficients& k, double x)
{
    return (3.0 * k.a * x + 2.0 * k.b) * x + k.c;
}

// Minimum of the (quadratic) slope over [0,1] and where it is attained.
inline std::pair<double, double> cubic_min_slope(const CubicCoefficients& k)
{
    double best_x = 0.0;
    double best = cubic_slope(k, 0.0);
    if (double s1 = cubic_slope(k, 1.0); s1 < best) {
        best = s1;
        best_x = 1.0;
    }
    if (k.a > 0.0) {
        double vertex = -k.b / (3.0 * k.a);
        if (vertex > 0.0 && vertex < 1.0) {
            double sv = cubic_slope(k, vertex);
            if (sv < best) {
                best = sv;
                best_x = vertex;
            }
        }
    }
    return {best, best_x};
}

inline void require_open_unit(double v, const char* name)
{
    require_finite(v, name);
    if (!(v > 0.0 && v < 1.0)) {
        std::ostringstream os;
        os << name << " = " << v << " must lie in (0,1)";
        fail(ErrorKind::invalid_argument, os.str());
    }
}
}  // namespace detail

/// Solve the interpolation conditions for the shifted cubic. Throws a
/// constraint violation if the resulting cubic is not strictly increasing on
/// [0,1].
inline CubicCoefficients solve_cubic_coefficients(double tau, double beta)
{
    detail::require_open_unit(tau, "tau");
    detail::require_open_unit(beta, "beta");
    auto k = detail::cubic_coefficients_unchecked(tau, beta);
    auto [slope, where] = detail::cubic_min_slope(k);
    if (!(slope > 0.0)) {
        std::ostringstream os;
        os << "shifted cubic (tau=" << tau << ", beta=" << beta
           << ") is not increasing: slope " << slope << " at x=" << where;
        fail(ErrorKind::constraint_violation, os.str());
    }
    return k;
}

/// f(x) = a x^3 + b x^2 + c x - tau (mod 1). Stable fixed point at 1/2 with
/// gradient beta; f(0) = f(1) = 1 - tau on the circle.
class ShiftedCubic {
public:
    static ShiftedCubic make(double tau, double beta)
    {
        return ShiftedCubic(tau, beta, solve_cubic_coefficients(tau, beta));
    }

    /// Skips the monotonicity check; for building validation fixtures.
    static ShiftedCubic unchecked(double tau, double beta)
    {
        detail::require_finite(tau, "tau");
        detail::require_finite(beta, "beta");
        return ShiftedCubic(tau, beta, detail::cubic_coefficients_unchecked(tau, beta));
    }

    double tau() const noexcept { return tau_; }
    double beta() const noexcept { return beta_; }
    const CubicCoefficients& coefficients() const noexcept { return k_; }

    double cubic(double x) const { return ((k_.a * x + k_.b) * x + k_.c) * x; }
    double lift(double x) const { return cubic(x) - tau_; }
    double derivative(double x) const { return detail::cubic_slope(k_, x); }

    std::string describe() const
    {
        std::ostringstream os;
        os << "shifted_cubic{tau=" << tau_ << ", beta=" << beta_ << "}";
        return os.str();
    }

private:
    ShiftedCubic(double tau, double beta, CubicCoefficients k)
        : tau_(tau), beta_(beta), k_(k) {}

    double tau_;
    double beta_;
    CubicCoefficients k_;
};

/// Runtime-selected family, as named in scenario files.
class Interaction {
public:
    using Variant = std::variant<SmoothLog, ShiftedCubic>;

    Interaction(SmoothLog f) : impl_(f) {}
    Interaction(ShiftedCubic f) : impl_(f) {}

    double lift(double x) const
    {
        return std::visit([x](const auto& f) { return f.lift(x); }, impl_);
    }
    double derivative(double x) const
    {
        return std::visit([x](const auto& f) { return f.derivative(x); }, impl_);
    }
    std::string describe() const
    {
        return std::visit([](const auto& f) { return f.describe(); }, impl_);
    }

    const Variant& variant() const noexcept { return impl_; }

private:
    Variant impl_;
};

/// Analytic derivative at x in [0,1].
template <InteractionFamily F>
double derivative(const F& f, double x)
{
    detail::require_unit_closed(x);
    return f.derivative(x);
}

enum class Stability { stable, unstable, marginal };

inline const char* to_string(Stability s) noexcept
{
    switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
    }
    return "?";
}

/// Multipliers within this distance of unit modulus are reported as marginal.
inline constexpr double marginal_band = 1e-6;

inline Stability classify_multiplier(double multiplier) noexcept
{
    double m = std::abs(multiplier);
    if (std::abs(m - 1.0) < marginal_band)
        return Stability::marginal;
    return m < 1.0 ? Stability::stable : Stability::unstable;
}

struct FixedPointReport {
    double location = 0.0;  // in [0,1)
    double multiplier = 0.0;
    Stability stability = Stability::marginal;
};

struct MapViolation {
    enum class Kind { non_increasing, out_of_range, non_finite, degenerate };
    Kind kind;
    double x;
    double value;
};

inline const char* to_string(MapViolation::Kind k) noexcept
{
    switch (k) {
    case MapViolation::Kind::non_increasing: return "non-increasing";
    case MapViolation::Kind::out_of_range: return "out-of-range";
    case MapViolation::Kind::non_finite: return "non-finite";
    case MapViolation::Kind::degenerate: return "degenerate";
    }
    return "?";
}

struct ValidationReport {
    std::size_t grid_points = 0;
    std::vector<MapViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

inline constexpr std::size_t validation_grid = 10000;

/// Checks Df > 0 and a well-formed wrapped range on a uniform grid of
/// validation_grid + 1 points, and rejects maps that coincide with the
/// identity (every point fixed).
template <InteractionFamily F>
ValidationReport validate_circle_map(const F& f)
{
    ValidationReport report;
    report.grid_points = validation_grid + 1;
    double max_displacement = 0.0;
    for (std::size_t i = 0; i <= validation_grid; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(validation_grid);
        double slope = f.derivative(x);
        double y = f.lift(x);
        if (!std::isfinite(slope) || !std::isfinite(y)) {
            report.violations.push_back({MapViolation::Kind::non_finite, x, y});
            continue;
        }
        if (!(slope > 0.0))
            report.violations.push_back({MapViolation::Kind::non_increasing, x, slope});
        double w = wrap_unit(y);
        if (!(w >= 0.0 && w < 1.0))
            report.violations.push_back({MapViolation::Kind::out_of_range, x, w});
        max_displacement = std::max(max_displacement, std::abs(wrap_signed(y - x)));
    }
    if (max_displacement < 1e-12)
        report.violations.push_back({MapViolation::Kind::degenerate, 0.0, max_displacement});
    return report;
}

/// Grid step used to bracket fixed points.
inline constexpr std::size_t fixed_point_grid = 10000;

/// All solutions of f(x) = x on the circle, located to 1e-10 by bisection on
/// sign changes of lift(x) - x - k for each integer k in range.
template <InteractionFamily F>
std::vector<FixedPointReport> classify_fixed_points(const F& f)
{
    auto report = validate_circle_map(f);
    if (!report.ok()) {
        const auto& v = report.violations.front();
        std::ostringstream os;
        os << "cannot classify fixed points of " << f.describe() << ": "
           << to_string(v.kind) << " at x=" << v.x;
        fail(ErrorKind::invalid_argument, os.str());
    }

    const std::size_t n = fixed_point_grid;
    std::vector<double> xs(n + 1), hs(n + 1);
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        xs[i] = static_cast<double>(i) / static_cast<double>(n);
        hs[i] = f.lift(xs[i]) - xs[i];
        lo = std::min(lo, hs[i]);
        hi = std::max(hi, hs[i]);
    }

    std::vector<double> roots;
    auto add_root = [&roots](double x) {
        x = wrap_unit(x);
        if (1.0 - x < 1e-9)
            x = 0.0;
        for (double r : roots)
            if (circular_distance(r, x) < 1e-9)
                return;
        roots.push_back(x);
    };

    for (auto k = static_cast<long>(std::floor(lo)); k <= static_cast<long>(std::ceil(hi)); ++k) {
        const double shift = static_cast<double>(k);
        for (std::size_t i = 0; i <= n; ++i) {
            double s0 = hs[i] - shift;
            if (s0 == 0.0) {
                add_root(xs[i]);
                continue;
            }
            if (i == n)
                break;
            double s1 = hs[i + 1] - shift;
            if (s1 == 0.0 || (s0 < 0.0) == (s1 < 0.0))
                continue;
            double a = xs[i], b = xs[i + 1];
            double sa = s0;
            while (b - a > 1e-12) {
                double m = 0.5 * (a + b);
                double sm = f.lift(m) - m - shift;
                if (sm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((sm < 0.0) == (sa < 0.0)) {
                    a = m;
                    sa = sm;
                } else {
                    b = m;
                }
            }
            add_root(0.5 * (a + b));
        }
    }

    std::sort(roots.begin(), roots.end());
    std::vector<FixedPointReport> out;
    out.reserve(roots.size());
    for (double r : roots) {
        double m = f.derivative(r);
        out.push_back({r, m, classify_multiplier(m)});
    }
    return out;
}

}  // namespace desync
