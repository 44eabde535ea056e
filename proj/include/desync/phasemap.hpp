#pragma once

// Discrete-map reductions of the pulse-coupled dynamics.
//
// Two oscillators reduce to the return map of the phase difference d = x1 - x2
// taken once per rotation of oscillator 1. N identical, all-to-all coupled
// oscillators reduce to the vector of differences d_k = x_1 - x_{k+1},
// evolved by G (the reset applied at a firing) followed by the relabelling T*
// induced by the cyclic permutation of oscillator labels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "desync/error.hpp"
#include "desync/interaction.hpp"
#include "desync/phase.hpp"
#include "desync/rng.hpp"

namespace desync {

// ---------------------------------------------------------------------------
// Two-oscillator return map

/// F(d) = f(d + 1) for -1 < d < 0, 0 at d = 0, -f(1 - d) for 0 < d <= 1.
template <InteractionFamily F>
double return_map_two(double d, const F& f)
{
    if (!std::isfinite(d) || d <= -1.0 || d > 1.0) {
        std::ostringstream os;
        os << "phase difference " << d << " outside (-1,1]";
        fail(ErrorKind::invalid_argument, os.str());
    }
    if (d < 0.0)
        return apply(f, d + 1.0);
    if (d == 0.0)
        return 0.0;
    return -apply(f, 1.0 - d);
}

struct ReturnMapTrajectory {
    std::vector<double> values;  // values[0] is the initial difference
    std::optional<std::size_t> converged_at;  // first step with ||d| - 1/2| < tol
};

template <InteractionFamily F>
ReturnMapTrajectory iterate_return_map(double d0, std::size_t steps, const F& f,
                                       double tolerance = 1e-9)
{
    ReturnMapTrajectory out;
    out.values.reserve(steps + 1);
    double d = d0;
    return_map_two(d, f);  // validates d0
    out.values.push_back(d);
    auto check = [&](std::size_t i) {
        if (!out.converged_at && std::abs(std::abs(d) - 0.5) < tolerance)
            out.converged_at = i;
    };
    check(0);
    for (std::size_t i = 1; i <= steps; ++i) {
        d = return_map_two(d, f);
        out.values.push_back(d);
        check(i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Integer matrices for the label algebra

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    static IntMatrix identity(std::size_t n)
    {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b)
    {
        if (a.cols_ != b.rows_)
            fail(ErrorKind::internal, "matrix shape mismatch");
        IntMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                auto aik = a(i, k);
                if (aik == 0)
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    out(i, j) += aik * b(k, j);
            }
        return out;
    }

    std::vector<double> apply(const std::vector<double>& v) const
    {
        std::vector<double> out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j)
                s += static_cast<double>((*this)(i, j)) * v[j];
            out[i] = s;
        }
        return out;
    }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::int64_t> data_;
};

inline IntMatrix power(const IntMatrix& m, std::size_t k)
{
    IntMatrix out = IntMatrix::identity(m.rows());
    for (std::size_t i = 0; i < k; ++i)
        out = out * m;
    return out;
}

inline void require_oscillator_count(std::size_t n)
{
    if (n < 2) {
        std::ostringstream os;
        os << "oscillator count " << n << " must be at least 2";
        fail(ErrorKind::invalid_argument, os.str());
    }
}

/// M = (e : -I_{N-1}), the (N-1) x N change of coordinates x -> d.
inline IntMatrix build_difference_matrix(std::size_t n)
{
    require_oscillator_count(n);
    IntMatrix m(n - 1, n);
    for (std::size_t r = 0; r + 1 < n; ++r) {
        m(r, 0) = 1;
        m(r, r + 1) = -1;
    }
    return m;
}

/// P*(x_1, ..., x_N) = (x_2, ..., x_N, x_1) as an N x N matrix.
inline IntMatrix build_cyclic_permutation(std::size_t n)
{
    require_oscillator_count(n);
    IntMatrix p(n, n);
    for (std::size_t i = 0; i < n; ++i)
        p(i, (i + 1) % n) = 1;
    return p;
}

/// T* with T* M = M P*. Writing M P* = (v : M') gives T* = -M', which is a
/// solution because v = -M' e (the rows of M sum to zero). Both identities are
/// checked in exact integer arithmetic.
inline IntMatrix build_cyclic_transform(std::size_t n)
{
    const IntMatrix m = build_difference_matrix(n);
    const IntMatrix mp = m * build_cyclic_permutation(n);
    IntMatrix t(n - 1, n - 1);
    for (std::size_t r = 0; r + 1 < n; ++r)
        for (std::size_t c = 0; c + 1 < n; ++c)
            t(r, c) = -mp(r, c + 1);

    for (std::size_t r = 0; r + 1 < n; ++r) {
        std::int64_t row_sum = 0;
        for (std::size_t c = 0; c + 1 < n; ++c)
            row_sum += t(r, c);  // (-M' e)_r
        if (mp(r, 0) != row_sum)
            fail(ErrorKind::internal, "cyclic transform: v != -M'e");
    }
    if (!(t * m == mp))
        fail(ErrorKind::internal, "cyclic transform: T* M != M P*");
    return t;
}

// ---------------------------------------------------------------------------
// N-oscillator map

/// Differences d_k = x_1 - x_{k+1} taken when x_1 is about to fire. Phases
/// ordered x_1 > x_2 > ... > x_N give 0 < d_1 < ... < d_{N-1} < 1.
using DifferenceState = std::vector<double>;

inline void require_ordered(const DifferenceState& d)
{
    if (d.empty())
        fail(ErrorKind::invalid_argument, "difference state is empty");
    auto bad = [](std::size_t i, std::size_t j, double a, double b) {
        std::ostringstream os;
        os << "difference state not ordered: d_" << i << " = " << a << ", d_" << j << " = " << b
           << " (need 0 < d_1 < ... < d_{N-1} < 1)";
        fail(ErrorKind::ordering_violation, os.str());
    };
    if (!(d.front() > 0.0))
        bad(0, 1, 0.0, d.front());
    for (std::size_t k = 0; k + 1 < d.size(); ++k)
        if (!(d[k] < d[k + 1]))
            bad(k + 1, k + 2, d[k], d[k + 1]);
    if (!(d.back() < 1.0))
        bad(d.size(), d.size() + 1, d.back(), 1.0);
}

/// G_k(d) = -f(1 - d_k): oscillator 1 fires and resets every other phase.
template <InteractionFamily F>
DifferenceState apply_G(const DifferenceState& d, const F& f)
{
    require_ordered(d);
    DifferenceState out(d.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        out[k] = -apply(f, 1.0 - d[k]);
    return out;
}

/// Precomputed label algebra for one oscillator count.
class FullCycleMap {
public:
    explicit FullCycleMap(std::size_t n) : n_(n), transform_(build_cyclic_transform(n)) {}

    std::size_t oscillators() const noexcept { return n_; }
    const IntMatrix& transform() const noexcept { return transform_; }

    /// One firing followed by relabelling: T* o G.
    template <InteractionFamily F>
    DifferenceState step(const DifferenceState& d, const F& f) const
    {
        check_size(d);
        return transform_.apply(apply_G(d, f));
    }

    /// (T* o G)^N: one full cycle, every oscillator fires once.
    template <InteractionFamily F>
    DifferenceState cycle(DifferenceState d, const F& f) const
    {
        for (std::size_t i = 0; i < n_; ++i)
            d = step(d, f);
        return d;
    }

    /// States after k = 1..N firings in the original labelling:
    /// T*^{1-k} o G o (T* o G)^{k-1}.
    template <InteractionFamily F>
    std::vector<DifferenceState> orbit(const DifferenceState& d, const F& f) const
    {
        std::vector<DifferenceState> out;
        DifferenceState cur = d;
        for (std::size_t k = 1; k <= n_; ++k) {
            DifferenceState g = apply_G(cur, f);
            // T*^{1-k} = T*^{N+1-k} since T* has order N
            out.push_back(power(transform_, (n_ + 1 - k) % n_).apply(g));
            cur = transform_.apply(g);
        }
        return out;
    }

    /// The full cycle on the torus, without the ordering precondition; used
    /// to linearise at boundary states such as synchrony.
    template <InteractionFamily F>
    DifferenceState cycle_on_torus(DifferenceState d, const F& f) const
    {
        check_size(d);
        for (std::size_t i = 0; i < n_; ++i) {
            DifferenceState g(d.size());
            for (std::size_t k = 0; k < d.size(); ++k)
                g[k] = -apply(f, wrap_unit(1.0 - d[k]));
            d = transform_.apply(g);
        }
        return d;
    }

    /// Central-difference Jacobian of the full cycle on the torus.
    template <InteractionFamily F>
    Eigen::MatrixXd jacobian(const DifferenceState& d, const F& f, double h = 1e-7) const
    {
        const auto m = static_cast<Eigen::Index>(d.size());
        Eigen::MatrixXd j(m, m);
        for (Eigen::Index c = 0; c < m; ++c) {
            DifferenceState plus = d, minus = d;
            plus[c] += h;
            minus[c] -= h;
            auto fp = cycle_on_torus(plus, f);
            auto fm = cycle_on_torus(minus, f);
            for (Eigen::Index r = 0; r < m; ++r)
                j(r, c) = wrap_signed(fp[r] - fm[r]) / (2.0 * h);
        }
        return j;
    }

    /// Eigenvalue magnitudes of the linearised full cycle, largest first.
    template <InteractionFamily F>
    std::vector<double> multipliers(const DifferenceState& d, const F& f) const
    {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(jacobian(d, f), false);
        std::vector<double> out;
        for (const auto& ev : solver.eigenvalues())
            out.push_back(std::abs(ev));
        std::sort(out.rbegin(), out.rend());
        return out;
    }

private:
    void check_size(const DifferenceState& d) const
    {
        if (d.size() + 1 != n_) {
            std::ostringstream os;
            os << "difference state has " << d.size() << " components, expected " << n_ - 1;
            fail(ErrorKind::invalid_argument, os.str());
        }
    }

    std::size_t n_;
    IntMatrix transform_;
};

struct FullCycleTrajectory {
    std::vector<DifferenceState> states;  // states[c] after c full cycles
    std::optional<std::size_t> converged_at;
};

inline double max_abs_difference(const DifferenceState& a, const DifferenceState& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Applies (T* o G) N*cycles times, recording the state after every N
/// applications. Converged at the first cycle whose change is below
/// tolerance. With stop_on_convergence the trajectory ends there.
template <InteractionFamily F>
FullCycleTrajectory iterate_full_cycle(const DifferenceState& d0, std::size_t cycles, const F& f,
                                       double tolerance = 1e-10, bool stop_on_convergence = false)
{
    FullCycleMap map(d0.size() + 1);
    require_ordered(d0);
    FullCycleTrajectory out;
    out.states.push_back(d0);
    for (std::size_t c = 1; c <= cycles; ++c) {
        out.states.push_back(map.cycle(out.states.back(), f));
        if (!out.converged_at &&
            max_abs_difference(out.states[c], out.states[c - 1]) < tolerance) {
            out.converged_at = c;
            if (stop_on_convergence)
                break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orbit classes

inline std::uint64_t count_orbit_classes(std::size_t n)
{
    require_oscillator_count(n);
    if (n > 20)
        fail(ErrorKind::invalid_argument, "orbit class count limited to n <= 20");
    std::uint64_t r = 1;
    for (std::uint64_t k = 2; k < n; ++k)
        r *= k;
    return r;
}

/// Rotate a cyclic sequence so that its smallest element comes first.
inline std::vector<std::size_t> canonical_cyclic_order(std::vector<std::size_t> order)
{
    if (!order.empty())
        std::rotate(order.begin(), std::min_element(order.begin(), order.end()), order.end());
    return order;
}

struct OrbitRecord {
    std::vector<std::size_t> firing_order;  // canonical, 0-based ids
    DifferenceState fixed_point;
    std::vector<double> multipliers;
    std::size_t samples = 0;
};

struct AttractorCensus {
    std::size_t samples = 0;
    std::size_t converged = 0;
    std::vector<std::size_t> non_convergent;  // sample indices
    std::vector<OrbitRecord> orbits;          // sorted by firing order
};

/// One random sample: phases uniform on the circle, ordered from the one about
/// to fire downwards. Returns the firing order and the difference state.
inline std::pair<std::vector<std::size_t>, DifferenceState> random_ordered_state(std::size_t n,
                                                                               RandomStream& rng)
{
    std::vector<double> x(n);
    for (auto& v : x)
        v = rng.uniform();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t b) {
        return x[a] != x[b] ? x[a] > x[b] : a < b;
    });
    DifferenceState d(n - 1);
    for (std::size_t k = 1; k < n; ++k)
        d[k - 1] = x[order[0]] - x[order[k]];
    return {order, d};
}

inline constexpr std::size_t attractor_max_cycles = 10000;

template <InteractionFamily F>
AttractorCensus enumerate_attractors(std::size_t n, std::size_t samples, std::uint64_t seed,
                                     const F& f)
{
    if (n < 2 || n > 8) {
        std::ostringstream os;
        os << "attractor enumeration needs 2 <= n <= 8, got " << n;
        fail(ErrorKind::invalid_argument, os.str());
    }
    if (samples < 100)
        fail(ErrorKind::invalid_argument, "attractor enumeration needs at least 100 samples");

    FullCycleMap map(n);
    AttractorCensus census;
    census.samples = samples;
    std::map<std::vector<std::size_t>, OrbitRecord> classes;

    for (std::size_t s = 0; s < samples; ++s) {
        RandomStream rng(seed, "attractors", s);
        auto [order, d0] = random_ordered_state(n, rng);
        bool ok = false;
        DifferenceState fixed;
        try {
            auto traj = iterate_full_cycle(d0, attractor_max_cycles, f, 1e-10, true);
            if (traj.converged_at) {
                ok = true;
                fixed = traj.states.back();
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ordering_violation)
                throw;
        }
        if (!ok) {
            census.non_convergent.push_back(s);
            continue;
        }
        ++census.converged;
        auto key = canonical_cyclic_order(order);
        auto [it, inserted] = classes.try_emplace(key);
        if (inserted) {
            it->second.firing_order = key;
            it->second.fixed_point = fixed;
            it->second.multipliers = map.multipliers(fixed, f);
        }
        ++it->second.samples;
    }
    for (auto& [key, rec] : classes)
        census.orbits.push_back(std::move(rec));
    return census;
}

// ---------------------------------------------------------------------------
// Critical frequency ratio

struct LimitCycleProbe {
    double rho = 1.0;
    double x_star = 0.0;  // phase of the slow oscillator just after its reset
    bool alternating = false;
    bool solver_failed = false;
};

inline constexpr std::size_t limit_cycle_max_steps = 10000;
inline constexpr double limit_cycle_tolerance = 1e-12;

/// Two oscillators, the fast one rho >= 1 times the frequency of the slow one.
/// x is the slow oscillator's phase just after the fast one fires. The fast
/// oscillator reaches rho (1 - x) when the slow one fires and is reset; the
/// slow one has advanced by 1/rho of the fast one's remaining time when the
/// fast one fires again:
///
///     x = f(rho (1 - f((1 - x) / rho)))
///
/// Firings alternate while the fast oscillator never reaches threshold before
/// the slow one fires, i.e. rho (1 - x) < 1 along the orbit.
template <InteractionFamily F>
LimitCycleProbe limit_cycle_phase(const F& f, double rho)
{
    if (!std::isfinite(rho) || rho < 1.0)
        fail(ErrorKind::invalid_argument, "frequency ratio must be >= 1");
    LimitCycleProbe probe;
    probe.rho = rho;
    double x = 0.5;
    for (std::size_t i = 0; i < limit_cycle_max_steps; ++i) {
        double fast = rho * (1.0 - x);
        if (!(fast < 1.0)) {
            probe.x_star = x;
            return probe;
        }
        double slow = (1.0 - apply(f, fast)) / rho;
        if (!(slow < 1.0)) {
            probe.x_star = x;
            return probe;
        }
        double next = apply(f, slow);
        if (std::abs(next - x) < limit_cycle_tolerance) {
            probe.x_star = next;
            probe.alternating = rho * (1.0 - next) < 1.0;
            return probe;
        }
        x = next;
    }
    std::ostringstream os;
    os << "limit cycle iteration did not converge at rho = " << rho;
    fail(ErrorKind::solver, os.str());
}

struct CriticalRatio {
    double rho_c = 1.0;
    std::vector<LimitCycleProbe> probes;  // sorted by rho
};

/// Largest frequency ratio for which the two-oscillator limit cycle stays in
/// the non-overtaking region, found by bisection to within tolerance.
template <InteractionFamily F>
CriticalRatio critical_ratio(const F& f, double tolerance)
{
    if (!std::isfinite(tolerance) || tolerance <= 0.0)
        fail(ErrorKind::invalid_argument, "tolerance must be positive");
    CriticalRatio out;
    auto probe = [&](double rho) {
        LimitCycleProbe p;
        try {
            p = limit_cycle_phase(f, rho);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::solver)
                throw;
            p.rho = rho;
            p.solver_failed = true;
        }
        out.probes.push_back(p);
        return p.alternating;
    };

    if (!probe(1.0))
        fail(ErrorKind::solver, "no alternating limit cycle even for identical frequencies");
    double lo = 1.0, hi = 1.5;
    while (probe(hi)) {
        lo = hi;
        hi = 1.0 + 2.0 * (hi - 1.0);
        if (hi > 64.0)
            fail(ErrorKind::solver, "alternation persists beyond rho = 64");
    }
    while (hi - lo > tolerance) {
        double mid = 0.5 * (lo + hi);
        (probe(mid) ? lo : hi) = mid;
    }
    out.rho_c = 0.5 * (lo + hi);
    std::sort(out.probes.begin(), out.probes.end(),
              [](const auto& a, const auto& b) { return a.rho < b.rho; });
    return out;
}

}  // namespace desync
