#pragma once

#include <cmath>

#include "desync/error.hpp"

namespace desync {

/// Reduce any real to its representative in [0,1).
inline double wrap_unit(double x) noexcept
{
    double r = x - std::floor(x);
    // floor can leave r == 1.0 for tiny negative x
    return r >= 1.0 ? 0.0 : r;
}

/// Reduce a difference to (-0.5, 0.5].
inline double wrap_signed(double x) noexcept
{
    double r = wrap_unit(x);
    return r > 0.5 ? r - 1.0 : r;
}

/// Shortest arc between two points of the unit circle, in [0, 0.5].
inline double circular_distance(double a, double b) noexcept
{
    double d = wrap_unit(a - b);
    return d < 1.0 - d ? d : 1.0 - d;
}

/// A point on the unit circle, stored in [0,1).
class Phase {
public:
    constexpr Phase() = default;

    explicit Phase(double value)
    {
        if (!std::isfinite(value))
            fail(ErrorKind::invalid_argument, "phase must be finite");
        value_ = wrap_unit(value);
    }

    double value() const noexcept { return value_; }

    Phase operator+(double delta) const { return Phase(value_ + delta); }
    Phase operator-(double delta) const { return Phase(value_ - delta); }

    friend bool operator==(const Phase&, const Phase&) = default;

private:
    double value_ = 0.0;
};

}  // namespace desync
