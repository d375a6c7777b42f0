#pragma once

#include <cmath>
#include <complex>

#include "innerlab/common.hpp"

namespace innerlab {

/// An angle in radians, canonically reduced to [0, 2*pi).
struct Angle {
    double value = 0.0;

    Angle() = default;
    explicit Angle(double radians) : value(reduce(radians)) {}

    static double reduce(double t) {
        t = std::fmod(t, kTwoPi);
        if (t < 0.0) t += kTwoPi;
        if (t >= kTwoPi) t -= kTwoPi;  // fmod/rounding can land exactly on 2*pi
        if (t < 0.0) t = 0.0;
        return t;
    }

    Angle operator+(Angle o) const { return Angle(value + o.value); }
    Angle operator-(Angle o) const { return Angle(value - o.value); }
    Angle operator+(double r) const { return Angle(value + r); }
    Angle operator-(double r) const { return Angle(value - r); }

    /// Wraparound-correct angular distance, in [0, pi].
    double distance_to(Angle o) const {
        double d = std::fabs(value - o.value);
        if (d > kTwoPi) d = std::fmod(d, kTwoPi);
        return d <= kPi ? d : kTwoPi - d;
    }

    std::complex<double> to_point() const {
        return {std::cos(value), std::sin(value)};
    }

    static Angle of_point(std::complex<double> z) {
        return Angle(std::arg(z));
    }
};

}  // namespace innerlab
