#pragma once

#include <complex>

#include "innerlab/angle.hpp"
#include "innerlab/common.hpp"

namespace innerlab {

/// Disk automorphism z -> tau * (z + a) / (1 + conj(a) z) with |a| < 1 and
/// |tau| = 1. Maps the disk onto itself and the circle onto the circle;
/// apply(0) = tau * a.
class MobiusAutomorphism {
  public:
    MobiusAutomorphism() : a_(0.0), tau_(1.0) {}  // identity
    MobiusAutomorphism(std::complex<double> a, std::complex<double> tau);

    static MobiusAutomorphism identity() { return {}; }
    static MobiusAutomorphism rotation(double phi) {
        return {0.0, std::polar(1.0, phi)};
    }
    /// The map z -> (z + w) / (1 + conj(w) z), sending 0 to w.
    static MobiusAutomorphism translation_to(std::complex<double> w) {
        return {w, 1.0};
    }

    std::complex<double> a() const { return a_; }
    std::complex<double> tau() const { return tau_; }
    bool is_rotation() const { return std::abs(a_) == 0.0; }

    std::complex<double> apply(std::complex<double> z) const {
        return tau_ * (z + a_) / (1.0 + std::conj(a_) * z);
    }
    std::complex<double> derivative(std::complex<double> z) const {
        std::complex<double> den = 1.0 + std::conj(a_) * z;
        return tau_ * (1.0 - std::norm(a_)) / (den * den);
    }
    Angle apply_boundary(Angle t) const {
        return Angle::of_point(apply(t.to_point()));
    }

    MobiusAutomorphism inverse() const {
        return {-a_ * tau_, std::conj(tau_)};
    }

    /// this o inner, as a single automorphism.
    MobiusAutomorphism compose(const MobiusAutomorphism& inner) const;

  private:
    std::complex<double> a_;
    std::complex<double> tau_;
};

}  // namespace innerlab
