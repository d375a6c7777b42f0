#pragma once

#include <complex>
#include <vector>

#include "innerlab/angle.hpp"
#include "innerlab/arc.hpp"
#include "innerlab/common.hpp"
#include "innerlab/mobius.hpp"

namespace innerlab {

/// A finite Blaschke product tau * prod_k (z - a_k) / (1 - conj(a_k) z) with
/// |tau| = 1 and zeros a_k strictly inside the disk. These are exactly the
/// rational inner functions; the boundary restriction is an analytic,
/// orientation-preserving degree-d circle map.
class FiniteBlaschke {
  public:
    FiniteBlaschke(std::complex<double> tau, std::vector<std::complex<double>> zeros);

    static FiniteBlaschke rotation(double phi) {
        return {std::polar(1.0, phi), {std::complex<double>(0.0)}};
    }
    static FiniteBlaschke factor(std::complex<double> zero) {
        return {1.0, {zero}};
    }
    /// z * (z + lambda) / (1 + lambda z): the centred degree-2 family with
    /// derivative lambda at 0, for lambda in (0, 1).
    static FiniteBlaschke centered_degree2(double lambda) {
        return {1.0, {std::complex<double>(0.0), std::complex<double>(-lambda)}};
    }

    int degree() const { return static_cast<int>(zeros_.size()); }
    std::complex<double> tau() const { return tau_; }
    const std::vector<std::complex<double>>& zeros() const { return zeros_; }
    bool is_centered() const;

    std::complex<double> eval(std::complex<double> z) const;
    std::complex<double> derivative(std::complex<double> z) const;

    /// arg(eval(e^{i theta})) reduced to [0, 2*pi).
    Angle boundary_map(Angle theta) const;

    /// d/dtheta of the boundary circle map: the Poisson-kernel sum
    /// sum_k (1 - |a_k|^2) / |e^{i theta} - a_k|^2, strictly positive.
    double boundary_derivative(Angle theta) const;
    double boundary_derivative(double theta) const;

    /// Continuous strictly increasing lift of the boundary map on the real
    /// line: lift(t + 2*pi) = lift(t) + 2*pi*degree, and
    /// boundary_map(t) = lift(t) mod 2*pi.
    double lift(double t) const;

    /// Inverts the lift by bracketed bisection-then-Newton; accurate to
    /// ~1e-12 in angle. Throws RootFindError on non-convergence.
    double lift_inverse(double target) const;

    /// Exact full boundary preimage of a closed arc: degree() arcs, merged
    /// where they touch.
    ArcUnion arc_preimage(const Arc& arc) const;

  private:
    std::complex<double> tau_;
    std::vector<std::complex<double>> zeros_;
};

FiniteBlaschke to_blaschke(const MobiusAutomorphism& m);

/// outer o inner multiplied out into a single Blaschke product of degree
/// deg(outer) * deg(inner). Refuses degrees above 64; composition chains
/// should be used instead at that size (see MapChain).
FiniteBlaschke compose(const FiniteBlaschke& outer, const FiniteBlaschke& inner);

}  // namespace innerlab
