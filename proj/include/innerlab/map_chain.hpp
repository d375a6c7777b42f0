#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "innerlab/blaschke.hpp"

namespace innerlab {

/// A composition of finite Blaschke products, applied first-to-last and
/// never multiplied out: the expanded degree grows multiplicatively while
/// chained evaluation stays O(length) per point and numerically stable.
class MapChain {
  public:
    MapChain() = default;  // identity
    explicit MapChain(FiniteBlaschke f) : factors_{std::move(f)} {}
    explicit MapChain(std::vector<FiniteBlaschke> factors)
        : factors_(std::move(factors)) {}

    const std::vector<FiniteBlaschke>& factors() const { return factors_; }
    bool is_identity() const { return factors_.empty(); }

    /// Topological degree of the boundary map (product over factors).
    double degree() const {
        double d = 1.0;
        for (const auto& f : factors_) d *= f.degree();
        return d;
    }

    bool all_factors_centered() const {
        for (const auto& f : factors_)
            if (!f.is_centered()) return false;
        return true;
    }

    std::complex<double> eval(std::complex<double> z) const {
        for (const auto& f : factors_) z = f.eval(z);
        return z;
    }

    /// Chain-rule derivative at z.
    std::complex<double> derivative(std::complex<double> z) const {
        std::complex<double> d = 1.0;
        for (const auto& f : factors_) {
            d *= f.derivative(z);
            z = f.eval(z);
        }
        return d;
    }

    Angle boundary_map(Angle t) const {
        for (const auto& f : factors_) t = f.boundary_map(t);
        return t;
    }

    /// One boundary step on the unit-circle carrier: evaluates the chain at
    /// a unimodular w and renormalizes to the circle. The hot path of orbit
    /// statistics.
    std::complex<double> boundary_step(std::complex<double> w) const {
        for (const auto& f : factors_) w = f.eval(w);
        return w / std::abs(w);
    }

    double boundary_derivative(Angle t) const {
        double d = 1.0;
        for (const auto& f : factors_) {
            d *= f.boundary_derivative(t);
            t = f.boundary_map(t);
        }
        return d;
    }

    /// Full boundary preimage of a union of arcs, pulled back factor by
    /// factor in reverse order. Throws BudgetExceeded once the intermediate
    /// arc count would pass arc_budget.
    ArcUnion preimage(const ArcUnion& target, std::size_t arc_budget) const;

    /// Hyperbolic distortion of this map at z:
    /// rho(F(z)) |F'(z)| / rho(z) with rho(z) = 2 / (1 - |z|^2).
    double hyperbolic_distortion(std::complex<double> z) const {
        std::complex<double> w = eval(z);
        return (1.0 - std::norm(z)) * std::abs(derivative(z)) / (1.0 - std::norm(w));
    }

    /// Concatenation: first this chain, then next.
    MapChain then(const MapChain& next) const {
        std::vector<FiniteBlaschke> fs = factors_;
        fs.insert(fs.end(), next.factors_.begin(), next.factors_.end());
        return MapChain(std::move(fs));
    }

  private:
    std::vector<FiniteBlaschke> factors_;
};

}  // namespace innerlab
