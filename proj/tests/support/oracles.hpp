#pragma once

// Independent numerical oracles used only by tests: quadrature against the
// Poisson kernel, a rasterized circle-set oracle, and finite differences.
// Nothing here may call the implementation paths it is checking.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "innerlab/arc.hpp"

namespace innerlab::testing {

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps, double fa, double fm, double fb, double whole,
                               int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, m, fa, flm, fm);
    double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, eps / 2.0, fa, flm, fm, left, depth - 1) +
           adaptive_simpson(f, m, b, eps / 2.0, fm, frm, fb, right, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-13) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = simpson(f, a, b, fa, fm, fb);
    return adaptive_simpson(f, a, b, eps, fa, fm, fb, whole, 40);
}

// Poisson-kernel harmonic measure of an arc from z, by quadrature.
inline double harmonic_measure_quadrature(std::complex<double> z, const Arc& arc) {
    auto kernel = [z](double t) {
        std::complex<double> w = std::polar(1.0, t);
        return (1.0 - std::norm(z)) / std::norm(w - z) / kTwoPi;
    };
    double a = arc.left().value;
    return integrate(kernel, a, a + arc.length());
}

// Circle discretized into `cells` buckets; membership decided at the cell
// center. Measures of set operations are cell counts times the cell length.
class RasterCircle {
  public:
    explicit RasterCircle(std::size_t cells) : cells_(cells) {}

    std::vector<bool> rasterize(const ArcUnion& u) const {
        std::vector<bool> bits(cells_, false);
        for (std::size_t i = 0; i < cells_; ++i)
            bits[i] = u.contains(Angle(center_of(i)));
        return bits;
    }

    double measure(const std::vector<bool>& bits) const {
        std::size_t count = 0;
        for (bool b : bits) count += b ? 1 : 0;
        return static_cast<double>(count) * kTwoPi / static_cast<double>(cells_);
    }

    double cell_length() const { return kTwoPi / static_cast<double>(cells_); }

    static std::vector<bool> unite(const std::vector<bool>& a, const std::vector<bool>& b) {
        std::vector<bool> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
        return out;
    }
    static std::vector<bool> intersect(const std::vector<bool>& a,
                                       const std::vector<bool>& b) {
        std::vector<bool> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
        return out;
    }
    static std::vector<bool> complement(const std::vector<bool>& a) {
        std::vector<bool> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = !a[i];
        return out;
    }

  private:
    double center_of(std::size_t i) const {
        return (static_cast<double>(i) + 0.5) * kTwoPi / static_cast<double>(cells_);
    }
    std::size_t cells_;
};

// Central finite difference for boundary-map derivatives.
inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Deterministic test randomness.
inline std::mt19937_64 test_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::complex<double> random_disk_point(std::mt19937_64& rng, double max_radius) {
    double r = std::sqrt(uniform(rng, 0.0, 1.0)) * max_radius;
    double t = uniform(rng, 0.0, kTwoPi);
    return std::polar(r, t);
}

}  // namespace innerlab::testing

#include "innerlab/blaschke.hpp"

namespace innerlab::testing {

inline FiniteBlaschke random_blaschke(std::mt19937_64& rng, int max_degree,
                                      double max_radius = 0.8, bool centered = false) {
    int degree = 1 + static_cast<int>(uniform(rng, 0.0, static_cast<double>(max_degree)));
    if (degree > max_degree) degree = max_degree;
    std::vector<std::complex<double>> zeros;
    if (centered) zeros.emplace_back(0.0);
    while (static_cast<int>(zeros.size()) < degree)
        zeros.push_back(random_disk_point(rng, max_radius));
    return {std::polar(1.0, uniform(rng, 0.0, kTwoPi)), std::move(zeros)};
}

// Hyperbolic distortion by central differences of the map itself, never via
// the derivative formula under test.
inline double distortion_by_differences(const std::function<std::complex<double>(std::complex<double>)>& f,
                                        std::complex<double> z, double h = 1e-6) {
    std::complex<double> fz = f(z);
    std::complex<double> df = (f(z + h) - f(z - h)) / (2.0 * h);
    return (1.0 - std::norm(z)) * std::abs(df) / (1.0 - std::norm(fz));
}

}  // namespace innerlab::testing
