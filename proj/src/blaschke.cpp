#include "innerlab/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace innerlab {

namespace {

std::complex<double> unit_normalize(std::complex<double> tau, const char* what) {
    double m = std::abs(tau);
    if (std::fabs(m - 1.0) > 1e-9)
        throw ConstructionError(std::string(what) + ": rotation factor must be unimodular");
    return tau / m;
}

}  // namespace

MobiusAutomorphism::MobiusAutomorphism(std::complex<double> a, std::complex<double> tau)
    : a_(a), tau_(unit_normalize(tau, "MobiusAutomorphism")) {
    if (std::abs(a_) > 1.0 - kZeroGuard)
        throw ConstructionError("MobiusAutomorphism: |a| too close to 1");
}

MobiusAutomorphism MobiusAutomorphism::compose(const MobiusAutomorphism& inner) const {
    // this(inner(z)) rearranged back into tau (z + a) / (1 + conj(a) z) form.
    std::complex<double> A = inner.tau_ + a_ * std::conj(inner.a_);
    std::complex<double> B = inner.tau_ * inner.a_ + a_;
    std::complex<double> a = B / A;
    std::complex<double> tau = tau_ * std::conj(inner.tau_) * A / std::conj(A);
    return {a, tau / std::abs(tau)};
}

FiniteBlaschke::FiniteBlaschke(std::complex<double> tau,
                               std::vector<std::complex<double>> zeros)
    : tau_(unit_normalize(tau, "FiniteBlaschke")), zeros_(std::move(zeros)) {
    if (zeros_.empty())
        throw ConstructionError("FiniteBlaschke: degree must be at least 1");
    for (const auto& a : zeros_) {
        if (std::abs(a) > 1.0 - kZeroGuard)
            throw ConstructionError("FiniteBlaschke: zero too close to the unit circle");
    }
}

bool FiniteBlaschke::is_centered() const {
    for (const auto& a : zeros_)
        if (std::abs(a) <= 1e-14) return true;
    return false;
}

std::complex<double> FiniteBlaschke::eval(std::complex<double> z) const {
    std::complex<double> w = tau_;
    for (const auto& a : zeros_) w *= (z - a) / (1.0 - std::conj(a) * z);
    return w;
}

std::complex<double> FiniteBlaschke::derivative(std::complex<double> z) const {
    // Product rule, summed term by term so zeros of the product are handled
    // exactly: d/dz B_j = (1 - |a_j|^2) / (1 - conj(a_j) z)^2.
    std::complex<double> total = 0.0;
    for (std::size_t j = 0; j < zeros_.size(); ++j) {
        std::complex<double> den = 1.0 - std::conj(zeros_[j]) * z;
        std::complex<double> term = (1.0 - std::norm(zeros_[j])) / (den * den);
        for (std::size_t k = 0; k < zeros_.size(); ++k) {
            if (k == j) continue;
            term *= (z - zeros_[k]) / (1.0 - std::conj(zeros_[k]) * z);
        }
        total += term;
    }
    return tau_ * total;
}

Angle FiniteBlaschke::boundary_map(Angle theta) const {
    return Angle::of_point(eval(theta.to_point()));
}

double FiniteBlaschke::boundary_derivative(double theta) const {
    std::complex<double> w = std::polar(1.0, theta);
    double total = 0.0;
    for (const auto& a : zeros_) total += (1.0 - std::norm(a)) / std::norm(w - a);
    return total;
}

double FiniteBlaschke::boundary_derivative(Angle theta) const {
    return boundary_derivative(theta.value);
}

double FiniteBlaschke::lift(double t) const {
    // Each factor satisfies arg B_a(e^{it}) = t - 2 arg(1 - conj(a) e^{it});
    // the argument on the right stays in (-pi/2, pi/2) because
    // |conj(a) e^{it}| < 1, so the principal branch is already continuous.
    std::complex<double> w = std::polar(1.0, t);
    double s = std::arg(tau_) + static_cast<double>(zeros_.size()) * t;
    for (const auto& a : zeros_) {
        std::complex<double> den = 1.0 - std::conj(a) * w;
        s -= 2.0 * std::atan2(den.imag(), den.real());
    }
    return s;
}

double FiniteBlaschke::lift_inverse(double target) const {
    const double d = static_cast<double>(degree());
    const double period = kTwoPi * d;
    const double l0 = lift(0.0);

    double m = std::floor((target - l0) / period);
    double t0 = target - period * m;  // in [l0, l0 + period)
    if (t0 < l0) {
        t0 += period;
        m -= 1.0;
    }
    if (t0 >= l0 + period) {
        t0 -= period;
        m += 1.0;
    }

    // Newton with a guaranteed bracket: the lift is strictly increasing with
    // lift(0) = l0 <= t0 < l0 + period = lift(2*pi). Newton converges
    // one-sidedly for convex stretches, so termination is on the step size,
    // with bisection whenever Newton leaves the bracket.
    double lo = 0.0, hi = kTwoPi;
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        double fx = lift(x) - t0;
        if (fx > 0.0)
            hi = x;
        else
            lo = x;
        double dx = fx / boundary_derivative(x);
        double xn = x - dx;
        if (std::fabs(dx) <= 5e-14 || hi - lo <= 5e-14)
            return std::clamp(xn, 0.0, kTwoPi) + kTwoPi * m;
        x = (xn > lo && xn < hi) ? xn : 0.5 * (lo + hi);
    }
    std::ostringstream msg;
    msg << "lift_inverse failed to converge: target=" << target << " bracket=[" << lo
        << "," << hi << "]";
    throw RootFindError(msg.str());
}

ArcUnion FiniteBlaschke::arc_preimage(const Arc& arc) const {
    if (arc.is_full()) return ArcUnion::full_circle();

    const double d = static_cast<double>(degree());
    const double alpha = arc.left().value;
    const double beta = alpha + arc.length();
    const double l0 = lift(0.0);
    const double l1 = l0 + kTwoPi * d;

    // Sweep the lift copies of [alpha, beta] that meet [l0, l1]; each yields
    // one preimage interval. A copy truncated at the period ends produces two
    // pieces that touch at theta = 0 and re-merge in the union.
    std::vector<Arc> pieces;
    long long kmin = static_cast<long long>(std::ceil((l0 - beta) / kTwoPi)) - 1;
    long long kmax = static_cast<long long>(std::floor((l1 - alpha) / kTwoPi)) + 1;
    for (long long k = kmin; k <= kmax; ++k) {
        double lo_t = std::max(alpha + kTwoPi * static_cast<double>(k), l0);
        double hi_t = std::min(beta + kTwoPi * static_cast<double>(k), l1);
        if (hi_t < lo_t) continue;
        double x1 = lift_inverse(lo_t);
        double x2 = lift_inverse(hi_t);
        if (x2 < x1) std::swap(x1, x2);
        pieces.emplace_back(Angle(0.5 * (x1 + x2)), 0.5 * (x2 - x1));
    }
    return ArcUnion(std::move(pieces));
}

FiniteBlaschke to_blaschke(const MobiusAutomorphism& m) {
    // tau (z + a) / (1 + conj(a) z) is the Blaschke factor with zero -a.
    return {m.tau(), {-m.a()}};
}

namespace {

using Poly = std::vector<std::complex<double>>;  // coefficients, low to high

Poly poly_mul(const Poly& p, const Poly& q) {
    Poly out(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    return out;
}

std::complex<double> poly_eval(const Poly& p, std::complex<double> z) {
    std::complex<double> v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * z + p[i];
    return v;
}

// Durand-Kerner with Newton polishing. The polynomials here come from
// solving B(z) = w with |w| < 1, so all roots lie strictly inside the disk
// and are well separated from the unit circle.
std::vector<std::complex<double>> poly_roots(Poly p) {
    int n = static_cast<int>(p.size()) - 1;
    std::complex<double> lead = p.back();
    for (auto& c : p) c /= lead;

    std::vector<std::complex<double>> r(n);
    for (int i = 0; i < n; ++i)
        r[i] = std::polar(0.7, 0.4 + kTwoPi * static_cast<double>(i) / n);

    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> num = poly_eval(p, r[i]);
            std::complex<double> den = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) den *= r[i] - r[j];
            std::complex<double> step = num / den;
            r[i] -= step;
            worst = std::max(worst, std::abs(step));
        }
        if (worst < 1e-14) break;
        if (iter == 499)
            throw RootFindError("poly_roots: Durand-Kerner failed to converge");
    }
    return r;
}

}  // namespace

FiniteBlaschke compose(const FiniteBlaschke& outer, const FiniteBlaschke& inner) {
    long long deg = static_cast<long long>(outer.degree()) * inner.degree();
    if (deg > 64)
        throw BudgetExceeded("compose: expanded degree above 64; evaluate as a chain");

    // Zeros of outer(inner(z)): solutions of inner(z) = a for each zero a of
    // outer. inner(z) = a is the polynomial tau prod(z - b_i) = a prod(1 - conj(b_i) z).
    Poly p{inner.tau()};
    Poly q{1.0};
    for (const auto& b : inner.zeros()) {
        p = poly_mul(p, Poly{-b, 1.0});
        q = poly_mul(q, Poly{1.0, -std::conj(b)});
    }

    std::vector<std::complex<double>> zeros;
    zeros.reserve(static_cast<std::size_t>(deg));
    for (const auto& a : outer.zeros()) {
        Poly poly(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) poly[i] = p[i] - a * q[i];
        for (auto root : poly_roots(poly)) {
            if (std::abs(inner.eval(root) - a) > 1e-9)
                throw RootFindError("compose: inaccurate root of inner(z) = a");
            zeros.push_back(root);
        }
    }

    // Fix the rotation factor by matching values at a boundary point.
    std::complex<double> z0 = std::polar(1.0, 0.7321);
    std::complex<double> want = outer.eval(inner.eval(z0));
    std::complex<double> have = 1.0;
    for (const auto& c : zeros) have *= (z0 - c) / (1.0 - std::conj(c) * z0);
    std::complex<double> tau = want / have;
    return {tau / std::abs(tau), std::move(zeros)};
}

}  // namespace innerlab
