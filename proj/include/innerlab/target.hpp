#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "innerlab/arc.hpp"
#include "innerlab/sequence.hpp"

namespace innerlab {

using RealSequenceFn = std::function<double(std::int64_t)>;

/// Thread-safe memoized prefix sums of a pure index function (1-based).
class PrefixCache {
  public:
    explicit PrefixCache(RealSequenceFn f) : f_(std::move(f)) {}
    /// sum_{n=1..N} f(n); N = 0 gives 0.
    double sum(std::int64_t N) const;
    double term(std::int64_t n) const { return f_(n); }

  private:
    RealSequenceFn f_;
    mutable std::mutex mu_;
    mutable std::vector<double> partial_;  // partial_[i] = sum of first i+1 terms
};

/// A deterministic generator of target arcs I_n, n >= 1, with cached prefix
/// sums of |I_n|. Length trends are reported from finite evidence only.
class TargetSequence {
  public:
    using ArcGenerator = std::function<Arc(std::int64_t)>;

    TargetSequence() = default;
    explicit TargetSequence(ArcGenerator gen, std::string name = "");

    bool valid() const { return static_cast<bool>(gen_); }
    Arc at(std::int64_t n) const;
    double length_at(std::int64_t n) const { return at(n).length(); }

    /// Prefix sum of arc lengths, sum_{n<=N} |I_n| (radians).
    double length_sum(std::int64_t N) const;
    /// phi(N) = sum_{n<=N} |I_n| / 2*pi, the normalized predicted hit count.
    double phi(std::int64_t N) const { return length_sum(N) / kTwoPi; }

    const std::string& name() const { return name_; }

  private:
    ArcGenerator gen_;
    std::shared_ptr<PrefixCache> lengths_;
    std::string name_;
};

struct SystemMetadata {
    std::string name;
    std::string verdict;  // declared expectation: hits-a.e. / fails-a.e. / split / ...
    std::string claim;    // the statement the system exercises, in plain words
};

/// A paired map sequence and target: the hit test at step n compares F_n
/// against I_n. mu gives 1 - |f_n'(0)|-style contraction data when the
/// construction defines it.
struct ExampleSystem {
    InnerMapSequence maps;
    std::optional<TargetSequence> target;
    SystemMetadata meta;
    RealSequenceFn mu;  // may be empty

    const TargetSequence& target_or_throw() const {
        if (!target) throw DomainError(meta.name + ": system has no target");
        return *target;
    }
};

/// Arcs centred at a common point with prescribed lengths (radians).
TargetSequence nested_target(Angle center, RealSequenceFn lengths, std::string name = "");

/// Default concrete parameter family mu_n = l_n = min(1/2, 1/(sqrt(n) ln(n+1))):
/// divergent sums with summable product.
double default_family_term(std::int64_t n);

/// Tail bound epsilon_N = 2 sum_{n>=N} mu_n l_n + l_N for the measure of the
/// late hitting set, evaluated as an exact partial sum up to `horizon` plus
/// the supplied analytic bound on the remainder past the horizon.
double epsilon_bound(const RealSequenceFn& mu, const RealSequenceFn& lengths,
                     std::int64_t N, std::int64_t horizon, double tail_past_horizon);
/// epsilon_N for the default family, summed exactly to 1e7 with integral
/// tail bound 1/ln(1e7) past the horizon.
double default_family_epsilon(std::int64_t N);

// Flat enumeration n = m(m-1)/2 + 1 + k of the pairs (m, k), 0 <= k < m.
struct RotationIndex {
    std::int64_t m;
    std::int64_t k;
};
RotationIndex rotation_index(std::int64_t n);
std::int64_t rotation_flat_index(std::int64_t m, std::int64_t k);

/// Rotation system splitting the circle: F_n = R_{m,k}: z -> e^{i pi (k+1)/m} z
/// with targets I_n = {e^{i t}: pi <= t <= pi + pi/m}. Upper-half points hit
/// at every stage m, lower-half open points never hit, so the hitting set
/// has measure exactly half: the full-or-null dichotomy fails without
/// contraction.
ExampleSystem ex_rotations(std::int64_t max_stage);

/// Centred degree-2 maps b_n(z) = z (z + lambda_n) / (1 + lambda_n z) with
/// lambda_n = 1 - mu_n, against nested arcs centred at 1 with lengths l_n.
/// Requires 0 < mu_n <= 1/2, 0 < l_n <= 1/2, l_n non-increasing. With
/// sum mu_n l_n < infinity the target is almost never hit even though
/// sum l_n may diverge.
ExampleSystem ex_nested_blaschke(RealSequenceFn mu, RealSequenceFn lengths);

/// The greedy length construction: given mu decreasing to 0 with divergent
/// sum, returns cut points n_k (suffix-maximal mu, strictly increasing gaps,
/// sum mu_{n_k} below the cap) and l_n = 1/(n_{k+1} - n_k) on
/// [n_k, n_{k+1}), a non-increasing sequence whose block sums are exactly 1.
struct LengthsFromMu {
    std::vector<std::int64_t> ns;   // n_0 = 1, n_1, .., n_K (complete blocks)
    std::vector<double> lengths;    // l_1 .. l_{n_K - 1}
};
LengthsFromMu ex_lengths_from_mu(const RealSequenceFn& mu, std::int64_t horizon,
                                 double cap = 1.0);

/// The parameter a = cos(l/2) / (1 + sin(l/2)) of the involution
/// M(z) = (a - z)/(1 - a z), which maps the arc centred at 1 of length l
/// onto the left half-circle {e^{i t}: pi/2 <= t <= 3 pi/2} and sends 0 to
/// the real point a in [0, 1). Requires 0 < l <= pi.
double mobius_for_arc(double l);
MobiusAutomorphism arc_involution(double a);

/// Conjugated system f_n = M_n o b_n o M_{n-1}^{-1} (kept as chains) against
/// the fixed left half-circle: F_n(0) = a_n is real positive and increases
/// to 1, the interior orbit escapes while the distortions still satisfy
/// lambda_n = 1 - mu_n.
ExampleSystem ex_conjugated(RealSequenceFn mu, RealSequenceFn lengths);

/// Same composition driven by the rescaled arcs of length l_n / t_n with
/// t_n = sum_{k<=n} l_k: the interior orbit still escapes to 1, and almost
/// every boundary orbit follows it (full-measure Denjoy-Wolff set).
ExampleSystem ex_rescaled(RealSequenceFn mu, RealSequenceFn lengths);

/// Autonomous iteration of f(z) = ((z + 1/3)/(1 + z/3))^2, an inner function
/// with parabolic boundary fixed point 1: 1 - f^n(0) decays like n^{-1/2}
/// and mu_n like 1/n. No target; used for orbit asymptotics.
ExampleSystem ex_parabolic();

}  // namespace innerlab
