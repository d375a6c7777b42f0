#include "innerlab/target.hpp"

#include <cmath>
#include <sstream>

namespace innerlab {

double PrefixCache::sum(std::int64_t N) const {
    if (N <= 0) return 0.0;
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<std::int64_t>(partial_.size()) < N) {
        std::int64_t n = static_cast<std::int64_t>(partial_.size()) + 1;
        double prev = partial_.empty() ? 0.0 : partial_.back();
        partial_.push_back(prev + f_(n));
    }
    return partial_[static_cast<std::size_t>(N - 1)];
}

TargetSequence::TargetSequence(ArcGenerator gen, std::string name)
    : gen_(std::move(gen)), name_(std::move(name)) {
    ArcGenerator g = gen_;
    lengths_ = std::make_shared<PrefixCache>(
        [g](std::int64_t n) { return g(n).length(); });
}

Arc TargetSequence::at(std::int64_t n) const {
    if (n < 1) throw DomainError("TargetSequence: indices start at 1");
    return gen_(n);
}

double TargetSequence::length_sum(std::int64_t N) const { return lengths_->sum(N); }

TargetSequence nested_target(Angle center, RealSequenceFn lengths, std::string name) {
    return TargetSequence(
        [center, lengths = std::move(lengths)](std::int64_t n) {
            double l = lengths(n);
            if (!(l > 0.0))
                throw ConstructionError("nested_target: lengths must be positive");
            if (l > kTwoPi + kAngleTol)
                throw ConstructionError("nested_target: length exceeds the full circle");
            return Arc(center, 0.5 * std::min(l, kTwoPi));
        },
        std::move(name));
}

double default_family_term(std::int64_t n) {
    double x = static_cast<double>(n);
    return std::min(0.5, 1.0 / (std::sqrt(x) * std::log(x + 1.0)));
}

double epsilon_bound(const RealSequenceFn& mu, const RealSequenceFn& lengths,
                     std::int64_t N, std::int64_t horizon, double tail_past_horizon) {
    if (N < 1 || horizon < N) throw DomainError("epsilon_bound: need 1 <= N <= horizon");
    double s = 0.0;
    for (std::int64_t n = N; n <= horizon; ++n) s += mu(n) * lengths(n);
    return 2.0 * (s + tail_past_horizon) + lengths(N);
}

double default_family_epsilon(std::int64_t N) {
    const std::int64_t horizon = 10'000'000;
    // Past the horizon mu_n l_n = 1/(n ln^2(n+1)) is bounded by the integral
    // of 1/(x ln^2 x), whose tail from H is 1/ln(H).
    double tail = 1.0 / std::log(static_cast<double>(horizon));
    return epsilon_bound(default_family_term, default_family_term, N, horizon, tail);
}

RotationIndex rotation_index(std::int64_t n) {
    if (n < 1) throw DomainError("rotation_index: indices start at 1");
    double approx = (1.0 + std::sqrt(8.0 * static_cast<double>(n) - 7.0)) / 2.0;
    std::int64_t m = static_cast<std::int64_t>(approx);
    while (m > 1 && m * (m - 1) / 2 + 1 > n) --m;
    while (m * (m + 1) / 2 < n) ++m;
    return {m, n - 1 - m * (m - 1) / 2};
}

std::int64_t rotation_flat_index(std::int64_t m, std::int64_t k) {
    if (m < 1 || k < 0 || k >= m) throw DomainError("rotation_flat_index: need 0 <= k < m");
    return m * (m - 1) / 2 + 1 + k;
}

namespace {

double rotation_total_angle(std::int64_t n) {
    RotationIndex idx = rotation_index(n);
    return kPi * static_cast<double>(idx.k + 1) / static_cast<double>(idx.m);
}

}  // namespace

ExampleSystem ex_rotations(std::int64_t max_stage) {
    if (max_stage < 1) throw ConstructionError("ex_rotations: need at least one stage");
    std::int64_t max_n = max_stage * (max_stage + 1) / 2;

    InnerMapSequence maps(
        [max_n](std::int64_t n) -> MapChain {
            if (n > max_n) throw DomainError("ex_rotations: index beyond configured stage");
            double cur = rotation_total_angle(n);
            double prev = (n > 1) ? rotation_total_angle(n - 1) : 0.0;
            return MapChain(FiniteBlaschke::rotation(cur - prev));
        },
        "rotation-split");

    TargetSequence target(
        [max_n](std::int64_t n) -> Arc {
            if (n > max_n) throw DomainError("ex_rotations: index beyond configured stage");
            std::int64_t m = rotation_index(n).m;
            double half = kPi / (2.0 * static_cast<double>(m));
            return Arc(Angle(kPi + half), half);
        },
        "rotation-split");

    return {std::move(maps), std::move(target),
            {"ex-rotations", "split",
             "without contraction the hitting set can have measure 1/2: every point of "
             "the closed upper half-circle hits at each stage, no open lower-half point "
             "ever does"},
            nullptr};
}

namespace {

void check_nested_inputs(const RealSequenceFn& mu, const RealSequenceFn& lengths,
                         std::int64_t n) {
    double m = mu(n);
    if (!(m > 0.0) || m > 0.5)
        throw ConstructionError("nested system: mu_n must lie in (0, 1/2]");
    double l = lengths(n);
    if (!(l > 0.0) || l > 0.5)
        throw ConstructionError("nested system: length_n must lie in (0, 1/2]");
    if (n > 1 && l > lengths(n - 1) + kAngleTol)
        throw ConstructionError("nested system: lengths must be non-increasing");
}

}  // namespace

ExampleSystem ex_nested_blaschke(RealSequenceFn mu, RealSequenceFn lengths) {
    check_nested_inputs(mu, lengths, 1);
    InnerMapSequence maps(
        [mu, lengths](std::int64_t n) -> MapChain {
            check_nested_inputs(mu, lengths, n);
            return MapChain(FiniteBlaschke::centered_degree2(1.0 - mu(n)));
        },
        "nested-blaschke");
    TargetSequence target = nested_target(Angle(0.0), lengths, "nested-blaschke");
    return {std::move(maps), std::move(target),
            {"ex-nested", "fails a.e.",
             "centred degree-2 maps against nested arcs at their common boundary fixed "
             "point: when sum mu_n |I_n| converges the target is hit only finitely often "
             "almost everywhere, while sum |I_n| may still diverge"},
            mu};
}

LengthsFromMu ex_lengths_from_mu(const RealSequenceFn& mu, std::int64_t horizon,
                                 double cap) {
    if (horizon < 4) throw DomainError("ex_lengths_from_mu: horizon too short");
    if (!(cap > 0.0)) throw DomainError("ex_lengths_from_mu: cap must be positive");

    std::vector<double> m(static_cast<std::size_t>(horizon));
    for (std::int64_t n = 1; n <= horizon; ++n) {
        m[static_cast<std::size_t>(n - 1)] = mu(n);
        if (!(m[static_cast<std::size_t>(n - 1)] > 0.0))
            throw ConstructionError("ex_lengths_from_mu: mu must be positive");
    }

    // Suffix-maximal positions: mu_n >= mu_j for every j >= n up to the
    // horizon. These are the only admissible cut points.
    std::vector<bool> candidate(m.size());
    double running = 0.0;
    for (std::size_t i = m.size(); i-- > 0;) {
        running = std::max(running, m[i]);
        candidate[i] = (m[i] >= running);
    }

    // Greedy cuts: strictly growing gaps, and mu at the k-th cut within the
    // geometric budget cap * 2^{-k} so the cut values sum below the cap.
    LengthsFromMu out;
    out.ns.push_back(1);
    std::int64_t gap_prev = 0;
    int k = 1;
    while (true) {
        double budget = cap * std::pow(2.0, -k);
        std::int64_t lo = out.ns.back() + std::max<std::int64_t>(gap_prev + 1, 1);
        std::int64_t found = 0;
        for (std::int64_t n = lo; n <= horizon; ++n) {
            if (candidate[static_cast<std::size_t>(n - 1)] &&
                m[static_cast<std::size_t>(n - 1)] <= budget) {
                found = n;
                break;
            }
        }
        if (found == 0) break;
        gap_prev = found - out.ns.back();
        out.ns.push_back(found);
        ++k;
    }
    if (out.ns.size() < 3) {
        std::ostringstream msg;
        msg << "ex_lengths_from_mu: horizon " << horizon << " completes only "
            << (out.ns.size() - 1) << " blocks (need at least 2)";
        throw HorizonError(static_cast<std::int64_t>(out.ns.size()) - 1, msg.str());
    }

    for (std::size_t j = 0; j + 1 < out.ns.size(); ++j) {
        std::int64_t gap = out.ns[j + 1] - out.ns[j];
        double l = 1.0 / static_cast<double>(gap);
        for (std::int64_t i = 0; i < gap; ++i) out.lengths.push_back(l);
    }

    // Postconditions of the construction, checked rather than assumed.
    for (std::size_t i = 1; i < out.lengths.size(); ++i)
        if (out.lengths[i] > out.lengths[i - 1] + kAngleTol)
            throw ContractViolation("ex_lengths_from_mu: lengths not non-increasing");
    double cut_sum = 0.0;
    for (std::size_t j = 1; j < out.ns.size(); ++j)
        cut_sum += m[static_cast<std::size_t>(out.ns[j] - 1)];
    if (cut_sum > cap + 1e-12)
        throw ContractViolation("ex_lengths_from_mu: cut values exceed the cap");
    return out;
}

double mobius_for_arc(double l) {
    if (!(l > 0.0) || l > kPi + kAngleTol)
        throw DomainError("mobius_for_arc: length must lie in (0, pi]");
    double half = 0.5 * std::min(l, kPi);
    double a = std::cos(half) / (1.0 + std::sin(half));
    // Post-verify the forced endpoint assignment e^{i l/2} -> -i. The
    // evaluation cancels like sin(l/2), so the tolerance carries that factor.
    std::complex<double> img = arc_involution(a).apply(std::polar(1.0, half));
    double tol = 1e-10 + 4e-15 / std::max(std::sin(half), 1e-300);
    if (std::abs(img - std::complex<double>(0.0, -1.0)) > tol)
        throw ConstructionError("mobius_for_arc: endpoint verification failed");
    // Stable form of the same geometry: sin(l/2) (1 + a^2) = 1 - a^2.
    if (std::fabs(std::sin(half) * (1.0 + a * a) - (1.0 - a * a)) > 1e-12)
        throw ConstructionError("mobius_for_arc: chord identity verification failed");
    return a;
}

MobiusAutomorphism arc_involution(double a) {
    // (a - z)/(1 - a z) in canonical form: tau = -1, parameter -a.
    return {std::complex<double>(-a, 0.0), std::complex<double>(-1.0, 0.0)};
}

namespace {

ExampleSystem conjugated_system(RealSequenceFn mu, RealSequenceFn raw_lengths,
                                RealSequenceFn conj_lengths, std::string name,
                                std::string verdict, std::string claim) {
    check_nested_inputs(mu, raw_lengths, 1);
    InnerMapSequence maps(
        [mu, raw_lengths, conj_lengths, name](std::int64_t n) -> MapChain {
            check_nested_inputs(mu, raw_lengths, n);
            FiniteBlaschke b = FiniteBlaschke::centered_degree2(1.0 - mu(n));
            MobiusAutomorphism m_cur = arc_involution(mobius_for_arc(conj_lengths(n)));
            std::vector<FiniteBlaschke> factors;
            if (n > 1) {
                // Involutions are their own inverses.
                MobiusAutomorphism m_prev =
                    arc_involution(mobius_for_arc(conj_lengths(n - 1)));
                factors.push_back(to_blaschke(m_prev));
            }
            factors.push_back(b);
            factors.push_back(to_blaschke(m_cur));
            return MapChain(std::move(factors));
        },
        name);

    TargetSequence target(
        [](std::int64_t) { return Arc(Angle(kPi), 0.5 * kPi); }, name);

    return {std::move(maps), std::move(target),
            {std::move(name), std::move(verdict), std::move(claim)}, mu};
}

}  // namespace

ExampleSystem ex_conjugated(RealSequenceFn mu, RealSequenceFn lengths) {
    return conjugated_system(
        mu, lengths, lengths, "ex-conjugated", "fails a.e.",
        "recentring the nested system onto the fixed left half-circle: the interior "
        "orbit is real, increases to 1, and sum (1-|F_n(0)|) diverges, yet almost every "
        "boundary orbit lands in the half-circle at most finitely often");
}

ExampleSystem ex_rescaled(RealSequenceFn mu, RealSequenceFn lengths) {
    check_nested_inputs(mu, lengths, 1);
    auto prefix = std::make_shared<PrefixCache>(lengths);
    RealSequenceFn shrunk = [lengths, prefix](std::int64_t n) {
        return lengths(n) / prefix->sum(n);
    };
    return conjugated_system(
        mu, lengths, shrunk, "ex-rescaled", "denjoy-wolff full measure",
        "recentring through arcs shrunk by the running length sum: the images of the "
        "original arcs expand to fill the circle minus a point, and almost every "
        "boundary orbit converges to 1 together with the interior orbit");
}

ExampleSystem ex_parabolic() {
    FiniteBlaschke f(1.0, {std::complex<double>(-1.0 / 3.0), std::complex<double>(-1.0 / 3.0)});
    return {InnerMapSequence::autonomous(std::move(f), "parabolic-square"), std::nullopt,
            {"ex-parabolic", "dense a.e.",
             "iteration of a degree-2 inner function with parabolic boundary fixed point "
             "1: 1 - f^n(0) decays like n^{-1/2}, mu_n like 1/n, so the orbit escapes "
             "slowly while the composition stays contracting"},
            nullptr};
}

}  // namespace innerlab
