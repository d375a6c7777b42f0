#include "innerlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "innerlab/rng.hpp"

namespace innerlab {

int effective_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Closed-arc membership test for a point on the unit circle, with the
// angular tolerance folded into a single cosine threshold so the hot loop
// needs no atan2.
struct CompiledArc {
    std::complex<double> conj_center;
    double cos_thresh;
    bool always;
};

CompiledArc compile_arc(const Arc& a) {
    if (a.is_full()) return {1.0, -2.0, true};
    double t = std::min(a.half_length + kAngleTol, kPi);
    return {std::conj(a.center.to_point()), std::cos(t), false};
}

inline bool arc_hit(const CompiledArc& ca, std::complex<double> w) {
    if (ca.always) return true;
    std::complex<double> rel = w * ca.conj_center;
    return rel.real() >= ca.cos_thresh;
}

}  // namespace

HitStatistics hit_count(const ExampleSystem& system, std::span<const double> thetas,
                        std::span<const std::int64_t> checkpoints) {
    if (checkpoints.empty()) throw DomainError("hit_count: need at least one checkpoint");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1])
            throw DomainError("hit_count: checkpoints must be increasing");
    const TargetSequence& target = system.target_or_throw();
    const std::int64_t N = checkpoints.back();

    HitStatistics stats;
    stats.sample_points.assign(thetas.begin(), thetas.end());
    stats.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    stats.counts.assign(thetas.size(), std::vector<std::int64_t>(checkpoints.size(), 0));
    stats.first_hit.assign(thetas.size(), -1);
    stats.phi.reserve(checkpoints.size());
    for (std::int64_t cp : checkpoints) stats.phi.push_back(target.phi(cp));

    std::vector<std::complex<double>> w(thetas.size());
    std::vector<std::int64_t> count(thetas.size(), 0);
    for (std::size_t i = 0; i < thetas.size(); ++i) w[i] = std::polar(1.0, thetas[i]);

    std::size_t next_cp = 0;
    for (std::int64_t n = 1; n <= N; ++n) {
        MapChain f = system.maps.at(n);
        CompiledArc arc = compile_arc(target.at(n));
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = f.boundary_step(w[i]);
            if (arc_hit(arc, w[i])) {
                ++count[i];
                if (stats.first_hit[i] < 0) stats.first_hit[i] = n;
            }
        }
        while (next_cp < stats.checkpoints.size() && stats.checkpoints[next_cp] == n) {
            for (std::size_t i = 0; i < w.size(); ++i) stats.counts[i][next_cp] = count[i];
            ++next_cp;
        }
    }
    return stats;
}

namespace {

// Walks one block of samples through steps 1..n1, testing hits against the
// target inside [n0, n1]; returns how many samples hit at least once.
// Samples drop out of the active set at their first hit.
std::int64_t measure_block(const ExampleSystem& system, std::int64_t n0, std::int64_t n1,
                           std::uint64_t seed, std::int64_t idx_begin,
                           std::int64_t idx_end) {
    const TargetSequence& target = *system.target;
    std::vector<std::complex<double>> w;
    std::vector<std::int64_t> active;
    w.reserve(static_cast<std::size_t>(idx_end - idx_begin));
    active.reserve(w.capacity());
    for (std::int64_t i = idx_begin; i < idx_end; ++i) {
        double theta = kTwoPi * CounterRng::uniform01(seed, static_cast<std::uint64_t>(i));
        w.push_back(std::polar(1.0, theta));
        active.push_back(i - idx_begin);
    }

    std::int64_t hits = 0;
    for (std::int64_t n = 1; n <= n1 && !active.empty(); ++n) {
        MapChain f = system.maps.at(n);
        if (n < n0) {
            for (std::int64_t i : active) w[static_cast<std::size_t>(i)] =
                f.boundary_step(w[static_cast<std::size_t>(i)]);
            continue;
        }
        CompiledArc arc = compile_arc(target.at(n));
        for (std::size_t pos = 0; pos < active.size();) {
            std::size_t i = static_cast<std::size_t>(active[pos]);
            w[i] = f.boundary_step(w[i]);
            if (arc_hit(arc, w[i])) {
                ++hits;
                active[pos] = active.back();
                active.pop_back();
            } else {
                ++pos;
            }
        }
    }
    return hits;
}

}  // namespace

MeasureEstimate hit_measure(const ExampleSystem& system, std::int64_t n0, std::int64_t n1,
                            std::int64_t samples, std::uint64_t seed, int threads) {
    if (n0 > n1) throw DomainError("hit_measure: window must satisfy n0 <= n1");
    if (samples < 1) throw DomainError("hit_measure: need at least one sample");
    (void)system.target_or_throw();

    int T = effective_threads(threads);
    std::int64_t hits = 0;
    if (T <= 1 || samples < 64) {
        hits = measure_block(system, n0, n1, seed, 0, samples);
    } else {
        std::int64_t chunk = (samples + T - 1) / T;
        std::vector<std::int64_t> partial(static_cast<std::size_t>(T), 0);
        std::vector<std::thread> pool;
        for (int t = 0; t < T; ++t) {
            std::int64_t lo = t * chunk;
            std::int64_t hi = std::min<std::int64_t>(samples, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, t, lo, hi] {
                partial[static_cast<std::size_t>(t)] =
                    measure_block(system, n0, n1, seed, lo, hi);
            });
        }
        for (auto& th : pool) th.join();
        for (std::int64_t p : partial) hits += p;
    }

    double n = static_cast<double>(samples);
    double p = static_cast<double>(hits) / n;
    const double z = 1.959963984540054;  // 95% normal quantile
    double denom = 1.0 + z * z / n;
    double center = (p + z * z / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
    double hi = hits == samples ? 1.0 : std::min(1.0, center + half);
    return {p, lo, hi, samples, seed};
}

namespace {

MapChain prefix_chain(const InnerMapSequence& seq, std::int64_t n) {
    std::vector<FiniteBlaschke> factors;
    for (std::int64_t k = 1; k <= n; ++k) {
        MapChain f = seq.at(k);
        factors.insert(factors.end(), f.factors().begin(), f.factors().end());
    }
    return MapChain(std::move(factors));
}

void check_window_budget(const ExampleSystem& system, std::int64_t n0, std::int64_t n1,
                         std::size_t arc_budget) {
    double cumulative = 1.0;
    double total = 0.0;
    for (std::int64_t n = 1; n <= n1; ++n) {
        cumulative *= system.maps.at(n).degree();
        if (n >= n0) total += cumulative;
        if (total > static_cast<double>(arc_budget)) {
            std::ostringstream msg;
            msg << "exact preimage budget exceeded at n=" << n << ": ~" << total
                << " arcs > " << arc_budget;
            throw BudgetExceeded(msg.str());
        }
    }
}

}  // namespace

ArcUnion exact_preimage(const ExampleSystem& system, std::int64_t n,
                        std::size_t arc_budget) {
    const TargetSequence& target = system.target_or_throw();
    check_window_budget(system, n, n, arc_budget);
    return prefix_chain(system.maps, n).preimage(ArcUnion(target.at(n)), arc_budget);
}

ArcUnion exact_hit_union(const ExampleSystem& system, std::int64_t n0, std::int64_t n1,
                         std::size_t arc_budget) {
    if (n0 > n1 || n0 < 1) throw DomainError("exact_hit_union: bad window");
    (void)system.target_or_throw();
    check_window_budget(system, n0, n1, arc_budget);
    ArcUnion all;
    for (std::int64_t n = n0; n <= n1; ++n) all = all.unite(exact_preimage(system, n, arc_budget));
    return all;
}

OverlapRecord overlap_correlation(const ExampleSystem& system, std::int64_t m,
                                  std::int64_t n, std::size_t arc_budget) {
    ArcUnion em = exact_preimage(system, m, arc_budget);
    ArcUnion en = exact_preimage(system, n, arc_budget);
    double lhs = em.intersect(en).measure() / kTwoPi;
    double product = (em.measure() / kTwoPi) * (en.measure() / kTwoPi);
    return {lhs, product, lhs - product};
}

std::vector<double> boundary_orbit(const InnerMapSequence& seq, double theta0,
                                   std::int64_t N) {
    if (N < 1) throw DomainError("boundary_orbit: need N >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(N));
    std::complex<double> w = std::polar(1.0, theta0);
    for (std::int64_t n = 1; n <= N; ++n) {
        w = seq.at(n).boundary_step(w);
        out.push_back(Angle::of_point(w).value);
    }
    return out;
}

DensityProfile density_profile(const InnerMapSequence& seq, double theta0, std::int64_t N,
                               std::int64_t K) {
    if (K < 1) throw DomainError("density_profile: need at least one cell");
    DensityProfile profile;
    profile.cells = K;
    profile.visits.assign(static_cast<std::size_t>(K), 0);
    std::complex<double> w = std::polar(1.0, theta0);
    for (std::int64_t n = 1; n <= N; ++n) {
        w = seq.at(n).boundary_step(w);
        double t = Angle::of_point(w).value;
        std::int64_t cell = static_cast<std::int64_t>(t / kTwoPi * static_cast<double>(K));
        profile.visits[static_cast<std::size_t>(std::min(cell, K - 1))] += 1;
    }
    profile.min_visits = *std::min_element(profile.visits.begin(), profile.visits.end());
    return profile;
}

std::vector<double> dw_profile(const InnerMapSequence& seq, double theta0, std::int64_t N,
                               std::complex<double> base_point) {
    if (N < 1) throw DomainError("dw_profile: need N >= 1");
    CompositionState state = advance(CompositionState::initial(base_point), seq, N);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(N));
    std::complex<double> w = std::polar(1.0, theta0);
    for (std::int64_t n = 1; n <= N; ++n) {
        w = seq.at(n).boundary_step(w);
        out.push_back(std::abs(w - state.orbit[static_cast<std::size_t>(n)]));
    }
    return out;
}

double mixing_defect(const InnerMapSequence& seq, const Arc& A, const Arc& E,
                     std::int64_t n, std::size_t arc_budget) {
    if (E.length() <= 0.0) throw DomainError("mixing_defect: |E| must be positive");
    MapChain chain = prefix_chain(seq, n);
    if (!chain.all_factors_centered())
        throw ContractViolation("mixing_defect: maps must fix 0");
    ArcUnion pre = chain.preimage(ArcUnion(E), arc_budget);
    double lhs = ArcUnion(A).intersect(pre).measure() / E.length();
    return std::fabs(lhs - A.length() / kTwoPi);
}

}  // namespace innerlab
