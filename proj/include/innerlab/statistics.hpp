#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "innerlab/composition.hpp"
#include "innerlab/target.hpp"

namespace innerlab {

/// Default budget for exact boundary preimages: the arc count of
/// union_{n in window} F_n^{-1}(I_n) grows like the summed degree products,
/// so only small windows are exact.
inline constexpr std::size_t kArcBudget = std::size_t{1} << 24;

/// Per-sample hit counts A(N, zeta) = #{n <= N : F_n(zeta) in I_n} at the
/// requested checkpoints, with the normalized predicted count
/// phi(N) = sum_{n<=N} |I_n| / 2*pi alongside.
struct HitStatistics {
    std::vector<double> sample_points;               // starting angles
    std::vector<std::int64_t> checkpoints;           // increasing
    std::vector<std::vector<std::int64_t>> counts;   // [sample][checkpoint]
    std::vector<std::int64_t> first_hit;             // -1 when the orbit never hit
    std::vector<double> phi;                         // [checkpoint]
};

HitStatistics hit_count(const ExampleSystem& system, std::span<const double> thetas,
                        std::span<const std::int64_t> checkpoints);

/// Monte Carlo estimate of the measure (as a fraction of the circle) of
/// {theta : F_n(e^{i theta}) in I_n for some n in [n0, n1]}, with a 95%
/// Wilson interval. Reproducible from the seed and independent of the
/// thread count.
struct MeasureEstimate {
    double fraction;
    double ci_low;
    double ci_high;
    std::int64_t samples;
    std::uint64_t seed;
};

MeasureEstimate hit_measure(const ExampleSystem& system, std::int64_t n0, std::int64_t n1,
                            std::int64_t samples, std::uint64_t seed, int threads = 0);

/// Exact preimage E_n = F_n^{-1}(I_n) through the composition chain.
ArcUnion exact_preimage(const ExampleSystem& system, std::int64_t n,
                        std::size_t arc_budget = kArcBudget);

/// Exact union of E_n over the window; the oracle hit_measure is checked
/// against. Refuses (BudgetExceeded) when the summed degree products pass
/// the arc budget.
ArcUnion exact_hit_union(const ExampleSystem& system, std::int64_t n0, std::int64_t n1,
                         std::size_t arc_budget = kArcBudget);

/// Pair correlation of hitting sets: lhs = |E_m cap E_n| / 2*pi against the
/// product of the normalized measures. excess decays in n - m for uniformly
/// contracting centred systems (reported, not asserted against unknown
/// absolute constants).
struct OverlapRecord {
    double lhs;
    double product_term;
    double excess;
};
OverlapRecord overlap_correlation(const ExampleSystem& system, std::int64_t m,
                                  std::int64_t n, std::size_t arc_budget = kArcBudget);

/// Boundary orbit theta_n = boundary_map(f_n, theta_{n-1}), n = 1..N.
/// Double-precision orbits of expanding circle maps shadow true orbits only
/// statistically; statistics and exact set computations are the verified
/// objects, not pointwise trajectories.
std::vector<double> boundary_orbit(const InnerMapSequence& seq, double theta0,
                                   std::int64_t N);

/// Visit counts of theta_1..theta_N in K equal cells.
struct DensityProfile {
    std::int64_t cells;
    std::vector<std::int64_t> visits;
    std::int64_t min_visits;
};
DensityProfile density_profile(const InnerMapSequence& seq, double theta0, std::int64_t N,
                               std::int64_t K);

/// Euclidean distances d_n = |F_n(e^{i theta0}) - F_n(z0)| between the
/// boundary orbit and the interior orbit, n = 1..N.
std::vector<double> dw_profile(const InnerMapSequence& seq, double theta0, std::int64_t N,
                               std::complex<double> base_point = 0.0);

/// | |A cap F_n^{-1}(E)| / |E| - |A| / 2*pi |, computed exactly. All maps
/// up to n must fix 0.
double mixing_defect(const InnerMapSequence& seq, const Arc& A, const Arc& E,
                     std::int64_t n, std::size_t arc_budget = kArcBudget);

int effective_threads(int requested);

}  // namespace innerlab
