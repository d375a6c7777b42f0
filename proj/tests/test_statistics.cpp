#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "innerlab/rng.hpp"
#include "innerlab/statistics.hpp"
#include "support/oracles.hpp"

using namespace innerlab;
namespace tt = innerlab::testing;
using cplx = std::complex<double>;

namespace {

ExampleSystem full_circle_system() {
    return {InnerMapSequence::autonomous(FiniteBlaschke::centered_degree2(0.5)),
            TargetSequence([](std::int64_t) { return Arc::full(); }, "full"),
            {"full", "", ""},
            nullptr};
}

ExampleSystem fixed_arc_system(double lambda, Angle center, double half) {
    return {InnerMapSequence::autonomous(FiniteBlaschke::centered_degree2(lambda)),
            TargetSequence([center, half](std::int64_t) { return Arc(center, half); },
                           "fixed"),
            {"fixed", "", ""},
            nullptr};
}

}  // namespace

TEST_CASE("hit counts: full-circle targets count every step") {
    ExampleSystem sys = full_circle_system();
    std::vector<double> thetas{0.3, 2.0, 4.4};
    std::vector<std::int64_t> cps{10, 100, 250};
    HitStatistics stats = hit_count(sys, thetas, cps);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        CHECK(stats.counts[i][0] == 10);
        CHECK(stats.counts[i][1] == 100);
        CHECK(stats.counts[i][2] == 250);
        CHECK(stats.first_hit[i] == 1);
    }
    CHECK(stats.phi[0] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(stats.phi[2] == doctest::Approx(250.0).epsilon(1e-12));

    CHECK_THROWS_AS(hit_count(sys, thetas, std::vector<std::int64_t>{10, 10}), DomainError);
}

TEST_CASE("hit counts: monotone in N, zero for unreachable targets") {
    ExampleSystem sys = fixed_arc_system(0.5, Angle(0.0), 0.3);
    std::vector<double> thetas;
    auto rng = tt::test_rng(70);
    for (int i = 0; i < 12; ++i) thetas.push_back(tt::uniform(rng, 0.0, kTwoPi));
    std::vector<std::int64_t> cps{50, 100, 400, 1600};
    HitStatistics stats = hit_count(sys, thetas, cps);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        for (std::size_t c = 1; c < cps.size(); ++c)
            CHECK(stats.counts[i][c] >= stats.counts[i][c - 1]);
        if (stats.first_hit[i] >= 0) CHECK(stats.counts[i].back() >= 1);
    }

    // Point targets at an angle the orbit of 1 never reaches: b fixes 1, so
    // the orbit starting there stays put and never enters a point arc at 2.
    ExampleSystem point{InnerMapSequence::autonomous(FiniteBlaschke::centered_degree2(0.5)),
                        TargetSequence([](std::int64_t) { return Arc(Angle(2.0), 0.0); },
                                       "point"),
                        {"point", "", ""},
                        nullptr};
    HitStatistics zero = hit_count(point, std::vector<double>{0.0},
                                   std::vector<std::int64_t>{200});
    CHECK(zero.counts[0][0] == 0);
    CHECK(zero.first_hit[0] == -1);
}

TEST_CASE("boundary orbits: rotations accumulate exactly, b sends -1 to 1") {
    InnerMapSequence rot = InnerMapSequence::from_factors(
        [](std::int64_t n) { return FiniteBlaschke::rotation(0.05 * static_cast<double>(n)); });
    std::vector<double> orbit = boundary_orbit(rot, 1.0, 300);
    double acc = 1.0;
    for (int n = 1; n <= 300; ++n) {
        acc += 0.05 * static_cast<double>(n);
        CHECK(Angle(orbit[static_cast<std::size_t>(n - 1)]).distance_to(Angle(acc)) < 1e-9);
    }

    InnerMapSequence b = InnerMapSequence::autonomous(FiniteBlaschke::centered_degree2(0.5));
    std::vector<double> from_minus_one = boundary_orbit(b, kPi, 3);
    CHECK(Angle(from_minus_one[0]).distance_to(Angle(0.0)) < 1e-9);
    CHECK(Angle(from_minus_one[1]).distance_to(Angle(0.0)) < 1e-9);
}

TEST_CASE("hit_measure: extremes, seed determinism, thread independence") {
    ExampleSystem full = full_circle_system();
    MeasureEstimate one = hit_measure(full, 1, 10, 500, 42);
    CHECK(one.fraction == 1.0);
    CHECK(one.ci_high == 1.0);

    // Arcs the orbit can never reach: point targets.
    ExampleSystem point{InnerMapSequence::autonomous(FiniteBlaschke::rotation(0.1)),
                        TargetSequence([](std::int64_t) { return Arc(Angle(2.0), 0.0); },
                                       "point"),
                        {"point", "", ""},
                        nullptr};
    MeasureEstimate zero = hit_measure(point, 1, 50, 400, 42);
    CHECK(zero.fraction == 0.0);
    CHECK(zero.ci_low == 0.0);

    ExampleSystem sys = fixed_arc_system(0.5, Angle(1.0), 0.25);
    MeasureEstimate a = hit_measure(sys, 3, 40, 1000, 7, 1);
    MeasureEstimate b = hit_measure(sys, 3, 40, 1000, 7, 4);
    MeasureEstimate c = hit_measure(sys, 3, 40, 1000, 7, 3);
    CHECK(a.fraction == b.fraction);
    CHECK(a.fraction == c.fraction);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
    MeasureEstimate d = hit_measure(sys, 3, 40, 1000, 8, 4);
    CHECK(d.fraction != a.fraction);

    CHECK(a.ci_low <= a.fraction);
    CHECK(a.fraction <= a.ci_high);
}

TEST_CASE("counter rng: stateless, order-free, roughly uniform") {
    CHECK(CounterRng::value(1, 5) == CounterRng::value(1, 5));
    CHECK(CounterRng::value(1, 5) != CounterRng::value(2, 5));
    CHECK(CounterRng::value(1, 5) != CounterRng::value(1, 6));
    double mean = 0.0;
    for (int i = 0; i < 10000; ++i) mean += CounterRng::uniform01(9, i);
    mean /= 10000.0;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("exact hit unions: single step, measure preservation, budget refusal") {
    ExampleSystem sys = fixed_arc_system(0.5, Angle(0.5), 0.2);
    ArcUnion first = exact_hit_union(sys, 1, 1);
    ArcUnion direct = sys.maps.at(1).factors().front().arc_preimage(sys.target->at(1));
    CHECK(first.measure() == doctest::Approx(direct.measure()).epsilon(1e-12));
    CHECK(first.size() == direct.size());

    // Centred maps preserve total preimage length at every stage.
    double total = 0.0, expected = 0.0;
    for (std::int64_t n = 1; n <= 12; ++n) {
        total += exact_preimage(sys, n).measure();
        expected += sys.target->at(n).length();
    }
    CHECK(total == doctest::Approx(expected).epsilon(1e-8));

    CHECK_THROWS_AS(exact_hit_union(sys, 1, 60), BudgetExceeded);
    CHECK_THROWS_AS(exact_preimage(sys, 1, 1), BudgetExceeded);
}

TEST_CASE("hit_measure agrees with the exact union on a small window") {
    auto rng = tt::test_rng(71);
    for (int trial = 0; trial < 4; ++trial) {
        double lambda = tt::uniform(rng, 0.3, 0.7);
        Angle center(tt::uniform(rng, 0.0, kTwoPi));
        double half = tt::uniform(rng, 0.1, 0.6);
        ExampleSystem sys = fixed_arc_system(lambda, center, half);
        ArcUnion exact = exact_hit_union(sys, 1, 9);
        double p = exact.measure() / kTwoPi;
        MeasureEstimate est = hit_measure(sys, 1, 9, 100000, 1234 + trial);
        double sigma = std::sqrt(p * (1.0 - p) / 100000.0);
        CHECK(std::fabs(est.fraction - p) <= 3.0 * sigma + 1e-12);

        // Single-index window: the sampled fraction of E_n alone.
        ArcUnion en = exact_preimage(sys, 7);
        double pn = en.measure() / kTwoPi;
        MeasureEstimate single = hit_measure(sys, 7, 7, 100000, 4321 + trial);
        double sn = std::sqrt(pn * (1.0 - pn) / 100000.0);
        CHECK(std::fabs(single.fraction - pn) <= 3.0 * sn + 1e-12);
    }
}

TEST_CASE("overlap correlation: identities and decay of the excess") {
    ExampleSystem sys = fixed_arc_system(0.5, Angle(0.0), 0.4);

    OverlapRecord same = overlap_correlation(sys, 5, 5);
    ArcUnion e5 = exact_preimage(sys, 5);
    double p5 = e5.measure() / kTwoPi;
    CHECK(same.lhs == doctest::Approx(p5).epsilon(1e-10));
    CHECK(same.excess == doctest::Approx(p5 - p5 * p5).epsilon(1e-9));

    // Disjoint hitting sets: rotations with separated fixed arcs.
    ExampleSystem rot{
        InnerMapSequence::autonomous(FiniteBlaschke::rotation(0.0)),
        TargetSequence(
            [](std::int64_t n) {
                return n % 2 == 1 ? Arc(Angle(0.0), 0.1) : Arc(Angle(kPi), 0.1);
            },
            "alternating"),
        {"alternating", "", ""},
        nullptr};
    OverlapRecord disjoint = overlap_correlation(rot, 1, 2);
    CHECK(disjoint.lhs == doctest::Approx(0.0));
    CHECK(disjoint.excess <= 0.0);

    // Excess ratio decays by orders of magnitude over the first 14 lags
    // (not strictly monotonically; a small bump appears near lag 9).
    std::vector<double> ratio;
    for (std::int64_t n = 2; n <= 15; ++n) {
        OverlapRecord r = overlap_correlation(sys, 1, n);
        ratio.push_back(r.excess / exact_preimage(sys, n).measure());
    }
    for (std::size_t i = 1; i < 6; ++i) CHECK(ratio[i] < ratio[i - 1]);
    double early = (ratio[0] + ratio[1] + ratio[2]) / 3.0;
    double late = (ratio[11] + ratio[12] + ratio[13]) / 3.0;
    CHECK(late < early / 50.0);
}

TEST_CASE("density profiles: periodic orbits, equidistribution, cell bookkeeping") {
    InnerMapSequence quarter = InnerMapSequence::autonomous(
        FiniteBlaschke::rotation(kTwoPi / 4.0));
    DensityProfile periodic = density_profile(quarter, 0.1, 10000, 8);
    std::int64_t occupied = 0;
    for (std::int64_t v : periodic.visits) occupied += v > 0 ? 1 : 0;
    CHECK(occupied == 4);
    CHECK(std::accumulate(periodic.visits.begin(), periodic.visits.end(),
                          std::int64_t{0}) == 10000);

    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    InnerMapSequence golden_rot = InnerMapSequence::autonomous(
        FiniteBlaschke::rotation(kTwoPi * golden));
    DensityProfile equi = density_profile(golden_rot, 0.0, 1000000, 100);
    CHECK(equi.min_visits >= 1000000 / 100 / 2);

    // Expanding centred maps fill every cell from almost every start.
    auto rng = tt::test_rng(72);
    InnerMapSequence b = InnerMapSequence::autonomous(FiniteBlaschke::centered_degree2(0.5));
    int filled = 0;
    for (int s = 0; s < 20; ++s) {
        DensityProfile p = density_profile(b, tt::uniform(rng, 0.0, kTwoPi), 100000, 100);
        if (p.min_visits >= 1) ++filled;
    }
    CHECK(filled >= 19);
}

TEST_CASE("dw profiles: centred sequences keep unit distance, errors propagate") {
    InnerMapSequence b = InnerMapSequence::autonomous(FiniteBlaschke::centered_degree2(0.5));
    std::vector<double> d = dw_profile(b, 1.234, 200);
    for (double v : d) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    InnerMapSequence runaway = InnerMapSequence::from_factors([](std::int64_t) {
        return to_blaschke(MobiusAutomorphism::translation_to(cplx(1.0 - 1e-8)));
    });
    CHECK_THROWS_AS(dw_profile(runaway, 0.5, 10), PrecisionExhausted);
}

TEST_CASE("mixing defect: exact zero cases and pilot-calibrated decay") {
    InnerMapSequence b = InnerMapSequence::autonomous(FiniteBlaschke::centered_degree2(0.5));
    Arc payload(Angle(1.0), 0.3);
    CHECK(mixing_defect(b, Arc::full(), payload, 6) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(mixing_defect(b, payload, Arc::full(), 6) == doctest::Approx(0.0).epsilon(1e-10));

    Arc window(Angle(0.0), 0.5);
    double d2 = mixing_defect(b, window, window, 2);
    double d16 = mixing_defect(b, window, window, 16);
    CHECK(d16 <= d2);
    CHECK(d16 <= 0.05);

    InnerMapSequence off_center = InnerMapSequence::autonomous(
        FiniteBlaschke::factor(cplx(0.3)));
    CHECK_THROWS_AS(mixing_defect(off_center, window, window, 2), ContractViolation);
    CHECK_THROWS_AS(mixing_defect(b, window, Arc(Angle(0.0), 0.0), 2), DomainError);
}

TEST_CASE("rotation split at small scale: upper half hits, lower half never") {
    ExampleSystem sys = ex_rotations(200);
    std::int64_t horizon = 200 * 201 / 2;
    std::vector<double> probes{1.5 * kPi, 1.0, 0.5, 5.0};
    HitStatistics stats = hit_count(sys, probes, std::vector<std::int64_t>{horizon});
    CHECK(stats.counts[0][0] == 0);   // 3pi/2 never hits
    // Closed-form oracle: an upper-half angle off every subdivision boundary
    // hits exactly once per stage, so A = number of stages.
    CHECK(stats.counts[1][0] == 200);
    CHECK(stats.counts[2][0] == 200);
    CHECK(stats.counts[3][0] == 0);   // 5.0 rad lies in the open lower half

    MeasureEstimate est = hit_measure(sys, 1, horizon, 2000, 99);
    CHECK(est.fraction > 0.40);
    CHECK(est.fraction < 0.60);
}
