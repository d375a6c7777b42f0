#include "innerlab/arc.hpp"

#include <algorithm>
#include <cmath>

namespace innerlab {

namespace {

// Work representation for set algebra: [start, end] with start in [0, 2*pi)
// and end = start + length <= start + 2*pi.
struct Interval {
    double start;
    double end;
};

std::vector<Interval> to_intervals(const std::vector<Arc>& arcs) {
    std::vector<Interval> out;
    out.reserve(arcs.size());
    for (const Arc& a : arcs) {
        double s = a.left().value;
        out.push_back({s, s + a.length()});
    }
    return out;
}

}  // namespace

Arc::Arc(Angle c, double half) : center(c), half_length(half) {
    if (half < -kAngleTol || half > kPi + kAngleTol)
        throw ConstructionError("arc half-length out of [0, pi]");
    half_length = std::clamp(half, 0.0, kPi);
}

Arc Arc::from_endpoints(Angle a, Angle b) {
    double len = Angle::reduce(b.value - a.value);
    return Arc(Angle(a.value + 0.5 * len), 0.5 * len);
}

ArcUnion ArcUnion::full_circle() { return ArcUnion(Arc::full()); }

ArcUnion::ArcUnion(std::vector<Arc> arcs) {
    // Split wrapped arcs at the 0/2*pi seam, sort, merge touching pieces,
    // then re-join across the seam.
    std::vector<Interval> parts;
    parts.reserve(arcs.size() + 1);
    for (const Arc& a : arcs) {
        if (a.is_full()) {
            arcs_ = {Arc::full()};
            return;
        }
        double s = a.left().value;
        double e = s + a.length();
        if (e > kTwoPi) {
            parts.push_back({s, kTwoPi});
            parts.push_back({0.0, e - kTwoPi});
        } else {
            parts.push_back({s, e});
        }
    }
    if (parts.empty()) return;

    std::sort(parts.begin(), parts.end(),
              [](const Interval& x, const Interval& y) { return x.start < y.start; });

    std::vector<Interval> merged;
    merged.push_back(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i) {
        Interval& cur = merged.back();
        if (parts[i].start <= cur.end + kAngleTol) {
            cur.end = std::max(cur.end, parts[i].end);
        } else {
            merged.push_back(parts[i]);
        }
    }

    // Re-join a piece ending at 2*pi with one starting at 0.
    if (merged.size() >= 2 && merged.front().start <= kAngleTol &&
        merged.back().end >= kTwoPi - kAngleTol) {
        merged.back().end = kTwoPi + merged.front().end;
        merged.erase(merged.begin());
    }

    double total = 0.0;
    for (const Interval& iv : merged) total += iv.end - iv.start;
    if (total >= kTwoPi - kAngleTol) {
        arcs_ = {Arc::full()};
        return;
    }

    arcs_.reserve(merged.size());
    for (const Interval& iv : merged) {
        double len = std::min(iv.end - iv.start, kTwoPi);
        arcs_.emplace_back(Angle(iv.start + 0.5 * len), 0.5 * len);
    }
    std::sort(arcs_.begin(), arcs_.end(),
              [](const Arc& x, const Arc& y) { return x.left().value < y.left().value; });
}

bool ArcUnion::is_full() const {
    return arcs_.size() == 1 && arcs_.front().is_full();
}

double ArcUnion::measure() const {
    double total = 0.0;
    for (const Arc& a : arcs_) total += a.length();
    return std::min(total, kTwoPi);
}

bool ArcUnion::contains(Angle p) const {
    if (arcs_.empty()) return false;
    // Sorted by left endpoint; candidate is the last arc starting at or
    // before p, plus the final arc which may wrap past 2*pi.
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), p.value,
                               [](double v, const Arc& a) { return v < a.left().value; });
    if (it != arcs_.begin() && std::prev(it)->contains(p)) return true;
    if (arcs_.back().contains(p)) return true;
    // p just below the left endpoint of the next arc is still a closed-
    // endpoint member within tolerance.
    if (it != arcs_.end() && it->contains(p)) return true;
    return false;
}

ArcUnion ArcUnion::unite(const ArcUnion& other) const {
    std::vector<Arc> all = arcs_;
    all.insert(all.end(), other.arcs_.begin(), other.arcs_.end());
    return ArcUnion(std::move(all));
}

ArcUnion ArcUnion::complement() const {
    if (arcs_.empty()) return full_circle();
    if (is_full()) return ArcUnion();

    std::vector<Interval> ivs = to_intervals(arcs_);
    // Gaps between consecutive member arcs, cyclically.
    std::vector<Arc> gaps;
    gaps.reserve(ivs.size());
    for (std::size_t i = 0; i < ivs.size(); ++i) {
        double gap_start = ivs[i].end;
        double gap_end = (i + 1 < ivs.size()) ? ivs[i + 1].start : ivs.front().start + kTwoPi;
        double len = gap_end - gap_start;
        if (len > kAngleTol)
            gaps.emplace_back(Angle(gap_start + 0.5 * len), 0.5 * std::min(len, kTwoPi));
    }
    return ArcUnion(std::move(gaps));
}

ArcUnion ArcUnion::intersect(const ArcUnion& other) const {
    return complement().unite(other.complement()).complement();
}

double harmonic_measure(std::complex<double> z, const Arc& a) {
    if (std::abs(z) >= 1.0)
        throw DomainError("harmonic_measure: point must lie inside the unit disk");
    if (a.is_full()) return 1.0;
    if (a.half_length <= 0.0) return 0.0;
    // Map z to the origin with an automorphism; harmonic measure from 0 is
    // normalized arc length, and disk automorphisms preserve circle
    // orientation, so the image arc runs from phi(left) to phi(right).
    auto phi = [&](std::complex<double> w) { return (w - z) / (1.0 - std::conj(z) * w); };
    double lo = std::arg(phi(a.left().to_point()));
    double hi = std::arg(phi(a.right().to_point()));
    return Angle::reduce(hi - lo) / kTwoPi;
}

double harmonic_measure(std::complex<double> z, const ArcUnion& u) {
    if (std::abs(z) >= 1.0)
        throw DomainError("harmonic_measure: point must lie inside the unit disk");
    double total = 0.0;
    for (const Arc& a : u.arcs()) total += harmonic_measure(z, a);
    return std::min(total, 1.0);
}

}  // namespace innerlab
