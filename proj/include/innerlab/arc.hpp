#pragma once

#include <complex>
#include <vector>

#include "innerlab/angle.hpp"
#include "innerlab/common.hpp"

namespace innerlab {

/// A closed arc of the unit circle, stored as center and half-length.
/// Degenerate arcs (half_length 0) are single points; half_length pi is the
/// full circle. Membership is closed: both endpoints belong to the arc.
struct Arc {
    Angle center;
    double half_length = 0.0;  // radians, in [0, pi]

    Arc() = default;
    Arc(Angle c, double half);

    static Arc full() { return Arc(Angle(0.0), kPi); }
    /// The arc running counterclockwise from a to b; from_endpoints(a, a) is
    /// the degenerate point arc at a.
    static Arc from_endpoints(Angle a, Angle b);

    double length() const { return 2.0 * half_length; }
    Angle left() const { return center - half_length; }
    Angle right() const { return center + half_length; }

    bool contains(Angle p) const {
        return p.distance_to(center) <= half_length + kAngleTol;
    }
    bool is_full() const { return half_length >= kPi - kAngleTol; }
};

/// A finite union of pairwise-disjoint closed arcs, sorted by left endpoint.
/// Overlapping or touching input arcs are merged on construction, so the
/// total measure is the plain sum of member lengths.
class ArcUnion {
  public:
    ArcUnion() = default;  // empty set
    explicit ArcUnion(const Arc& a) : ArcUnion(std::vector<Arc>{a}) {}
    explicit ArcUnion(std::vector<Arc> arcs);

    static ArcUnion empty() { return ArcUnion(); }
    static ArcUnion full_circle();

    const std::vector<Arc>& arcs() const { return arcs_; }
    std::size_t size() const { return arcs_.size(); }
    bool is_empty() const { return arcs_.empty(); }
    bool is_full() const;

    /// Total length in radians, in [0, 2*pi].
    double measure() const;

    bool contains(Angle p) const;

    ArcUnion unite(const ArcUnion& other) const;
    ArcUnion intersect(const ArcUnion& other) const;
    ArcUnion complement() const;

  private:
    std::vector<Arc> arcs_;
};

/// Harmonic measure of the set u seen from the interior point z, in [0, 1].
/// At z = 0 this is measure(u) / 2*pi. Throws DomainError for |z| >= 1.
double harmonic_measure(std::complex<double> z, const ArcUnion& u);
double harmonic_measure(std::complex<double> z, const Arc& a);

}  // namespace innerlab
