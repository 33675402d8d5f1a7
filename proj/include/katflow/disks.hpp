#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace katflow {

/// Points of the Euclidean plane, identified with complex numbers so that
/// Moebius maps act on them directly.
using Point = std::complex<double>;

/// Default relative tolerance for tangency and containment predicates.
inline constexpr double kDefaultContactTol = 1e-9;

/// Raised when a geometric precondition does not hold (nonpositive radius,
/// non-tangent triple, degenerate input).
class GeometryError : public std::domain_error {
public:
    explicit GeometryError(const std::string& what) : std::domain_error(what) {}
};

struct Disk {
    Point center{0.0, 0.0};
    double radius = 1.0;

    double curvature() const { return 1.0 / radius; }
};

/// Three disks in mutual external tangency, in mark order.
using Tridisk = std::array<Disk, 3>;

/// Indexed disk family. Index = vertex id.
struct Packing {
    std::vector<Disk> disks;
    double contact_tol = kDefaultContactTol;

    std::size_t size() const { return disks.size(); }
    const Disk& operator[](std::size_t i) const { return disks[i]; }
    Disk& operator[](std::size_t i) { return disks[i]; }
};

/// (|p_a - p_b|^2 - r_a^2 - r_b^2) / (2 r_a r_b).  1 at external tangency,
/// > 1 when separated, < 1 when overlapping.
double inversive_distance(const Disk& a, const Disk& b);

/// True if every pair of disks is interior-disjoint up to the packing's
/// relative contact tolerance, and all radii are positive.
bool is_packing(const Packing& p);

/// Unit disks centred at (0,0), (2,0), (1, sqrt 3).
Tridisk canonical_tridisk();

/// Point where the boundaries of a and b meet when they are externally tangent:
/// p_a + r_a (p_b - p_a) / |p_b - p_a|.
Point contact_point(const Disk& a, const Disk& b);

/// Contact points of a tridisk in the order (01, 12, 20).
std::array<Point, 3> contact_points(const Tridisk& t);

/// True if all three pairs are externally tangent within relative tolerance.
bool is_tridisk(const Tridisk& t, double tol = kDefaultContactTol);

/// Circle through three points. Throws GeometryError on collinear input.
Disk circumcircle(Point a, Point b, Point c);

/// Circle through the three contact points of the tridisk.
Disk tridisk_incircle(const Tridisk& t);

/// The disk inside the tricusp of three mutually tangent disks that touches
/// all three (complex Descartes relation).
Disk inner_soddy_disk(const Disk& a, const Disk& b, const Disk& c,
                      double tol = kDefaultContactTol);

/// Strictly inside the incircle and strictly outside all three closed disks.
bool in_tricusp(const Tridisk& t, Point q);

}  // namespace katflow
