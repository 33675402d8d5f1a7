#pragma once

#include <array>
#include <complex>

#include "katflow/disks.hpp"

namespace katflow {

/// Generalized Moebius transformation
///
///     z -> (a w + b) / (c w + d),   w = conj(z) if conjugate_first else z.
///
/// Coefficients are kept normalized so that ad - bc = 1.  Maps with
/// conjugate_first = true reverse orientation (they include a reflection).
class MoebiusMap {
public:
    using Complex = std::complex<double>;

    MoebiusMap() = default;
    MoebiusMap(Complex a, Complex b, Complex c, Complex d, bool conjugate_first = false);

    static MoebiusMap identity() { return {}; }

    /// Unique orientation-preserving map with z_i -> w_i.  Both triples must
    /// consist of pairwise distinct points.
    static MoebiusMap from_three_points(const std::array<Point, 3>& from,
                                        const std::array<Point, 3>& to);

    /// Inversion through the circle bounding d (an orientation-reversing map).
    static MoebiusMap inversion(const Disk& d);

    Complex a() const { return a_; }
    Complex b() const { return b_; }
    Complex c() const { return c_; }
    Complex d() const { return d_; }
    bool conjugate_first() const { return conjugate_first_; }

    Point operator()(Point z) const;

    /// (*this)(other(z)).
    MoebiusMap compose(const MoebiusMap& other) const;
    MoebiusMap inverse() const;

    /// Image of a disk.  Throws GeometryError if the image is a half-plane
    /// or the exterior of a circle, i.e. the pole lies in the closed disk.
    Disk apply(const Disk& disk) const;
    Packing apply(const Packing& p) const;

private:
    void normalize();

    Complex a_{1.0, 0.0};
    Complex b_{0.0, 0.0};
    Complex c_{0.0, 0.0};
    Complex d_{1.0, 0.0};
    bool conjugate_first_ = false;
};

struct CanonicalizedPacking {
    Packing packing;
    MoebiusMap map;
};

/// Maps the marked tridisk of p onto the canonical tridisk (marks[k] goes to
/// canonical slot k) so that all unmarked disks lie in the canonical tricusp.
/// Falls back to the orientation-reversing variant when the direct map puts
/// the unmarked disks outside the incircle.  Marked disks in the output are
/// set exactly to the canonical values.
CanonicalizedPacking canonicalize_tridisk(const Packing& p, const std::array<int, 3>& marks);

/// True if the marked triple equals the canonical tridisk within tol and every
/// unmarked centre lies in the canonical tricusp.
bool is_tridisk_contained(const Packing& p, const std::array<int, 3>& marks, double tol = 1e-10);

}  // namespace katflow
