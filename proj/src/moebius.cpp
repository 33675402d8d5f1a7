#include "katflow/moebius.hpp"

#include <cmath>
#include <string>

namespace katflow {

namespace {

using Complex = MoebiusMap::Complex;

struct Mat2 {
    Complex a, b, c, d;
};

Mat2 multiply(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
}

Mat2 adjugate(const Mat2& m) { return {m.d, -m.b, -m.c, m.a}; }

// Sends z1 -> 0, z2 -> 1, z3 -> infinity.
Mat2 cross_ratio_map(const std::array<Point, 3>& z) {
    const Complex s = z[1] - z[2];
    const Complex t = z[1] - z[0];
    return {s, -z[0] * s, t, -z[2] * t};
}

void require_distinct(const std::array<Point, 3>& z, const char* which) {
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            if (z[i] == z[j]) {
                throw GeometryError(std::string("from_three_points: repeated ") + which + " point");
            }
        }
    }
}

}  // namespace

MoebiusMap::MoebiusMap(Complex a, Complex b, Complex c, Complex d, bool conjugate_first)
    : a_(a), b_(b), c_(c), d_(d), conjugate_first_(conjugate_first) {
    normalize();
}

void MoebiusMap::normalize() {
    const Complex det = a_ * d_ - b_ * c_;
    if (det == Complex{0.0, 0.0} || !std::isfinite(std::abs(det))) {
        throw GeometryError("Moebius map with vanishing determinant");
    }
    const Complex s = std::sqrt(det);
    a_ /= s;
    b_ /= s;
    c_ /= s;
    d_ /= s;
}

MoebiusMap MoebiusMap::from_three_points(const std::array<Point, 3>& from,
                                         const std::array<Point, 3>& to) {
    require_distinct(from, "source");
    require_distinct(to, "target");
    const Mat2 m = multiply(adjugate(cross_ratio_map(to)), cross_ratio_map(from));
    return {m.a, m.b, m.c, m.d, false};
}

MoebiusMap MoebiusMap::inversion(const Disk& d) {
    const Complex c0 = d.center;
    return {c0, d.radius * d.radius - std::norm(c0), 1.0, -std::conj(c0), true};
}

Point MoebiusMap::operator()(Point z) const {
    const Complex w = conjugate_first_ ? std::conj(z) : z;
    const Complex den = c_ * w + d_;
    if (den == Complex{0.0, 0.0}) throw GeometryError("point mapped to infinity");
    return (a_ * w + b_) / den;
}

MoebiusMap MoebiusMap::compose(const MoebiusMap& other) const {
    Mat2 inner{other.a_, other.b_, other.c_, other.d_};
    if (conjugate_first_) {
        inner = {std::conj(inner.a), std::conj(inner.b), std::conj(inner.c), std::conj(inner.d)};
    }
    const Mat2 m = multiply({a_, b_, c_, d_}, inner);
    return {m.a, m.b, m.c, m.d, conjugate_first_ != other.conjugate_first_};
}

MoebiusMap MoebiusMap::inverse() const {
    Mat2 m = adjugate({a_, b_, c_, d_});
    if (conjugate_first_) {
        m = {std::conj(m.a), std::conj(m.b), std::conj(m.c), std::conj(m.d)};
    }
    return {m.a, m.b, m.c, m.d, conjugate_first_};
}

Disk MoebiusMap::apply(const Disk& disk) const {
    if (!(disk.radius > 0.0)) throw GeometryError("apply: disk radius must be positive");
    const Complex c0 = conjugate_first_ ? std::conj(disk.center) : disk.center;
    const double r = disk.radius;
    // Image of |z - c0| = r: with delta = c c0 + d the denominator at the centre,
    //   centre = ((a c0 + b) conj(delta) - a conj(c) r^2) / h,  radius = r / h,
    //   h = |delta|^2 - |c|^2 r^2  (> 0 iff the pole is outside the disk).
    const Complex delta = c_ * c0 + d_;
    const double h = std::norm(delta) - std::norm(c_) * r * r;
    if (!(h > 1e-14 * std::norm(delta))) {
        throw GeometryError("disk escaped to half-plane/exterior under Moebius map");
    }
    const Complex center = ((a_ * c0 + b_) * std::conj(delta) - a_ * std::conj(c_) * r * r) / h;
    return Disk{center, r / h};
}

Packing MoebiusMap::apply(const Packing& p) const {
    Packing out;
    out.contact_tol = p.contact_tol;
    out.disks.reserve(p.size());
    for (const Disk& d : p.disks) out.disks.push_back(apply(d));
    return out;
}

namespace {

bool unmarked_in_tricusp(const Packing& p, const std::array<int, 3>& marks, const Tridisk& canon) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        const int v = static_cast<int>(i);
        if (v == marks[0] || v == marks[1] || v == marks[2]) continue;
        if (!in_tricusp(canon, p[i].center)) return false;
    }
    return true;
}

}  // namespace

CanonicalizedPacking canonicalize_tridisk(const Packing& p, const std::array<int, 3>& marks) {
    const int n = static_cast<int>(p.size());
    for (int m : marks) {
        if (m < 0 || m >= n) throw GeometryError("canonicalize_tridisk: mark out of range");
    }
    if (marks[0] == marks[1] || marks[1] == marks[2] || marks[0] == marks[2]) {
        throw GeometryError("canonicalize_tridisk: marks must be distinct");
    }
    const Tridisk source{p[marks[0]], p[marks[1]], p[marks[2]]};
    if (!is_tridisk(source, p.contact_tol)) {
        throw GeometryError("canonicalize_tridisk: marked disks are not mutually tangent");
    }
    const Tridisk canon = canonical_tridisk();
    const Disk canon_incircle = tridisk_incircle(canon);
    const MoebiusMap direct = MoebiusMap::from_three_points(contact_points(source),
                                                            contact_points(canon));
    const MoebiusMap reflected = MoebiusMap::inversion(canon_incircle).compose(direct);

    // The direct map sends the inside of the source incircle inside iff its
    // pole is outside the source incircle.  Pick the side holding the
    // unmarked disks.
    bool prefer_direct = true;
    const Disk source_incircle = tridisk_incircle(source);
    for (int i = 0; i < n; ++i) {
        if (i == marks[0] || i == marks[1] || i == marks[2]) continue;
        const bool inside = std::abs(p[i].center - source_incircle.center) < source_incircle.radius;
        bool pole_inside = false;
        if (direct.c() != MoebiusMap::Complex{0.0, 0.0}) {
            const Point pole = -direct.d() / direct.c();
            pole_inside = std::abs(pole - source_incircle.center) < source_incircle.radius;
        }
        prefer_direct = inside != pole_inside;
        break;
    }

    for (const MoebiusMap& map : prefer_direct ? std::array{direct, reflected}
                                               : std::array{reflected, direct}) {
        Packing image;
        try {
            image = map.apply(p);
        } catch (const GeometryError&) {
            continue;
        }
        for (int k = 0; k < 3; ++k) image[marks[k]] = canon[k];
        if (unmarked_in_tricusp(image, marks, canon)) return {std::move(image), map};
    }
    throw GeometryError(
        "canonicalize_tridisk: unmarked disks are not contained in the tricusp for either "
        "orientation");
}

bool is_tridisk_contained(const Packing& p, const std::array<int, 3>& marks, double tol) {
    const Tridisk canon = canonical_tridisk();
    for (int k = 0; k < 3; ++k) {
        const Disk& d = p[marks[k]];
        if (std::abs(d.center - canon[k].center) > tol || std::abs(d.radius - canon[k].radius) > tol) {
            return false;
        }
    }
    return unmarked_in_tricusp(p, marks, canon);
}

}  // namespace katflow
