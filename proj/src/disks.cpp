#include "katflow/disks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace katflow {

namespace {

void require_positive(const Disk& d) {
    if (!(d.radius > 0.0) || !std::isfinite(d.radius)) {
        throw GeometryError("disk radius must be positive and finite, got " +
                            std::to_string(d.radius));
    }
}

}  // namespace

double inversive_distance(const Disk& a, const Disk& b) {
    require_positive(a);
    require_positive(b);
    const double d2 = std::norm(a.center - b.center);
    return (d2 - (a.radius * a.radius + b.radius * b.radius)) / (2.0 * a.radius * b.radius);
}

bool is_packing(const Packing& p) {
    const auto n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p[i].radius > 0.0)) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sum = p[i].radius + p[j].radius;
            if (std::abs(p[i].center - p[j].center) < sum - p.contact_tol * sum) return false;
        }
    }
    return true;
}

Tridisk canonical_tridisk() {
    return {Disk{{0.0, 0.0}, 1.0}, Disk{{2.0, 0.0}, 1.0}, Disk{{1.0, std::sqrt(3.0)}, 1.0}};
}

Point contact_point(const Disk& a, const Disk& b) {
    const Point delta = b.center - a.center;
    const double len = std::abs(delta);
    if (len == 0.0) throw GeometryError("contact point of concentric disks is undefined");
    return a.center + a.radius * delta / len;
}

std::array<Point, 3> contact_points(const Tridisk& t) {
    return {contact_point(t[0], t[1]), contact_point(t[1], t[2]), contact_point(t[2], t[0])};
}

bool is_tridisk(const Tridisk& t, double tol) {
    for (int i = 0; i < 3; ++i) {
        if (!(t[i].radius > 0.0)) return false;
    }
    for (int i = 0; i < 3; ++i) {
        if (std::abs(inversive_distance(t[i], t[(i + 1) % 3]) - 1.0) > tol) return false;
    }
    return true;
}

Disk circumcircle(Point a, Point b, Point c) {
    // Solve |z - a| = |z - b| = |z - c| relative to a.
    const Point u = b - a;
    const Point v = c - a;
    const double det = 2.0 * (u.real() * v.imag() - u.imag() * v.real());
    const double scale = std::max({std::norm(u), std::norm(v), 1e-300});
    if (std::abs(det) <= 1e-14 * scale) {
        throw GeometryError("circumcircle of collinear points");
    }
    const double nu = std::norm(u);
    const double nv = std::norm(v);
    const Point rel{(v.imag() * nu - u.imag() * nv) / det, (u.real() * nv - v.real() * nu) / det};
    return Disk{a + rel, std::abs(rel)};
}

Disk tridisk_incircle(const Tridisk& t) {
    const auto cp = contact_points(t);
    return circumcircle(cp[0], cp[1], cp[2]);
}

Disk inner_soddy_disk(const Disk& a, const Disk& b, const Disk& c, double tol) {
    const Tridisk t{a, b, c};
    if (!is_tridisk(t, tol)) {
        throw GeometryError("inner_soddy_disk: input disks are not mutually tangent");
    }
    const double k1 = a.curvature();
    const double k2 = b.curvature();
    const double k3 = c.curvature();
    const double k4 = k1 + k2 + k3 + 2.0 * std::sqrt(k1 * k2 + k2 * k3 + k3 * k1);

    // Work relative to a's centre to avoid cancellation far from the origin.
    const Point origin = a.center;
    const Point w1{0.0, 0.0};
    const Point w2 = k2 * (b.center - origin);
    const Point w3 = k3 * (c.center - origin);
    const Point root = std::sqrt(w1 * w2 + w2 * w3 + w3 * w1);
    const double r4 = 1.0 / k4;

    // Exactly one sign of the square root yields the tangent centre.
    Disk best;
    double best_err = std::numeric_limits<double>::infinity();
    for (const double sign : {1.0, -1.0}) {
        const Disk cand{origin + (w1 + w2 + w3 + 2.0 * sign * root) / k4, r4};
        double err = 0.0;
        for (const Disk* d : {&a, &b, &c}) {
            err = std::max(err, std::abs(std::abs(cand.center - d->center) - (r4 + d->radius)) /
                                    (r4 + d->radius));
        }
        if (err < best_err) {
            best_err = err;
            best = cand;
        }
    }
    return best;
}

bool in_tricusp(const Tridisk& t, Point q) {
    const Disk inc = tridisk_incircle(t);
    if (!(std::abs(q - inc.center) < inc.radius)) return false;
    for (const Disk& d : t) {
        if (!(std::abs(q - d.center) > d.radius)) return false;
    }
    return true;
}

}  // namespace katflow
