#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "katflow/moebius.hpp"
#include "oracles.hpp"

using namespace katflow;

namespace {

using Complex = MoebiusMap::Complex;

MoebiusMap random_map(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        const Complex a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)}, d{u(rng), u(rng)};
        if (std::abs(a * d - b * c) < 0.1) continue;
        return MoebiusMap(a, b, c, d, std::bernoulli_distribution(0.5)(rng));
    }
}

// Canonical tridisk, its inner Soddy disk (3), and the disk nestled between
// 0, 1 and 3 (4).
Packing small_trilaterated_packing() {
    const Tridisk t = canonical_tridisk();
    Packing p;
    p.disks.assign(t.begin(), t.end());
    p.disks.push_back(inner_soddy_disk(p[0], p[1], p[2]));
    p.disks.push_back(inner_soddy_disk(p[0], p[1], p[3]));
    return p;
}

double max_deviation(const Packing& a, const Packing& b) {
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dev = std::max({dev, std::abs(a[i].center - b[i].center), std::abs(a[i].radius - b[i].radius)});
    }
    return dev;
}

// Random map under which every disk of p stays a bounded disk of moderate
// size.
MoebiusMap random_safe_map(std::mt19937_64& rng, const Packing& p) {
    for (;;) {
        const MoebiusMap m = random_map(rng);
        try {
            const Packing img = m.apply(p);
            bool ok = true;
            for (const Disk& d : img.disks) ok = ok && d.radius < 1e3 && d.radius > 1e-3;
            if (ok) return m;
        } catch (const GeometryError&) {
        }
    }
}

}  // namespace

TEST(Moebius, FromThreePointsScaling) {
    const MoebiusMap m = MoebiusMap::from_three_points({Point(0), Point(1), Point(2)},
                                                       {Point(0), Point(2), Point(4)});
    EXPECT_NEAR(std::abs(m(Point(5)) - Point(10)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(m(Point(-1.5, 2)) - Point(-3, 4)), 0.0, 1e-13);
}

TEST(Moebius, FromThreePointsIdentity) {
    const std::array<Point, 3> z{Point(0.3, -1), Point(2, 2), Point(-4, 0.5)};
    const MoebiusMap m = MoebiusMap::from_three_points(z, z);
    for (Point q : {Point(7, 1), Point(-0.2, 0.9), Point(0)}) {
        EXPECT_NEAR(std::abs(m(q) - q), 0.0, 1e-13);
    }
}

TEST(Moebius, FromThreePointsSwap) {
    const MoebiusMap m = MoebiusMap::from_three_points({Point(0), Point(1), Point(2)},
                                                       {Point(1), Point(0), Point(2)});
    EXPECT_NEAR(std::abs(m(Point(0)) - Point(1)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(m(Point(1)) - Point(0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(m(Point(2)) - Point(2)), 0.0, 1e-14);
}

TEST(Moebius, FromThreePointsReproducesTargets) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<Point, 3> z, w;
        for (int k = 0; k < 3; ++k) {
            z[k] = {u(rng), u(rng)};
            w[k] = {u(rng), u(rng)};
        }
        const MoebiusMap m = MoebiusMap::from_three_points(z, w);
        EXPECT_NEAR(std::abs(m.a() * m.d() - m.b() * m.c() - 1.0), 0.0, 1e-12);
        for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(m(z[k]) - w[k]), 1e-13 * (1 + std::abs(w[k])) * 10);
    }
}

TEST(Moebius, FromThreePointsRejectsRepeats) {
    EXPECT_THROW(MoebiusMap::from_three_points({Point(0), Point(0), Point(2)},
                                               {Point(1), Point(0), Point(2)}),
                 GeometryError);
    EXPECT_THROW(MoebiusMap::from_three_points({Point(0), Point(1), Point(2)},
                                               {Point(1), Point(1), Point(2)}),
                 GeometryError);
}

TEST(Moebius, ApplyToDiskBasics) {
    const Disk d{{1, 0}, 1};
    const Disk same = MoebiusMap::identity().apply(d);
    EXPECT_EQ(same.center, d.center);
    EXPECT_EQ(same.radius, d.radius);
    const Disk doubled = MoebiusMap(2.0, 0.0, 0.0, 1.0).apply(d);
    EXPECT_NEAR(std::abs(doubled.center - Point(2, 0)), 0.0, 1e-15);
    EXPECT_NEAR(doubled.radius, 2.0, 1e-15);
}

TEST(Moebius, ApplyToDiskMatchesBoundaryImage) {
    // The image circle must contain the images of boundary points.
    std::mt19937_64 rng(9);
    const Packing p = small_trilaterated_packing();
    for (int trial = 0; trial < 100; ++trial) {
        const MoebiusMap m = random_safe_map(rng, p);
        for (const Disk& d : p.disks) {
            const Disk img = m.apply(d);
            for (int k = 0; k < 6; ++k) {
                const Point q = d.center + std::polar(d.radius, k * 1.047);
                EXPECT_NEAR(std::abs(m(q) - img.center), img.radius, 1e-9 * img.radius);
            }
        }
    }
}

TEST(Moebius, ApplyRejectsDiskContainingPole) {
    const MoebiusMap inv(0.0, 1.0, 1.0, 0.0);  // z -> 1/z, pole at 0
    EXPECT_THROW(inv.apply(Disk{{0.5, 0}, 1.0}), GeometryError);
    EXPECT_NO_THROW(inv.apply(Disk{{3.0, 0}, 1.0}));
}

TEST(Moebius, ComposeAndInverse) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const MoebiusMap f = random_map(rng);
        const MoebiusMap g = random_map(rng);
        const Point z{u(rng), u(rng)};
        try {
            const Point fg = f(g(z));
            EXPECT_LE(std::abs(f.compose(g)(z) - fg), 1e-9 * (1 + std::abs(fg)));
            EXPECT_LE(std::abs(f.inverse()(f(z)) - z), 1e-9 * (1 + std::abs(f(z))));
        } catch (const GeometryError&) {
        }
    }
}

TEST(Moebius, InversiveDistanceInvariance) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    std::uniform_real_distribution<double> rad(0.1, 2.0);
    int checked = 0;
    int reflections = 0;
    while (checked < 300) {
        const Disk a{{pos(rng), pos(rng)}, rad(rng)};
        const Disk b{{pos(rng), pos(rng)}, rad(rng)};
        const MoebiusMap m = random_map(rng);
        Disk ia, ib;
        try {
            ia = m.apply(a);
            ib = m.apply(b);
        } catch (const GeometryError&) {
            continue;
        }
        const double before = inversive_distance(a, b);
        const double after = inversive_distance(ia, ib);
        EXPECT_LE(std::abs(before - after), 1e-9 * std::max(1.0, std::abs(before)));
        reflections += m.conjugate_first();
        ++checked;
    }
    EXPECT_GT(reflections, 0);
}

TEST(Canonicalize, AlreadyCanonicalIsIdentity) {
    const Packing p = small_trilaterated_packing();
    const auto out = canonicalize_tridisk(p, {0, 1, 2});
    EXPECT_LE(max_deviation(out.packing, p), 1e-13);
    EXPECT_FALSE(out.map.conjugate_first());
    for (Point q : {Point(0.3, 0.2), Point(5, -1)}) EXPECT_NEAR(std::abs(out.map(q) - q), 0.0, 1e-13);
    EXPECT_TRUE(is_tridisk_contained(out.packing, {0, 1, 2}));
}

TEST(Canonicalize, FourDiskInnerCentre) {
    Packing p = small_trilaterated_packing();
    p.disks.pop_back();
    const auto out = canonicalize_tridisk(p, {0, 1, 2});
    EXPECT_NEAR(std::abs(out.packing[3].center - Point(1, std::sqrt(3.0) / 3)), 0.0, 1e-13);
}

TEST(Canonicalize, UndoesRandomMaps) {
    std::mt19937_64 rng(23);
    const Packing p = small_trilaterated_packing();
    for (int trial = 0; trial < 100; ++trial) {
        const MoebiusMap m = random_safe_map(rng, p);
        const Packing moved = m.apply(p);
        const auto out = canonicalize_tridisk(moved, {0, 1, 2});
        EXPECT_LE(max_deviation(out.packing, p), 1e-9) << "trial " << trial;
        EXPECT_EQ(out.map.conjugate_first(), m.conjugate_first());
    }
}

TEST(Canonicalize, MirroredPackingUsesReflection) {
    Packing p = small_trilaterated_packing();
    for (Disk& d : p.disks) d.center = std::conj(d.center);
    const auto out = canonicalize_tridisk(p, {0, 1, 2});
    EXPECT_TRUE(out.map.conjugate_first());
    EXPECT_LE(max_deviation(out.packing, small_trilaterated_packing()), 1e-12);
}

TEST(Canonicalize, IdempotentUnderOtherMarkings) {
    const Packing p = small_trilaterated_packing();
    // Faces of the stacked graph on 5 vertices.
    for (std::array<int, 3> marks : {std::array{0, 1, 4}, std::array{3, 1, 4}, std::array{2, 0, 3},
                                     std::array{1, 2, 3}, std::array{4, 3, 0}}) {
        const auto once = canonicalize_tridisk(p, marks);
        EXPECT_TRUE(is_tridisk_contained(once.packing, marks));
        const auto twice = canonicalize_tridisk(once.packing, marks);
        EXPECT_LE(max_deviation(once.packing, twice.packing), 1e-10);
    }
}

TEST(Canonicalize, CommutesWithMoebiusMaps) {
    std::mt19937_64 rng(29);
    const Packing p = small_trilaterated_packing();
    const std::array<int, 3> marks{1, 3, 4};
    const Packing reference = canonicalize_tridisk(p, marks).packing;
    for (int trial = 0; trial < 50; ++trial) {
        const MoebiusMap m = random_safe_map(rng, p);
        const Packing other = canonicalize_tridisk(m.apply(p), marks).packing;
        EXPECT_LE(max_deviation(reference, other), 1e-9);
    }
}

TEST(Canonicalize, RejectsNonTangentMarks) {
    const Packing p = small_trilaterated_packing();
    // Disks 2 and 4 are not in contact.
    EXPECT_THROW(canonicalize_tridisk(p, {0, 2, 4}), GeometryError);
}
