#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "katflow/flow.hpp"
#include "katflow/generators.hpp"
#include "katflow/moebius.hpp"
#include "katflow/solver.hpp"

using namespace katflow;

namespace {

double max_deviation(const Packing& a, const Packing& b) {
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dev = std::max({dev, std::abs(a[i].center - b[i].center), std::abs(a[i].radius - b[i].radius)});
    }
    return dev;
}

double invdist(const Packing& p, Edge e) { return inversive_distance(p[e.u], p[e.v]); }

// A packing of a random maximal graph, canonicalized for a random flip.
struct RandomFlip {
    Triangulation g;
    Packing packing;
    FlipMove move;
    std::array<int, 3> marks{};
};

RandomFlip random_flip(int n, std::mt19937_64& rng) {
    for (;;) {
        const Triangulation g = random_maximal(n, 20, rng);
        std::vector<Edge> flippable;
        for (const Edge& e : g.edges()) {
            if (g.is_flippable(e)) flippable.push_back(e);
        }
        if (flippable.empty()) continue;
        const Edge e = flippable[std::uniform_int_distribution<std::size_t>(0, flippable.size() - 1)(rng)];
        RandomFlip rf{g, solve_maximal(g).packing, g.flip(e).second, choose_marks(g, e)};
        rf.packing = canonicalize_tridisk(rf.packing, rf.marks).packing;
        return rf;
    }
}

}  // namespace

TEST(FlipFlow, RejectsK4) {
    const Triangulation k4 = Triangulation::trilaterated(4, {{3, {0, 1, 2}}});
    const FlipMove fake{Edge{0, 3}, Edge{1, 2}, {0, 1, 3, 2}};
    EXPECT_THROW(FlipFlow(k4, fake, {0, 1, 2}), std::invalid_argument);
}

TEST(FlipFlow, RejectsMarksOutsideGMinus) {
    const FlipScenario sc = flip_demo(5);
    // Face 0,2,3 disappears when 0-3 is removed.
    EXPECT_THROW(FlipFlow(sc.graph, sc.move, {0, 2, 3}), std::invalid_argument);
}

TEST(FlipFlow, DemoReachesH) {
    const FlipScenario sc = flip_demo(5);
    EXPECT_EQ(sc.move.removed, Edge(0, 3));
    EXPECT_EQ(sc.move.inserted, Edge(2, 4));
    const FlowResult res = flip_flow(sc.packing, sc.graph, sc.move, sc.marks);
    const Packing& p = res.packing;
    EXPECT_NEAR(invdist(p, sc.move.inserted), 1.0, 1e-10);
    const Triangulation h = sc.graph.flip(sc.move.removed).first;
    for (const Edge& e : h.edges()) EXPECT_NEAR(invdist(p, e), 1.0, 1e-11);
    EXPECT_GT(invdist(p, sc.move.removed), 1.0 + 1e-3);
    EXPECT_EQ(contact_graph(p, 1e-6), h.graph());
    EXPECT_NE(contact_graph(p, 1e-6), sc.graph.graph());
    EXPECT_TRUE(is_tridisk_contained(p, sc.marks));
    EXPECT_LE(res.trace.event_iterations, 60);
}

TEST(FlipFlow, TraceInvariants) {
    const FlipScenario sc = flip_demo(6);
    const FlowResult res = flip_flow(sc.packing, sc.graph, sc.move, sc.marks);
    const auto& samples = res.trace.samples;
    ASSERT_GE(samples.size(), 3u);
    const double floor = radius_floor(6);
    const Tridisk canon = canonical_tridisk();
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const FlowState& st = samples[k];
        EXPECT_LT(st.df_plus, 0.0);
        EXPECT_GT(st.sigma_min, kDefaultRankTol * st.sigma_max);
        EXPECT_GT(st.min_radius, floor);
        for (const Edge& e : sc.graph.edges()) {
            if (e != sc.move.removed) EXPECT_NEAR(invdist(st.packing, e), 1.0, 1e-11);
        }
        for (int i = 3; i < 6; ++i) EXPECT_TRUE(in_tricusp(canon, st.packing[i].center));
        if (k > 0) {
            EXPECT_GT(st.s, samples[k - 1].s);
            EXPECT_LT(st.f_plus, samples[k - 1].f_plus);
        }
        if (k + 1 < samples.size()) {
            EXPECT_NEAR(invdist(st.packing, sc.move.removed), st.s, 1e-11 * st.s);
            EXPECT_GT(st.f_plus, 1.0);
        }
    }
}

TEST(FlipFlow, FrameHookSeesEveryAcceptedState) {
    const FlipScenario sc = flip_demo(5);
    int frames = 0;
    FlowOptions opt;
    opt.on_step = [&](const FlowState&) { ++frames; };
    const FlowResult res = flip_flow(sc.packing, sc.graph, sc.move, sc.marks, opt);
    EXPECT_EQ(frames, static_cast<int>(res.trace.samples.size()));
}

TEST(FlipFlow, DualFlowReturnsToStart) {
    std::mt19937_64 rng(211);
    for (int trial = 0; trial < 6; ++trial) {
        const RandomFlip rf = random_flip(6 + trial, rng);
        const FlowResult fwd = flip_flow(rf.packing, rf.g, rf.move, rf.marks);
        const Triangulation h = rf.g.flip(rf.move.removed).first;
        const FlowResult back = flip_flow(fwd.packing, h, rf.move.reversed(), rf.marks);
        EXPECT_LE(max_deviation(back.packing, rf.packing), 1e-7) << "trial " << trial;
    }
}

TEST(Step, ZeroStepIsIdentity) {
    const FlipScenario sc = flip_demo(5);
    const FlipFlow flow(sc.graph, sc.move, sc.marks);
    const FlowState st = flow.initial(sc.packing);
    const FlowState same = flow.step(st, 0.0);
    EXPECT_LE(max_deviation(st.packing, same.packing), 1e-12);
    EXPECT_EQ(same.newton_iterations, 0);
}

TEST(Step, LocallyReversible) {
    const FlipScenario sc = flip_demo(7);
    const FlipFlow flow(sc.graph, sc.move, sc.marks);
    FlowState st = flow.initial(sc.packing);
    st = flow.step(st, 0.05);
    for (double ds : {1e-3, 1e-2, 3e-2}) {
        const FlowState fwd = flow.step(st, ds);
        EXPECT_NEAR(fwd.s, st.s + ds, 1e-11 * fwd.s);
        const FlowState back = flow.step(fwd, -ds);
        EXPECT_LE(max_deviation(back.packing, st.packing), 1e-9);
    }
}

TEST(Step, ContactResidualsAfterStep) {
    const FlipScenario sc = flip_demo(8);
    const FlipFlow flow(sc.graph, sc.move, sc.marks);
    FlowState st = flow.initial(sc.packing);
    for (int k = 0; k < 5; ++k) {
        st = flow.step(st, 0.02);
        EXPECT_LE(st.residual, 1e-11);
    }
}

TEST(Event, LocalizesWithinTolerance) {
    const FlipScenario sc = flip_demo(5);
    const FlipFlow flow(sc.graph, sc.move, sc.marks);
    const FlowResult res = flow.run(sc.packing);
    EXPECT_LE(res.trace.event_error, 1e-10);
    // Re-localize from the last two samples before the event.
    const auto& s = res.trace.samples;
    ASSERT_GE(s.size(), 3u);
    const FlowState& lo = s[s.size() - 2];
    const FlowState hi = flow.step(lo, 1.5 * (res.trace.final_s - lo.s));
    ASSERT_LT(hi.f_plus, 1.0);
    FlowTrace t;
    const FlowState ev = flow.detect_contact_event(lo, hi, t);
    EXPECT_LE(t.event_iterations, 60);
    EXPECT_NEAR(ev.f_plus, 1.0, 1e-10);
    EXPECT_NEAR(ev.s, res.trace.final_s, 1e-8);
}

TEST(Marks, HeuristicAvoidsFlipEndpoints) {
    const FlipScenario sc = flip_demo(7);
    // Faces of G- avoiding 0 and 3 exist for n = 7, e.g. 1 4 5.
    const auto marks = choose_marks(sc.graph, Edge{0, 3});
    for (int m : marks) {
        EXPECT_NE(m, 0);
        EXPECT_NE(m, 3);
    }
    // For n = 5 every face touches 0 or 3: fall back to the least face.
    EXPECT_EQ(choose_marks(flip_demo(5).graph, Edge{0, 3}), (std::array{0, 1, 2}));
}

TEST(RadiusFloor, Values) {
    EXPECT_DOUBLE_EQ(radius_floor(1), 1.0 / 7.0);
    EXPECT_NEAR(radius_floor(5), std::pow(35.0, -5), 1e-20);
}

TEST(Separation, EmptyAddedEdgesIsIdentity) {
    const FlipScenario sc = flip_demo(6);
    const SeparationResult r = separation_flow(sc.packing, sc.graph, {}, 1e-3, {0, 1, 2});
    EXPECT_EQ(max_deviation(r.packing, sc.packing), 0.0);
}

TEST(Separation, SixVertexTarget) {
    const FlipScenario sc = flip_demo(6);
    // Remove two edges of the fan; the rest stays 2-connected.
    const std::vector<Edge> added{Edge{0, 3}, Edge{1, 4}};
    std::vector<Edge> keep;
    for (const Edge& e : sc.graph.edges()) {
        if (std::find(added.begin(), added.end(), e) == added.end()) keep.push_back(e);
    }
    const Graph g = Graph::from_edges(6, keep);
    const SeparationResult r = separation_flow(sc.packing, sc.graph, added, 1e-3, {0, 1, 2});
    EXPECT_EQ(contact_graph(r.packing, 1e-6), g);
    EXPECT_LE(r.max_contact_residual, 1e-9);
    EXPECT_GE(r.min_added_distance, 1.001);
    for (int m : {0, 1, 2}) EXPECT_EQ(r.packing[m].center, sc.packing[m].center);
}
