// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Tolerances, sample counts and time limits are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "katflow/flow.hpp"
#include "katflow/generators.hpp"
#include "katflow/jacobian.hpp"
#include "katflow/moebius.hpp"
#include "katflow/solver.hpp"
#include "oracles.hpp"

using namespace katflow;
using Complex = MoebiusMap::Complex;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_deviation(const Packing& a, const Packing& b) {
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dev = std::max({dev, std::abs(a[i].center - b[i].center), std::abs(a[i].radius - b[i].radius)});
    }
    return dev;
}

std::vector<Edge> edges_with_last(const Triangulation& g, Edge last) {
    std::vector<Edge> rows;
    for (const Edge& e : g.edges()) {
        if (e != last) rows.push_back(e);
    }
    rows.push_back(last);
    return rows;
}

Edge random_flippable(const Triangulation& g, std::mt19937_64& rng) {
    std::vector<Edge> flippable;
    for (const Edge& e : g.edges()) {
        if (g.is_flippable(e)) flippable.push_back(e);
    }
    if (flippable.empty()) return Edge{-1, -1};
    return flippable[std::uniform_int_distribution<std::size_t>(0, flippable.size() - 1)(rng)];
}

// Radius floor bookkeeping shared by the flow criteria.
struct RadiusLog {
    int flows = 0;
    int below_floor = 0;
    double min_radius = std::numeric_limits<double>::infinity();
    int min_radius_n = 0;

    void add(double r, int n) {
        ++flows;
        if (!(r > radius_floor(n))) ++below_floor;
        if (r < min_radius) {
            min_radius = r;
            min_radius_n = n;
        }
    }
    void add(const SolveReport& rep, int n) {
        for (const FlipSummary& f : rep.flips) add(f.min_radius, n);
        if (!rep.augmentation.empty()) add(rep.separation_min_radius, n);
    }
};

RadiusLog radii;

Outcome tangency() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Tridisk t = oracle::random_tangent_triple(rng);
        worst = std::max(worst, std::abs(inversive_distance(t[0], t[1]) - 1.0));
    }
    return {worst <= 1e-12, fmt("1000 pairs, max |I-1| = %.2e", worst)};
}

Outcome moebius_invariance() {
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    std::uniform_real_distribution<double> rad(0.1, 2.0);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    int trials = 0;
    int reflections = 0;
    while (trials < 1000) {
        const Disk a{{pos(rng), pos(rng)}, rad(rng)};
        const Disk b{{pos(rng), pos(rng)}, rad(rng)};
        const Complex ma{u(rng), u(rng)}, mb{u(rng), u(rng)}, mc{u(rng), u(rng)}, md{u(rng), u(rng)};
        if (std::abs(ma * md - mb * mc) < 0.1) continue;
        const bool reflect = std::bernoulli_distribution(0.5)(rng);
        const MoebiusMap m(ma, mb, mc, md, reflect);
        Disk ia;
        Disk ib;
        try {
            ia = m.apply(a);
            ib = m.apply(b);
        } catch (const GeometryError&) {
            continue;  // the pole lies in a disk: its image is not a disk
        }
        const double before = inversive_distance(a, b);
        worst = std::max(worst, std::abs(inversive_distance(ia, ib) - before) / std::max(1.0, std::abs(before)));
        reflections += reflect;
        ++trials;
    }
    return {worst <= 1e-9, fmt("1000 trials (%d with reflection), max relative change %.2e", reflections, worst)};
}

Outcome jacobian_fd() {
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> pos(-20.0, 20.0);
    std::uniform_real_distribution<double> rad(0.1, 10.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + trial % 6;
        Packing p;
        for (int i = 0; i < n; ++i) p.disks.push_back(Disk{{pos(rng), pos(rng)}, rad(rng)});
        std::vector<Edge> rows;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) rows.emplace_back(a, b);
        const JacobianMatrix j = build_full(rows, p);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto r = static_cast<Eigen::Index>(k);
            for (int col = 0; col < 3 * n; ++col) {
                const int i = col / 3;
                double fd = 0.0;
                if (i == rows[k].u) fd = oracle::fd_partial(p[i], p[rows[k].v], col % 3);
                else if (i == rows[k].v) fd = oracle::fd_partial(p[i], p[rows[k].u], col % 3);
                worst = std::max(worst, std::abs(j.values(r, col) - fd));
            }
        }
    }
    return {worst <= 1e-6, fmt("100 configurations, max |J - FD| = %.2e", worst)};
}

Outcome rank_certificates() {
    std::mt19937_64 rng(1004);
    int bad = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    int samples = 0;
    while (samples < 50) {
        const int n = 5 + samples % 8;
        const Triangulation g = random_maximal(n, 30, rng);
        const Edge e = random_flippable(g, rng);
        if (e.u < 0) continue;
        ++samples;
        const auto marks = choose_marks(g, e);
        const Packing pg = canonicalize_tridisk(solve_maximal(g).packing, marks).packing;
        const auto [h, move] = g.flip(e);
        const FlowResult fr = flip_flow(pg, g, move, marks);
        radii.add(fr.trace.min_radius, n);
        worst_ratio = std::min(worst_ratio, fr.trace.min_sigma_ratio);

        const JacobianMatrix jg = build_full(g, pg);
        const JacobianMatrix jh = build_full(h, fr.packing);
        const JacobianMatrix jminus = build_full(g.remove_edge(e).edges(), pg);
        const JacobianMatrix jpg = pin(center_pin(build_full(edges_with_last(g, e), pg), marks), marks);
        const JacobianMatrix jph =
            pin(center_pin(build_full(edges_with_last(h, move.inserted), fr.packing), marks), marks);
        if (rank_certificate(jg).rank != 3 * n - 6) ++bad;
        if (rank_certificate(jh).rank != 3 * n - 6) ++bad;
        if (rank_certificate(jminus).rank != 3 * n - 7) ++bad;
        for (const JacobianMatrix* jp : {&jpg, &jph}) {
            const RankCertificate c = rank_certificate(*jp);
            worst_ratio = std::min(worst_ratio, c.sigma_min / c.sigma_max);
            if (!(c.sigma_min > kDefaultRankTol * c.sigma_max)) ++bad;
        }
    }
    return {bad == 0, fmt("50 flips (G, G-, H), %d failed certificates, min sigma_min/sigma_max of J_p = %.2e", bad,
                          worst_ratio)};
}

Outcome single_flip() {
    const FlipScenario sc = flip_demo(5);
    const FlowResult res = flip_flow(sc.packing, sc.graph, sc.move, sc.marks);
    radii.add(res.trace.min_radius, 5);
    const Packing& p = res.packing;
    const Triangulation h = sc.graph.flip(sc.move.removed).first;
    const double eplus = std::abs(inversive_distance(p[sc.move.inserted.u], p[sc.move.inserted.v]) - 1.0);
    double gminus = 0.0;
    for (const Edge& e : sc.graph.remove_edge(sc.move.removed).edges()) {
        gminus = std::max(gminus, std::abs(inversive_distance(p[e.u], p[e.v]) - 1.0));
    }
    bool monotone = true;
    const auto& s = res.trace.samples;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(s[k].df_plus < 0.0)) monotone = false;
        if (k > 0 && !(s[k].f_plus < s[k - 1].f_plus)) monotone = false;
    }
    const bool exact = contact_graph(p, 1e-6) == h.graph();
    return {eplus <= 1e-10 && gminus <= 1e-11 && exact && monotone,
            fmt("|I(e+)-1| = %.2e, max G- residual %.2e, contact graph %s, f+ %s over %zu states", eplus, gminus,
                exact ? "= H" : "!= H", monotone ? "strictly decreasing" : "NOT monotone", s.size())};
}

Outcome dual_round_trip() {
    std::mt19937_64 rng(1006);
    double worst = 0.0;
    int trials = 0;
    while (trials < 20) {
        const int n = 5 + trials % 6;
        const Triangulation g = random_maximal(n, 30, rng);
        const Edge e = random_flippable(g, rng);
        if (e.u < 0) continue;
        ++trials;
        const auto marks = choose_marks(g, e);
        const Packing start = canonicalize_tridisk(solve_maximal(g).packing, marks).packing;
        const auto [h, move] = g.flip(e);
        const FlowResult fwd = flip_flow(start, g, move, marks);
        const FlowResult back = flip_flow(fwd.packing, h, move.reversed(), marks);
        radii.add(fwd.trace.min_radius, n);
        radii.add(back.trace.min_radius, n);
        worst = std::max(worst, max_deviation(back.packing, start));
    }
    return {worst <= 1e-7, fmt("20 flips, n <= 10, max deviation after the dual flow %.2e", worst)};
}

Outcome existence() {
    std::mt19937_64 rng(1007);
    int solved = 0;
    double worst = 0.0;
    int flips = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 4 + k % 9;
        const Triangulation m = random_maximal(n, 30, rng);
        try {
            const SolveResult res = solve_maximal(m);
            radii.add(res.report, n);
            flips += res.report.flip_count;
            worst = std::max(worst, res.report.verification.max_contact_residual);
            if (contact_graph(res.packing, 1e-6) == m.graph()) ++solved;
        } catch (const std::exception& e) {
            std::printf("  n=%d: %s\n", n, e.what());
        }
    }
    return {solved == 100, fmt("%d/100 exact at tol 1e-6, %d flows, max contact residual %.2e", solved, flips, worst)};
}

Outcome uniqueness() {
    std::mt19937_64 rng(1008);
    std::mt19937_64 path_rng(2008);
    double worst = 0.0;
    int differing = 0;
    for (int k = 0; k < 20; ++k) {
        const int n = 6 + k % 7;
        const Triangulation m = random_maximal(n, 30, rng);
        const SolveResult a = solve_maximal(m);
        // Prefer a second path with a different dominant pair.
        SolveOptions opt;
        opt.rng = &path_rng;
        SolveResult b = solve_maximal(m, opt);
        for (int retry = 0; retry < 10 && b.report.dominant == a.report.dominant; ++retry) b = solve_maximal(m, opt);
        differing += b.report.dominant != a.report.dominant;
        radii.add(a.report, n);
        radii.add(b.report, n);
        for (const auto& face : m.triangle_faces()) worst = std::max(worst, normalize_and_compare(a.packing, b.packing, face));
    }
    return {worst <= 1e-6 && differing == 20,
            fmt("20 targets, %d with distinct flip paths, max deviation after normalization %.2e", differing, worst)};
}

Outcome non_maximal() {
    std::mt19937_64 rng(1009);
    int exact = 0;
    double min_added = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 30; ++k) {
        const int n = 4 + k % 7;
        const Graph g = k < 10 ? cycle_graph(n) : k < 20 ? random_tree(n, rng) : random_biconnected_planar(n, rng);
        try {
            const SolveResult res = solve_planar(g);
            radii.add(res.report, n);
            if (contact_graph(res.packing, 1e-6) == g) ++exact;
            for (const Edge& e : res.report.augmentation) {
                min_added = std::min(min_added, inversive_distance(res.packing[e.u], res.packing[e.v]));
            }
        } catch (const std::exception& e) {
            std::printf("  n=%d: %s\n", n, e.what());
        }
    }
    return {exact == 30 && min_added >= 1.001,
            fmt("%d/30 exact (10 cycles, 10 trees, 10 2-connected), min I on added edges %.6f", exact, min_added)};
}

Outcome radius_floor_diagnostic() {
    std::printf("  min radius over %d flows: %.3e (n=%d); above 1e-4: %s\n", radii.flows, radii.min_radius,
                radii.min_radius_n, radii.min_radius > 1e-4 ? "yes" : "no");
    return {radii.flows > 0 && radii.below_floor == 0,
            fmt("%d flows, %d below (7n)^-n, smallest radius %.3e", radii.flows, radii.below_floor, radii.min_radius)};
}

Outcome flip_paths() {
    std::mt19937_64 rng(1011);
    int ok = 0;
    long total = 0;
    for (int k = 0; k < 200; ++k) {
        const int n = 4 + k % 9;
        const Triangulation a = random_maximal(n, 30, rng);
        const Triangulation b = random_maximal(n, 30, rng);
        const std::vector<FlipMove> path = flip_path(a, b, k % 2 ? &rng : nullptr);
        total += static_cast<long>(path.size());
        Triangulation cur = a;
        bool good = true;
        for (const FlipMove& mv : path) {
            if (!cur.is_flippable(mv.removed)) {
                good = false;
                break;
            }
            auto [next, done] = cur.flip(mv.removed);
            if (done.inserted != mv.inserted) {
                good = false;
                break;
            }
            cur = std::move(next);
        }
        if (good && cur.graph() == b.graph()) ++ok;
    }
    return {ok == 200, fmt("%d/200 paths replay to the labeled target, %ld flips in total", ok, total)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"tangency calculus", 1, tangency},
        {"Moebius invariance", 5, moebius_invariance},
        {"Jacobian vs finite differences", 5, jacobian_fd},
        {"rank certificates", 30, rank_certificates},
        {"single flip flow", 10, single_flip},
        {"reverse flow consistency", 120, dual_round_trip},
        {"existence on maximal graphs", 600, existence},
        {"uniqueness across flip paths", 300, uniqueness},
        {"non-maximal targets", 300, non_maximal},
        {"radius floor", 1, radius_floor_diagnostic},
        {"flip-path planner", 60, flip_paths},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const Criterion& c = criteria[k];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = out.pass && in_time;
        failed += !pass;
        std::printf("%s %2zu %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", k + 1, c.name,
                    out.detail.c_str(), secs, c.limit_s, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
