#include "katflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "katflow/log.hpp"
#include "katflow/moebius.hpp"

namespace katflow {

Packing trilaterated_packing(int n, const StackingPlan& plan, std::array<int, 3> outer) {
    // Validates the plan combinatorially first.
    Triangulation::trilaterated(n, plan, outer);
    Packing p;
    p.disks.assign(static_cast<std::size_t>(n), Disk{});
    const Tridisk canon = canonical_tridisk();
    for (int k = 0; k < 3; ++k) p.disks[outer[k]] = canon[k];
    for (const auto& [v, f] : plan) p.disks[v] = inner_soddy_disk(p[f[0]], p[f[1]], p[f[2]]);
    return p;
}

FlipScenario flip_demo(int n) {
    if (n < 5) throw std::invalid_argument("flip_demo: needs at least 5 disks");
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[k] = k;
    const StackingPlan plan = Triangulation::fan_plan(order);
    FlipScenario sc{Triangulation::trilaterated(n, plan), trilaterated_packing(n, plan), {}, {0, 1, 2}};
    sc.move = sc.graph.flip(Edge{0, 3}).second;
    return sc;
}

Graph contact_graph(const Packing& p, double tol, double overlap_tol) {
    const int n = static_cast<int>(p.size());
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double f = inversive_distance(p[a], p[b]);
            if (f < 1.0 - overlap_tol) {
                throw GeometryError("not a packing: disks " + std::to_string(a) + " and " + std::to_string(b) +
                                    " overlap (inversive distance " + std::to_string(f) + ")");
            }
            if (std::abs(f - 1.0) <= tol) edges.emplace_back(a, b);
        }
    }
    return Graph::from_edges(n, edges);
}

Verification verify(const Packing& p, const Graph& g, double tol) {
    Verification v;
    const int n = static_cast<int>(p.size());
    v.radius_floor = radius_floor(n);
    v.min_radius = std::numeric_limits<double>::infinity();
    v.min_non_edge_distance = std::numeric_limits<double>::infinity();
    for (const Disk& d : p.disks) v.min_radius = std::min(v.min_radius, d.radius);
    if (n != g.n || !(v.min_radius > 0.0)) return v;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double f = inversive_distance(p[a], p[b]);
            if (g.has_edge(a, b)) {
                v.max_contact_residual = std::max(v.max_contact_residual, std::abs(f - 1.0));
                if (!(std::abs(f - 1.0) <= tol)) v.violations.push_back({Edge{a, b}, f, true});
            } else {
                v.min_non_edge_distance = std::min(v.min_non_edge_distance, f - 1.0);
                if (!(f > 1.0 + tol)) v.violations.push_back({Edge{a, b}, f, false});
            }
        }
    }
    v.contact_exact = v.violations.empty();
    return v;
}

double normalize_and_compare(const Packing& p, const Packing& q, const std::array<int, 3>& marks) {
    if (p.size() != q.size()) throw GeometryError("normalize_and_compare: packings differ in size");
    const Packing a = canonicalize_tridisk(p, marks).packing;
    const Packing b = canonicalize_tridisk(q, marks).packing;
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dev = std::max({dev, std::abs(a[i].center - b[i].center), std::abs(a[i].radius - b[i].radius)});
    }
    return dev;
}

namespace {

void finish_verification(SolveReport& report, const Packing& p, const Graph& target, double tol) {
    const double sigma = report.verification.min_sigma_ratio;
    report.verification = verify(p, target, tol);
    report.verification.min_sigma_ratio = sigma;
    for (const FlipSummary& f : report.flips) {
        report.verification.min_radius = std::min(report.verification.min_radius, f.min_radius);
    }
}

}  // namespace

SolveResult solve_maximal(const Triangulation& m, const SolveOptions& options) {
    if (!m.is_maximal()) throw GraphError("solve_maximal: graph is not maximal planar");
    const int n = m.vertex_count();
    SolveReport report;
    report.input = m.graph();

    const auto [d1, d2] = choose_dominant_pair(m, options.rng);
    report.dominant = {d1, d2};
    DoubleWheel wheel;
    const std::vector<FlipMove> to_wheel = canonicalize_to_double_wheel(m, d1, d2, &wheel);

    // Seed: the target's own double wheel, built by fan stacking.
    std::vector<int> order{d1, d2};
    order.insert(order.end(), wheel.path.begin(), wheel.path.end());
    const StackingPlan plan = Triangulation::fan_plan(order);
    const std::array<int, 3> outer{order[0], order[1], order[2]};
    Triangulation cur = Triangulation::trilaterated(n, plan, outer);
    Packing packing = trilaterated_packing(n, plan, outer);

    // flip_path(seed, m) with the same dominant pair: the seed is already a
    // wheel, so only the reversed canonicalization of m remains.
    std::vector<FlipMove> moves;
    for (auto it = to_wheel.rbegin(); it != to_wheel.rend(); ++it) moves.push_back(it->reversed());
    report.flip_count = static_cast<int>(moves.size());
    log::info("solve_maximal: n={}, dominant ({},{}), {} flips", n, d1, d2, moves.size());

    double min_sigma = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < moves.size(); ++k) {
        const FlipMove& mv = moves[k];
        FlipSummary summary;
        summary.move = mv;
        summary.marks = choose_marks(cur, mv.removed);
        FlowOptions fopt = options.flow;
        if (options.on_frame) {
            const int index = static_cast<int>(k);
            fopt.on_step = [&options, index](const FlowState& s) { options.on_frame(index, s); };
        }
        try {
            const Packing start = canonicalize_tridisk(packing, summary.marks).packing;
            FlowResult res = flip_flow(start, cur, mv, summary.marks, fopt);
            summary.steps = static_cast<int>(res.trace.samples.size());
            summary.rejected_steps = res.trace.rejected_steps;
            summary.final_s = res.trace.final_s;
            summary.event_error = res.trace.event_error;
            summary.min_radius = res.trace.min_radius;
            summary.min_sigma_ratio = res.trace.min_sigma_ratio;
            min_sigma = std::min(min_sigma, res.trace.min_sigma_ratio);
            if (options.on_trace) options.on_trace(static_cast<int>(k), res.trace);
            packing = std::move(res.packing);
        } catch (const std::exception& e) {
            report.flips.push_back(summary);
            report.failure = "flip " + std::to_string(k) + " (" + std::to_string(mv.removed.u) + "," +
                             std::to_string(mv.removed.v) + ") failed: " + e.what();
            log::error("{}", report.failure);
            throw SolveError(report.failure, report);
        }
        report.flips.push_back(summary);
        cur = cur.flip(mv.removed).first;
    }
    if (!cur.same_graph(m)) throw std::logic_error("solve_maximal: flip sequence did not reach the target");

    packing = canonicalize_tridisk(packing, m.triangle_faces().front()).packing;
    report.verification.min_sigma_ratio = moves.empty() ? 0.0 : min_sigma;
    finish_verification(report, packing, m.graph(), options.contact_tol);
    if (!report.verification.ok()) {
        report.failure = "verification failed: contact graph differs from the target";
        throw SolveError(report.failure, report);
    }
    return {std::move(packing), std::move(report)};
}

SolveResult solve_planar(const Graph& g, const SolveOptions& options) {
    if (g.n < 1) throw GraphError("solve_planar: empty graph");
    if (g.n <= 2) {
        SolveResult out;
        out.report.input = g;
        out.packing.disks.push_back(Disk{{0, 0}, 1});
        if (g.n == 2) out.packing.disks.push_back(Disk{{g.edges.empty() ? 4.0 : 2.0, 0}, 1});
        out.report.verification = verify(out.packing, g, options.contact_tol);
        return out;
    }
    const std::vector<Edge> added = maximal_planar_augmentation(g);
    std::vector<Edge> all = g.edges;
    all.insert(all.end(), added.begin(), added.end());
    const Triangulation m = Triangulation::from_graph(Graph::from_edges(g.n, all));

    SolveResult res = solve_maximal(m, options);
    res.report.input = g;
    res.report.augmentation = added;
    if (added.empty()) return res;

    const auto marks = m.triangle_faces().front();
    try {
        const SeparationResult sep =
            separation_flow(res.packing, m, added, options.separation_delta, marks, options.flow);
        res.packing = sep.packing;
        res.report.separation_min_added = sep.min_added_distance;
        res.report.separation_max_residual = sep.max_contact_residual;
        res.report.separation_min_radius = sep.min_radius;
        res.report.verification.min_sigma_ratio =
            std::min(res.report.verification.min_sigma_ratio, sep.min_sigma_ratio);
    } catch (const std::exception& e) {
        res.report.failure = std::string("separation flow failed: ") + e.what();
        throw SolveError(res.report.failure, res.report);
    }
    finish_verification(res.report, res.packing, g, options.contact_tol);
    res.report.verification.min_radius =
        std::min(res.report.verification.min_radius, res.report.separation_min_radius);
    if (!res.report.verification.ok()) {
        res.report.failure = "verification failed after separation";
        throw SolveError(res.report.failure, res.report);
    }
    return res;
}

}  // namespace katflow
