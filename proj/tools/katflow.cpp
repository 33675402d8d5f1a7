// katflow: disk packings with prescribed contact graphs.
//
//   katflow solve --graph g.json --out p.json [--svg p.svg] [--frames dir]
//                 [--tol eps] [--seed u64] [--report r.json] [--dump-jacobian dir]
//   katflow verify --packing p.json --graph g.json [--tol eps]
//   katflow flow-demo [--n 5] [--frames dir] [--out p.json] [--svg p.svg]
//
// Exit status: 0 success, 1 solver abort or failed verification, 2 bad input.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "katflow/flow.hpp"
#include "katflow/io.hpp"
#include "katflow/jacobian.hpp"
#include "katflow/moebius.hpp"
#include "katflow/solver.hpp"

namespace fs = std::filesystem;
using namespace katflow;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

class FrameWriter {
public:
    explicit FrameWriter(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void write(const Packing& p, const std::vector<Edge>& highlight) {
        SvgOptions opt;
        try {
            opt.contacts = contact_graph(p, 1e-6);
        } catch (const GeometryError&) {
        }
        opt.highlight = highlight;
        opt.incircle = true;
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05d.svg", count_++);
        write_file((fs::path(dir_) / name).string(), render_svg(p, opt));
    }

    int count() const { return count_; }

private:
    std::string dir_;
    int count_ = 0;
};

PackingDocument make_document(const Packing& p, const Graph& g, double tol, int flips) {
    PackingDocument doc;
    doc.packing = p;
    doc.contacts = contact_graph(p, tol).edges;
    doc.meta.contact_tol = tol;
    doc.meta.proj_tol = FlowOptions{}.proj_tol;
    doc.meta.graph_hash = graph_hash(g);
    doc.meta.flip_count = flips;
    return doc;
}

void dump_jacobians(const std::string& dir, const Graph& g, const Packing& p) {
    fs::create_directories(dir);
    const std::vector<Edge> added = maximal_planar_augmentation(g);
    std::vector<Edge> all = g.edges;
    all.insert(all.end(), added.begin(), added.end());
    const Triangulation m = Triangulation::from_graph(Graph::from_edges(g.n, all));
    const auto marks = m.triangle_faces().front();
    const JacobianMatrix full = build_full(m, p);
    const JacobianMatrix jc = center_pin(full, marks);
    const JacobianMatrix jp = pin(jc, marks);
    const std::pair<const char*, const JacobianMatrix*> files[] = {{"J.csv", &full}, {"Jc.csv", &jc}, {"Jp.csv", &jp}};
    for (const auto& [name, j] : files) {
        std::ofstream out(fs::path(dir) / name);
        write_csv(*j, out);
    }
}

void print_violations(const Verification& v) {
    for (const PairViolation& pv : v.violations) {
        std::cerr << "  pair (" << pv.pair.u << "," << pv.pair.v << ") "
                  << (pv.should_touch ? "should touch" : "should be disjoint") << ": inversive distance "
                  << std::setprecision(17) << pv.inversive_distance << "\n";
    }
}

struct SolveArgs {
    std::string graph;
    std::string out;
    std::string svg;
    std::string frames;
    std::string report;
    std::string jacobian;
    double tol = 1e-6;
    std::optional<std::uint64_t> seed;
};

int run_solve(const SolveArgs& a) {
    const Graph g = parse_graph_json(read_file(a.graph));
    SolveOptions opt;
    opt.contact_tol = a.tol;
    std::mt19937_64 rng;
    if (a.seed) {
        rng.seed(*a.seed);
        opt.rng = &rng;
    }
    std::optional<FrameWriter> frames;
    if (!a.frames.empty()) {
        frames.emplace(a.frames);
        opt.on_frame = [&frames](int, const FlowState& s) { frames->write(s.packing, {}); };
    }
    SolveResult res;
    try {
        res = solve_planar(g, opt);
    } catch (const SolveError& e) {
        std::cerr << "katflow: solver aborted: " << e.what() << "\n";
        print_violations(e.report().verification);
        if (!a.report.empty()) write_file(a.report, report_to_json(e.report()));
        return kFailed;
    }
    write_file(a.out, packing_to_json(make_document(res.packing, g, a.tol, res.report.flip_count)));
    if (!a.svg.empty()) {
        SvgOptions so;
        so.contacts = g;
        write_file(a.svg, render_svg(res.packing, so));
    }
    if (!a.report.empty()) write_file(a.report, report_to_json(res.report));
    if (!a.jacobian.empty()) dump_jacobians(a.jacobian, g, res.packing);
    std::cout << "solved: n=" << g.n << ", " << g.edges.size() << " edges, " << res.report.flip_count
              << " flips, max contact residual " << res.report.verification.max_contact_residual << "\n";
    return kOk;
}

int run_verify(const std::string& packing, const std::string& graph, double tol) {
    const PackingDocument doc = parse_packing_json(read_file(packing));
    const Graph g = parse_graph_json(read_file(graph));
    if (g.n != static_cast<int>(doc.packing.size())) {
        throw InputError("packing has " + std::to_string(doc.packing.size()) + " disks but the graph has " +
                         std::to_string(g.n) + " vertices");
    }
    const Verification v = verify(doc.packing, g, tol);
    if (v.ok() && v.contact_exact) {
        std::cout << "ok: contact graph matches, max contact residual " << v.max_contact_residual << "\n";
        return kOk;
    }
    std::cerr << "katflow: verification failed: " << v.violations.size() << " violated pair(s)\n";
    print_violations(v);
    return kFailed;
}

int run_flow_demo(int n, const std::string& frames_dir, const std::string& out, const std::string& svg) {
    if (n < 5) throw InputError("flow-demo needs --n >= 5");
    const FlipScenario sc = flip_demo(n);
    FlowOptions opt;
    std::optional<FrameWriter> frames;
    if (!frames_dir.empty()) {
        frames.emplace(frames_dir);
        opt.on_step = [&](const FlowState& s) { frames->write(s.packing, {sc.move.removed, sc.move.inserted}); };
    }
    FlowResult res;
    try {
        res = flip_flow(sc.packing, sc.graph, sc.move, sc.marks, opt);
    } catch (const FlowError& e) {
        std::cerr << "katflow: flow aborted: " << e.what() << "\n";
        return kFailed;
    }
    const Triangulation h = sc.graph.flip(sc.move.removed).first;
    if (!out.empty()) write_file(out, packing_to_json(make_document(res.packing, h.graph(), 1e-6, 1)));
    if (!svg.empty()) {
        SvgOptions so;
        so.contacts = h.graph();
        so.incircle = true;
        write_file(svg, render_svg(res.packing, so));
    }
    std::cout << "flip (" << sc.move.removed.u << "," << sc.move.removed.v << ") -> (" << sc.move.inserted.u << ","
              << sc.move.inserted.v << "): " << res.trace.samples.size() << " states, s* = " << std::setprecision(12)
              << res.trace.final_s;
    if (frames) std::cout << ", " << frames->count() << " frames";
    std::cout << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disk packings with prescribed contact graphs"};
    app.require_subcommand(1);

    SolveArgs sa;
    CLI::App* solve = app.add_subcommand("solve", "Pack disks realizing a planar graph");
    solve->add_option("--graph", sa.graph, "input graph JSON")->required();
    solve->add_option("--out", sa.out, "output packing JSON")->required();
    solve->add_option("--svg", sa.svg, "SVG rendering of the packing");
    solve->add_option("--frames", sa.frames, "directory for per-step SVG frames");
    solve->add_option("--tol", sa.tol, "contact tolerance on inversive distance")->check(CLI::PositiveNumber);
    solve->add_option("--seed", sa.seed, "seed for flip-path tie-breaking");
    solve->add_option("--report", sa.report, "solve report JSON");
    solve->add_option("--dump-jacobian", sa.jacobian, "directory for J, Jc, Jp CSV dumps");

    std::string vpacking;
    std::string vgraph;
    double vtol = 1e-6;
    CLI::App* ver = app.add_subcommand("verify", "Check a packing against a graph");
    ver->add_option("--packing", vpacking, "packing JSON")->required();
    ver->add_option("--graph", vgraph, "graph JSON")->required();
    ver->add_option("--tol", vtol, "contact tolerance on inversive distance")->check(CLI::PositiveNumber);

    int dn = 5;
    std::string dframes;
    std::string dout;
    std::string dsvg;
    CLI::App* demo = app.add_subcommand("flow-demo", "Run one flip flow on a trilaterated fan packing");
    demo->add_option("--n", dn, "number of disks (>= 5)");
    demo->add_option("--frames", dframes, "directory for per-step SVG frames");
    demo->add_option("--out", dout, "final packing JSON");
    demo->add_option("--svg", dsvg, "SVG of the final packing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadInput;
    }

    try {
        if (*solve) return run_solve(sa);
        if (*ver) return run_verify(vpacking, vgraph, vtol);
        return run_flow_demo(dn, dframes, dout, dsvg);
    } catch (const InputError& e) {
        std::cerr << "katflow: bad input: " << e.what() << "\n";
        return kBadInput;
    } catch (const GraphError& e) {
        std::cerr << "katflow: bad graph: " << e.what() << "\n";
        return kBadInput;
    } catch (const GeometryError& e) {
        std::cerr << "katflow: bad packing: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "katflow: error: " << e.what() << "\n";
        return kFailed;
    }
}
