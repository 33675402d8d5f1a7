#pragma once

#include <array>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "katflow/disks.hpp"
#include "katflow/flow.hpp"
#include "katflow/triangulation.hpp"

namespace katflow {

/// Canonical tridisk on `outer` plus one inner Soddy disk per plan entry.
Packing trilaterated_packing(int n, const StackingPlan& plan, std::array<int, 3> outer = {0, 1, 2});

/// Demo flip: the fan packing on disks 0..n-1 (disk k >= 3 stacked into
/// 0, 1, k-1), flipping the edge from disk 3 to disk 0 into (2,4).  Marks
/// are the canonical tridisk 0, 1, 2.
struct FlipScenario {
    Triangulation graph;
    Packing packing;
    FlipMove move;
    std::array<int, 3> marks{};
};
FlipScenario flip_demo(int n);

/// Edge iff |invdist - 1| <= tol.  Throws GeometryError naming the pair if
/// two disks overlap by more than overlap_tol.
Graph contact_graph(const Packing& p, double tol, double overlap_tol);
inline Graph contact_graph(const Packing& p, double tol) { return contact_graph(p, tol, tol); }

struct PairViolation {
    Edge pair;
    double inversive_distance = 0.0;
    bool should_touch = false;
};

struct Verification {
    bool contact_exact = false;
    std::vector<PairViolation> violations;
    double max_contact_residual = 0.0;   // over edges of the target
    double min_non_edge_distance = 0.0;  // over non-edges, minus 1
    double min_radius = 0.0;
    double radius_floor = 0.0;
    double min_sigma_ratio = 0.0;        // over all flows, 0 if none ran

    bool ok() const { return contact_exact && min_radius > radius_floor; }
};

/// Pairwise check of p against graph g at tolerance tol.
Verification verify(const Packing& p, const Graph& g, double tol);

struct FlipSummary {
    FlipMove move;
    std::array<int, 3> marks{};
    int steps = 0;
    int rejected_steps = 0;
    double final_s = 0.0;
    double event_error = 0.0;
    double min_radius = 0.0;
    double min_sigma_ratio = 0.0;
};

struct SolveReport {
    Graph input;
    std::vector<Edge> augmentation;
    std::array<int, 2> dominant{};
    int flip_count = 0;
    std::vector<FlipSummary> flips;
    double separation_min_added = 0.0;
    double separation_max_residual = 0.0;
    double separation_min_radius = 0.0;
    Verification verification;
    std::string failure;  // empty on success
};

class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, SolveReport report)
        : std::runtime_error(what), report_(std::make_shared<SolveReport>(std::move(report))) {}
    const SolveReport& report() const { return *report_; }

private:
    std::shared_ptr<SolveReport> report_;
};

struct SolveOptions {
    FlowOptions flow;
    double contact_tol = 1e-6;
    double separation_delta = 1e-3;
    /// Picks the dominant pair of the flip path at random when set.
    std::mt19937_64* rng = nullptr;
    /// Called with the flip index and each accepted flow state.
    std::function<void(int, const FlowState&)> on_frame;
    /// Receives the full trace of every flip.
    std::function<void(int, const FlowTrace&)> on_trace;
};

struct SolveResult {
    Packing packing;
    SolveReport report;
};

/// Packing with contact graph exactly m: double-wheel seed, then one flow
/// per flip.  The result is tridisk-contained on the least face of m.
SolveResult solve_maximal(const Triangulation& m, const SolveOptions& options = {});

/// Packing with contact graph exactly g (simple, planar).  Non-maximal
/// inputs are augmented, solved, then separated along the added edges.
SolveResult solve_planar(const Graph& g, const SolveOptions& options = {});

/// Canonicalizes both packings on marks and returns the largest deviation
/// of a center or radius.
double normalize_and_compare(const Packing& p, const Packing& q, const std::array<int, 3>& marks);

}  // namespace katflow
