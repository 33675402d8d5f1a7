#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "katflow/disks.hpp"
#include "katflow/jacobian.hpp"
#include "katflow/triangulation.hpp"

namespace katflow {

struct FlowState {
    Packing packing;
    double s = 1.0;       // inversive distance on e-
    double f_plus = 0.0;  // inversive distance on e+
    double df_plus = 0.0; // d f_plus / ds
    double ds = 0.0;      // step that produced this state
    int newton_iterations = 0;
    double residual = 0.0;
    double sigma_min = 0.0;  // of J_p
    double sigma_max = 0.0;
    double min_radius = 0.0;
};

struct FlowTrace {
    std::vector<FlowState> samples;
    double final_s = 0.0;
    double event_error = 0.0;  // |f_plus - 1| at localization, before polishing
    int event_iterations = 0;
    int rejected_steps = 0;
    double min_radius = 0.0;
    double min_sigma_ratio = 0.0;  // min over samples of sigma_min / sigma_max
};

class FlowError : public std::runtime_error {
public:
    FlowError(const std::string& what, FlowTrace trace)
        : std::runtime_error(what), trace_(std::make_shared<FlowTrace>(std::move(trace))) {}
    const FlowTrace& trace() const { return *trace_; }

private:
    std::shared_ptr<FlowTrace> trace_;
};

struct FlowOptions {
    double proj_tol = 1e-11;
    double ds_initial = 1e-2;
    double ds_min = 1e-8;
    double ds_max = 1.0;
    int max_newton = 20;
    int max_steps = 100000;
    double event_tol = 1e-10;
    double rank_tol = kDefaultRankTol;
    /// Largest accepted change of a disk per step, relative to its radius.
    double max_relative_change = 0.5;
    std::function<void(const FlowState&)> on_step;
};

struct FlowResult {
    Packing packing;
    FlowTrace trace;
};

/// Flip-flow for one move on a triangulation g (the contact graph of the
/// start packing) with the marked face held fixed.  The continuation
/// parameter s is the inversive distance of move.removed.
class FlipFlow {
public:
    FlipFlow(const Triangulation& g, const FlipMove& move, const std::array<int, 3>& marks,
             FlowOptions options = {});

    /// Projects start onto the constraint set at s = 1 and checks the
    /// preconditions.
    FlowState initial(const Packing& start) const;

    /// RK4 predictor over ds followed by Newton projection.  Throws
    /// StepFailure if Newton does not converge or the state degenerates.
    FlowState step(const FlowState& state, double ds) const;

    /// Localizes f_plus = 1 between lo (f_plus > 1) and hi (f_plus <= 1),
    /// then projects onto the contact set of H.
    FlowState detect_contact_event(const FlowState& lo, const FlowState& hi, FlowTrace& trace) const;

    FlowResult run(const Packing& start) const;

    const std::vector<Edge>& rows() const { return rows_; }
    Edge e_minus() const { return move_.removed; }
    Edge e_plus() const { return move_.inserted; }

    class StepFailure : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

private:
    struct Projection {
        Packing packing;
        int iterations = 0;
        double residual = 0.0;
    };
    JacobianMatrix pinned(const std::vector<Edge>& rows, const Packing& p) const;
    Eigen::VectorXd velocity(const Packing& p) const;
    Packing displaced(const Packing& p, const Eigen::VectorXd& v, double h) const;
    Projection project(const Packing& guess, const std::vector<Edge>& rows,
                       const Eigen::VectorXd& targets) const;
    FlowState make_state(Packing p, double ds, int iterations, double residual) const;
    void check_state(const FlowState& prev, const FlowState& next) const;

    Triangulation g_;
    FlipMove move_;
    std::array<int, 3> marks_;
    FlowOptions opt_;
    std::vector<Edge> rows_;    // edges of G with e- last
    std::vector<Edge> h_rows_;  // edges of H with e+ last
    std::vector<Edge> non_edges_;
};

FlowResult flip_flow(const Packing& start, const Triangulation& g, const FlipMove& move,
                     const std::array<int, 3>& marks, FlowOptions options = {});

/// Marked face for a flip: the least triangular face of G- avoiding both
/// endpoints of e-, else the least face of G-.
std::array<int, 3> choose_marks(const Triangulation& g, Edge e_minus);

struct SeparationResult {
    Packing packing;
    int steps = 0;
    double max_contact_residual = 0.0;
    double min_added_distance = 0.0;
    double min_radius = 0.0;
    double min_sigma_ratio = 0.0;
};

/// Drives the inversive distance of each added edge of m from 1 to at least
/// 1 + delta while the other edges of m stay in contact.  Centers of the
/// marked disks are fixed.
SeparationResult separation_flow(const Packing& p, const Triangulation& m,
                                 const std::vector<Edge>& added_edges, double delta,
                                 const std::array<int, 3>& marks, FlowOptions options = {});

/// Diagnostic radius floor 1 / (7n)^n.
double radius_floor(int n);

}  // namespace katflow
