#include "katflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "katflow/log.hpp"
#include "katflow/moebius.hpp"

namespace katflow {

namespace {

using Builder = std::function<JacobianMatrix(const std::vector<Edge>&, const Packing&)>;

Packing displace(const Packing& p, const std::vector<int>& columns, const Eigen::VectorXd& v, double h) {
    Packing q = p;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const int id = columns[c];
        Disk& d = q.disks[id / 3];
        const double step = h * v(static_cast<Eigen::Index>(c));
        if (id % 3 == 0) d.center += step;
        else if (id % 3 == 1) d.center += Point(0, step);
        else d.radius += step;
    }
    return q;
}

double min_radius(const Packing& p) {
    double m = std::numeric_limits<double>::infinity();
    for (const Disk& d : p.disks) m = std::min(m, d.radius);
    return m;
}

bool radii_positive(const Packing& p) {
    for (const Disk& d : p.disks) {
        if (!(d.radius > 0.0) || !std::isfinite(d.radius) || !std::isfinite(std::abs(d.center))) return false;
    }
    return true;
}

Eigen::VectorXd edge_values(const std::vector<Edge>& rows, const Packing& p) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        f(static_cast<Eigen::Index>(k)) = inversive_distance(p[rows[k].u], p[rows[k].v]);
    }
    return f;
}

double scaled_residual(const Eigen::VectorXd& f, const Eigen::VectorXd& targets) {
    double res = 0.0;
    for (Eigen::Index k = 0; k < f.size(); ++k) {
        res = std::max(res, std::abs(f(k) - targets(k)) / std::max(1.0, std::abs(targets(k))));
    }
    return res;
}

struct Newton {
    Packing packing;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Newton projection onto {invdist(rows) = targets} over the free columns of
// the square Jacobian produced by build.
Newton newton_project(const Packing& guess, const std::vector<Edge>& rows,
                      const Eigen::VectorXd& targets, const Builder& build, const FlowOptions& opt) {
    Newton out{guess, 0, 0.0, false};
    if (!radii_positive(guess)) return out;
    for (;;) {
        const JacobianMatrix j = build(rows, out.packing);
        const Eigen::VectorXd f = edge_values(j.row_edges, out.packing);
        Eigen::VectorXd t(f.size());
        for (Eigen::Index k = 0; k < f.size(); ++k) {
            const auto it = std::find(rows.begin(), rows.end(), j.row_edges[k]);
            t(k) = targets(it - rows.begin());
        }
        out.residual = scaled_residual(f, t);
        if (out.residual <= opt.proj_tol) {
            out.converged = true;
            return out;
        }
        if (out.iterations >= opt.max_newton || !std::isfinite(out.residual)) return out;
        const Eigen::VectorXd dx = solve(j, f - t, opt.rank_tol);
        out.packing = displace(out.packing, j.columns, dx, -1.0);
        ++out.iterations;
        if (!radii_positive(out.packing)) return out;
    }
}

double max_relative_change(const Packing& a, const Packing& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a[i].radius;
        m = std::max({m, std::abs(a[i].center - b[i].center) / r, std::abs(a[i].radius - b[i].radius) / r});
    }
    return m;
}

std::vector<Edge> non_edges_of(const Triangulation& g) {
    std::vector<Edge> out;
    for (int a = 0; a < g.vertex_count(); ++a) {
        for (int b = a + 1; b < g.vertex_count(); ++b) {
            if (!g.has_edge(a, b)) out.emplace_back(a, b);
        }
    }
    return out;
}

bool is_face(const Triangulation& g, std::array<int, 3> marks) {
    std::sort(marks.begin(), marks.end());
    const auto faces = g.triangle_faces();
    return std::find(faces.begin(), faces.end(), marks) != faces.end();
}

}  // namespace

double radius_floor(int n) { return std::pow(7.0 * n, -static_cast<double>(n)); }

std::array<int, 3> choose_marks(const Triangulation& g, Edge e_minus) {
    const auto faces = g.remove_edge(e_minus).triangle_faces();
    for (const auto& f : faces) {
        const bool touches = std::find(f.begin(), f.end(), e_minus.u) != f.end() ||
                             std::find(f.begin(), f.end(), e_minus.v) != f.end();
        if (!touches) return f;
    }
    return faces.front();
}

FlipFlow::FlipFlow(const Triangulation& g, const FlipMove& move, const std::array<int, 3>& marks,
                   FlowOptions options)
    : g_(g), move_(move), marks_(marks), opt_(std::move(options)) {
    if (!g.is_maximal()) throw std::invalid_argument("flip_flow: graph must be maximal");
    if (!g.has_edge(move.removed.u, move.removed.v) || !g.is_flippable(move.removed)) {
        throw std::invalid_argument("flip_flow: e- is not a flippable edge");
    }
    const auto [h, done] = g.flip(move.removed);
    if (done.inserted != move.inserted) throw std::invalid_argument("flip_flow: e+ does not match the flip");
    if (!is_face(g.remove_edge(move.removed), marks)) {
        throw std::invalid_argument("flip_flow: marks are not a triangular face of G-");
    }
    for (const Edge& e : g.edges()) {
        if (e != move.removed) {
            rows_.push_back(e);
            h_rows_.push_back(e);
        }
    }
    rows_.push_back(move.removed);
    h_rows_.push_back(move.inserted);
    for (const Edge& e : non_edges_of(g)) {
        if (e != move.inserted) non_edges_.push_back(e);
    }
}

JacobianMatrix FlipFlow::pinned(const std::vector<Edge>& rows, const Packing& p) const {
    return pin(center_pin(build_full(rows, p), marks_), marks_);
}

Eigen::VectorXd FlipFlow::velocity(const Packing& p) const {
    return flip_velocity(pinned(rows_, p), move_.removed, opt_.rank_tol);
}

Packing FlipFlow::displaced(const Packing& p, const Eigen::VectorXd& v, double h) const {
    return displace(p, pinned(rows_, p).columns, v, h);
}

FlipFlow::Projection FlipFlow::project(const Packing& guess, const std::vector<Edge>& rows,
                                       const Eigen::VectorXd& targets) const {
    const Builder build = [this](const std::vector<Edge>& r, const Packing& q) { return pinned(r, q); };
    const Newton nt = newton_project(guess, rows, targets, build, opt_);
    if (!nt.converged) {
        throw StepFailure("Newton projection failed after " + std::to_string(nt.iterations) +
                          " iterations (residual " + std::to_string(nt.residual) + ")");
    }
    return {nt.packing, nt.iterations, nt.residual};
}

FlowState FlipFlow::make_state(Packing p, double ds, int iterations, double residual) const {
    FlowState st;
    st.s = inversive_distance(p[move_.removed.u], p[move_.removed.v]);
    st.f_plus = inversive_distance(p[move_.inserted.u], p[move_.inserted.v]);
    st.ds = ds;
    st.newton_iterations = iterations;
    st.residual = residual;
    const JacobianMatrix jp = pinned(rows_, p);
    const RankCertificate cert = rank_certificate(jp, opt_.rank_tol);
    st.sigma_min = cert.sigma_min;
    st.sigma_max = cert.sigma_max;
    const Eigen::VectorXd v = flip_velocity(jp, move_.removed, opt_.rank_tol);
    const JacobianMatrix grad = build_full(std::vector<Edge>{move_.inserted}, p);
    for (std::size_t c = 0; c < jp.columns.size(); ++c) {
        st.df_plus += grad.values(0, jp.columns[c]) * v(static_cast<Eigen::Index>(c));
    }
    st.min_radius = min_radius(p);
    st.packing = std::move(p);
    return st;
}

void FlipFlow::check_state(const FlowState& prev, const FlowState& next) const {
    const Packing& p = next.packing;
    if (!radii_positive(p)) throw StepFailure("non-positive radius");
    const Tridisk canon = canonical_tridisk();
    for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        if (i == marks_[0] || i == marks_[1] || i == marks_[2]) continue;
        if (!in_tricusp(canon, p[i].center)) throw StepFailure("disk " + std::to_string(i) + " left the tricusp");
    }
    for (const Edge& e : non_edges_) {
        if (!(inversive_distance(p[e.u], p[e.v]) > 1.0)) {
            throw StepFailure("non-edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") came into contact");
        }
    }
    if (max_relative_change(prev.packing, p) > opt_.max_relative_change) throw StepFailure("step too large");
}

FlowState FlipFlow::initial(const Packing& start) const {
    if (static_cast<int>(start.size()) != g_.vertex_count()) {
        throw std::invalid_argument("flip_flow: packing size does not match the graph");
    }
    if (!is_tridisk_contained(start, marks_, 1e-9)) {
        throw std::invalid_argument("flip_flow: start packing is not tridisk-contained on the marks");
    }
    for (const Edge& e : g_.edges()) {
        if (std::abs(inversive_distance(start[e.u], start[e.v]) - 1.0) > 1e-8) {
            throw std::invalid_argument("flip_flow: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                        ") of G is not in contact");
        }
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rows_.size()));
    Projection pr;
    try {
        pr = project(start, rows_, ones);
    } catch (const StepFailure& e) {
        throw std::invalid_argument(std::string("flip_flow: cannot project start packing: ") + e.what());
    }
    FlowState st = make_state(std::move(pr.packing), 0.0, pr.iterations, pr.residual);
    if (!(st.f_plus > 1.0)) throw std::invalid_argument("flip_flow: e+ is already in contact");
    return st;
}

FlowState FlipFlow::step(const FlowState& state, double ds) const {
    try {
        const Packing& x0 = state.packing;
        const JacobianMatrix j0 = pinned(rows_, x0);
        const std::vector<int>& cols = j0.columns;
        const Eigen::VectorXd k1 = flip_velocity(j0, move_.removed, opt_.rank_tol);
        const Eigen::VectorXd k2 = velocity(displace(x0, cols, k1, ds / 2));
        const Eigen::VectorXd k3 = velocity(displace(x0, cols, k2, ds / 2));
        const Eigen::VectorXd k4 = velocity(displace(x0, cols, k3, ds));
        const Packing predicted = displace(x0, cols, (k1 + 2 * k2 + 2 * k3 + k4) / 6.0, ds);
        Eigen::VectorXd targets = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rows_.size()));
        targets(targets.size() - 1) = state.s + ds;
        Projection pr = project(predicted, rows_, targets);
        if (max_relative_change(x0, pr.packing) > opt_.max_relative_change) throw StepFailure("step too large");
        return make_state(std::move(pr.packing), ds, pr.iterations, pr.residual);
    } catch (const SingularJacobian& e) {
        throw StepFailure(e.what());
    } catch (const GeometryError& e) {
        throw StepFailure(e.what());
    }
}

FlowState FlipFlow::detect_contact_event(const FlowState& lo_in, const FlowState& hi_in, FlowTrace& trace) const {
    FlowState lo = lo_in;
    FlowState hi = hi_in;
    double ga = lo.f_plus - 1.0;
    double gb = hi.f_plus - 1.0;
    int side = 0;  // Illinois bookkeeping
    FlowState best = std::abs(ga) < std::abs(gb) ? lo : hi;
    int it = 0;
    for (; it < 60 && std::abs(best.f_plus - 1.0) > opt_.event_tol; ++it) {
        double c = hi.s - gb * (hi.s - lo.s) / (gb - ga);
        if (!(c > lo.s && c < hi.s)) c = 0.5 * (lo.s + hi.s);
        FlowState mid;
        try {
            mid = step(lo, c - lo.s);
        } catch (const StepFailure& e) {
            trace.event_iterations = it;
            throw FlowError(std::string("event localization failed: ") + e.what(), trace);
        }
        const double gc = mid.f_plus - 1.0;
        if (std::abs(gc) < std::abs(best.f_plus - 1.0)) best = mid;
        if (gc > 0.0) {
            lo = mid;
            ga = gc;
            if (side == -1) gb /= 2;
            side = -1;
        } else {
            hi = mid;
            gb = gc;
            if (side == 1) ga /= 2;
            side = 1;
        }
        if (hi.s - lo.s <= 4 * std::numeric_limits<double>::epsilon() * hi.s) break;
    }
    trace.event_iterations = it;
    trace.event_error = std::abs(best.f_plus - 1.0);
    if (trace.event_error > opt_.event_tol) {
        throw FlowError("event localization did not reach |f+ - 1| <= " + std::to_string(opt_.event_tol), trace);
    }
    // Final projection onto the contact set of H.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(h_rows_.size()));
    try {
        Projection pr = project(best.packing, h_rows_, ones);
        return make_state(std::move(pr.packing), best.ds, pr.iterations, pr.residual);
    } catch (const std::exception& e) {
        throw FlowError(std::string("projection onto H failed: ") + e.what(), trace);
    }
}

FlowResult FlipFlow::run(const Packing& start) const {
    FlowTrace trace;
    FlowState st = initial(start);
    auto record = [&](const FlowState& s) {
        trace.samples.push_back(s);
        if (opt_.on_step) opt_.on_step(s);
    };
    record(st);
    double ds = opt_.ds_initial;
    FlowState final_state;
    bool done = false;
    for (int steps = 0; !done; ++steps) {
        if (steps >= opt_.max_steps) throw FlowError("flip_flow: maximum number of steps exceeded", trace);
        FlowState next;
        try {
            next = step(st, ds);
            if (next.f_plus > 1.0) check_state(st, next);
        } catch (const StepFailure& e) {
            ++trace.rejected_steps;
            ds /= 2;
            log::trace("flip_flow: rejected step at s={} ({}), ds -> {}", st.s, e.what(), ds);
            if (ds < opt_.ds_min) {
                throw FlowError(std::string("flip_flow: step size underflow at s=") + std::to_string(st.s) +
                                    ": " + e.what(),
                                trace);
            }
            continue;
        }
        if (next.f_plus <= 1.0) {
            final_state = detect_contact_event(st, next, trace);
            done = true;
            break;
        }
        if (!(next.f_plus < st.f_plus) || !(next.df_plus < 0.0)) {
            throw FlowError("flip_flow: f+ is not strictly decreasing at s=" + std::to_string(next.s), trace);
        }
        if (!(next.sigma_min > opt_.rank_tol * next.sigma_max)) {
            throw FlowError("flip_flow: pinned Jacobian became singular at s=" + std::to_string(next.s), trace);
        }
        st = std::move(next);
        record(st);
        if (st.newton_iterations <= 3) ds = std::min(2 * ds, opt_.ds_max);
    }

    // The terminal state must realize H exactly.
    if (!(final_state.s > 1.0)) throw FlowError("flip_flow: e- did not separate", trace);
    try {
        check_state(st, final_state);
    } catch (const StepFailure& e) {
        throw FlowError(std::string("flip_flow: terminal state invalid: ") + e.what(), trace);
    }
    record(final_state);
    trace.final_s = final_state.s;
    trace.min_radius = std::numeric_limits<double>::infinity();
    trace.min_sigma_ratio = std::numeric_limits<double>::infinity();
    for (const FlowState& s : trace.samples) {
        trace.min_radius = std::min(trace.min_radius, s.min_radius);
        trace.min_sigma_ratio = std::min(trace.min_sigma_ratio, s.sigma_min / s.sigma_max);
    }
    log::info("flip ({},{}) -> ({},{}): {} steps, {} rejected, s* = {:.12g}, min radius {:.3g}",
              move_.removed.u, move_.removed.v, move_.inserted.u, move_.inserted.v, trace.samples.size(),
              trace.rejected_steps, trace.final_s, trace.min_radius);
    return {final_state.packing, std::move(trace)};
}

FlowResult flip_flow(const Packing& start, const Triangulation& g, const FlipMove& move,
                     const std::array<int, 3>& marks, FlowOptions options) {
    return FlipFlow(g, move, marks, std::move(options)).run(start);
}

SeparationResult separation_flow(const Packing& p, const Triangulation& m,
                                 const std::vector<Edge>& added_edges, double delta,
                                 const std::array<int, 3>& marks, FlowOptions opt) {
    SeparationResult out;
    out.packing = p;
    out.min_radius = min_radius(p);
    out.min_added_distance = std::numeric_limits<double>::infinity();
    out.min_sigma_ratio = std::numeric_limits<double>::infinity();
    if (added_edges.empty()) return out;
    if (!(delta > 0.0)) throw std::invalid_argument("separation_flow: delta must be positive");
    if (!is_face(m, marks)) throw std::invalid_argument("separation_flow: marks are not a face of M");
    for (const Edge& e : added_edges) {
        if (!m.has_edge(e.u, e.v)) throw std::invalid_argument("separation_flow: added edge not in M");
    }
    const std::vector<Edge> rows = m.edges();
    const std::vector<Edge> non_edges = non_edges_of(m);
    const std::vector<double> rates(added_edges.size(), 1.0);
    Eigen::VectorXd rate = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows.size()));
    for (const Edge& e : added_edges) rate(std::find(rows.begin(), rows.end(), e) - rows.begin()) = 1.0;

    const Builder build = [&](const std::vector<Edge>& r, const Packing& q) {
        return center_pin(build_full(r, q), marks);
    };
    auto velocity = [&](const Packing& q, std::vector<int>* cols) {
        const JacobianMatrix jc = build(rows, q);
        if (cols) *cols = jc.columns;
        return separation_velocity(jc, added_edges, rates, opt.rank_tol);
    };
    auto targets_at = [&](double t) { return Eigen::VectorXd(Eigen::VectorXd::Ones(rate.size()) + t * rate); };

    const Newton start = newton_project(p, rows, targets_at(0.0), build, opt);
    if (!start.converged) throw std::invalid_argument("separation_flow: input does not realize M");
    Packing cur = start.packing;

    // A hair past delta so that rounding cannot leave an edge just below it.
    const double t_end = delta + 1e-9;
    double t = 0.0;
    double dt = std::min(opt.ds_initial, t_end / 8);
    FlowTrace trace;
    while (t < t_end) {
        if (out.steps >= opt.max_steps) throw FlowError("separation_flow: maximum number of steps exceeded", trace);
        const double h = std::min(dt, t_end - t);
        Newton nt;
        bool ok = false;
        try {
            std::vector<int> cols;
            const Eigen::VectorXd k1 = velocity(cur, &cols);
            const Eigen::VectorXd k2 = velocity(displace(cur, cols, k1, h / 2), nullptr);
            const Eigen::VectorXd k3 = velocity(displace(cur, cols, k2, h / 2), nullptr);
            const Eigen::VectorXd k4 = velocity(displace(cur, cols, k3, h), nullptr);
            const Packing predicted = displace(cur, cols, (k1 + 2 * k2 + 2 * k3 + k4) / 6.0, h);
            nt = newton_project(predicted, rows, targets_at(t + h), build, opt);
            ok = nt.converged && max_relative_change(cur, nt.packing) <= opt.max_relative_change;
            for (const Edge& e : non_edges) {
                ok = ok && inversive_distance(nt.packing[e.u], nt.packing[e.v]) > 1.0;
            }
        } catch (const SingularJacobian&) {
            ok = false;
        } catch (const GeometryError&) {
            ok = false;
        }
        if (!ok) {
            dt /= 2;
            if (dt < opt.ds_min) throw FlowError("separation_flow: step size underflow", trace);
            continue;
        }
        cur = std::move(nt.packing);
        t += h;
        ++out.steps;
        const RankCertificate cert = rank_certificate(build(rows, cur), opt.rank_tol);
        out.min_sigma_ratio = std::min(out.min_sigma_ratio, cert.sigma_min / cert.sigma_max);
        out.min_radius = std::min(out.min_radius, min_radius(cur));
        if (nt.iterations <= 3) dt = std::min(2 * dt, opt.ds_max);
    }
    for (const Edge& e : rows) {
        const double f = inversive_distance(cur[e.u], cur[e.v]);
        if (std::find(added_edges.begin(), added_edges.end(), e) != added_edges.end()) {
            out.min_added_distance = std::min(out.min_added_distance, f);
        } else {
            out.max_contact_residual = std::max(out.max_contact_residual, std::abs(f - 1.0));
        }
    }
    out.packing = std::move(cur);
    log::info("separation flow: {} added edges, {} steps, min added invdist {:.12g}", added_edges.size(),
              out.steps, out.min_added_distance);
    return out;
}

}  // namespace katflow
