#include "katflow/triangulation.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace katflow {

namespace {

int index_in(const std::vector<int>& r, int w) {
    const auto it = std::find(r.begin(), r.end(), w);
    return it == r.end() ? -1 : static_cast<int>(it - r.begin());
}

// Inserts w into the gap between the cyclically adjacent entries x and y.
void insert_between(std::vector<int>& r, int x, int y, int w) {
    const int deg = static_cast<int>(r.size());
    const int i = index_in(r, x);
    const int j = index_in(r, y);
    if (i < 0 || j < 0) throw GraphError("insert_between: missing rotation entry");
    if ((i + 1) % deg == j) {
        r.insert(r.begin() + i + 1, w);
    } else if ((j + 1) % deg == i) {
        r.insert(r.begin() + j + 1, w);
    } else {
        throw GraphError("insert_between: entries are not adjacent in rotation");
    }
}

void insert_after(std::vector<int>& r, int x, int w) {
    const int i = index_in(r, x);
    if (i < 0) throw GraphError("insert_after: missing rotation entry");
    r.insert(r.begin() + i + 1, w);
}

void erase_value(std::vector<int>& r, int w) {
    const auto it = std::find(r.begin(), r.end(), w);
    if (it == r.end()) throw GraphError("erase: missing rotation entry");
    r.erase(it);
}

std::array<int, 3> sorted_triple(int a, int b, int c) {
    std::array<int, 3> t{a, b, c};
    std::sort(t.begin(), t.end());
    return t;
}

}  // namespace

FlipMove FlipMove::reversed() const {
    return FlipMove{inserted, removed, {quad[1], quad[2], quad[3], quad[0]}};
}

Triangulation Triangulation::from_graph(const Graph& g) {
    if (g.n < 3) throw GraphError("triangulation needs at least 3 vertices");
    const auto m = g.edges.size();
    const auto maximal = 3 * static_cast<std::size_t>(g.n) - 6;
    Kind kind;
    if (m == maximal) {
        kind = Kind::Maximal;
    } else if (m + 1 == maximal && g.n >= 5) {
        kind = Kind::AlmostMaximal;
    } else {
        throw GraphError("graph has " + std::to_string(m) + " edges; a maximal planar graph on " +
                         std::to_string(g.n) + " vertices has " + std::to_string(maximal));
    }
    auto rot = planar_embedding(g);
    if (!rot) throw GraphError("graph is not planar");
    Triangulation t(g.n, std::move(*rot), kind);
    t.fix_orientation();
    t.validate();
    return t;
}

Triangulation Triangulation::trilaterated(
    int n, const std::vector<std::pair<int, std::array<int, 3>>>& plan, std::array<int, 3> outer) {
    if (n < 3) throw GraphError("trilaterated graph needs n >= 3");
    if (plan.size() != static_cast<std::size_t>(n - 3)) {
        throw GraphError("stacking plan must place exactly n - 3 vertices");
    }
    const auto [o0, o1, o2] = outer;
    if (std::min({o0, o1, o2}) < 0 || std::max({o0, o1, o2}) >= n || o0 == o1 || o1 == o2 || o0 == o2) {
        throw GraphError("trilaterated: bad outer triple");
    }
    std::vector<std::vector<int>> rot(static_cast<std::size_t>(n));
    rot[o0] = {o1, o2};
    rot[o1] = {o2, o0};
    rot[o2] = {o0, o1};
    // Directed faces; the outer face is traversed o0 -> o2 -> o1.
    std::vector<std::array<int, 3>> faces{{o0, o1, o2}};
    std::vector<char> placed(static_cast<std::size_t>(n), 0);
    placed[o0] = placed[o1] = placed[o2] = 1;
    for (const auto& [v, target] : plan) {
        if (v < 0 || v >= n || placed[v]) throw GraphError("stacking plan: bad vertex " + std::to_string(v));
        const auto want = sorted_triple(target[0], target[1], target[2]);
        const auto it = std::find_if(faces.begin(), faces.end(), [&](const auto& f) {
            return sorted_triple(f[0], f[1], f[2]) == want;
        });
        if (it == faces.end()) {
            throw GraphError("stacking plan: face (" + std::to_string(want[0]) + "," +
                             std::to_string(want[1]) + "," + std::to_string(want[2]) +
                             ") not present");
        }
        const auto [x, y, z] = *it;
        faces.erase(it);
        insert_after(rot[x], z, v);
        insert_after(rot[y], x, v);
        insert_after(rot[z], y, v);
        rot[v] = {y, x, z};
        faces.push_back({x, y, v});
        faces.push_back({y, z, v});
        faces.push_back({z, x, v});
        placed[v] = 1;
    }
    Triangulation t(n, std::move(rot), Kind::Maximal);
    t.fix_orientation();
    t.validate();
    return t;
}

StackingPlan Triangulation::fan_plan(const std::vector<int>& order) {
    std::vector<std::pair<int, std::array<int, 3>>> plan;
    for (std::size_t k = 3; k < order.size(); ++k) {
        plan.push_back({order[k], {order[0], order[1], order[k - 1]}});
    }
    return plan;
}

bool Triangulation::has_edge(int a, int b) const {
    if (a < 0 || b < 0 || a >= n_ || b >= n_) return false;
    const auto& r = rot_[a];
    return std::find(r.begin(), r.end(), b) != r.end();
}

std::size_t Triangulation::edge_count() const {
    std::size_t total = 0;
    for (const auto& r : rot_) total += r.size();
    return total / 2;
}

std::vector<Edge> Triangulation::edges() const {
    std::vector<Edge> out;
    for (int v = 0; v < n_; ++v) {
        for (int w : rot_[v]) {
            if (v < w) out.emplace_back(v, w);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<int>> Triangulation::faces() const { return embedding_faces(rot_); }

std::vector<std::array<int, 3>> Triangulation::triangle_faces() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& f : faces()) {
        if (f.size() == 3) out.push_back(sorted_triple(f[0], f[1], f[2]));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int Triangulation::position(int v, int w) const {
    const int i = index_in(rot_[v], w);
    if (i < 0) {
        throw GraphError("edge (" + std::to_string(v) + "," + std::to_string(w) + ") not present");
    }
    return i;
}

std::pair<int, int> Triangulation::apexes(int a, int c) const {
    if (a < 0 || c < 0 || a >= n_ || c >= n_) throw GraphError("apexes: vertex out of range");
    const auto& r = rot_[a];
    const int deg = static_cast<int>(r.size());
    const int i = position(a, c);
    return {r[(i + 1) % deg], r[(i + deg - 1) % deg]};
}

bool Triangulation::is_flippable(Edge e) const {
    if (!has_edge(e.u, e.v)) {
        throw GraphError("is_flippable: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") not present");
    }
    if (kind_ != Kind::Maximal || n_ < 5) return false;
    const auto [b, d] = apexes(e.u, e.v);
    return b != d && !has_edge(b, d);
}

Triangulation Triangulation::remove_edge(Edge e) const {
    if (!is_flippable(e)) {
        throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") is not flippable");
    }
    auto rot = rot_;
    erase_value(rot[e.u], e.v);
    erase_value(rot[e.v], e.u);
    Triangulation t(n_, std::move(rot), Kind::AlmostMaximal);
    return t;
}

std::array<int, 4> Triangulation::quadrilateral() const {
    if (kind_ != Kind::AlmostMaximal) throw GraphError("quadrilateral: triangulation is maximal");
    for (const auto& f : faces()) {
        if (f.size() == 4) return {f[0], f[1], f[2], f[3]};
    }
    throw GraphError("quadrilateral: no quadrilateral face");
}

Triangulation Triangulation::insert_diagonal(Edge e) const {
    const auto q = quadrilateral();
    int i = -1;
    for (int k = 0; k < 4; ++k) {
        if (q[k] == e.u) i = k;
    }
    if (i < 0 || q[(i + 2) % 4] != e.v) {
        throw GraphError("insert_diagonal: edge is not a diagonal of the quadrilateral");
    }
    if (has_edge(e.u, e.v)) throw GraphError("insert_diagonal: edge already present");
    auto rot = rot_;
    const int x = q[i];
    const int y = q[(i + 2) % 4];
    insert_between(rot[x], q[(i + 1) % 4], q[(i + 3) % 4], y);
    insert_between(rot[y], q[(i + 1) % 4], q[(i + 3) % 4], x);
    return Triangulation(n_, std::move(rot), Kind::Maximal);
}

std::pair<Triangulation, FlipMove> Triangulation::flip(Edge e) const {
    if (!is_flippable(e)) {
        throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") is not flippable");
    }
    const int a = e.u;
    const int c = e.v;
    const auto [b, d] = apexes(a, c);
    auto rot = rot_;
    erase_value(rot[a], c);
    erase_value(rot[c], a);
    insert_between(rot[b], a, c, d);
    insert_between(rot[d], a, c, b);
    return {Triangulation(n_, std::move(rot), Kind::Maximal), FlipMove{Edge{a, c}, Edge{b, d}, {a, b, c, d}}};
}

void Triangulation::fix_orientation() {
    const auto fs = faces();
    const std::vector<int>* chosen = nullptr;
    std::array<int, 3> best{};
    for (const auto& f : fs) {
        if (f.size() != 3) continue;
        const auto key = sorted_triple(f[0], f[1], f[2]);
        if (!chosen || key < best) {
            chosen = &f;
            best = key;
        }
    }
    if (!chosen) return;
    // Orientation is fixed so the least triangular face is traversed in
    // increasing cyclic order.
    const auto& f = *chosen;
    const int i = static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
    if (f[(i + 1) % 3] == best[1]) return;
    for (auto& r : rot_) std::reverse(r.begin(), r.end());
}

void Triangulation::validate() const {
    if (n_ < 3) throw GraphError("triangulation needs at least 3 vertices");
    for (int v = 0; v < n_; ++v) {
        std::set<int> seen;
        for (int w : rot_[v]) {
            if (w == v) throw GraphError("self-loop at " + std::to_string(v));
            if (w < 0 || w >= n_) throw GraphError("neighbour out of range");
            if (!seen.insert(w).second) throw GraphError("multi-edge at " + std::to_string(v));
            if (index_in(rot_[w], v) < 0) throw GraphError("asymmetric rotation system");
        }
    }
    const auto e = static_cast<long>(edge_count());
    const long expected = kind_ == Kind::Maximal ? 3L * n_ - 6 : 3L * n_ - 7;
    if (e != expected) {
        throw GraphError("edge count " + std::to_string(e) + " differs from " + std::to_string(expected));
    }
    const auto fs = faces();
    const long f = static_cast<long>(fs.size());
    if (n_ - e + f != 2) throw GraphError("Euler formula violated: embedding is not planar");
    int quads = 0;
    for (const auto& face : fs) {
        if (face.size() == 4) {
            ++quads;
        } else if (face.size() != 3) {
            throw GraphError("face of size " + std::to_string(face.size()));
        }
    }
    if (quads != (kind_ == Kind::AlmostMaximal ? 1 : 0)) {
        throw GraphError("unexpected number of quadrilateral faces");
    }
    if (n_ >= 4 && !is_three_connected(n_, rot_)) throw GraphError("graph is not 3-connected");
}

bool Triangulation::same_graph(const Triangulation& other) const {
    return n_ == other.n_ && edges() == other.edges();
}

// ---------------------------------------------------------------------------
// Flip-path planning.

namespace {

bool is_link_edge(const Triangulation& g, int v, int x, int y) {
    const auto& r = g.rotation(v);
    const int deg = static_cast<int>(r.size());
    const int i = index_in(r, x);
    return r[(i + 1) % deg] == y || r[(i + deg - 1) % deg] == y;
}

// One flip that raises deg(v) or removes a chord between two neighbours of v.
// Edges at `frozen` are never flipped.
bool raise_degree_step(Triangulation& g, int v, int frozen, std::vector<FlipMove>& moves) {
    const auto r = g.rotation(v);
    const int deg = static_cast<int>(r.size());
    for (int k = 0; k < deg; ++k) {
        const int x = r[k];
        const int y = r[(k + 1) % deg];
        if (x == frozen || y == frozen) continue;
        auto [p, q] = g.apexes(x, y);
        const int z = p == v ? q : p;
        if (z != v && !g.has_edge(v, z) && g.is_flippable(Edge{x, y})) {
            auto [h, mv] = g.flip(Edge{x, y});
            g = std::move(h);
            moves.push_back(mv);
            return true;
        }
    }
    if (frozen >= 0) return false;
    // No link edge works: all non-neighbours sit behind chords of the link.
    for (int i = 0; i < deg; ++i) {
        for (int j = i + 1; j < deg; ++j) {
            const int x = r[i];
            const int y = r[j];
            if (!g.has_edge(x, y) || is_link_edge(g, v, x, y)) continue;
            const auto [p, q] = g.apexes(x, y);
            const bool reaches_out = (p != v && !g.has_edge(v, p)) || (q != v && !g.has_edge(v, q));
            if (reaches_out && g.is_flippable(Edge{x, y})) {
                auto [h, mv] = g.flip(Edge{x, y});
                g = std::move(h);
                moves.push_back(mv);
                return true;
            }
        }
    }
    return false;
}

void raise_to_dominant(Triangulation& g, int v, int frozen, std::vector<FlipMove>& moves) {
    const int n = g.vertex_count();
    // Each step either raises deg(v) or removes a chord, so this bound is slack.
    const long budget = 4L * n * n + 16;
    for (long iter = 0; g.degree(v) < n - 1; ++iter) {
        if (iter > budget || !raise_degree_step(g, v, frozen, moves)) {
            throw GraphError("double-wheel canonicalization stuck at vertex " + std::to_string(v));
        }
    }
}

std::vector<int> wheel_path(const Triangulation& g, int d1, int d2) {
    const int n = g.vertex_count();
    std::vector<int> path;
    if (n == 3) {
        for (int v = 0; v < 3; ++v) {
            if (v != d1 && v != d2) path.push_back(v);
        }
        return path;
    }
    int start = -1;
    for (int v = 0; v < n && start < 0; ++v) {
        if (v != d1 && v != d2 && g.degree(v) == 3) start = v;
    }
    if (start < 0) throw GraphError("double wheel has no path endpoint");
    int prev = -1;
    int cur = start;
    while (cur >= 0) {
        path.push_back(cur);
        int next = -1;
        for (int w : g.rotation(cur)) {
            if (w != d1 && w != d2 && w != prev) next = w;
        }
        prev = cur;
        cur = next;
    }
    if (static_cast<int>(path.size()) != n - 2) throw GraphError("double wheel path is incomplete");
    return path;
}

}  // namespace

std::vector<FlipMove> canonicalize_to_double_wheel(const Triangulation& g, int d1, int d2,
                                                   DoubleWheel* wheel) {
    if (!g.is_maximal()) throw GraphError("canonicalization needs a maximal triangulation");
    if (d1 == d2) throw GraphError("dominant vertices must differ");
    std::vector<FlipMove> moves;
    Triangulation cur = g;
    if (cur.vertex_count() >= 5) {
        raise_to_dominant(cur, d1, -1, moves);
        raise_to_dominant(cur, d2, d1, moves);
    }
    if (wheel) *wheel = DoubleWheel{d1, d2, wheel_path(cur, d1, d2)};
    return moves;
}

std::pair<int, int> choose_dominant_pair(const Triangulation& g, std::mt19937_64* rng) {
    if (rng) {
        const auto es = g.edges();
        std::uniform_int_distribution<std::size_t> pick(0, es.size() - 1);
        const Edge e = es[pick(*rng)];
        return std::bernoulli_distribution(0.5)(*rng) ? std::pair{e.u, e.v} : std::pair{e.v, e.u};
    }
    int d1 = 0;
    for (int v = 1; v < g.vertex_count(); ++v) {
        if (g.degree(v) > g.degree(d1)) d1 = v;
    }
    int d2 = -1;
    for (int w : g.rotation(d1)) {
        if (d2 < 0 || g.degree(w) > g.degree(d2) || (g.degree(w) == g.degree(d2) && w < d2)) d2 = w;
    }
    return {d1, d2};
}

namespace {

Triangulation double_wheel_graph(const DoubleWheel& w) {
    std::vector<int> order{w.d1, w.d2};
    order.insert(order.end(), w.path.begin(), w.path.end());
    const int n = static_cast<int>(order.size());
    std::vector<Edge> edges{Edge{w.d1, w.d2}};
    for (int p : w.path) {
        edges.emplace_back(w.d1, p);
        edges.emplace_back(w.d2, p);
    }
    for (std::size_t k = 1; k < w.path.size(); ++k) edges.emplace_back(w.path[k - 1], w.path[k]);
    return Triangulation::from_graph(Graph::from_edges(n, edges));
}

long inversions(const std::vector<int>& from, const std::vector<int>& to) {
    std::map<int, int> rank;
    for (std::size_t k = 0; k < to.size(); ++k) rank[to[k]] = static_cast<int>(k);
    long count = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        for (std::size_t j = i + 1; j < from.size(); ++j) {
            if (rank[from[i]] > rank[from[j]]) ++count;
        }
    }
    return count;
}

}  // namespace

std::vector<FlipMove> reorder_double_wheel(const DoubleWheel& from, const DoubleWheel& to) {
    if (from.d1 != to.d1 || from.d2 != to.d2) throw GraphError("reorder: dominant vertices differ");
    {
        auto a = from.path;
        auto b = to.path;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) throw GraphError("reorder: paths cover different vertices");
    }
    const int k = static_cast<int>(from.path.size());
    std::vector<FlipMove> moves;
    if (k <= 2) return moves;

    std::vector<int> goal = to.path;
    std::vector<int> reversed_goal(goal.rbegin(), goal.rend());
    if (inversions(from.path, reversed_goal) < inversions(from.path, goal)) goal = reversed_goal;

    Triangulation g = double_wheel_graph(from);
    std::vector<int> cur = from.path;
    const int d1 = from.d1;
    const int d2 = from.d2;
    auto do_flip = [&](int x, int y) {
        auto [h, mv] = g.flip(Edge{x, y});
        g = std::move(h);
        moves.push_back(mv);
    };
    // Adjacent transposition of path positions p and p+1.
    auto swap_at = [&](int p) {
        if (p == 0) {
            do_flip(d1, cur[1]);
            do_flip(d2, cur[0]);
            do_flip(cur[1], cur[2]);
        } else if (p + 1 == k - 1) {
            do_flip(d1, cur[k - 2]);
            do_flip(d2, cur[k - 1]);
            do_flip(cur[k - 2], cur[k - 3]);
        } else {
            do_flip(d1, cur[p]);
            do_flip(d2, cur[p + 1]);
            do_flip(cur[p - 1], cur[p]);
            do_flip(cur[p + 1], cur[p + 2]);
        }
        std::swap(cur[p], cur[p + 1]);
    };
    for (int i = 0; i < k; ++i) {
        int j = static_cast<int>(std::find(cur.begin(), cur.end(), goal[i]) - cur.begin());
        for (; j > i; --j) swap_at(j - 1);
    }
    if (!g.same_graph(double_wheel_graph(to))) throw GraphError("reorder: did not reach target wheel");
    return moves;
}

std::vector<FlipMove> flip_path(const Triangulation& source, const Triangulation& target,
                                std::mt19937_64* rng) {
    if (source.vertex_count() != target.vertex_count()) throw GraphError("flip_path: vertex counts differ");
    if (!source.is_maximal() || !target.is_maximal()) throw GraphError("flip_path: inputs must be maximal");
    if (source.same_graph(target)) return {};
    const auto [d1, d2] = choose_dominant_pair(target, rng);
    DoubleWheel ws;
    DoubleWheel wt;
    auto moves = canonicalize_to_double_wheel(source, d1, d2, &ws);
    const auto back = canonicalize_to_double_wheel(target, d1, d2, &wt);
    const auto middle = reorder_double_wheel(ws, wt);
    moves.insert(moves.end(), middle.begin(), middle.end());
    for (auto it = back.rbegin(); it != back.rend(); ++it) moves.push_back(it->reversed());
    return moves;
}

Triangulation replay(const Triangulation& g, const std::vector<FlipMove>& moves) {
    Triangulation cur = g;
    for (const FlipMove& m : moves) {
        if (!cur.has_edge(m.removed.u, m.removed.v) || !cur.is_flippable(m.removed)) {
            throw GraphError("replay: edge (" + std::to_string(m.removed.u) + "," +
                             std::to_string(m.removed.v) + ") not flippable");
        }
        auto [h, done] = cur.flip(m.removed);
        if (done.inserted != m.inserted) throw GraphError("replay: flip inserted an unexpected edge");
        cur = std::move(h);
    }
    return cur;
}

}  // namespace katflow
