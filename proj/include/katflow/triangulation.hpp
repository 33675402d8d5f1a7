#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace katflow {

/// Undirected edge, always stored with first < second.
struct Edge {
    int u = 0;
    int v = 0;

    Edge() = default;
    Edge(int a, int b) : u(a < b ? a : b), v(a < b ? b : a) {}

    auto operator<=>(const Edge&) const = default;
};

class GraphError : public std::invalid_argument {
public:
    explicit GraphError(const std::string& what) : std::invalid_argument(what) {}
};

/// Plain labeled graph on vertices 0..n-1.
struct Graph {
    int n = 0;
    std::vector<Edge> edges;

    /// Sorted, deduplicated, validated (no loops, ids in range).
    static Graph from_edges(int n, std::vector<Edge> edges);
    bool has_edge(int a, int b) const;
    bool operator==(const Graph&) const = default;
};

/// Rotation system of a planar embedding: for each vertex, its neighbours in
/// cyclic order.  Returns std::nullopt if the graph is not planar.
std::optional<std::vector<std::vector<int>>> planar_embedding(const Graph& g);

/// Faces of an embedded graph as vertex cycles (closed walks for
/// non-biconnected graphs).
std::vector<std::vector<int>> embedding_faces(const std::vector<std::vector<int>>& rotation);

/// True if removing any two vertices leaves the graph connected.
bool is_three_connected(int n, const std::vector<std::vector<int>>& adjacency);

/// Adds edges to a simple planar graph until it is maximal planar.  Each
/// added edge joins the least-index vertex of a non-triangular face to a
/// non-adjacent vertex of the same face.  Throws GraphError if g is not planar.
std::vector<Edge> maximal_planar_augmentation(const Graph& g);

/// Sequence of (new vertex, face it is stacked into).
using StackingPlan = std::vector<std::pair<int, std::array<int, 3>>>;

/// One combinatorial edge flip: diagonal (a,c) of quadrilateral (a,b,c,d)
/// replaced by (b,d).
struct FlipMove {
    Edge removed;
    Edge inserted;
    std::array<int, 4> quad{};  // a, b, c, d

    FlipMove reversed() const;
};

/// Labeled maximal (or almost-maximal) planar graph stored as a rotation
/// system.  Immutable; flips return new values.
class Triangulation {
public:
    enum class Kind { Maximal, AlmostMaximal };

    /// Embeds and validates.  Requires n >= 3 and a maximal planar (3n-6
    /// edges) or almost-maximal (3n-7 edges, one quadrilateral face) graph.
    static Triangulation from_graph(const Graph& g);

    /// Stacked (Apollonian) triangulation: `outer` is the outer triangle,
    /// plan[k] = (v, face) stacks vertex v into an existing face.
    static Triangulation trilaterated(int n, const StackingPlan& plan,
                                      std::array<int, 3> outer = {0, 1, 2});

    /// Fan plan on vertices order[0..n-1] (outer triple order[0..2]):
    /// order[0], order[1] become the dominant vertices of a double wheel whose
    /// path is order[2..].
    static StackingPlan fan_plan(const std::vector<int>& order);

    int vertex_count() const { return n_; }
    Kind kind() const { return kind_; }
    bool is_maximal() const { return kind_ == Kind::Maximal; }
    const std::vector<int>& rotation(int v) const { return rot_[v]; }
    int degree(int v) const { return static_cast<int>(rot_[v].size()); }
    bool has_edge(int a, int b) const;
    std::size_t edge_count() const;

    /// Edges in lexicographic order.
    std::vector<Edge> edges() const;
    Graph graph() const { return Graph{n_, edges()}; }
    std::vector<std::vector<int>> faces() const;

    /// Triangular faces as sorted vertex triples, in lexicographic order.
    std::vector<std::array<int, 3>> triangle_faces() const;

    /// The two face apexes across an edge (neighbours of a adjacent to c in
    /// the rotation of a).  Throws GraphError if the edge is absent.
    std::pair<int, int> apexes(int a, int c) const;

    bool is_flippable(Edge e) const;
    Triangulation remove_edge(Edge e) const;

    /// Quadrilateral (a,b,c,d) of an almost-maximal triangulation.
    std::array<int, 4> quadrilateral() const;
    /// Inserts the diagonal (x,y) of the quadrilateral face.
    Triangulation insert_diagonal(Edge e) const;

    std::pair<Triangulation, FlipMove> flip(Edge e) const;

    /// Simplicity, edge count, Euler formula, face sizes, 3-connectivity.
    /// Throws GraphError describing the first violated invariant.
    void validate() const;

    /// Labeled equality of edge sets (the embedding of a 3-connected planar
    /// graph is determined up to reflection by its edges).
    bool same_graph(const Triangulation& other) const;

private:
    Triangulation(int n, std::vector<std::vector<int>> rot, Kind kind)
        : n_(n), rot_(std::move(rot)), kind_(kind) {}

    void fix_orientation();
    int position(int v, int w) const;

    int n_ = 0;
    std::vector<std::vector<int>> rot_;
    Kind kind_ = Kind::Maximal;
};

/// Labeled double wheel: dominant vertices d1, d2 and the remaining vertices
/// in path order.
struct DoubleWheel {
    int d1 = 0;
    int d2 = 1;
    std::vector<int> path;
};

/// Flips turning g into a labeled double wheel with dominant vertices d1, d2.  The resulting path order is returned in `wheel`.
std::vector<FlipMove> canonicalize_to_double_wheel(const Triangulation& g, int d1, int d2,
                                                   DoubleWheel* wheel);

/// Dominant pair used by flip_path: highest-degree vertex, then its
/// highest-degree neighbour (ties to the lower index).  With an rng the pair
/// is a uniformly random edge instead.
std::pair<int, int> choose_dominant_pair(const Triangulation& g, std::mt19937_64* rng = nullptr);

/// Flips rearranging the path of a double wheel from `from` to `to` (same
/// dominant vertices, same vertex set).
std::vector<FlipMove> reorder_double_wheel(const DoubleWheel& from, const DoubleWheel& to);

/// Labeled flip sequence from source to target.
std::vector<FlipMove> flip_path(const Triangulation& source, const Triangulation& target,
                                std::mt19937_64* rng = nullptr);

/// Applies moves in order, checking flippability of each; throws GraphError
/// if a move does not match the current graph.
Triangulation replay(const Triangulation& g, const std::vector<FlipMove>& moves);

}  // namespace katflow
