#include <algorithm>
#include <numeric>
#include <queue>
#include <iterator>
#include <set>
#include <string>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>
#include <boost/graph/graph_traits.hpp>

#include "katflow/triangulation.hpp"

namespace katflow {

namespace {

using BoostGraph =
    boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS,
                          boost::property<boost::vertex_index_t, int>,
                          boost::property<boost::edge_index_t, int>>;
using BoostEdge = boost::graph_traits<BoostGraph>::edge_descriptor;

BoostGraph to_boost(const Graph& g) {
    BoostGraph bg(static_cast<std::size_t>(g.n));
    int index = 0;
    for (const Edge& e : g.edges) {
        auto [ed, added] = boost::add_edge(e.u, e.v, bg);
        (void)added;
        boost::put(boost::edge_index, bg, ed, index++);
    }
    return bg;
}

std::vector<std::vector<int>> adjacency_of(const Graph& g) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n));
    for (const Edge& e : g.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

// Connected components as vertex lists, each sorted, ordered by least vertex.
std::vector<std::vector<int>> components(int n, const std::vector<std::vector<int>>& adj) {
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        std::queue<int> q;
        q.push(s);
        comp[s] = id;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            out[id].push_back(v);
            for (int w : adj[v]) {
                if (comp[w] < 0) {
                    comp[w] = id;
                    q.push(w);
                }
            }
        }
        std::sort(out[id].begin(), out[id].end());
    }
    return out;
}

std::string kuratowski_message(const Graph& g) {
    BoostGraph bg = to_boost(g);
    std::vector<BoostEdge> witness;
    boost::boyer_myrvold_planarity_test(
        boost::boyer_myrvold_params::graph = bg,
        boost::boyer_myrvold_params::kuratowski_subgraph = std::back_inserter(witness));
    std::string msg = "graph is not planar; Kuratowski subgraph edges:";
    for (const BoostEdge& e : witness) {
        msg += " [" + std::to_string(boost::source(e, bg)) + "," +
               std::to_string(boost::target(e, bg)) + "]";
    }
    return msg;
}

}  // namespace

Graph Graph::from_edges(int n, std::vector<Edge> edges) {
    if (n < 0) throw GraphError("vertex count must be nonnegative");
    for (const Edge& e : edges) {
        if (e.u < 0 || e.v >= n) throw GraphError("edge endpoint out of range");
        if (e.u == e.v) throw GraphError("self-loop at vertex " + std::to_string(e.u));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Graph{n, std::move(edges)};
}

bool Graph::has_edge(int a, int b) const {
    return std::binary_search(edges.begin(), edges.end(), Edge{a, b});
}

std::optional<std::vector<std::vector<int>>> planar_embedding(const Graph& g) {
    BoostGraph bg = to_boost(g);
    std::vector<std::vector<BoostEdge>> embedding(boost::num_vertices(bg));
    const bool planar = boost::boyer_myrvold_planarity_test(
        boost::boyer_myrvold_params::graph = bg,
        boost::boyer_myrvold_params::embedding = embedding.data());
    if (!planar) return std::nullopt;
    std::vector<std::vector<int>> rotation(embedding.size());
    for (std::size_t v = 0; v < embedding.size(); ++v) {
        for (const BoostEdge& e : embedding[v]) {
            const auto s = static_cast<int>(boost::source(e, bg));
            const auto t = static_cast<int>(boost::target(e, bg));
            rotation[v].push_back(s == static_cast<int>(v) ? t : s);
        }
    }
    return rotation;
}

std::vector<std::vector<int>> embedding_faces(const std::vector<std::vector<int>>& rotation) {
    // Dart u->v is followed by v->w where w succeeds u in the rotation at v.
    const auto n = rotation.size();
    std::vector<std::vector<char>> used(n);
    for (std::size_t v = 0; v < n; ++v) used[v].assign(rotation[v].size(), 0);
    auto pos = [&](int v, int w) {
        const auto& r = rotation[v];
        return static_cast<std::size_t>(std::find(r.begin(), r.end(), w) - r.begin());
    };
    std::vector<std::vector<int>> faces;
    for (std::size_t u0 = 0; u0 < n; ++u0) {
        for (std::size_t k = 0; k < rotation[u0].size(); ++k) {
            if (used[u0][k]) continue;
            std::vector<int> face;
            int u = static_cast<int>(u0);
            std::size_t idx = k;
            while (!used[u][idx]) {
                used[u][idx] = 1;
                face.push_back(u);
                const int v = rotation[u][idx];
                const auto& rv = rotation[v];
                const std::size_t back = pos(v, u);
                idx = (back + 1) % rv.size();
                u = v;
            }
            faces.push_back(std::move(face));
        }
    }
    return faces;
}

bool is_three_connected(int n, const std::vector<std::vector<int>>& adjacency) {
    if (n < 4) return false;
    std::vector<char> removed(static_cast<std::size_t>(n), 0);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    auto connected_without = [&]() {
        std::fill(seen.begin(), seen.end(), 0);
        int start = -1;
        int remaining = 0;
        for (int v = 0; v < n; ++v) {
            if (!removed[v]) {
                ++remaining;
                if (start < 0) start = v;
            }
        }
        std::vector<int> stack{start};
        seen[start] = 1;
        int reached = 0;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            ++reached;
            for (int w : adjacency[v]) {
                if (!removed[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        return reached == remaining;
    };
    if (!connected_without()) return false;
    for (int i = 0; i < n; ++i) {
        removed[i] = 1;
        for (int j = i + 1; j < n; ++j) {
            removed[j] = 1;
            const bool ok = connected_without();
            removed[j] = 0;
            if (!ok) {
                removed[i] = 0;
                return false;
            }
        }
        removed[i] = 0;
    }
    return true;
}

std::vector<Edge> maximal_planar_augmentation(const Graph& g) {
    const int n = g.n;
    std::vector<Edge> added;
    if (n <= 3) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (!g.has_edge(i, j)) added.emplace_back(i, j);
            }
        }
        return added;
    }
    if (!planar_embedding(g)) throw GraphError(kuratowski_message(g));

    std::set<Edge> edges(g.edges.begin(), g.edges.end());
    auto add = [&](int a, int b) {
        edges.insert(Edge{a, b});
        added.emplace_back(a, b);
    };

    // Join components through their least vertices.
    const auto comps = components(n, adjacency_of(g));
    for (std::size_t k = 1; k < comps.size(); ++k) add(comps[k - 1].front(), comps[k].front());

    const std::size_t target = 3 * static_cast<std::size_t>(n) - 6;
    while (edges.size() < target) {
        const Graph current{n, std::vector<Edge>(edges.begin(), edges.end())};
        const auto rotation = planar_embedding(current);
        if (!rotation) throw GraphError("augmentation lost planarity");
        bool progressed = false;
        for (const auto& face : embedding_faces(*rotation)) {
            if (face.size() <= 3) continue;
            const auto it = std::min_element(face.begin(), face.end());
            const int v = *it;
            const std::size_t start = static_cast<std::size_t>(it - face.begin());
            for (std::size_t k = 1; k < face.size() && !progressed; ++k) {
                const int w = face[(start + k) % face.size()];
                if (w != v && !edges.count(Edge{v, w})) {
                    add(v, w);
                    progressed = true;
                }
            }
            // Fall back to any non-adjacent pair on the face.
            for (std::size_t i = 0; i < face.size() && !progressed; ++i) {
                for (std::size_t j = i + 1; j < face.size() && !progressed; ++j) {
                    if (face[i] != face[j] && !edges.count(Edge{face[i], face[j]})) {
                        add(face[i], face[j]);
                        progressed = true;
                    }
                }
            }
            if (progressed) break;
        }
        if (!progressed) throw GraphError("augmentation found no face chord to add");
    }
    return added;
}

}  // namespace katflow
