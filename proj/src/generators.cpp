#include "katflow/generators.hpp"

#include <algorithm>
#include <numeric>

namespace katflow {

namespace {

bool connected_without(const Graph& g, int skip) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n));
    for (const Edge& e : g.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    const int start = skip == 0 ? 1 : 0;
    if (start >= g.n) return true;
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    int reached = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        ++reached;
        for (int w : adj[v]) {
            if (w != skip && !seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return reached == g.n - (skip >= 0 ? 1 : 0);
}

}  // namespace

Triangulation random_stacked(int n, std::mt19937_64& rng) {
    std::vector<int> label(static_cast<std::size_t>(n));
    std::iota(label.begin(), label.end(), 0);
    std::shuffle(label.begin(), label.end(), rng);
    std::vector<std::array<int, 3>> faces{{label[0], label[1], label[2]}};
    StackingPlan plan;
    for (int k = 3; k < n; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, faces.size() - 1);
        const std::size_t i = pick(rng);
        const auto f = faces[i];
        const int v = label[k];
        plan.push_back({v, f});
        faces[i] = {f[0], f[1], v};
        faces.push_back({f[1], f[2], v});
        faces.push_back({f[2], f[0], v});
    }
    return Triangulation::trilaterated(n, plan, {label[0], label[1], label[2]});
}

Triangulation random_flips(const Triangulation& g, int count, std::mt19937_64& rng) {
    Triangulation cur = g;
    for (int k = 0; k < count; ++k) {
        std::vector<Edge> flippable;
        for (const Edge& e : cur.edges()) {
            if (cur.is_flippable(e)) flippable.push_back(e);
        }
        if (flippable.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, flippable.size() - 1);
        cur = cur.flip(flippable[pick(rng)]).first;
    }
    return cur;
}

Triangulation random_maximal(int n, int max_flips, std::mt19937_64& rng) {
    const Triangulation base = random_stacked(n, rng);
    std::uniform_int_distribution<int> flips(0, max_flips);
    return random_flips(base, flips(rng), rng);
}

Graph cycle_graph(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return Graph::from_edges(n, edges);
}

Graph random_tree(int n, std::mt19937_64& rng) {
    std::vector<Edge> edges;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(0, v - 1);
        edges.emplace_back(parent(rng), v);
    }
    return Graph::from_edges(n, edges);
}

bool is_biconnected(const Graph& g) {
    if (g.n < 3) return false;
    if (!connected_without(g, -1)) return false;
    for (int v = 0; v < g.n; ++v) {
        if (!connected_without(g, v)) return false;
    }
    return true;
}

Graph random_biconnected_planar(int n, std::mt19937_64& rng) {
    const Triangulation t = random_maximal(n, 10, rng);
    std::vector<Edge> edges = t.edges();
    std::shuffle(edges.begin(), edges.end(), rng);
    std::uniform_int_distribution<int> removals(1, std::max(1, n - 2));
    int budget = removals(rng);
    for (std::size_t k = 0; k < edges.size() && budget > 0;) {
        std::vector<Edge> trial = edges;
        trial.erase(trial.begin() + static_cast<long>(k));
        if (is_biconnected(Graph::from_edges(n, trial))) {
            edges = std::move(trial);
            --budget;
        } else {
            ++k;
        }
    }
    return Graph::from_edges(n, edges);
}

}  // namespace katflow
