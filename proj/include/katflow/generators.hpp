#pragma once

#include <random>

#include "katflow/triangulation.hpp"

namespace katflow {

/// Random stacked triangulation on n >= 3 vertices with shuffled labels.
Triangulation random_stacked(int n, std::mt19937_64& rng);

/// Applies `count` flips, each on a uniformly chosen flippable edge.
Triangulation random_flips(const Triangulation& g, int count, std::mt19937_64& rng);

/// Random labeled maximal planar graph: random_stacked followed by up to
/// max_flips random flips.
Triangulation random_maximal(int n, int max_flips, std::mt19937_64& rng);

Graph cycle_graph(int n);
Graph random_tree(int n, std::mt19937_64& rng);

/// Random 2-connected planar graph that is not maximal: edges are removed
/// from a random triangulation while 2-connectivity holds.
Graph random_biconnected_planar(int n, std::mt19937_64& rng);

bool is_biconnected(const Graph& g);

}  // namespace katflow
