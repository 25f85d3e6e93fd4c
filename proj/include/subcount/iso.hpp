#pragma once

#include "subcount/graph.hpp"

namespace subcount {

// Exact isomorphism test by backtracking over degree-compatible node maps,
// with adjacency kept in per-node bitmasks. Meant for pattern-sized graphs;
// both inputs must have at most 16 nodes (error otherwise).
bool is_isomorphic(const Graph& a, const Graph& b);

}  // namespace subcount
