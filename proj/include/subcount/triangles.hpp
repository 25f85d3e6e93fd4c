#pragma once

#include "subcount/graph.hpp"

namespace subcount {

enum class EdgeType : uint8_t { Plain = 0, Triangle = 1 };

// One entry per edge, aligned with g.edges. An edge is Triangle if its
// endpoints share at least one common neighbor.
//
// Found by enumerating all triangles in degree order (each triangle exactly
// once) and marking the three edges involved; total work is O(E^1.5).
std::vector<EdgeType> triangle_edge_types(const Graph& g);

}  // namespace subcount
