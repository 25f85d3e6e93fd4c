#pragma once

#include <functional>

#include "subcount/graph.hpp"

namespace subcount {

// Enumerates every connected k-node subset of g exactly once (not once per
// automorphism). Classic scheme: grow from a root that stays the minimum of
// the subset, extending only through the exclusive neighborhood, so each
// subset is produced from exactly one root by exactly one extension order.
// The callback receives the members in ascending node-id order.
void for_each_connected_subset(const Graph& g, int k,
                               const std::function<void(const std::vector<int>&)>& fn);

// Same, restricted to subsets that contain `anchor`. Implemented by making
// the anchor compare below every other node, so it is always the root.
void for_each_connected_subset_containing(const Graph& g, int anchor, int k,
                                          const std::function<void(const std::vector<int>&)>& fn);

}  // namespace subcount
