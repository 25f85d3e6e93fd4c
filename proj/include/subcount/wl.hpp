#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "subcount/graph.hpp"

namespace subcount {

// Color refinement (the 1-WL test) with hashed color names, so colors from
// different graphs are directly comparable: identical local structure
// hashes to identical colors regardless of which graph it sits in.

// Per-node colors after `rounds` refinements; rounds < 0 means num_nodes
// rounds, which is always enough for the partition to stabilize.
std::vector<uint64_t> wl_colors(const Graph& g, int rounds = -1);

// Sorted color multiset, invariant under relabeling.
std::vector<uint64_t> wl_histogram(const Graph& g, int rounds = -1);

// Equal histograms after max(|a|, |b|) rounds on both graphs.
bool wl_indistinguishable(const Graph& a, const Graph& b);

// Sorted per-node (triangle-edge degree, plain-edge degree) pairs: the
// signal one heterogeneous message-passing layer adds on top of degrees.
std::vector<std::pair<int, int>> typed_degree_histogram(const Graph& g);

// Indistinguishable for the heterogeneous encoder: WL-indistinguishable
// and identical typed degree histograms.
bool shmp_indistinguishable(const Graph& a, const Graph& b);

struct StudyRow {
    int size = 0;
    int graphs = 0;  // connected regular graphs of this size, up to isomorphism
    int pairs = 0;   // unordered pairs compared
    int wl_indistinguishable = 0;
    int shmp_indistinguishable = 0;
};

// Pairwise comparison of all connected regular graphs per size. Sizes up
// to 8 are enumerated internally; `extra` supplies graphs for larger sizes
// (each must be connected and regular) and is merged into its size row.
std::vector<StudyRow> shmp_distinguishability_study(int min_size, int max_size,
                                                    const std::vector<Graph>& extra = {});

void save_study_csv(const std::string& path, const std::vector<StudyRow>& rows);

}  // namespace subcount
