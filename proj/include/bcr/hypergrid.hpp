#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bcr/bayes.hpp"

namespace bcr {

struct GridNode {
    std::vector<double> hyper;
    double weight; // >= 0
};

struct GridParams {
    double radius = 20.0;   // net radius R over observation space
    double eps = 1.0;       // net spacing / projection tolerance
    std::size_t m_max = 50; // cluster target; the projection guarantee may exceed it
};

// Representative hyper-parameter set for one stage, with nearest-neighbor
// projection. Nodes are pairwise distinct; weights sum to one after build.
struct GridLevel {
    int stage = 1;
    std::vector<GridNode> nodes;
    GridParams params;

    std::size_t size() const { return nodes.size(); }
};

double distance(const std::vector<double>& a, const std::vector<double>& b);

// Observation-space net covering [0,R] (integer support) or [-R,R]
// (continuous): every support point within R is within eps of a net point.
// Integer support subsamples the lattice at spacing floor(eps) and keeps the
// endpoint R; continuous support uses equal spacing <= 2*eps.
std::vector<double> eps_net(double radius, double eps, bool integer_support);

// Expansion step: every (node, net point) pair produces the candidate
// (hyper_update(h, xi), node.weight * predictive_weight(h, xi)).
// Duplicates are retained; zero-weight candidates are dropped.
std::vector<GridNode> expand(const GridLevel& level, const Belief& prior,
                             const std::vector<double>& net);

// Greedy weighted clustering: while the count exceeds m_max, merge the
// Euclidean-closest pair into its weighted centroid. Exact duplicates are
// merged first regardless of m_max. Ties break lexicographically.
std::vector<GridNode> cluster(std::vector<GridNode> candidates, std::size_t m_max);

// Reinsert any exact candidate farther than eps from the clustered set
// (by descending weight), re-merging down to m_max when possible; loops until
// both conditions stabilize, preferring coverage over the size cap.
GridLevel project_guarantee(const std::vector<GridNode>& exact_candidates,
                            std::vector<GridNode> clustered, int stage, const GridParams& params);

// Nearest node by Euclidean distance, ties to the smallest index.
std::size_t rep(const GridLevel& level, const std::vector<double>& hyper);

double projection_error(const std::vector<double>& hyper_exact, const GridLevel& level);

// Step-wise adaptive grid: level 1 = prior hyper with weight one, each later
// level via expand -> cluster -> projection guarantee, weights renormalized.
std::vector<GridLevel> build_grids(const Belief& prior, int stages, const GridParams& params);

// Node set covering every stage of `levels` (deduplicated, clustered to the
// cap when oversized); used as the stationary node set for value iteration
// when beliefs of many depths must project well.
GridLevel union_level(const std::vector<GridLevel>& levels, std::size_t m_cap);

// One line per node: tau,node_index,h_components...,weight
std::string serialize_levels(const std::vector<GridLevel>& levels);

} // namespace bcr
