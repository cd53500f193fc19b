#ifndef MGRAPH_DIRECT_GRAPH_HPP
#define MGRAPH_DIRECT_GRAPH_HPP

#include "rng.hpp"
#include "weights.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace mgraph {

enum class EdgeFn { exp, cap, ratio };
double edge_h(EdgeFn f, double x);
EdgeFn edge_fn_from_string(const std::string& s);

enum class Provenance { direct, lifo };

// Vertices are 0..n-1 internally; vertex v is client/vertex v+1 in exports.
struct AssembledGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges; // u < v, sorted, unique
    std::vector<double> weight;
    std::vector<int> explore_rank; // rank in exploration order, default identity
    Provenance provenance = Provenance::direct;

    void normalize(); // drop self-loops, sort, dedupe
    std::vector<std::vector<int>> adjacency() const;
};

struct ComponentView {
    std::vector<int> vertices; // sorted by exploration rank
    int root = -1;
    double mass = 0;
    int count = 0;
    std::vector<std::pair<int, int>> edges; // local indices into `vertices`
};

enum class OrderBy { mass, count };

AssembledGraph sample_direct(const WeightSeq& w, EdgeFn f, Rng& rng);
// The two realizations behind sample_direct (pair coins below 3000 vertices).
AssembledGraph sample_direct_pairs(const WeightSeq& w, EdgeFn f, Rng& rng);
AssembledGraph sample_direct_skip(const WeightSeq& w, EdgeFn f, Rng& rng);
constexpr int pair_enumeration_limit = 3000;
AssembledGraph sample_direct(const WeightSeq& w, EdgeFn f, std::uint64_t seed);

std::vector<ComponentView> connected_components(const AssembledGraph& g, OrderBy order = OrderBy::mass);

Eigen::MatrixXi graph_distances(const ComponentView& c);
std::vector<int> bfs_distances(const ComponentView& c, int source_local);

void write_edges_csv(std::ostream& os, const AssembledGraph& g);
void write_components_csv(std::ostream& os, const std::vector<ComponentView>& comps);

} // namespace mgraph

#endif
