#include "direct_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace mgraph {

double edge_h(EdgeFn f, double x)
{
    switch (f) {
    case EdgeFn::exp: return -std::expm1(-x);
    case EdgeFn::cap: return std::min(1.0, x);
    default: return x / (1 + x);
    }
}

EdgeFn edge_fn_from_string(const std::string& s)
{
    if (s == "exp") return EdgeFn::exp;
    if (s == "cap") return EdgeFn::cap;
    if (s == "ratio") return EdgeFn::ratio;
    throw std::invalid_argument("unknown edge function: " + s);
}

void AssembledGraph::normalize()
{
    for (auto& e : edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    edges.erase(std::remove_if(edges.begin(), edges.end(), [](auto& e) { return e.first == e.second; }), edges.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [u, v] : edges)
        if (u < 0 || v >= n) throw std::out_of_range("edge references an invalid vertex");
}

std::vector<std::vector<int>> AssembledGraph::adjacency() const
{
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (auto [u, v] : edges) {
        adj[std::size_t(u)].push_back(v);
        adj[std::size_t(v)].push_back(u);
    }
    return adj;
}

namespace {

AssembledGraph empty_graph(const WeightSeq& w)
{
    AssembledGraph g;
    g.n = w.j_max();
    g.weight = w.to_vector();
    g.explore_rank.resize(std::size_t(g.n));
    std::iota(g.explore_rank.begin(), g.explore_rank.end(), 0);
    return g;
}

} // namespace

AssembledGraph sample_direct_pairs(const WeightSeq& w, EdgeFn f, Rng& rng)
{
    AssembledGraph g = empty_graph(w);
    const double s1 = w.sigma1();
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (uniform01(rng) < edge_h(f, w[i] * w[j] / s1)) g.edges.emplace_back(i, j);
    return g;
}

// Weights are nonincreasing, so h(w_i w_{i+1}/s1) bounds every later coin of
// row i. Geometric skips under the current bound, then thinning to the true
// probability, which also becomes the new bound.
AssembledGraph sample_direct_skip(const WeightSeq& w, EdgeFn f, Rng& rng)
{
    AssembledGraph g = empty_graph(w);
    const double s1 = w.sigma1();
    const int n = g.n;
    for (int i = 0; i + 1 < n; ++i) {
        int j = i + 1;
        double p = edge_h(f, w[i] * w[j] / s1);
        while (j < n && p > 0) {
            if (p < 1) {
                double u = 1 - uniform01(rng); // (0,1]
                double skip = std::floor(std::log(u) / std::log1p(-p));
                if (skip >= double(n - j)) break;
                j += int(skip);
            }
            double q = edge_h(f, w[i] * w[j] / s1);
            if (uniform01(rng) * p < q) g.edges.emplace_back(i, j);
            p = q;
            ++j;
        }
    }
    return g;
}

AssembledGraph sample_direct(const WeightSeq& w, EdgeFn f, Rng& rng)
{
    return w.j_max() <= pair_enumeration_limit ? sample_direct_pairs(w, f, rng) : sample_direct_skip(w, f, rng);
}

AssembledGraph sample_direct(const WeightSeq& w, EdgeFn f, std::uint64_t seed)
{
    Rng rng = make_rng(seed, stream::direct);
    return sample_direct(w, f, rng);
}

namespace {

struct UnionFind {
    std::vector<int> parent, rank;
    explicit UnionFind(int n) : parent(std::size_t(n)), rank(std::size_t(n), 0)
    {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x)
    {
        while (parent[std::size_t(x)] != x) {
            parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
            x = parent[std::size_t(x)];
        }
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank[std::size_t(a)] < rank[std::size_t(b)]) std::swap(a, b);
        parent[std::size_t(b)] = a;
        if (rank[std::size_t(a)] == rank[std::size_t(b)]) ++rank[std::size_t(a)];
    }
};

} // namespace

std::vector<ComponentView> connected_components(const AssembledGraph& g, OrderBy order)
{
    UnionFind uf(g.n);
    for (auto [u, v] : g.edges) uf.unite(u, v);
    std::vector<int> by_rank(static_cast<std::size_t>(g.n));
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::sort(by_rank.begin(), by_rank.end(),
              [&](int a, int b) { return g.explore_rank[std::size_t(a)] < g.explore_rank[std::size_t(b)]; });

    std::vector<int> slot(std::size_t(g.n), -1), local(std::size_t(g.n), -1);
    std::vector<ComponentView> comps;
    for (int v : by_rank) {
        int r = uf.find(v);
        if (slot[std::size_t(r)] < 0) {
            slot[std::size_t(r)] = int(comps.size());
            comps.emplace_back();
            comps.back().root = v;
        }
        auto& c = comps[std::size_t(slot[std::size_t(r)])];
        local[std::size_t(v)] = c.count++;
        c.vertices.push_back(v);
        c.mass += g.weight[std::size_t(v)];
    }
    for (auto [u, v] : g.edges) {
        auto& c = comps[std::size_t(slot[std::size_t(uf.find(u))])];
        c.edges.emplace_back(local[std::size_t(u)], local[std::size_t(v)]);
    }
    // comps are already in exploration order of their roots, so a stable
    // sort implements the tie-break
    std::stable_sort(comps.begin(), comps.end(), [order](const ComponentView& a, const ComponentView& b) {
        return order == OrderBy::mass ? a.mass > b.mass : a.count > b.count;
    });
    return comps;
}

std::vector<int> bfs_distances(const ComponentView& c, int source)
{
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(c.count));
    for (auto [u, v] : c.edges) {
        adj[std::size_t(u)].push_back(v);
        adj[std::size_t(v)].push_back(u);
    }
    std::vector<int> d(std::size_t(c.count), -1);
    std::queue<int> q;
    d[std::size_t(source)] = 0;
    q.push(source);
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int y : adj[std::size_t(x)])
            if (d[std::size_t(y)] < 0) {
                d[std::size_t(y)] = d[std::size_t(x)] + 1;
                q.push(y);
            }
    }
    return d;
}

Eigen::MatrixXi graph_distances(const ComponentView& c)
{
    Eigen::MatrixXi D(c.count, c.count);
    for (int s = 0; s < c.count; ++s) {
        auto d = bfs_distances(c, s);
        for (int t = 0; t < c.count; ++t) D(s, t) = d[std::size_t(t)];
    }
    return D;
}

void write_edges_csv(std::ostream& os, const AssembledGraph& g)
{
    os << "u,v\n";
    for (auto [u, v] : g.edges) os << u + 1 << ',' << v + 1 << '\n';
}

void write_components_csv(std::ostream& os, const std::vector<ComponentView>& comps)
{
    os << "rank,mass,count,root\n";
    auto prec = os.precision(17);
    for (std::size_t k = 0; k < comps.size(); ++k)
        os << k + 1 << ',' << comps[k].mass << ',' << comps[k].count << ',' << comps[k].root + 1 << '\n';
    os.precision(prec);
}

} // namespace mgraph
