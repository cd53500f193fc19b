#ifndef MGRAPH_MARKOV_HPP
#define MGRAPH_MARKOV_HPP

#include "lifo.hpp"
#include "paths.hpp"
#include "rng.hpp"
#include "weights.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mgraph {

struct MarkovStop {
    double horizon = 100.0;
    int empty_epochs = 0; // stop at the end of this many busy periods when > 0
};

// Arrivals are clients 1..N in time order; 0 is the server.
struct MarkovTrace {
    WeightSeq w;
    double end_time = 0;
    bool stopped_at_epoch = false;
    std::vector<double> tau;   // tau[k-1]
    std::vector<int> type;     // type[k-1] in 1..j_max
    CadlagStepPath X;
    IntStepPath H;
    std::vector<int> parent;   // parent[k], parent[0] = -1
    std::vector<int> children; // own-service arrivals
    std::vector<bool> complete; // departed before end_time
    std::vector<std::vector<std::pair<double, double>>> service;
    std::vector<QueueEvent> events;
    int epochs = 0;

    int N() const { return static_cast<int>(tau.size()); }
    double weight_of(int k) const { return w[type[k - 1] - 1]; }
};

MarkovTrace simulate_markov(const WeightSeq& w, const MarkovStop& stop, Rng& rng);
MarkovTrace simulate_markov(const WeightSeq& w, const MarkovStop& stop, std::uint64_t seed);
// Test hook: (tau, type) pairs, tau increasing.
MarkovTrace simulate_markov_forced(const WeightSeq& w, double horizon,
                                   const std::vector<std::pair<double, int>>& arrivals);

double mu_w_pmf(const WeightSeq& w, int k);

struct GwForestStats {
    std::vector<long long> V;      // Lukasiewicz path, V[0] = 0
    std::vector<int> Hght;         // Hght[l] = |u_{l+1}| - 1
    std::vector<int> contour;      // heights at integer times of the edge walk
    std::vector<long long> offspring_hist;
    std::vector<int> tree_sizes;
    // indexed 0..N with 0 the common root (the server)
    std::vector<int> contour_visits; // integer times of the contour spent at the vertex
    std::vector<int> degree;
};

// Forest given by parent links over vertices 1..N in depth-first order
// (parent[0] unused; parent 0 means a tree root).
GwForestStats forest_stats(const std::vector<int>& parent);
// Complete trees of a Markov trace.
GwForestStats gw_forest_stats(const MarkovTrace& tr);

// Offspring counts of `vertices` GW vertices explored breadth-first:
// a vertex draws a type from nu_w and counts unit-rate Poisson points on
// [0, w_type]. Trees are restarted while the budget lasts.
std::vector<long long> gw_offspring_histogram(const WeightSeq& w, long long vertices, Rng& rng);

// Generation sizes Z_0..Z_gens of the GW chain with offspring law mu_w.
std::vector<long long> gw_generations(const WeightSeq& w, long long z0, int gens, Rng& rng);

struct Interval {
    double a, b;
};

struct Colouring {
    std::vector<bool> blue;        // blue[k], k = 1..N
    std::vector<int> red_root;     // clients whose arrival opens a red span
    std::vector<Interval> blue_set, red_set;
    double blue_total = 0, red_total = 0;
    CadlagStepPath Xb, Xr, Y;      // in blue / red / blue time
    StepPath<double> A;            // in blue time
    IntStepPath Hcal;              // height of Y
    std::optional<double> t_star;  // blue-time explosion surrogate
    std::vector<int> blue_types;
    double end_time = 0;
    std::vector<double> blue_start; // blue time at the start of blue_set[i]

    double Lambda_b(double t) const;
    double Lambda_r(double t) const { return t - Lambda_b(t); }
    double theta_b(double t) const; // +inf past the surrogate
    // first passage of Xr below -x, +inf if not reached in the run
    double gamma_r(double x) const;
};

Colouring color_blue_red(const MarkovTrace& tr);

struct IdentityResult {
    bool pass = true;
    double max_abs_err = 0;
    long long n_points = 0;
};

struct IdentityReport {
    std::map<std::string, IdentityResult> items;
    bool pass() const;
};

constexpr double tol_identity = 1e-9;

IdentityReport verify_embedding(const MarkovTrace& tr, const Colouring& c);
void to_json(nlohmann::json& j, const IdentityReport& r);

void write_markov_trace_csv(std::ostream& os, const MarkovTrace& tr);

} // namespace mgraph

#endif
