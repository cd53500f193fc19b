#ifndef MGRAPH_LIFO_HPP
#define MGRAPH_LIFO_HPP

#include "direct_graph.hpp"
#include "paths.hpp"
#include "rng.hpp"
#include "weights.hpp"

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace mgraph {

enum class EventKind { arrival, departure };

struct QueueEvent {
    double time;
    EventKind kind;
    int client;
    double load;  // Y (or X) right after the event
    int height;   // stack depth right after the event
};

struct BusyPeriod {
    double l, r, zeta; // zeta = sum of member weights
    double base;       // Y(l-), the running infimum during the period
    int first;         // first client served in the period
};

// Clients are 1..n with weight w[j-1]; 0 is the root / idle server.
struct LifoTrace {
    WeightSeq w;
    std::vector<double> E;          // E[j-1]
    std::vector<int> order;         // clients by arrival time
    CadlagStepPath Y;
    IntStepPath H;
    IntStepPath served;             // client on top of the stack, 0 when idle
    std::vector<int> parent;        // parent[j], parent[0] = -1
    std::vector<int> depth;         // depth[j] = H at E_j
    std::vector<std::vector<std::pair<double, double>>> service; // [a,b) per client
    std::vector<QueueEvent> events;
    std::vector<BusyPeriod> busy;   // in time order
    std::vector<int> busy_of;       // busy period index of each client

    int n() const { return w.j_max(); }
    double J(double t) const;       // running infimum of Y
};

LifoTrace simulate_lifo(const WeightSeq& w, Rng& rng);
LifoTrace simulate_lifo(const WeightSeq& w, std::uint64_t seed);
// Test hook: arrival times given, E[j-1] for client j. Ties are rejected.
LifoTrace simulate_lifo_forced(const WeightSeq& w, const std::vector<double>& E);

struct Pinch {
    double t, y, s;
    int u, v;                  // client served at s, client served at t
    bool self_loop = false;
    bool on_boundary = false;  // y hit a band boundary exactly
};

struct PinchSetup {
    std::vector<Pinch> pinches; // sorted by t
    double area = 0;            // int (Y-J) dt
};

PinchSetup sample_pinches(const LifoTrace& tr, Rng& rng);
PinchSetup sample_pinches(const LifoTrace& tr, std::uint64_t seed);
// Test hook: points (t, y) resolved against the trace.
PinchSetup resolve_pinches(const LifoTrace& tr, std::vector<std::pair<double, double>> pts);

struct AssemblyStats {
    int tree_edges = 0, pinch_edges = 0, self_loops = 0, duplicates = 0;
};

AssembledGraph assemble_graph(const LifoTrace& tr, const PinchSetup& ps, AssemblyStats* st = nullptr);

void write_trace_csv(std::ostream& os, const LifoTrace& tr);
void write_pinches_csv(std::ostream& os, const PinchSetup& ps);

} // namespace mgraph

#endif
