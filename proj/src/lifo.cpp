#include "lifo.hpp"

#include "csv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace mgraph {

double LifoTrace::J(double t) const
{
    auto it = std::upper_bound(busy.begin(), busy.end(), t, [](double x, const BusyPeriod& b) { return x < b.l; });
    if (it != busy.begin()) {
        const auto& b = *(it - 1);
        if (t < b.r) return b.base;
    }
    return Y.value(t);
}

namespace {

LifoTrace replay(const WeightSeq& w, std::vector<double> E)
{
    const int n = w.j_max();
    if (int(E.size()) != n) throw std::invalid_argument("simulate_lifo: one arrival time per client");
    LifoTrace tr;
    tr.w = w;
    tr.E = std::move(E);
    tr.order.resize(std::size_t(n));
    std::iota(tr.order.begin(), tr.order.end(), 1);
    std::stable_sort(tr.order.begin(), tr.order.end(),
                     [&](int a, int b) { return tr.E[std::size_t(a - 1)] < tr.E[std::size_t(b - 1)]; });
    std::vector<double> times, sizes;
    for (int j : tr.order) {
        times.push_back(tr.E[std::size_t(j - 1)]);
        sizes.push_back(w[j - 1]);
    }
    tr.Y = CadlagStepPath(times, sizes); // rejects ties
    tr.parent.assign(std::size_t(n) + 1, 0);
    tr.parent[0] = -1;
    tr.depth.assign(std::size_t(n) + 1, 0);
    tr.service.assign(std::size_t(n) + 1, {});
    tr.busy_of.assign(std::size_t(n) + 1, -1);

    struct Slot {
        int client;
        double rem;
    };
    std::vector<Slot> stack;
    double now = 0, arrived = 0;

    auto depart_until = [&](double limit) {
        while (!stack.empty() && now + stack.back().rem <= limit) {
            now += stack.back().rem;
            int c = stack.back().client;
            stack.pop_back();
            tr.service[std::size_t(c)].back().second = now;
            int top = stack.empty() ? 0 : stack.back().client;
            if (top) tr.service[std::size_t(top)].emplace_back(now, 0.0);
            tr.H.push(now, int(stack.size()));
            tr.served.push(now, top);
            tr.events.push_back({now, EventKind::departure, c, arrived - now, int(stack.size())});
            if (stack.empty()) tr.busy.back().r = now;
        }
    };

    for (int j : tr.order) {
        double a = tr.E[std::size_t(j - 1)];
        depart_until(a);
        if (stack.empty()) {
            tr.busy.push_back({a, a, 0.0, arrived - a, j});
        } else {
            stack.back().rem -= a - now;
            tr.service[std::size_t(stack.back().client)].back().second = a;
        }
        now = a;
        tr.parent[std::size_t(j)] = stack.empty() ? 0 : stack.back().client;
        stack.push_back({j, w[j - 1]});
        arrived += w[j - 1];
        tr.busy.back().zeta += w[j - 1];
        tr.busy_of[std::size_t(j)] = int(tr.busy.size()) - 1;
        tr.depth[std::size_t(j)] = int(stack.size());
        tr.service[std::size_t(j)].emplace_back(a, 0.0);
        tr.H.push(a, int(stack.size()));
        tr.served.push(a, j);
        tr.events.push_back({a, EventKind::arrival, j, arrived - a, int(stack.size())});
    }
    depart_until(std::numeric_limits<double>::infinity());
    tr.Y.horizon = now;
    return tr;
}

} // namespace

LifoTrace simulate_lifo_forced(const WeightSeq& w, const std::vector<double>& E)
{
    for (double e : E)
        if (!(e >= 0) || !std::isfinite(e)) throw std::invalid_argument("arrival times must be finite and nonnegative");
    return replay(w, E);
}

LifoTrace simulate_lifo(const WeightSeq& w, Rng& rng)
{
    std::vector<double> E(static_cast<std::size_t>(w.j_max()));
    const double s1 = w.sigma1();
    for (std::size_t j = 0; j < E.size(); ++j) E[j] = std::exponential_distribution<double>(w[Eigen::Index(j)] / s1)(rng);
    return replay(w, std::move(E));
}

LifoTrace simulate_lifo(const WeightSeq& w, std::uint64_t seed)
{
    Rng rng = make_rng(seed, stream::lifo);
    return simulate_lifo(w, rng);
}

namespace {

struct StackEntry {
    int client;
    double rem;
};

// Calls seg(t0, t1, stack) for each stretch between consecutive events
// with a nonempty stack; rem values are taken at t0.
template <class F>
void for_each_segment(const LifoTrace& tr, F&& seg)
{
    std::vector<StackEntry> stack;
    double prev = 0;
    for (const auto& ev : tr.events) {
        if (!stack.empty()) {
            seg(prev, ev.time, stack);
            stack.back().rem -= ev.time - prev;
        }
        if (ev.kind == EventKind::arrival)
            stack.push_back({ev.client, tr.w[ev.client - 1]});
        else
            stack.pop_back();
        prev = ev.time;
    }
}

Pinch resolve(const LifoTrace& tr, const std::vector<StackEntry>& stack, double x, double t, double y)
{
    // band of stack[i] is [B_i, B_i + rem_i(t)) with B_i the load of the clients below
    Pinch p{t, y, 0, 0, stack.back().client};
    double B = 0;
    for (std::size_t i = 0; i < stack.size(); ++i) {
        double rem = stack[i].rem - (i + 1 == stack.size() ? x : 0.0);
        if (i > 0 && y == B) p.on_boundary = true;
        if (y < B + rem || i + 1 == stack.size()) {
            p.u = stack[i].client;
            break;
        }
        B += rem;
    }
    p.s = tr.E[std::size_t(p.u - 1)];
    p.self_loop = p.u == p.v;
    return p;
}

double total_load(const std::vector<StackEntry>& stack)
{
    double s = 0;
    for (auto& e : stack) s += e.rem;
    return s;
}

} // namespace

PinchSetup sample_pinches(const LifoTrace& tr, Rng& rng)
{
    PinchSetup ps;
    const double s1 = tr.w.sigma1();
    for_each_segment(tr, [&](double t0, double t1, const std::vector<StackEntry>& stack) {
        double d = t1 - t0;
        double L0 = total_load(stack);
        double A = d * (L0 - 0.5 * d);
        ps.area += A;
        long k = std::poisson_distribution<long>(A / s1)(rng);
        for (long i = 0; i < k; ++i) {
            // t - t0 has density proportional to L0 - x on [0, d]
            double u = uniform01(rng);
            double x = 2 * A * u / (L0 + std::sqrt(std::max(0.0, L0 * L0 - 2 * A * u)));
            x = std::min(x, std::nextafter(d, 0.0));
            double L = L0 - x;
            double y = L * uniform01(rng);
            if (!(y > 0)) y = std::nextafter(0.0, 1.0);
            ps.pinches.push_back(resolve(tr, stack, x, t0 + x, y));
        }
    });
    std::sort(ps.pinches.begin(), ps.pinches.end(), [](const Pinch& a, const Pinch& b) { return a.t < b.t; });
    return ps;
}

PinchSetup sample_pinches(const LifoTrace& tr, std::uint64_t seed)
{
    Rng rng = make_rng(seed, stream::pinch);
    return sample_pinches(tr, rng);
}

PinchSetup resolve_pinches(const LifoTrace& tr, std::vector<std::pair<double, double>> pts)
{
    std::sort(pts.begin(), pts.end());
    PinchSetup ps;
    std::size_t next = 0;
    for_each_segment(tr, [&](double t0, double t1, const std::vector<StackEntry>& stack) {
        double d = t1 - t0, L0 = total_load(stack);
        ps.area += d * (L0 - 0.5 * d);
        while (next < pts.size() && pts[next].first < t1) {
            auto [t, y] = pts[next];
            if (t < t0) throw std::invalid_argument("pinch time falls in an idle period");
            double x = t - t0;
            if (!(y > 0 && y < L0 - x)) throw std::invalid_argument("pinch level outside (0, Y - J)");
            ps.pinches.push_back(resolve(tr, stack, x, t, y));
            ++next;
        }
    });
    if (next != pts.size()) throw std::invalid_argument("pinch time falls outside every busy period");
    return ps;
}

AssembledGraph assemble_graph(const LifoTrace& tr, const PinchSetup& ps, AssemblyStats* st)
{
    AssemblyStats s;
    AssembledGraph g;
    g.n = tr.n();
    g.provenance = Provenance::lifo;
    g.weight = tr.w.to_vector();
    g.explore_rank.assign(std::size_t(g.n), 0);
    for (std::size_t r = 0; r < tr.order.size(); ++r) g.explore_rank[std::size_t(tr.order[r] - 1)] = int(r);
    for (int j = 1; j <= g.n; ++j)
        if (tr.parent[std::size_t(j)] > 0) {
            g.edges.emplace_back(tr.parent[std::size_t(j)] - 1, j - 1);
            ++s.tree_edges;
        }
    std::vector<std::pair<int, int>> tree = g.edges;
    std::sort(tree.begin(), tree.end());
    std::vector<std::pair<int, int>> extra;
    for (const auto& p : ps.pinches) {
        if (p.u < 1 || p.v < 1 || p.u > g.n || p.v > g.n)
            throw std::invalid_argument("pinch endpoint does not resolve to a client");
        if (tr.busy_of[std::size_t(p.u)] != tr.busy_of[std::size_t(p.v)])
            throw std::invalid_argument("pinch endpoints lie in different excursions");
        if (p.self_loop) {
            ++s.self_loops;
            continue;
        }
        std::pair<int, int> ep{std::min(p.u, p.v) - 1, std::max(p.u, p.v) - 1};
        if (std::binary_search(tree.begin(), tree.end(), ep) || std::find(extra.begin(), extra.end(), ep) != extra.end())
            ++s.duplicates;
        else
            extra.push_back(ep);
        ++s.pinch_edges;
    }
    g.edges.insert(g.edges.end(), extra.begin(), extra.end());
    g.normalize();
    if (st) *st = s;
    return g;
}

void write_trace_csv(std::ostream& os, const LifoTrace& tr)
{
    os << "time,event,client,Y,H\n";
    for (const auto& e : tr.events)
        os << num(e.time) << ',' << (e.kind == EventKind::arrival ? "arrival" : "departure") << ',' << e.client << ','
           << num(e.load) << ',' << e.height << '\n';
}

void write_pinches_csv(std::ostream& os, const PinchSetup& ps)
{
    os << "t_p,y_p,s_p,u,v,flag\n";
    for (const auto& p : ps.pinches) {
        std::string flag = p.self_loop ? "self_loop" : "";
        if (p.on_boundary) flag += flag.empty() ? "boundary" : "|boundary";
        os << num(p.t) << ',' << num(p.y) << ',' << num(p.s) << ',' << p.u << ',' << p.v << ',' << flag << '\n';
    }
}

} // namespace mgraph
