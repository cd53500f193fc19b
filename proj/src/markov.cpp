#include "markov.hpp"

#include "csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

namespace mgraph {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Slot {
    int client;
    double rem;
};

// Queue replay shared by the random and forced simulators. next(tau, type)
// yields the next arrival or returns false when there is none.
template <class Next>
MarkovTrace run_queue(const WeightSeq& w, const MarkovStop& stop, Next&& next)
{
    if (!(stop.horizon > 0)) throw std::invalid_argument("markov: horizon must be positive");
    if (std::isinf(stop.horizon) && stop.empty_epochs <= 0)
        throw std::invalid_argument("markov: an infinite horizon needs an epoch count");
    MarkovTrace tr;
    tr.w = w;
    tr.parent = {-1};
    tr.children = {0};
    tr.complete = {false};
    tr.service = {{}};
    std::vector<Slot> stack;
    std::vector<double> sizes;
    double now = 0, arrived = 0;
    bool done = false;

    auto drain_until = [&](double limit) {
        while (!stack.empty() && now + stack.back().rem <= limit) {
            now += stack.back().rem;
            int c = stack.back().client;
            stack.pop_back();
            tr.complete[std::size_t(c)] = true;
            tr.service[std::size_t(c)].back().second = now;
            if (!stack.empty()) tr.service[std::size_t(stack.back().client)].emplace_back(now, 0.0);
            tr.events.push_back({now, EventKind::departure, c, arrived - now, int(stack.size())});
            if (stack.empty()) {
                ++tr.epochs;
                if (stop.empty_epochs > 0 && tr.epochs >= stop.empty_epochs) {
                    tr.stopped_at_epoch = true;
                    done = true;
                    return;
                }
            }
        }
        if (!stack.empty()) stack.back().rem -= limit - now;
        now = limit;
    };

    double tau;
    int type;
    while (!done && next(tau, type)) {
        if (tau > stop.horizon) break;
        drain_until(tau);
        if (done) break;
        const int k = tr.N() + 1;
        const int top = stack.empty() ? 0 : stack.back().client;
        if (top) tr.service[std::size_t(top)].back().second = tau;
        tr.tau.push_back(tau);
        tr.type.push_back(type);
        tr.parent.push_back(top);
        tr.children.push_back(0);
        tr.children[std::size_t(top)] += top ? 1 : 0;
        tr.complete.push_back(false);
        tr.service.push_back({{tau, 0.0}});
        const double wk = w[type - 1];
        stack.push_back({k, wk});
        sizes.push_back(wk);
        arrived += wk;
        tr.events.push_back({tau, EventKind::arrival, k, arrived - tau, int(stack.size())});
    }
    if (!done) drain_until(stop.horizon);
    tr.end_time = now;
    for (auto& s : stack) tr.service[std::size_t(s.client)].back().second = now;
    tr.X = CadlagStepPath(tr.tau, sizes, tr.end_time);
    IntStepPath H = height_of_path(tr.X);
    for (std::size_t i = 0; i < H.t.size() && H.t[i] <= tr.end_time; ++i) tr.H.push(H.t[i], H.v[i]);
    return tr;
}

} // namespace

MarkovTrace simulate_markov(const WeightSeq& w, const MarkovStop& stop, Rng& rng)
{
    std::vector<double> p(static_cast<std::size_t>(w.j_max()));
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = w[Eigen::Index(j)];
    std::discrete_distribution<int> types(p.begin(), p.end());
    std::exponential_distribution<double> gap(1.0);
    double t = 0;
    return run_queue(w, stop, [&](double& tau, int& type) {
        t += gap(rng);
        tau = t;
        type = types(rng) + 1;
        return true;
    });
}

MarkovTrace simulate_markov(const WeightSeq& w, const MarkovStop& stop, std::uint64_t seed)
{
    Rng rng = make_rng(seed, stream::markov);
    return simulate_markov(w, stop, rng);
}

MarkovTrace simulate_markov_forced(const WeightSeq& w, double horizon, const std::vector<std::pair<double, int>>& arrivals)
{
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        auto [t, j] = arrivals[i];
        if (!(t >= 0) || !(t < horizon)) throw std::invalid_argument("markov: forced arrival outside [0, horizon)");
        if (j < 1 || j > w.j_max()) throw std::invalid_argument("markov: forced type out of range");
        if (i && !(t > arrivals[i - 1].first)) throw std::invalid_argument("markov: forced arrivals must increase");
    }
    std::size_t i = 0;
    return run_queue(w, MarkovStop{horizon, 0}, [&](double& tau, int& type) {
        if (i == arrivals.size()) return false;
        tau = arrivals[i].first;
        type = arrivals[i].second;
        ++i;
        return true;
    });
}

double mu_w_pmf(const WeightSeq& w, int k)
{
    if (k < 0) throw std::invalid_argument("mu_w_pmf: k must be nonnegative");
    const double lk = std::lgamma(k + 1.0);
    double s = 0;
    for (Eigen::Index j = 0; j < w.w().size(); ++j) {
        double x = w[j];
        s += std::exp((k + 1) * std::log(x) - x - lk);
    }
    return s / w.sigma1();
}

GwForestStats forest_stats(const std::vector<int>& parent)
{
    if (parent.empty()) throw std::invalid_argument("forest_stats: parent[0] is required");
    const int N = int(parent.size()) - 1;
    GwForestStats st;
    std::vector<int> kids(static_cast<std::size_t>(N) + 1, 0);
    for (int k = 1; k <= N; ++k) {
        int p = parent[std::size_t(k)];
        if (p < 0 || p >= k) throw std::invalid_argument("forest_stats: parents must precede children");
        ++kids[std::size_t(p)];
    }
    st.V.push_back(0);
    for (int k = 1; k <= N; ++k) {
        st.V.push_back(st.V.back() + kids[std::size_t(k)] - 1);
        std::size_t c = std::size_t(kids[std::size_t(k)]);
        if (st.offspring_hist.size() <= c) st.offspring_hist.resize(c + 1, 0);
        ++st.offspring_hist[c];
        if (parent[std::size_t(k)] == 0) st.tree_sizes.push_back(0);
        ++st.tree_sizes.back();
    }
    // depth-first walk from the common root; the path is the current line of ancestors
    st.contour_visits.assign(std::size_t(N) + 1, 0);
    st.degree.assign(std::size_t(N) + 1, 0);
    for (int v = 0; v <= N; ++v) st.degree[std::size_t(v)] = kids[std::size_t(v)] + (v ? 1 : 0);
    std::vector<int> path{0};
    auto visit = [&] {
        st.contour.push_back(int(path.size()) - 1);
        ++st.contour_visits[std::size_t(path.back())];
    };
    visit();
    for (int k = 1; k <= N; ++k) {
        while (path.back() != parent[std::size_t(k)]) {
            path.pop_back();
            if (path.empty()) throw std::invalid_argument("forest_stats: vertices are not in depth-first order");
            visit();
        }
        st.Hght.push_back(int(path.size()) - 1);
        path.push_back(k);
        visit();
    }
    while (path.size() > 1) {
        path.pop_back();
        visit();
    }
    return st;
}

GwForestStats gw_forest_stats(const MarkovTrace& tr)
{
    // arrival order is depth-first order, so the complete trees form a prefix
    int K = tr.N();
    for (int k = 1; k <= tr.N(); ++k)
        if (tr.parent[std::size_t(k)] == 0 && !tr.complete[std::size_t(k)]) {
            K = k - 1;
            break;
        }
    std::vector<int> parent(tr.parent.begin(), tr.parent.begin() + K + 1);
    return forest_stats(parent);
}

std::vector<long long> gw_offspring_histogram(const WeightSeq& w, long long vertices, Rng& rng)
{
    if (vertices < 0) throw std::invalid_argument("gw_offspring_histogram: negative budget");
    std::vector<double> p(static_cast<std::size_t>(w.j_max()));
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = w[Eigen::Index(j)];
    std::discrete_distribution<int> types(p.begin(), p.end());
    std::vector<long long> hist;
    long long explored = 0, waiting = 0; // breadth-first queue only needs its length
    while (explored < vertices) {
        if (waiting == 0) waiting = 1; // new tree
        --waiting;
        double wt = p[std::size_t(types(rng))];
        long long k = std::poisson_distribution<long long>(wt)(rng);
        if (hist.size() <= std::size_t(k)) hist.resize(std::size_t(k) + 1, 0);
        ++hist[std::size_t(k)];
        waiting += k;
        ++explored;
    }
    return hist;
}

std::vector<long long> gw_generations(const WeightSeq& w, long long z0, int gens, Rng& rng)
{
    if (z0 < 0 || gens < 0) throw std::invalid_argument("gw_generations: negative argument");
    std::vector<double> p(static_cast<std::size_t>(w.j_max()));
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = w[Eigen::Index(j)];
    std::discrete_distribution<int> types(p.begin(), p.end());
    std::vector<long long> z{z0};
    for (int g = 0; g < gens; ++g) {
        double mean = 0;
        for (long long i = 0; i < z.back(); ++i) mean += p[std::size_t(types(rng))];
        z.push_back(mean > 0 ? std::poisson_distribution<long long>(mean)(rng) : 0);
    }
    return z;
}

// ---- colouring ----

double Colouring::Lambda_b(double t) const
{
    if (blue_set.empty()) return 0;
    auto it = std::upper_bound(blue_set.begin(), blue_set.end(), t, [](double x, const Interval& I) { return x < I.a; });
    if (it == blue_set.begin()) return 0;
    std::size_t i = std::size_t(it - blue_set.begin()) - 1;
    const Interval& I = blue_set[i];
    bool last = i + 1 == blue_set.size();
    if (t < I.b || (last && !t_star)) return blue_start[i] + (t - I.a);
    return blue_start[i] + (I.b - I.a);
}

double Colouring::theta_b(double t) const
{
    if (t_star && t >= *t_star) return inf;
    if (blue_set.empty()) return t;
    auto it = std::upper_bound(blue_start.begin(), blue_start.end(), t);
    std::size_t i = it == blue_start.begin() ? 0 : std::size_t(it - blue_start.begin()) - 1;
    return blue_set[i].a + (t - blue_start[i]);
}

double Colouring::gamma_r(double x) const
{
    // X^r = -s + jumps; on [t_k, t_{k+1}) it falls from v_k
    const auto& T = Xr.times;
    double v = 0, t0 = 0;
    for (std::size_t k = 0; k <= T.size(); ++k) {
        double t1 = k < T.size() ? T[k] : inf;
        double s = t0 + v + x; // where -s + (v + t0) = -x
        if (s < t1) {
            double slack = 1e-12 * (1 + red_total);
            return s <= red_total + slack ? std::max(s, t0) : inf;
        }
        if (k < T.size()) {
            v = v - (t1 - t0) + Xr.sizes[k];
            t0 = t1;
        }
    }
    return inf;
}

Colouring color_blue_red(const MarkovTrace& tr)
{
    Colouring c;
    const int N = tr.N();
    c.end_time = tr.end_time;
    c.blue.assign(std::size_t(N) + 1, true);
    std::set<int> seen;
    // red spans: [arrival, departure) of each red root
    std::vector<int> open_root;
    for (int k = 1; k <= N; ++k) {
        int p = tr.parent[std::size_t(k)];
        bool parent_blue = p == 0 || c.blue[std::size_t(p)];
        int j = tr.type[std::size_t(k) - 1];
        if (seen.count(j)) {
            c.blue[std::size_t(k)] = false;
            if (parent_blue) c.red_root.push_back(k);
        } else if (parent_blue) {
            seen.insert(j);
            c.blue_types.push_back(j);
        } else {
            c.blue[std::size_t(k)] = false;
        }
    }
    double cursor = 0;
    for (int r : c.red_root) {
        double a = tr.tau[std::size_t(r) - 1];
        double b = tr.complete[std::size_t(r)] ? tr.service[std::size_t(r)].back().second : tr.end_time;
        c.blue_set.push_back({cursor, a});
        c.red_set.push_back({a, b});
        cursor = b;
        if (!tr.complete[std::size_t(r)]) break; // nothing after an open span
    }
    bool open = !c.red_set.empty() && !tr.complete[std::size_t(c.red_root[c.red_set.size() - 1])];
    if (!open) c.blue_set.push_back({cursor, tr.end_time});
    double s = 0;
    for (auto& I : c.blue_set) {
        c.blue_start.push_back(s);
        s += I.b - I.a;
    }
    c.blue_total = s;
    for (auto& I : c.red_set) c.red_total += I.b - I.a;
    if (open) c.t_star = c.blue_total;

    // blue- and red-time coordinates of each arrival
    std::vector<double> xb_t, xb_s, y_t, y_s, xr_t, xr_s;
    std::size_t bi = 0, ri = 0;
    double red_start = 0;
    double a_sum = 0;
    std::size_t next_root = 0;
    for (int k = 1; k <= N; ++k) {
        double t = tr.tau[std::size_t(k) - 1];
        double wk = tr.weight_of(k);
        while (bi + 1 < c.blue_set.size() && t >= c.blue_set[bi + 1].a) ++bi;
        while (ri < c.red_set.size() && t >= c.red_set[ri].b && !(open && ri + 1 == c.red_set.size())) {
            red_start += c.red_set[ri].b - c.red_set[ri].a;
            ++ri;
        }
        bool is_root = next_root < c.red_root.size() && c.red_root[next_root] == k;
        if (c.blue[std::size_t(k)] || is_root) {
            double tb = c.blue_start[bi] + (t - c.blue_set[bi].a);
            xb_t.push_back(tb);
            xb_s.push_back(wk);
            if (is_root) {
                a_sum += wk;
                c.A.push(tb, a_sum);
                ++next_root;
            } else {
                y_t.push_back(tb);
                y_s.push_back(wk);
            }
        } else {
            xr_t.push_back(red_start + (t - c.red_set[ri].a));
            xr_s.push_back(wk);
        }
    }
    c.Xb = CadlagStepPath(xb_t, xb_s, c.blue_total);
    c.Y = CadlagStepPath(y_t, y_s, c.blue_total);
    c.Xr = CadlagStepPath(xr_t, xr_s, c.red_total);
    IntStepPath H = height_of_path(c.Y);
    for (std::size_t i = 0; i < H.t.size() && H.t[i] <= c.blue_total; ++i) c.Hcal.push(H.t[i], H.v[i]);
    return c;
}

bool IdentityReport::pass() const
{
    for (auto& [k, r] : items)
        if (!r.pass) return false;
    return true;
}

namespace {

void record(IdentityResult& r, double err)
{
    ++r.n_points;
    r.max_abs_err = std::max(r.max_abs_err, err);
    if (!(err < tol_identity)) r.pass = false;
}

// Sorted breakpoints with each one nudged just past itself (bounded by half
// the gap to the next) plus the midpoints: both sides are right-continuous
// and independently rounded event times must not straddle the sample. The
// end itself is a rounding race when a departure lands on it, so it is only
// sampled on request.
std::vector<double> sample_points(std::vector<double> pts, double end, bool with_end)
{
    pts.push_back(0);
    pts.push_back(end);
    std::sort(pts.begin(), pts.end());
    // breakpoints closer than the snap are one breakpoint, kept at its right end
    auto snap = [](double t) { return 1e-11 * (1 + std::abs(t)); };
    std::vector<double> cl;
    for (double t : pts) {
        if (t > end) break;
        if (!cl.empty() && t - cl.back() < snap(t))
            cl.back() = t;
        else
            cl.push_back(t);
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < cl.size(); ++i) {
        double t = cl[i];
        if (i + 1 == cl.size()) {
            if (with_end) out.push_back(t);
            break;
        }
        double nxt = cl[i + 1];
        out.push_back(t + std::min(snap(t), 0.5 * (nxt - t)));
        out.push_back(0.5 * (t + nxt));
    }
    return out;
}

int count_le(const std::vector<double>& v, double t)
{
    return int(std::upper_bound(v.begin(), v.end(), t) - v.begin());
}

} // namespace

IdentityReport verify_embedding(const MarkovTrace& tr, const Colouring& c)
{
    IdentityReport rep;
    auto& yx = rep.items["Y=X(theta)"];
    auto& hh = rep.items["Hcal=H(theta)"];
    auto& inv = rep.items["theta_inverse"];
    auto& tg = rep.items["theta=t+gamma(A)"];
    auto& mix = rep.items["X=Xb(Lb)+Xr(Lr)"];
    auto& mnh = rep.items["M=2N-H"];
    auto& bt = rep.items["blue_types_distinct"];

    // blue time
    double blue_end = c.t_star ? *c.t_star : c.blue_total;
    std::vector<double> bp = c.Xb.times;
    bp.insert(bp.end(), c.Hcal.t.begin(), c.Hcal.t.end());
    bp.insert(bp.end(), c.blue_start.begin(), c.blue_start.end());
    auto blue_pts = sample_points(bp, blue_end, false);
    double prev_theta = -inf;
    for (double t : blue_pts) {
        if (c.t_star && t >= *c.t_star) continue;
        double th = c.theta_b(t);
        record(yx, std::abs(c.Y.value(t) - tr.X.value(th)));
        record(hh, std::abs(double(c.Hcal(t) - tr.H(th))));
        double e = std::abs(c.Lambda_b(th) - t);
        if (!(th > prev_theta)) e = std::max(e, 1.0);
        record(inv, e);
        prev_theta = th;
        record(tg, std::abs(th - (t + c.gamma_r(c.A(t)))));
    }

    // real time
    std::vector<double> ev;
    for (auto& e : tr.events) ev.push_back(e.time);
    for (double t : sample_points(ev, tr.end_time, true)) {
        double lb = c.Lambda_b(t);
        double lr = t - lb;
        record(mix, std::abs(tr.X.value(t) - (c.Xb.value(lb) + c.Xr.value(lr))));
        int M = count_le(tr.H.t, t), Nt = count_le(tr.tau, t);
        record(mnh, std::abs(double(M - (2 * Nt - tr.H(t)))));
    }

    std::set<int> types(c.blue_types.begin(), c.blue_types.end());
    record(bt, double(c.blue_types.size() - types.size()));
    record(bt, c.blue_types.size() > std::size_t(tr.w.j_max()) ? 1.0 : 0.0);
    return rep;
}

void to_json(nlohmann::json& j, const IdentityReport& r)
{
    j = nlohmann::json::object();
    for (auto& [k, v] : r.items) j[k] = {{"pass", v.pass}, {"max_abs_err", v.max_abs_err}, {"n_points", v.n_points}};
}

void write_markov_trace_csv(std::ostream& os, const MarkovTrace& tr)
{
    os << "time,event,client,type,X,H\n";
    for (auto& e : tr.events)
        os << num(e.time) << ',' << (e.kind == EventKind::arrival ? "arrival" : "departure") << ',' << e.client << ','
           << tr.type[std::size_t(e.client) - 1] << ',' << num(e.load) << ',' << e.height << '\n';
}

} // namespace mgraph
