#include "stats.hpp"

#include "lifo.hpp"
#include "parallel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace mgraph {

namespace {

double chi2_upper(double stat, int df)
{
    if (df <= 0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * stat);
}

// Left-to-right grouping so that each group reaches `need` in the key; a
// short remainder joins the last full group.
std::vector<std::vector<std::size_t>> pool(const std::vector<double>& key, double need)
{
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> cur;
    double acc = 0;
    for (std::size_t i = 0; i < key.size(); ++i) {
        cur.push_back(i);
        acc += key[i];
        if (acc >= need) {
            groups.push_back(cur);
            cur.clear();
            acc = 0;
        }
    }
    if (!cur.empty()) {
        if (groups.empty())
            groups.push_back(cur);
        else
            groups.back().insert(groups.back().end(), cur.begin(), cur.end());
    }
    return groups;
}

} // namespace

TestResult chi_square_gof(const std::vector<long long>& counts, const std::vector<double>& probs)
{
    if (counts.size() != probs.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
    if (counts.size() < 2) throw std::invalid_argument("chi_square_gof: need at least two cells");
    double ps = 0;
    for (double p : probs) {
        if (!(p >= 0)) throw std::invalid_argument("chi_square_gof: negative probability");
        ps += p;
    }
    if (std::abs(ps - 1) > 1e-9) throw std::invalid_argument("chi_square_gof: probabilities must sum to 1");
    long long N = 0;
    for (long long c : counts) {
        if (c < 0) throw std::invalid_argument("chi_square_gof: negative count");
        N += c;
    }
    std::vector<double> expct(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) expct[i] = double(N) * probs[i];
    TestResult r;
    auto groups = pool(expct, min_expected);
    for (auto& g : groups) {
        double o = 0, e = 0;
        for (auto i : g) {
            o += double(counts[i]);
            e += expct[i];
        }
        if (e > 0)
            r.statistic += (o - e) * (o - e) / e;
        else if (o > 0)
            r.statistic = std::numeric_limits<double>::infinity();
    }
    r.df = int(groups.size()) - 1;
    r.p_value = std::isinf(r.statistic) ? 0.0 : chi2_upper(r.statistic, r.df);
    return r;
}

TestResult chi_square_homogeneity(const std::vector<long long>& a, const std::vector<long long>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("chi_square_homogeneity: size mismatch");
    double Na = 0, Nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0 || b[i] < 0) throw std::invalid_argument("chi_square_homogeneity: negative count");
        Na += double(a[i]);
        Nb += double(b[i]);
    }
    TestResult r;
    if (Na == 0 || Nb == 0) return r;
    const double N = Na + Nb, share = std::min(Na, Nb) / N;
    // smallest expected cell of a column is share * column total
    std::vector<double> key(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) key[i] = share * double(a[i] + b[i]);
    auto groups = pool(key, min_expected);
    int used = 0;
    for (auto& g : groups) {
        double oa = 0, ob = 0;
        for (auto i : g) {
            oa += double(a[i]);
            ob += double(b[i]);
        }
        double col = oa + ob;
        if (col == 0) continue;
        double ea = col * Na / N, eb = col * Nb / N;
        r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
        ++used;
    }
    r.df = std::max(0, used - 1);
    r.p_value = chi2_upper(r.statistic, r.df);
    return r;
}

double kolmogorov_q(double lambda)
{
    if (lambda <= 0) return 1.0;
    const double pi = 3.14159265358979323846;
    if (lambda < 1.0) {
        // theta-function form converges fast for small lambda
        double s = 0, c = pi * pi / (8 * lambda * lambda);
        for (int k = 1; k < 50; ++k) {
            double t = std::exp(-double((2 * k - 1) * (2 * k - 1)) * c);
            s += t;
            if (t < 1e-17) break;
        }
        return std::clamp(1 - std::sqrt(2 * pi) / lambda * s, 0.0, 1.0);
    }
    double s = 0;
    for (int k = 1; k < 100; ++k) {
        double t = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? 1 : -1) * t;
        if (t < 1e-17) break;
    }
    return std::clamp(2 * s, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double D = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        D = std::max(D, std::abs(double(i) / na - double(j) / nb));
    }
    TestResult r;
    r.statistic = D;
    double ne = na * nb / (na + nb), sq = std::sqrt(ne);
    r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * D);
    return r;
}

EdgeCompareReport edge_marginal_compare(const WeightSeq& w, long long R, std::uint64_t seed, unsigned workers, double level)
{
    if (R <= 0) throw std::invalid_argument("edge_marginal_compare: R must be positive");
    const int n = w.j_max();
    const double s1 = w.sigma1();
    EdgeCompareReport rep;
    rep.R = R;
    rep.seed = seed;
    rep.level = level;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    const std::size_t P = pairs.size();
    const bool joint = n <= 5;
    auto pair_index = [n](int i, int j) { return std::size_t(i * (2 * n - i - 1) / 2 + (j - i - 1)); };

    // per replica: edge list of each construction
    std::vector<std::vector<std::pair<int, int>>> ed(static_cast<std::size_t>(R)), el(static_cast<std::size_t>(R));
    parallel_for(std::size_t(R), workers, [&](std::size_t r) {
        Rng rd = make_rng(seed, stream::direct, r);
        ed[r] = sample_direct(w, EdgeFn::exp, rd).edges;
        Rng rl = make_rng(seed, stream::lifo, r), rp = make_rng(seed, stream::pinch, r);
        auto tr = simulate_lifo(w, rl);
        auto ps = sample_pinches(tr, rp);
        el[r] = assemble_graph(tr, ps).edges;
    });

    std::vector<long long> hd(P, 0), hl(P, 0);
    rep.count_direct.assign(P + 1, 0);
    rep.count_lifo.assign(P + 1, 0);
    std::map<std::uint64_t, std::pair<long long, long long>> graphs;
    for (std::size_t r = 0; r < std::size_t(R); ++r) {
        std::uint64_t md = 0, ml = 0;
        for (auto [u, v] : ed[r]) {
            ++hd[pair_index(u, v)];
            if (joint) md |= std::uint64_t(1) << pair_index(u, v);
        }
        for (auto [u, v] : el[r]) {
            ++hl[pair_index(u, v)];
            if (joint) ml |= std::uint64_t(1) << pair_index(u, v);
        }
        ++rep.count_direct[ed[r].size()];
        ++rep.count_lifo[el[r].size()];
        if (joint) {
            ++graphs[md].first;
            ++graphs[ml].second;
        }
    }

    // marginals: each frequency within 4 sd of the exact probability and the
    // two frequencies within 4 pooled sd of each other
    rep.marginals_pass = true;
    std::vector<double> dp{1.0}; // exact edge-count law, independent coins
    for (std::size_t k = 0; k < P; ++k) {
        auto [i, j] = pairs[k];
        double p = -std::expm1(-w[i] * w[j] / s1);
        double fd = double(hd[k]) / double(R), fl = double(hl[k]) / double(R);
        double sd = std::sqrt(p * (1 - p) / double(R));
        double pp = 0.5 * (fd + fl), sdp = std::sqrt(2 * pp * (1 - pp) / double(R));
        bool ok = std::abs(fd - p) <= 4 * sd && std::abs(fl - p) <= 4 * sd && std::abs(fd - fl) <= 4 * sdp;
        rep.marginals.push_back({i + 1, j + 1, p, fd, fl, sd, ok});
        rep.marginals_pass = rep.marginals_pass && ok;
        std::vector<double> nx(dp.size() + 1, 0.0);
        for (std::size_t c = 0; c < dp.size(); ++c) {
            nx[c] += dp[c] * (1 - p);
            nx[c + 1] += dp[c] * p;
        }
        dp = std::move(nx);
    }
    rep.count_probs = dp;

    // edge counts: one family of three tests, Bonferroni
    if (P > 0) {
        rep.count_gof_direct = chi_square_gof(rep.count_direct, rep.count_probs);
        rep.count_gof_lifo = chi_square_gof(rep.count_lifo, rep.count_probs);
        rep.count_homog = chi_square_homogeneity(rep.count_direct, rep.count_lifo);
    }
    const double lc = level / 3;
    rep.counts_pass = rep.count_gof_direct.p_value >= lc && rep.count_gof_lifo.p_value >= lc && rep.count_homog.p_value >= lc;

    if (joint && P > 0) {
        std::vector<long long> a, b;
        for (auto& [mask, c] : graphs) {
            a.push_back(c.first);
            b.push_back(c.second);
        }
        rep.joint = chi_square_homogeneity(a, b);
        rep.joint_done = true;
        rep.joint_pass = rep.joint.p_value >= level;
    }
    return rep;
}

void to_json(nlohmann::json& j, const EdgeCompareReport& r)
{
    auto tj = [](const TestResult& t) { return nlohmann::json{{"statistic", t.statistic}, {"p_value", t.p_value}, {"df", t.df}}; };
    nlohmann::json m = nlohmann::json::array();
    for (auto& e : r.marginals)
        m.push_back({{"u", e.u}, {"v", e.v}, {"p", e.p}, {"f_direct", e.f_direct}, {"f_lifo", e.f_lifo}, {"sd", e.sd}, {"pass", e.pass}});
    j = {{"R", r.R},
         {"seed", r.seed},
         {"level", r.level},
         {"marginals", m},
         {"count_direct", r.count_direct},
         {"count_lifo", r.count_lifo},
         {"count_probs", r.count_probs},
         {"count_gof_direct", tj(r.count_gof_direct)},
         {"count_gof_lifo", tj(r.count_gof_lifo)},
         {"count_homogeneity", tj(r.count_homog)},
         {"marginals_pass", r.marginals_pass},
         {"counts_pass", r.counts_pass},
         {"joint_pass", r.joint_pass},
         {"pass", r.pass()}};
    if (r.joint_done) j["joint"] = tj(r.joint);
}

void write_summary(std::ostream& os, const EdgeCompareReport& r)
{
    os << "edge comparison  R=" << r.R << "  seed=" << r.seed << "  level=" << r.level << '\n';
    os << std::setw(4) << "u" << std::setw(4) << "v" << std::setw(12) << "p" << std::setw(12) << "direct" << std::setw(12)
       << "lifo" << std::setw(12) << "sd" << "  ok\n";
    os << std::fixed << std::setprecision(6);
    for (auto& e : r.marginals)
        os << std::setw(4) << e.u << std::setw(4) << e.v << std::setw(12) << e.p << std::setw(12) << e.f_direct << std::setw(12)
           << e.f_lifo << std::setw(12) << e.sd << "  " << (e.pass ? "yes" : "NO") << '\n';
    os << std::defaultfloat;
    auto line = [&](const char* name, const TestResult& t) {
        os << std::left << std::setw(22) << name << std::right << " stat=" << std::setw(12) << t.statistic << " df=" << std::setw(4)
           << t.df << " p=" << t.p_value << '\n';
    };
    line("edge count vs exact/d", r.count_gof_direct);
    line("edge count vs exact/l", r.count_gof_lifo);
    line("edge count d vs l", r.count_homog);
    if (r.joint_done) line("joint graph law", r.joint);
    os << "marginals " << (r.marginals_pass ? "PASS" : "FAIL") << ", counts " << (r.counts_pass ? "PASS" : "FAIL") << ", joint "
       << (r.joint_done ? (r.joint_pass ? "PASS" : "FAIL") : "skipped") << '\n';
}

} // namespace mgraph
