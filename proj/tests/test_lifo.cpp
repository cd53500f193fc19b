#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lifo.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace mgraph;

namespace {

LifoTrace two_clients() { return simulate_lifo_forced(WeightSeq({1, 0.5}), {0.2, 0.4}); }

// Tree depth by walking parent links.
int depth_oracle(const LifoTrace& tr, int j)
{
    int d = 0;
    while (j) {
        j = tr.parent[std::size_t(j)];
        ++d;
    }
    return d;
}

WeightSeq random_weights(std::mt19937_64& g, int n)
{
    std::uniform_real_distribution<double> U(0.05, 3);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = U(g);
    return WeightSeq(v);
}

} // namespace

TEST_CASE("two-client hand simulation")
{
    auto tr = two_clients();
    const auto& H = tr.H;
    CHECK(H(0.1) == 0);
    CHECK(H(0.2) == 1);
    CHECK(H(0.3) == 1);
    CHECK(H(0.4) == 2);
    CHECK(H(0.85) == 2);
    CHECK(H(0.95) == 1);
    CHECK(H(1.65) == 1);
    CHECK(H(1.75) == 0);
    CHECK(tr.parent[2] == 1);
    CHECK(tr.parent[1] == 0);
    REQUIRE(tr.busy.size() == 1);
    CHECK(tr.busy[0].l == 0.2);
    CHECK(tr.busy[0].zeta == 1.5);
    REQUIRE(tr.service[1].size() == 2);
    CHECK(tr.service[1][0].first == 0.2);
    CHECK(tr.service[1][0].second == 0.4);
    CHECK(tr.service[2][0].second == doctest::Approx(0.9));
    CHECK(tr.service[1][1].second == doctest::Approx(1.7));
    CHECK(tr.served(0.5) == 2);
    CHECK(tr.served(1.0) == 1);
}

TEST_CASE("single client")
{
    for (double E : {0.0, 0.3, 7.25}) {
        auto tr = simulate_lifo_forced(WeightSeq({1}), {E});
        CHECK(tr.H(E) == 1);
        CHECK(tr.H(E + 0.999) == 1);
        CHECK(tr.H(E + 1.0) == 0);
        CHECK(tr.H(E - 1e-9) == 0);
    }
}

TEST_CASE("random traces: structural invariants")
{
    std::mt19937_64 g(21);
    for (int rep = 0; rep < 200; ++rep) {
        auto w = random_weights(g, 1 + int(g() % 40));
        auto tr = simulate_lifo(w, rep + 1000);
        const int n = tr.n();
        double last = *std::max_element(tr.E.begin(), tr.E.end());
        for (double t : {last, last + 0.5, last + 3.0})
            CHECK(tr.Y.value(t) == doctest::Approx(w.sigma1() - t).epsilon(1e-12));

        auto Hdef = height_of_path(tr.Y);
        for (auto& ev : tr.events) {
            CHECK(Hdef(ev.time) == tr.H(ev.time));
            CHECK(ev.height == tr.H(ev.time));
            CHECK(ev.height >= 0);
        }
        CHECK(tr.H(1e300) == 0);

        double zs = 0;
        for (auto& b : tr.busy) zs += b.zeta;
        CHECK(std::abs(zs - w.sigma1()) <= 1e-12 * w.sigma1());
        for (int j = 1; j <= n; ++j) {
            double len = 0;
            for (auto [a, b] : tr.service[std::size_t(j)]) len += b - a;
            CHECK(len == doctest::Approx(w[j - 1]).epsilon(1e-9));
            CHECK(tr.depth[std::size_t(j)] == depth_oracle(tr, j));
            CHECK(tr.H(tr.E[std::size_t(j - 1)]) == tr.depth[std::size_t(j)]);
        }
    }
}

TEST_CASE("arrival law: mean of E_j is sigma1/w_j")
{
    WeightSeq w({4, 1});
    double s0 = 0, s1 = 0;
    const int R = 20000;
    for (int r = 0; r < R; ++r) {
        auto tr = simulate_lifo(w, std::uint64_t(r));
        s0 += tr.E[0];
        s1 += tr.E[1];
    }
    // sd of the mean is m / sqrt(R)
    CHECK(std::abs(s0 / R - 1.25) < 4 * 1.25 / std::sqrt(double(R)));
    CHECK(std::abs(s1 / R - 5.0) < 4 * 5.0 / std::sqrt(double(R)));
}

TEST_CASE("forced pinches")
{
    auto tr = two_clients();
    auto ps = resolve_pinches(tr, {{0.5, 0.1}});
    REQUIRE(ps.pinches.size() == 1);
    CHECK(ps.pinches[0].s == 0.2);
    CHECK(ps.pinches[0].u == 1);
    CHECK(ps.pinches[0].v == 2);
    CHECK_FALSE(ps.pinches[0].self_loop);

    auto ps2 = resolve_pinches(tr, {{0.5, 0.95}});
    REQUIRE(ps2.pinches.size() == 1);
    CHECK(ps2.pinches[0].s == 0.4);
    CHECK(ps2.pinches[0].u == 2);
    CHECK(ps2.pinches[0].v == 2);
    CHECK(ps2.pinches[0].self_loop);

    // band boundary: load of client 1 at t=0.5 is 0.8
    auto ps3 = resolve_pinches(tr, {{0.5, 0.8}});
    CHECK(ps3.pinches[0].on_boundary);
    CHECK(ps3.pinches[0].u == 2);

    CHECK(resolve_pinches(tr, {}).pinches.empty());
    CHECK_THROWS(resolve_pinches(tr, {{0.5, 1.3}}));
    CHECK_THROWS(resolve_pinches(tr, {{0.1, 0.01}}));
}

TEST_CASE("pinch sampling: area, counts, and definition of s_p")
{
    auto tr = two_clients();
    // area under Y - J: client 1 alone 0.2..0.4 then both, then 1 alone
    // load 1 -> 0.8 on [0.2,0.4], 1.3 -> 0.8 on [0.4,0.9], 0.8 -> 0 on [0.9,1.7]
    double area = 0.2 * 0.9 + 0.5 * 1.05 + 0.8 * 0.4;
    auto ps = sample_pinches(tr, 1);
    CHECK(ps.area == doctest::Approx(area).epsilon(1e-12));

    std::mt19937_64 g(5);
    for (int rep = 0; rep < 100; ++rep) {
        auto w = random_weights(g, 2 + int(g() % 20));
        auto t = simulate_lifo(w, 500 + rep);
        auto p = sample_pinches(t, 900 + rep);
        for (auto& q : p.pinches) {
            double J = t.J(q.t);
            double load = t.Y.value(q.t) - J;
            CHECK(q.y > 0);
            CHECK(q.y < load);
            CHECK(q.s <= q.t);
            // inf over [s, t] of Y - J exceeds y, and fails just left of s
            auto inf_on = [&](double a) {
                double m = t.Y.value(q.t);
                for (std::size_t k = 0; k < t.Y.size(); ++k)
                    if (t.Y.times[k] > a && t.Y.times[k] <= q.t) m = std::min(m, t.Y.left_limit(t.Y.times[k]));
                m = std::min(m, t.Y.value(a));
                return m - J;
            };
            CHECK(inf_on(q.s) > q.y);
            CHECK(inf_on(q.s - 1e-9) <= q.y + 1e-12);
            CHECK(t.busy_of[std::size_t(q.u)] == t.busy_of[std::size_t(q.v)]);
            CHECK(t.served(q.s) == q.u);
            CHECK(t.served(q.t) == q.v);
        }
    }
}

TEST_CASE("pinch count is Poisson with mean area / sigma1")
{
    WeightSeq w({2, 1.5, 1, 1, 0.5});
    double sum = 0, sumsq = 0, mean_ref = 0;
    const int R = 4000;
    for (int r = 0; r < R; ++r) {
        auto tr = simulate_lifo(w, std::uint64_t(r));
        auto ps = sample_pinches(tr, std::uint64_t(r));
        double k = double(ps.pinches.size());
        sum += k;
        sumsq += k * k;
        mean_ref += ps.area / w.sigma1();
    }
    double m = sum / R, v = sumsq / R - m * m;
    CHECK(std::abs(m - mean_ref / R) < 4 * std::sqrt(v / R));
}

TEST_CASE("assembly")
{
    auto tr = two_clients();
    auto g = assemble_graph(tr, PinchSetup{});
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0] == std::make_pair(0, 1));
    AssemblyStats st;
    auto g2 = assemble_graph(tr, resolve_pinches(tr, {{0.5, 0.1}, {0.5, 0.95}}), &st);
    CHECK(g2.edges.size() == 1);
    CHECK(st.self_loops == 1);
    CHECK(st.duplicates == 1);
    auto one = simulate_lifo_forced(WeightSeq({1}), {0.5});
    auto g1 = assemble_graph(one, PinchSetup{});
    CHECK(g1.n == 1);
    CHECK(g1.edges.empty());
    CHECK(g1.provenance == Provenance::lifo);
}

TEST_CASE("exports")
{
    auto tr = two_clients();
    std::ostringstream os;
    write_trace_csv(os, tr);
    auto s = os.str();
    CHECK(s.rfind("time,event,client,Y,H\n", 0) == 0);
    CHECK(s.find("0.2,arrival,1,0.8,1\n") != std::string::npos);
    std::ostringstream ps;
    write_pinches_csv(ps, resolve_pinches(tr, {{0.5, 0.95}}));
    CHECK(ps.str() == "t_p,y_p,s_p,u,v,flag\n0.5,0.95,0.4,2,2,self_loop\n");
}

TEST_CASE("determinism")
{
    WeightSeq w({3, 2, 1, 1});
    auto a = simulate_lifo(w, 42), b = simulate_lifo(w, 42);
    CHECK(a.E == b.E);
    CHECK(sample_pinches(a, 7).pinches.size() == sample_pinches(b, 7).pinches.size());
}
