#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "weights.hpp"

#include <cmath>
#include <random>

using namespace mgraph;

namespace {

// Composite Simpson between consecutive discontinuities of {y^-rho},
// y_k = k^{-1/rho}, down to y = 0.01; the oscillating remainder on
// [0, 0.01] averages to y/2 and contributes 0.01^2/4.
double frac_integral_oracle(double rho)
{
    const double h = 1e-5;
    const double lo = 0.01;
    auto f = [rho](double y, long k) { return y * (std::pow(y, -rho) - double(k)); };
    double total = 0;
    for (long k = 1;; ++k) {
        double b = std::pow(double(k), -1.0 / rho);
        double a = std::pow(double(k + 1), -1.0 / rho);
        if (b <= lo) break;
        a = std::max(a, lo);
        int m = std::max(2, 2 * int(std::ceil((b - a) / h / 2)));
        double step = (b - a) / m, s = f(a, k) + f(b, k);
        for (int i = 1; i < m; ++i) s += (i % 2 ? 4 : 2) * f(a + i * step, k);
        total += s * step / 3;
    }
    return total + lo * lo / 4;
}

} // namespace

TEST_CASE("sigma_r")
{
    WeightSeq w({2, 1, 1});
    CHECK(w.sigma(1) == 4);
    CHECK(w.sigma(3) == 10);
    CHECK(WeightSeq({1}).sigma(2.5) == 1);
    CHECK(w.sigma1() == 4);
    CHECK(w.sigma2() == 6);
}

TEST_CASE("sigma_r homogeneous and monotone")
{
    std::mt19937 g(5);
    std::uniform_real_distribution<double> U(0.01, 3);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> v(1 + g() % 20);
        for (auto& x : v) x = U(g);
        double t = U(g), r = U(g);
        WeightSeq w(v);
        std::vector<double> tv = v, bigger = v;
        for (auto& x : tv) x *= t;
        for (auto& x : bigger) x += U(g);
        CHECK(WeightSeq(tv).sigma(r) == doctest::Approx(std::pow(t, r) * w.sigma(r)).epsilon(1e-12));
        CHECK(WeightSeq(bigger).sigma(r) >= w.sigma(r));
    }
}

TEST_CASE("WeightSeq sorts, drops zeros, rejects negatives")
{
    WeightSeq w({1, 0, 3, 2});
    REQUIRE(w.j_max() == 3);
    CHECK(w[0] == 3);
    CHECK(w[2] == 1);
    CHECK_THROWS(WeightSeq({1, -1}));
    CHECK_THROWS(WeightSeq(std::vector<double>{0, 0}));
}

TEST_CASE("criticality")
{
    CHECK(classify_criticality(WeightSeq({1, 1, 1})) == Criticality::critical);
    CHECK(classify_criticality(WeightSeq({2, 1, 1})) == Criticality::supercritical);
    CHECK(classify_criticality(WeightSeq({0.5, 0.5})) == Criticality::subcritical);
}

TEST_CASE("ER triples")
{
    auto t = gen_er_triple(2, 1 - std::exp(-0.5));
    REQUIRE(t.weights.j_max() == 2);
    CHECK(t.weights[0] == doctest::Approx(1).epsilon(1e-14));
    CHECK(t.a == doctest::Approx(std::cbrt(2.0)));
    CHECK(t.b == doctest::Approx(std::cbrt(4.0)));
    auto t1 = gen_er_triple(1, 1 - std::exp(-1.0));
    CHECK(t1.weights.j_max() == 1);
    CHECK(t1.weights[0] == doctest::Approx(1));
    auto t8 = gen_er_triple(8, 1 - std::exp(-1.0 / 8));
    CHECK(t8.weights.j_max() == 8);
    CHECK(t8.weights[7] == doctest::Approx(1));
    CHECK(t8.a == doctest::Approx(2));
    CHECK(t8.b == doctest::Approx(4));
    for (long long n : {10LL, 1000LL, 100000LL}) {
        auto tn = gen_er_triple(n, 1.0 / double(n));
        CHECK(tn.a * tn.a == doctest::Approx(tn.b).epsilon(1e-14));
    }
    CHECK_THROWS(gen_er_triple(5, 0.0));
    CHECK_THROWS(gen_er_triple(5, 1.0));
}

TEST_CASE("power-law triples")
{
    auto t = gen_powerlaw_triple(4, 2.5, 1, 1);
    CHECK(t.weights[0] == doctest::Approx(1.741101).epsilon(1e-6));
    CHECK(t.weights[3] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.a == doctest::Approx(std::pow(4.0, 0.4)));
    CHECK(t.b == doctest::Approx(t.weights.sigma1() / t.a));
    CHECK_THROWS(gen_powerlaw_triple(4, 2.0, 1, 1));
    CHECK_THROWS(gen_powerlaw_triple(4, 3.0, 1, 1));

    auto big = gen_powerlaw_triple(1000000, 2.5, 1, 1);
    CHECK(std::abs(big.weights[0] / big.a - 1) < 1e-2);
    CHECK(big.weights[1] / big.a == doctest::Approx(std::pow(2.0, -0.4)));
}

TEST_CASE("alpha_0 against quadrature oracle")
{
    for (double rho : {2.2, 2.5, 2.8}) {
        double oracle = frac_integral_oracle(rho);
        CHECK(fractional_part_integral(rho) == doctest::Approx(oracle).epsilon(2e-6));
    }
    double I = frac_integral_oracle(2.5);
    CHECK(powerlaw_alpha0(2.5, 1, 1) == doctest::Approx(2 * (I + 2)).epsilon(2e-6));
}

TEST_CASE("power-law tilt")
{
    double a0 = powerlaw_alpha0(2.5, 1, 1);
    auto raw = gen_powerlaw_triple(1000, 2.5, 1, 1);
    auto same = gen_powerlaw_triple(1000, 2.5, 1, 1, a0);
    CHECK(same.weights[0] == doctest::Approx(raw.weights[0]));
    auto tilt = gen_powerlaw_triple(1000, 2.5, 1, 1, a0 - 1);
    CHECK(tilt.weights[0] / raw.weights[0] == doctest::Approx(1 + raw.a / raw.b));
}

TEST_CASE("tabulated tails")
{
    auto flat = TailQuantile::tabulated({0.1, 0.3, 0.5, 1.0}, {5, 2, 2, 1});
    CHECK_THROWS(gen_powerlaw_triple(3, 2.5, 1, 1, std::nullopt, &flat)); // G flat at 1/3
    auto ok = TailQuantile::tabulated({0.1, 0.5, 1.0}, {5, 2, 1});
    auto t = gen_powerlaw_triple(4, 2.5, 1, 1, std::nullopt, &ok);
    CHECK(t.weights[0] == doctest::Approx(2 + 3 * 0.25 / 0.4));
}

TEST_CASE("json round trip")
{
    WeightSeq w({3, 2, 1});
    nlohmann::json j = w;
    CHECK(j.is_array());
    WeightSeq back = j.get<WeightSeq>();
    CHECK(back.w() == w.w());

    auto t = gen_er_triple(8, 0.1);
    t.limit = LimitParams{0.5, 1, 1, Eigen::VectorXd()};
    nlohmann::json jt = t;
    auto t2 = jt.get<ScalingTriple>();
    CHECK(t2.n == 8);
    CHECK(t2.a == t.a);
    REQUIRE(t2.limit.has_value());
    CHECK(t2.limit->alpha == 0.5);
}
