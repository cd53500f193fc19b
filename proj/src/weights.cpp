#include "weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgraph {

WeightSeq::WeightSeq(std::vector<double> raw)
{
    std::vector<double> pos;
    for (double x : raw) {
        if (!std::isfinite(x) || x < 0) throw std::invalid_argument("weights must be finite and nonnegative");
        if (x > 0) pos.push_back(x);
    }
    if (pos.empty()) throw std::invalid_argument("weights: need at least one positive entry");
    std::sort(pos.begin(), pos.end(), std::greater<>());
    w_ = Eigen::Map<Eigen::VectorXd>(pos.data(), Eigen::Index(pos.size()));
    s1_ = sigma_r(w_, 1.0);
    s2_ = w_.squaredNorm();
    s3_ = w_.array().cube().sum();
}

WeightSeq::WeightSeq(const Eigen::VectorXd& raw) : WeightSeq(std::vector<double>(raw.data(), raw.data() + raw.size())) {}

Criticality classify_criticality(const WeightSeq& w)
{
    double d = w.sigma2() - w.sigma1();
    if (std::abs(d) <= tol_crit * std::max(w.sigma1(), w.sigma2())) return Criticality::critical;
    return d > 0 ? Criticality::supercritical : Criticality::subcritical;
}

const char* to_string(Criticality c)
{
    switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    default: return "supercritical";
    }
}

void LimitParams::validate() const
{
    if (beta < 0) throw std::invalid_argument("beta must be nonnegative");
    if (!(kappa > 0)) throw std::invalid_argument("kappa must be positive");
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        if (c(j) < 0 || !std::isfinite(c(j))) throw std::invalid_argument("c must be finite and nonnegative");
        if (j > 0 && c(j) > c(j - 1)) throw std::invalid_argument("c must be nonincreasing");
    }
}

ScalingTriple gen_er_triple(long long n, double p)
{
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie in (0,1)");
    double x = double(n) * -std::log1p(-p);
    ScalingTriple t;
    t.n = n;
    t.a = std::cbrt(double(n));
    t.b = t.a * t.a;
    t.weights = WeightSeq(std::vector<double>(std::size_t(n), x));
    return t;
}

TailQuantile TailQuantile::pure_power(double rho)
{
    TailQuantile q;
    q.G = [rho](double y) { return y <= 1 ? std::pow(y, -1.0 / rho) : 0.0; };
    return q;
}

TailQuantile TailQuantile::tabulated(std::vector<double> y, std::vector<double> g)
{
    if (y.size() != g.size() || y.size() < 2) throw std::invalid_argument("tabulated tail: bad table");
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (!(y[i] > y[i - 1])) throw std::invalid_argument("tabulated tail: y must increase");
        if (g[i] > g[i - 1]) throw std::invalid_argument("tabulated tail: G must be nonincreasing");
    }
    if (y.front() <= 0 || y.back() > 1) throw std::invalid_argument("tabulated tail: y must lie in (0,1]");
    TailQuantile q;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (g[i] == g[i - 1]) q.flats.emplace_back(y[i - 1], y[i]);
    q.G = [y, g](double s) {
        if (s > 1) return 0.0;
        if (s < y.front()) throw std::domain_error("tabulated tail: y below table range");
        if (s >= y.back()) return g.back();
        auto it = std::upper_bound(y.begin(), y.end(), s);
        std::size_t i = std::size_t(it - y.begin());
        double u = (s - y[i - 1]) / (y[i] - y[i - 1]);
        return g[i - 1] + u * (g[i] - g[i - 1]);
    };
    return q;
}

double fractional_part_integral(double rho)
{
    // int_0^1 y {y^-rho} dy = (1/rho) int_1^inf {u} u^{-s-1} du with s = 2/rho;
    // exact per unit interval, then the tail with {u} replaced by its mean
    // plus the first Euler-Maclaurin correction.
    const double s = 2.0 / rho;
    const long K = 2000000;
    double sum = 0;
    for (long k = K - 1; k >= 1; --k) {
        double a = double(k), b = a + 1;
        double p1 = (std::pow(b, 1 - s) - std::pow(a, 1 - s)) / (1 - s);
        double p2 = a * (std::pow(a, -s) - std::pow(b, -s)) / s;
        sum += p1 - p2;
    }
    double Kd = double(K);
    double tail = std::pow(Kd, -s) / (2 * s) - std::pow(Kd, -s - 1) / 12.0;
    return (sum + tail) / rho;
}

double powerlaw_alpha0(double rho, double q, double kappa)
{
    return 2 * kappa * q * q * (fractional_part_integral(rho) + 1.0 / (rho - 2));
}

ScalingTriple gen_powerlaw_triple(long long n, double rho, double q, double kappa, std::optional<double> alpha,
                                  const TailQuantile* tail)
{
    if (!(rho > 2 && rho < 3)) throw std::invalid_argument("rho must lie in (2,3)");
    if (n < 1 || !(q > 0) || !(kappa > 0)) throw std::invalid_argument("power-law triple: bad n, q or kappa");
    TailQuantile def = TailQuantile::pure_power(rho);
    const TailQuantile& G = tail ? *tail : def;
    double y1 = 1.0 / double(n);
    for (auto [lo, hi] : G.flats)
        if (y1 >= lo && y1 <= hi) throw std::domain_error("tabulated tail has an atom at G(1/n)");

    std::vector<double> w(static_cast<std::size_t>(n));
    for (long long j = 1; j <= n; ++j) w[std::size_t(j - 1)] = G.G(double(j) / double(n));
    WeightSeq raw(w);
    ScalingTriple t;
    t.n = n;
    t.a = G.G(y1) / q;
    t.b = kappa * raw.sigma1() / t.a;
    double a0 = powerlaw_alpha0(rho, q, kappa);
    double factor = 1.0;
    if (alpha) factor = 1.0 - (t.a / t.b) * (*alpha - a0);
    if (!(factor > 0)) throw std::domain_error("power-law tilt factor is not positive at this n");
    if (factor != 1.0)
        for (auto& x : w) x *= factor;
    t.weights = factor == 1.0 ? raw : WeightSeq(w);
    LimitParams lp;
    lp.alpha = alpha ? *alpha : a0;
    lp.beta = 0;
    lp.kappa = kappa;
    const int J = 1000;
    lp.c.resize(J);
    for (int j = 0; j < J; ++j) lp.c(j) = q * std::pow(double(j + 1), -1.0 / rho);
    t.limit = lp;
    return t;
}

void to_json(nlohmann::json& j, const WeightSeq& w) { j = w.to_vector(); }

void from_json(const nlohmann::json& j, WeightSeq& w)
{
    if (j.is_array()) {
        w = WeightSeq(j.get<std::vector<double>>());
    } else if (j.is_object() && j.contains("weights")) {
        w = WeightSeq(j.at("weights").get<std::vector<double>>());
    } else {
        throw std::invalid_argument("weights JSON must be an array or an object with 'weights'");
    }
}

void to_json(nlohmann::json& j, const LimitParams& p)
{
    j = {{"alpha", p.alpha}, {"beta", p.beta}, {"kappa", p.kappa},
         {"c", std::vector<double>(p.c.data(), p.c.data() + p.c.size())}};
}

void from_json(const nlohmann::json& j, LimitParams& p)
{
    p.alpha = j.value("alpha", 0.0);
    p.beta = j.value("beta", 0.0);
    p.kappa = j.value("kappa", 1.0);
    auto c = j.value("c", std::vector<double>{});
    p.c = Eigen::Map<Eigen::VectorXd>(c.data(), Eigen::Index(c.size()));
    p.validate();
}

void to_json(nlohmann::json& j, const ScalingTriple& t)
{
    j = {{"n", t.n}, {"a", t.a}, {"b", t.b}, {"weights", t.weights}};
    if (t.limit) j["limit"] = *t.limit;
}

void from_json(const nlohmann::json& j, ScalingTriple& t)
{
    t.n = j.at("n").get<long long>();
    t.a = j.at("a").get<double>();
    t.b = j.at("b").get<double>();
    if (!(t.a > 0 && t.b > 0 && std::isfinite(t.a) && std::isfinite(t.b)))
        throw std::invalid_argument("triple: a and b must be finite and positive");
    t.weights = j.at("weights").get<WeightSeq>();
    if (j.contains("limit")) t.limit = j.at("limit").get<LimitParams>();
}

} // namespace mgraph
