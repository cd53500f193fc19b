#include "scaling.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mgraph {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr double quad_tol = 1e-13;
constexpr unsigned quad_depth = 25;

double lambda_max(double root) { return std::max(1e6, 1e3 * root); }

// int_{lo}^{hi} dl/f(l) with l = base + e^u, which keeps the integrand
// bounded when f vanishes linearly or quadratically at base.
template <class F>
double log_quad(F f, double base, double lo, double hi)
{
    if (!(hi > lo)) return 0;
    auto g = [&](double u) {
        double e = std::exp(u);
        return e / f(base + e);
    };
    return GK::integrate(g, std::log(lo - base), std::log(hi - base), quad_depth, quad_tol);
}

// Tail beyond L assuming psi(l) ~ a l + b l^2 / 2, fitted at L and 2L.
double fitted_tail(const LimitParams& p, double L)
{
    double f1 = psi(p, L), f2 = psi(p, 2 * L);
    double b = (f2 - 2 * f1) / (L * L); // from f(2L) - 2 f(L) = b L^2
    double a = (f1 - 0.5 * b * L * L) / L;
    if (!(b > 0)) return std::numeric_limits<double>::infinity();
    if (std::abs(a) < 1e-300) return 2 / (b * L);
    return std::log1p(2 * a / (b * L)) / a;
}

} // namespace

PsiValue psi_eval(const LimitParams& p, double lambda, int J)
{
    const Eigen::Index len = p.c.size();
    const Eigen::Index upto = (J < 0 || J > len) ? len : Eigen::Index(J);
    double s = p.alpha * lambda + 0.5 * p.beta * lambda * lambda;
    for (Eigen::Index j = 0; j < upto; ++j) s += p.kappa * p.c(j) * phi0(lambda * p.c(j));
    double rest = 0;
    for (Eigen::Index j = upto; j < len; ++j) rest += p.c(j) * p.c(j) * p.c(j);
    return {s, 0.5 * p.kappa * lambda * lambda * rest};
}

double psi_inverse(const LimitParams& p, double y)
{
    if (y < 0) throw std::invalid_argument("psi_inverse: y must be nonnegative");
    double lo = 0, hi = 1;
    int guard = 0;
    while (!(psi(p, hi) > y)) {
        lo = hi;
        hi *= 2;
        if (++guard > 1000 || !std::isfinite(hi)) throw std::runtime_error("psi_inverse: psi does not exceed y");
    }
    for (int it = 0; it < max_bisect; ++it) {
        if (hi - lo <= tol_inv) return hi;
        double mid = 0.5 * (lo + hi);
        (psi(p, mid) > y ? hi : lo) = mid;
    }
    throw std::runtime_error("psi_inverse: bisection did not converge");
}

double largest_root(const LimitParams& p)
{
    if (p.alpha >= 0) {
        if (psi(p, 1.0) <= 0 && psi(p, 1e6) <= 0) throw std::runtime_error("largest_root: psi vanishes identically");
        return 0;
    }
    return psi_inverse(p, 0);
}

double grey_integral(const LimitParams& p, double v)
{
    double root = largest_root(p);
    if (!(v > root)) return std::numeric_limits<double>::infinity();
    double L = lambda_max(root);
    auto f = [&](double l) { return psi(p, l); };
    if (v >= L) return fitted_tail(p, v);
    return log_quad(f, root, v, L) + fitted_tail(p, L);
}

PsiReport psi_report(const LimitParams& p)
{
    PsiReport r;
    r.root = largest_root(p);
    double L = lambda_max(r.root);
    r.is_grey = psi(p, 2 * L) / psi(p, L) > std::pow(2.0, 1.5);
    if (r.is_grey) r.grey_integral_tail = grey_integral(p, r.root + 1);
    return r;
}

double extinction_profile(const LimitParams& p, double t)
{
    if (!(t > 0)) throw std::invalid_argument("extinction_profile: t must be positive");
    PsiReport rep = psi_report(p);
    if (!rep.is_grey) throw std::domain_error("extinction_profile: psi does not satisfy the Grey condition");
    const double root = rep.root;
    auto F = [&](double x) { return grey_integral(p, root + std::exp(x)); };
    // F decreases in x; bracket then bisect on x = log(v - root)
    double lo = 0, hi = 0;
    if (F(0) > t) {
        hi = 1;
        while (F(hi) > t) {
            lo = hi;
            hi *= 2;
            if (hi > 800) throw std::runtime_error("extinction_profile: bracketing failed");
        }
    } else {
        lo = -1;
        while (!(F(lo) > t)) {
            hi = lo;
            lo *= 2;
            if (lo < -800) throw std::runtime_error("extinction_profile: bracketing failed");
        }
    }
    for (int it = 0; it < max_bisect && hi - lo > 1e-14; ++it) {
        double mid = 0.5 * (lo + hi);
        (F(mid) > t ? lo : hi) = mid;
    }
    return root + std::exp(0.5 * (lo + hi));
}

double psi_n_drift(const ScalingTriple& t)
{
    return (t.b / t.a) * (1 - t.weights.sigma2() / t.weights.sigma1());
}

double psi_n_eval(const ScalingTriple& t, double lambda)
{
    const auto& w = t.weights.w();
    double s = 0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        double x = w(j) / t.a;
        s += x * phi0(lambda * x);
    }
    return psi_n_drift(t) * lambda + (t.a * t.b / t.weights.sigma1()) * s;
}

namespace {

double c4_integral(const ScalingTriple& t, double y)
{
    if (y >= t.a) return 0;
    if (!(psi_n_eval(t, y) > 0)) return std::numeric_limits<double>::infinity();
    auto f = [&](double l) { return psi_n_eval(t, l); };
    return log_quad(f, 0.0, y, t.a);
}

// slope of log(v) against log(n)
double loglog_slope(const std::vector<double>& n, const std::vector<double>& v)
{
    double mx = 0, my = 0;
    std::size_t k = n.size();
    for (std::size_t i = 0; i < k; ++i) {
        mx += std::log(n[i]);
        my += std::log(v[i]);
    }
    mx /= double(k);
    my /= double(k);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double dx = std::log(n[i]) - mx;
        sxy += dx * (std::log(v[i]) - my);
        sxx += dx * dx;
    }
    return sxx > 0 ? sxy / sxx : 0;
}

bool converging(const std::vector<double>& dev, double tol)
{
    return std::abs(dev.back()) <= tol;
}

} // namespace

RegimeReport check_regime(const std::vector<ScalingTriple>& family, const LimitParams& p,
                          const std::vector<double>& y_grid)
{
    RegimeReport r;
    r.y_grid = y_grid;
    if (family.empty()) {
        r.notes.push_back("empty family");
        return r;
    }
    for (const auto& t : family) {
        RegimeRow row;
        row.n = t.n;
        row.a = t.a;
        row.b = t.b;
        row.b_over_a = t.b / t.a;
        row.b_over_a2 = t.b / (t.a * t.a);
        row.kappa_proxy = t.a * t.b / t.weights.sigma1();
        row.C1 = psi_n_drift(t);
        row.C2 = row.b_over_a2 * t.weights.sigma3() / t.weights.sigma1();
        int J = std::min(20, t.weights.j_max());
        for (int j = 0; j < J; ++j) row.C3.push_back(t.weights[j] / t.a);
        for (double y : y_grid) row.C4.push_back(c4_integral(t, y));
        r.rows.push_back(std::move(row));
    }

    const auto& rows = r.rows;
    r.apriori_ok = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].a > rows[i - 1].a && rows[i].b_over_a > rows[i - 1].b_over_a)) r.apriori_ok = false;
    if (rows.size() == 1) r.notes.push_back("single index: trends not assessable");

    double c3sum = 0;
    for (Eigen::Index j = 0; j < p.c.size(); ++j) c3sum += p.c(j) * p.c(j) * p.c(j);
    const double C2_target = p.beta + p.kappa * c3sum;
    std::vector<double> d1, d2;
    for (const auto& row : rows) {
        d1.push_back(row.C1 - p.alpha);
        d2.push_back(row.C2 - C2_target);
    }
    r.C1_ok = converging(d1, 0.05 * std::max(1.0, std::abs(p.alpha)));
    r.C2_ok = converging(d2, 0.05 * std::max(1.0, C2_target));
    double c3dev = 0;
    const auto& last = rows.back();
    for (std::size_t j = 0; j < last.C3.size(); ++j) {
        double target = Eigen::Index(j) < p.c.size() ? p.c(Eigen::Index(j)) : 0.0;
        c3dev = std::max(c3dev, std::abs(last.C3[j] - target));
    }
    r.C3_ok = c3dev <= 0.05 * std::max(1.0, p.c.size() ? p.c(0) : 0.0);

    std::vector<double> ns, ba2;
    for (const auto& row : rows) {
        ns.push_back(double(row.n));
        ba2.push_back(row.b_over_a2);
    }
    if (rows.size() >= 2 && ns.front() != ns.back())
        r.beta0_positive = last.b_over_a2 > 1e-3 && loglog_slope(ns, ba2) > -0.05;
    else
        r.beta0_positive = last.b_over_a2 > 1e-3;
    r.C4_by_shortcut = r.beta0_positive;
    r.C4_limsup.assign(y_grid.size(), 0.0);
    for (const auto& row : rows)
        for (std::size_t k = 0; k < y_grid.size(); ++k) r.C4_limsup[k] = std::max(r.C4_limsup[k], row.C4[k]);
    if (!r.C4_by_shortcut) r.notes.push_back("C4: beta_0 = 0, limsup reported from finite n only (extrapolation)");
    for (const auto& row : rows)
        for (double v : row.C4)
            if (!std::isfinite(v)) r.notes.push_back("C4: psi_n not positive on [y, a_n] at n=" + std::to_string(row.n));
    return r;
}

void write_regime_csv(std::ostream& os, const RegimeReport& r)
{
    os << "n,a_n,b_n,C1,C2,beta0_proxy,kappa_proxy";
    for (double y : r.y_grid) {
        std::ostringstream ys;
        ys << y;
        os << ",C4_integral_y=" << ys.str();
    }
    os << '\n' << std::setprecision(12);
    for (const auto& row : r.rows) {
        os << row.n << ',' << row.a << ',' << row.b << ',' << row.C1 << ',' << row.C2 << ',' << row.b_over_a2 << ','
           << row.kappa_proxy;
        for (double v : row.C4) os << ',' << v;
        os << '\n';
    }
}

void write_c3_csv(std::ostream& os, const RegimeReport& r)
{
    os << "n,j,w_j_over_a_n\n" << std::setprecision(12);
    for (const auto& row : r.rows)
        for (std::size_t j = 0; j < row.C3.size(); ++j) os << row.n << ',' << j + 1 << ',' << row.C3[j] << '\n';
}

AldousLimic aldous_limic_params(const LimitParams& p)
{
    if (!(p.kappa > 0)) throw std::invalid_argument("kappa must be positive");
    return {p.beta / p.kappa, p.alpha / p.kappa, p.c};
}

} // namespace mgraph
