#include "excursions.hpp"

#include "csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mgraph {

double ExcursionDecomposition::total() const
{
    double s = 0;
    for (const auto& e : exc) s += e.zeta;
    return s;
}

void sort_excursions(std::vector<Excursion>& e)
{
    std::sort(e.begin(), e.end(), [](const Excursion& a, const Excursion& b) {
        if (a.zeta != b.zeta) return a.zeta > b.zeta;
        return a.l < b.l;
    });
}

namespace {

template <typename T>
ExcursionDecomposition step_above_zero(const StepPath<T>& h)
{
    if (h.before != T(0)) throw std::invalid_argument("coding path must start at 0");
    if (!h.v.empty() && h.v.back() != T(0)) throw std::invalid_argument("step path must end at 0");
    ExcursionDecomposition d;
    double open = -1;
    for (std::size_t i = 0; i < h.t.size(); ++i) {
        bool pos = h.v[i] > T(0);
        if (pos && open < 0) open = h.t[i];
        if (!pos && open >= 0) {
            d.exc.push_back({open, h.t[i], h.t[i] - open});
            open = -1;
        }
    }
    sort_excursions(d.exc);
    return d;
}

void flag_near_ties(ExcursionDecomposition& d)
{
    for (std::size_t k = 1; k < d.exc.size(); ++k)
        if (d.exc[k - 1].zeta - d.exc[k].zeta <= 10 * tol_exc) d.near_ties.emplace_back(k - 1, k);
}

// runs of `inside` nodes; a run i..j spans (t_{i-1}, t_{j+1})
template <class Inside>
ExcursionDecomposition grid_runs(Eigen::Index n, double dt, Inside inside)
{
    ExcursionDecomposition d;
    Eigen::Index k = 0;
    while (k < n) {
        if (!inside(k)) {
            ++k;
            continue;
        }
        Eigen::Index i = k;
        while (k < n && inside(k)) ++k;
        double l = double(std::max<Eigen::Index>(i - 1, 0)) * dt;
        double r = double(std::min<Eigen::Index>(k, n - 1)) * dt;
        d.exc.push_back({l, r, r - l});
    }
    sort_excursions(d.exc);
    flag_near_ties(d);
    return d;
}

} // namespace

ExcursionDecomposition excursions_above_zero(const IntStepPath& h) { return step_above_zero(h); }
ExcursionDecomposition excursions_above_zero(const StepPath<double>& h) { return step_above_zero(h); }

ExcursionDecomposition excursions_above_zero(const Eigen::VectorXd& h, double dt)
{
    return grid_runs(h.size(), dt, [&](Eigen::Index k) { return h(k) > tol_exc; });
}

ExcursionDecomposition excursions_above_inf(const CadlagStepPath& y)
{
    // y exceeds its running infimum exactly where its height is positive;
    // going through the height keeps the endpoints bit-identical with it.
    // zeta is the work brought in during the period (r - l up to rounding).
    ExcursionDecomposition d = excursions_above_zero(height_of_path(y));
    for (auto& e : d.exc) {
        auto lo = std::lower_bound(y.times.begin(), y.times.end(), e.l);
        auto hi = std::lower_bound(y.times.begin(), y.times.end(), e.r);
        e.zeta = 0;
        for (auto it = lo; it != hi; ++it) e.zeta += y.sizes[std::size_t(it - y.times.begin())];
    }
    sort_excursions(d.exc);
    return d;
}

ExcursionDecomposition excursions_above_inf(const Eigen::VectorXd& y, double dt)
{
    Eigen::VectorXd J(y.size());
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < y.size(); ++k) J(k) = m = std::min(m, y(k));
    return grid_runs(y.size(), dt, [&](Eigen::Index k) { return y(k) > J(k) + tol_exc; });
}

namespace {

std::vector<double> lengths(const ExcursionDecomposition& d)
{
    std::vector<double> z;
    for (const auto& e : d.exc) z.push_back(e.zeta);
    return z;
}

} // namespace

std::vector<double> excursion_masses(const CadlagStepPath& y) { return lengths(excursions_above_inf(y)); }
std::vector<double> excursion_masses(const Eigen::VectorXd& y, double dt) { return lengths(excursions_above_inf(y, dt)); }

std::vector<LocalPinches> assign_pinches(const ExcursionDecomposition& dec, const PinchSetup& ps)
{
    std::vector<std::size_t> by_l(dec.exc.size());
    for (std::size_t k = 0; k < by_l.size(); ++k) by_l[k] = k;
    std::sort(by_l.begin(), by_l.end(), [&](std::size_t a, std::size_t b) { return dec.exc[a].l < dec.exc[b].l; });
    std::vector<LocalPinches> out(dec.exc.size());
    for (const auto& p : ps.pinches) {
        auto it = std::upper_bound(by_l.begin(), by_l.end(), p.t,
                                   [&](double t, std::size_t k) { return t < dec.exc[k].l; });
        if (it == by_l.begin()) throw std::invalid_argument("pinch outside every excursion");
        const auto& e = dec.exc[*(it - 1)];
        if (!(p.t < e.r)) throw std::invalid_argument("pinch outside every excursion");
        if (p.s < e.l || p.s > p.t) throw std::invalid_argument("pinch endpoints straddle excursions");
        out[*(it - 1)].emplace_back(p.s - e.l, p.t - e.l);
    }
    for (auto& v : out)
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    return out;
}

void write_masses_csv(std::ostream& os, const std::vector<double>& zeta, std::size_t topk)
{
    os << "zeta\n";
    for (std::size_t k = 0; k < zeta.size() && k < topk; ++k) os << num(zeta[k]) << '\n';
}

} // namespace mgraph
