#include "coded_metric.hpp"

#include "csv.hpp"
#include "direct_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mgraph {

CodingFunction::CodingFunction(Kind k, std::vector<double> t, std::vector<double> v, double zeta)
    : kind_(k), t_(std::move(t)), v_(std::move(v)), zeta_(zeta)
{
    if (t_.empty() || t_.size() != v_.size()) throw std::invalid_argument("coding function: bad breakpoints");
    if (t_[0] != 0) throw std::invalid_argument("coding function must start at time 0");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1])) throw std::invalid_argument("coding function: times must increase");
    if (k == Kind::step && !(zeta_ > t_.back())) throw std::invalid_argument("coding function: zeta too small");
    if (k == Kind::linear && zeta_ != t_.back()) throw std::invalid_argument("coding function: zeta must be the last node");
    // sparse table for range minima over v
    sparse_.push_back(v_);
    for (std::size_t len = 2; len <= v_.size(); len *= 2) {
        const auto& prev = sparse_.back();
        std::vector<double> cur(v_.size() - len + 1);
        for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = std::min(prev[i], prev[i + len / 2]);
        sparse_.push_back(std::move(cur));
    }
}

CodingFunction CodingFunction::from_height(const IntStepPath& h, double l, double r)
{
    std::vector<double> t{0}, v{double(h(l))};
    auto it = std::upper_bound(h.t.begin(), h.t.end(), l);
    for (; it != h.t.end() && *it < r; ++it) {
        t.push_back(*it - l);
        v.push_back(double(h.v[std::size_t(it - h.t.begin())]));
    }
    return CodingFunction(Kind::step, t, v, r - l);
}

CodingFunction CodingFunction::from_grid(const Eigen::VectorXd& v, double dt)
{
    std::vector<double> t(static_cast<std::size_t>(v.size())), x(t.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        t[std::size_t(k)] = double(k) * dt;
        x[std::size_t(k)] = v(k);
    }
    return CodingFunction(Kind::linear, t, x, t.back());
}

std::size_t CodingFunction::piece(double s) const
{
    auto it = std::upper_bound(t_.begin(), t_.end(), s);
    return std::size_t(it - t_.begin()) - 1;
}

double CodingFunction::rmq(std::size_t i, std::size_t j) const
{
    std::size_t len = j - i + 1, lev = 0;
    while ((std::size_t(2) << lev) <= len) ++lev;
    return std::min(sparse_[lev][i], sparse_[lev][j + 1 - (std::size_t(1) << lev)]);
}

double CodingFunction::operator()(double s) const
{
    if (s < 0 || s >= zeta_) return (kind_ == Kind::linear && s == zeta_) ? v_.back() : 0.0;
    std::size_t i = piece(s);
    if (kind_ == Kind::step || i + 1 == t_.size()) return v_[i];
    double u = (s - t_[i]) / (t_[i + 1] - t_[i]);
    return v_[i] + u * (v_[i + 1] - v_[i]);
}

double CodingFunction::left_limit(double s) const
{
    if (kind_ == Kind::linear) return (*this)(s);
    if (s <= 0) return 0;
    if (s > zeta_) return 0;
    auto it = std::lower_bound(t_.begin(), t_.end(), s);
    return v_[std::size_t(it - t_.begin()) - 1];
}

double CodingFunction::min_on(double s, double t) const
{
    if (s > t) std::swap(s, t);
    if (t >= zeta_ && !(kind_ == Kind::linear && t == zeta_)) return std::min(0.0, (*this)(s));
    std::size_t i = piece(std::max(s, 0.0)), j = piece(t);
    if (kind_ == Kind::step) return rmq(i, j);
    double m = std::min((*this)(s), (*this)(t));
    if (j > i) m = std::min(m, rmq(i + 1, j));
    return m;
}

double tree_distance(const CodingFunction& h, double s, double t)
{
    return h(s) + h(t) - 2 * h.min_on(s, t);
}

Eigen::MatrixXd tree_matrix(const CodedSpace& sp)
{
    const Eigen::Index n = Eigen::Index(sp.samples.size());
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            D(i, j) = D(j, i) = tree_distance(sp.h, sp.samples[std::size_t(i)], sp.samples[std::size_t(j)]);
    return D;
}

// Shortest paths alternate tree geodesics and shortcuts. Closing the
// endpoint set under shortest paths first (Floyd-Warshall on 2p nodes)
// leaves one relaxation per sample pair.
Eigen::MatrixXd pinched_matrix(const CodedSpace& sp)
{
    if (sp.eps < 0) throw std::invalid_argument("eps must be nonnegative");
    Eigen::MatrixXd D = tree_matrix(sp);
    const Eigen::Index p = Eigen::Index(sp.pinches.size());
    if (p == 0) return D;
    std::vector<double> ends;
    for (auto [s, t] : sp.pinches) {
        ends.push_back(s);
        ends.push_back(t);
    }
    const Eigen::Index m = 2 * p, n = D.rows();
    Eigen::MatrixXd P(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = a; b < m; ++b) P(a, b) = P(b, a) = tree_distance(sp.h, ends[std::size_t(a)], ends[std::size_t(b)]);
    for (Eigen::Index i = 0; i < p; ++i) {
        double c = std::min(sp.eps, P(2 * i, 2 * i + 1));
        P(2 * i, 2 * i + 1) = P(2 * i + 1, 2 * i) = c;
    }
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < m; ++b) P(a, b) = std::min(P(a, b), P(a, k) + P(k, b));

    Eigen::MatrixXd X(n, m); // tree distance sample -> endpoint
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index a = 0; a < m; ++a) X(i, a) = tree_distance(sp.h, sp.samples[std::size_t(i)], ends[std::size_t(a)]);
    Eigen::MatrixXd G(n, m); // sample -> endpoint via the closed endpoint graph
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index b = 0; b < m; ++b) G(i, b) = (X.row(i).transpose() + P.col(b)).minCoeff();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) D(i, j) = std::min(D(i, j), (G.row(i) + X.row(j)).minCoeff());
    return D;
}

namespace {

std::vector<double> union_points(const CodingFunction& h, const CodingFunction& g)
{
    std::vector<double> pts = h.times();
    pts.insert(pts.end(), g.times().begin(), g.times().end());
    pts.push_back(h.zeta());
    pts.push_back(g.zeta());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

} // namespace

double sup_distance(const CodingFunction& h, const CodingFunction& g)
{
    // both sides are constant or affine between consecutive union points
    double m = 0;
    for (double x : union_points(h, g)) {
        m = std::max(m, std::abs(h(x) - g(x)));
        m = std::max(m, std::abs(h.left_limit(x) - g.left_limit(x)));
    }
    return m;
}

double modulus(const CodingFunction& h, double delta)
{
    if (delta < 0) throw std::invalid_argument("delta must be nonnegative");
    // pieces with the zero extension past zeta appended
    std::vector<double> start = h.times(), val = h.values();
    if (h.kind() == CodingFunction::Kind::linear) {
        // nodes as pieces: a window of length delta starting near node i
        // meets nodes up to t_i + delta plus the next one (upper bound)
        start.push_back(std::numeric_limits<double>::infinity());
        val.push_back(0.0);
    } else {
        start.push_back(h.zeta());
        val.push_back(0.0);
    }
    const std::size_t K = start.size();
    std::deque<std::size_t> mx, mn;
    std::size_t j = 0;
    double best = 0;
    for (std::size_t i = 0; i < K; ++i) {
        double reach;
        if (h.kind() == CodingFunction::Kind::step)
            reach = i + 1 < K ? start[i + 1] + delta : std::numeric_limits<double>::infinity();
        else
            reach = start[i] + delta;
        // step: pieces with start < reach; linear: nodes <= reach plus one
        while (j < K && (h.kind() == CodingFunction::Kind::step ? start[j] < reach : (j == 0 || start[j - 1] <= reach))) {
            while (!mx.empty() && val[mx.back()] <= val[j]) mx.pop_back();
            while (!mn.empty() && val[mn.back()] >= val[j]) mn.pop_back();
            mx.push_back(j);
            mn.push_back(j);
            ++j;
        }
        while (mx.front() < i) mx.pop_front();
        while (mn.front() < i) mn.pop_front();
        best = std::max(best, val[mx.front()] - val[mn.front()]);
    }
    return best;
}

double ghp_upper_bound(const CodingFunction& h, const CodingFunction& g, const PinchPairs& P, const PinchPairs& Q,
                       double eps, double eps2, double delta)
{
    if (P.size() != Q.size()) throw std::invalid_argument("ghp bound: pinch counts differ");
    if (eps < 0 || eps2 < 0 || delta < 0) throw std::invalid_argument("ghp bound: negative parameter");
    for (std::size_t i = 0; i < P.size(); ++i)
        if (std::abs(P[i].first - Q[i].first) > delta || std::abs(P[i].second - Q[i].second) > delta)
            throw std::invalid_argument("ghp bound: pinch times further apart than delta");
    const double p = double(P.size());
    return 6 * (p + 1) * (sup_distance(h, g) + modulus(h, delta)) + 3 * p * std::max(eps, eps2) +
           std::abs(h.zeta() - g.zeta());
}

CodedSpace lifo_coded_space(const LifoTrace& tr, const Excursion& e, const LocalPinches& loc, double eps,
                            std::vector<int>* members)
{
    CodedSpace sp;
    sp.h = CodingFunction::from_height(tr.H, e.l, e.r);
    sp.pinches = loc;
    sp.eps = eps;
    for (int j : tr.order) {
        double t = tr.E[std::size_t(j - 1)];
        if (t >= e.l && t < e.r) {
            if (members) members->push_back(j);
            sp.samples.push_back(t - e.l);
            sp.sample_mass.push_back(tr.w[j - 1]);
        }
    }
    return sp;
}

MetricCheck check_lifo_distances(const LifoTrace& tr, const PinchSetup& ps)
{
    MetricCheck out;
    auto graph = assemble_graph(tr, ps);
    auto tree = assemble_graph(tr, PinchSetup{});
    auto dec = excursions_above_inf(tr.Y);
    auto loc = assign_pinches(dec, ps);
    for (auto* gr : {&tree, &graph}) {
        auto comps = connected_components(*gr);
        // graph vertices are clients minus one
        std::vector<int> comp_of(std::size_t(tr.n()), -1), pos(std::size_t(tr.n()), -1);
        for (std::size_t k = 0; k < comps.size(); ++k)
            for (std::size_t i = 0; i < comps[k].vertices.size(); ++i) {
                comp_of[std::size_t(comps[k].vertices[i])] = int(k);
                pos[std::size_t(comps[k].vertices[i])] = int(i);
            }
        for (std::size_t k = 0; k < dec.exc.size(); ++k) {
            std::vector<int> members;
            CodedSpace sp = lifo_coded_space(tr, dec.exc[k], gr == &tree ? LocalPinches{} : loc[k], 1.0, &members);
            if (members.empty()) continue;
            Eigen::MatrixXd D = pinched_matrix(sp);
            int c = comp_of[std::size_t(members[0] - 1)];
            if (comps[std::size_t(c)].vertices.size() != members.size()) {
                out.pass = false;
                ++out.mismatches;
                continue;
            }
            Eigen::MatrixXi G = graph_distances(comps[std::size_t(c)]);
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = 0; b < members.size(); ++b) {
                    ++out.pairs;
                    auto ua = std::size_t(members[a] - 1), ub = std::size_t(members[b] - 1);
                    if (comp_of[ub] != c || D(Eigen::Index(a), Eigen::Index(b)) != double(G(pos[ua], pos[ub]))) {
                        out.pass = false;
                        ++out.mismatches;
                    }
                }
        }
    }
    return out;
}

void write_matrix_csv(std::ostream& os, const std::vector<double>& samples, const Eigen::MatrixXd& D)
{
    os << 't';
    for (double s : samples) os << ',' << num(s);
    os << '\n';
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
        os << num(samples[std::size_t(i)]);
        for (Eigen::Index j = 0; j < D.cols(); ++j) os << ',' << num(D(i, j));
        os << '\n';
    }
}

} // namespace mgraph
