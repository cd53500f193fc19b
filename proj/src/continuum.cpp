#include "continuum.hpp"

#include "csv.hpp"
#include "excursions.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace mgraph {

int choose_truncation(const LimitParams& p, double T, double target)
{
    const int L = int(p.c.size());
    // tail[J] = sum_{j>J} c_j^2, J counted from 1
    double tail = p.c.squaredNorm();
    for (int J = 0; J < L; ++J) {
        if (0.5 * p.kappa * T * T * tail < target) return J;
        tail = std::max(0.0, tail - p.c(J) * p.c(J));
    }
    return L;
}

GridPath simulate_limit_Y(const LimitParams& p, double dt, double T, int J, Rng& rng, const std::vector<double>* forced_E)
{
    p.validate();
    if (!(dt > 0) || !(T > 0)) throw std::invalid_argument("simulate_limit_Y: dt and T must be positive");
    if (J < 0 || J > int(p.c.size())) throw std::invalid_argument("simulate_limit_Y: J out of range");
    if (forced_E && int(forced_E->size()) != J) throw std::invalid_argument("simulate_limit_Y: one forced time per jump");
    int m = 0;
    while (T / std::ldexp(1.0, m) > dt) {
        if (++m > 26) throw std::invalid_argument("simulate_limit_Y: grid too fine");
    }
    const Eigen::Index K = Eigen::Index(1) << m;
    GridPath g;
    g.T = T;
    g.dt = T / double(K);
    g.p = p;
    g.J = J;
    double tail = 0;
    for (Eigen::Index j = J; j < p.c.size(); ++j) tail += p.c(j) * p.c(j);
    g.truncation_bound = 0.5 * p.kappa * T * T * tail;

    // jumps: c_j at the first node at or after E_j
    Eigen::VectorXd jumps = Eigen::VectorXd::Zero(K + 1);
    double comp = 0; // compensator slope sum c_j^2 kappa
    for (int j = 0; j < J; ++j) {
        double c = p.c(j);
        if (c <= 0) continue;
        double E = forced_E ? (*forced_E)[std::size_t(j)] : std::exponential_distribution<double>(p.kappa * c)(rng);
        comp += c * c * p.kappa;
        double k = std::ceil(E / g.dt);
        if (k <= double(K)) jumps(Eigen::Index(k)) += c;
    }

    // Brownian part by midpoint refinement, coarse levels first
    Eigen::VectorXd B = Eigen::VectorXd::Zero(K + 1);
    if (p.beta > 0) {
        std::normal_distribution<double> N01;
        B(K) = std::sqrt(T) * N01(rng);
        for (Eigen::Index h = K / 2; h >= 1; h /= 2) {
            double sd = std::sqrt(0.5 * double(h) * g.dt);
            for (Eigen::Index i = h; i < K; i += 2 * h) B(i) = 0.5 * (B(i - h) + B(i + h)) + sd * N01(rng);
        }
    }

    g.Y.resize(K + 1);
    double acc = 0;
    for (Eigen::Index k = 0; k <= K; ++k) {
        double t = double(k) * g.dt;
        acc += jumps(k);
        g.Y(k) = -p.alpha * t - 0.5 * p.kappa * p.beta * t * t + std::sqrt(p.beta) * B(k) + acc - comp * t;
    }
    return g;
}

GridPath simulate_limit_Y(const LimitParams& p, double dt, double T, int J, std::uint64_t seed)
{
    Rng rng = make_rng(seed, stream::limit);
    GridPath g = simulate_limit_Y(p, dt, T, J, rng);
    g.seed = seed;
    return g;
}

std::vector<double> limit_masses(const GridPath& g, std::size_t topk)
{
    auto z = excursion_masses(g.Y, g.dt);
    if (z.size() > topk) z.resize(topk);
    return z;
}

void write_grid_csv(std::ostream& os, const GridPath& g)
{
    os << "t,Y\n";
    for (Eigen::Index k = 0; k < g.Y.size(); ++k) os << num(double(k) * g.dt) << ',' << num(g.Y(k)) << '\n';
}

} // namespace mgraph
