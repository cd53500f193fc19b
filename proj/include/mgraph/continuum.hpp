#ifndef MGRAPH_CONTINUUM_HPP
#define MGRAPH_CONTINUUM_HPP

#include "rng.hpp"
#include "weights.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mgraph {

struct GridPath {
    double dt = 0, T = 0;
    Eigen::VectorXd Y;  // Y(k dt), k = 0..steps
    LimitParams p;
    int J = 0;
    double truncation_bound = 0; // 0.5 kappa T^2 sum_{j>J} c_j^2
    std::uint64_t seed = 0;
};

// Smallest J with 0.5 kappa T^2 sum_{j>J} c_j^2 < target (capped at len(c)).
int choose_truncation(const LimitParams& p, double T, double target = 1e-3);

// The grid step is T / 2^m, the largest such step not above dt. The Brownian
// part is built by midpoint refinement, so with a fixed seed the path at
// step dt/2 passes through the path at step dt. forced_E replaces the J jump
// times (test hook).
GridPath simulate_limit_Y(const LimitParams& p, double dt, double T, int J, Rng& rng,
                          const std::vector<double>* forced_E = nullptr);
GridPath simulate_limit_Y(const LimitParams& p, double dt, double T, int J, std::uint64_t seed);

// Largest excursion lengths of Y above its running infimum, nonincreasing.
std::vector<double> limit_masses(const GridPath& g, std::size_t topk = 50);

void write_grid_csv(std::ostream& os, const GridPath& g);

} // namespace mgraph

#endif
