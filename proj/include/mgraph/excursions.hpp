#ifndef MGRAPH_EXCURSIONS_HPP
#define MGRAPH_EXCURSIONS_HPP

#include "lifo.hpp"
#include "paths.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace mgraph {

struct Excursion {
    double l, r, zeta;
};

struct ExcursionDecomposition {
    std::vector<Excursion> exc; // by (-zeta, l)
    std::vector<std::pair<std::size_t, std::size_t>> near_ties; // grid paths only

    double total() const;
};

constexpr double tol_exc = 1e-12;

void sort_excursions(std::vector<Excursion>& e);

// Maximal intervals where h > 0. Step paths must end at 0.
ExcursionDecomposition excursions_above_zero(const IntStepPath& h);
ExcursionDecomposition excursions_above_zero(const StepPath<double>& h);
// Uniform grid h(k dt), linear interpolation, h > tol_exc counts as positive.
ExcursionDecomposition excursions_above_zero(const Eigen::VectorXd& h, double dt);

// Maximal intervals where y exceeds its running infimum.
ExcursionDecomposition excursions_above_inf(const CadlagStepPath& y);
ExcursionDecomposition excursions_above_inf(const Eigen::VectorXd& y, double dt);

std::vector<double> excursion_masses(const CadlagStepPath& y);
std::vector<double> excursion_masses(const Eigen::VectorXd& y, double dt);

using LocalPinches = std::vector<std::pair<double, double>>; // (s - l, t - l)

std::vector<LocalPinches> assign_pinches(const ExcursionDecomposition& dec, const PinchSetup& ps);

void write_masses_csv(std::ostream& os, const std::vector<double>& zeta, std::size_t topk = 50);

} // namespace mgraph

#endif
