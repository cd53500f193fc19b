#ifndef MGRAPH_CODED_METRIC_HPP
#define MGRAPH_CODED_METRIC_HPP

#include "excursions.hpp"
#include "paths.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <utility>
#include <vector>

namespace mgraph {

// Excursion-type coding function on [0, zeta), zero afterwards.
//  step:   value v[i] on [t[i], t[i+1]), with t[0] = 0 and the last piece up to zeta
//  linear: node values v[i] at t[i], linear in between, t.back() = zeta
class CodingFunction {
public:
    enum class Kind { step, linear };

    CodingFunction() = default;
    CodingFunction(Kind k, std::vector<double> t, std::vector<double> v, double zeta);

    static CodingFunction from_height(const IntStepPath& h, double l, double r);
    static CodingFunction from_grid(const Eigen::VectorXd& v, double dt);

    double operator()(double s) const;
    double left_limit(double s) const;
    double min_on(double s, double t) const; // min over [s∧t, s∨t]
    double zeta() const { return zeta_; }
    Kind kind() const { return kind_; }
    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& values() const { return v_; }

private:
    std::size_t piece(double s) const;
    double rmq(std::size_t i, std::size_t j) const; // min v[i..j]

    Kind kind_ = Kind::step;
    std::vector<double> t_, v_;
    double zeta_ = 0;
    std::vector<std::vector<double>> sparse_;
};

double tree_distance(const CodingFunction& h, double s, double t);

using PinchPairs = std::vector<std::pair<double, double>>;

struct CodedSpace {
    CodingFunction h;
    PinchPairs pinches;
    double eps = 0;
    std::vector<double> samples;
    std::vector<double> sample_mass;
};

Eigen::MatrixXd tree_matrix(const CodedSpace& sp);
Eigen::MatrixXd pinched_matrix(const CodedSpace& sp);

double sup_distance(const CodingFunction& h, const CodingFunction& g);
double modulus(const CodingFunction& h, double delta);

double ghp_upper_bound(const CodingFunction& h, const CodingFunction& g, const PinchPairs& P,
                       const PinchPairs& Q, double eps, double eps2, double delta);

// Coded space of one busy period of a LIFO trace: H restricted to [l, r),
// samples at the arrival times of its clients (clients listed in `members`).
CodedSpace lifo_coded_space(const LifoTrace& tr, const Excursion& e, const LocalPinches& loc, double eps,
                            std::vector<int>* members = nullptr);

struct MetricCheck {
    bool pass = true;
    long long pairs = 0;
    long long mismatches = 0;
};

// Tree and pinched (eps = 1) coded distances against BFS distances of the
// assembled graphs, over every busy period of the trace.
MetricCheck check_lifo_distances(const LifoTrace& tr, const PinchSetup& ps);

void write_matrix_csv(std::ostream& os, const std::vector<double>& samples, const Eigen::MatrixXd& D);

} // namespace mgraph

#endif
