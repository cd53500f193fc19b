#ifndef MGRAPH_SCALING_HPP
#define MGRAPH_SCALING_HPP

#include "weights.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace mgraph {

// e^{-x} - 1 + x without cancellation near 0
inline double phi0(double x)
{
    if (std::abs(x) < 1e-3) {
        double x2 = x * x;
        return x2 * (0.5 - x / 6.0 + x2 / 24.0 - x2 * x / 120.0 + x2 * x2 / 720.0);
    }
    return std::expm1(-x) + x;
}

struct PsiValue {
    double value;
    double tail_bound; // 0.5 kappa lambda^2 sum_{j>J} c_j^3
};

// J < 0 means all of c.
PsiValue psi_eval(const LimitParams& p, double lambda, int J = -1);
inline double psi(const LimitParams& p, double lambda) { return psi_eval(p, lambda).value; }

constexpr double tol_inv = 1e-10;
constexpr int max_bisect = 200;

double psi_inverse(const LimitParams& p, double y);
double largest_root(const LimitParams& p);

struct PsiReport {
    double root = 0;
    double grey_integral_tail = std::numeric_limits<double>::infinity(); // int_{root+1}^inf dl/psi
    bool is_grey = false;
};

PsiReport psi_report(const LimitParams& p);

// int_v^inf dl / psi(l), v > root
double grey_integral(const LimitParams& p, double v);
// Solves int_v^inf dl/psi = t. Throws std::domain_error when psi is not Grey.
double extinction_profile(const LimitParams& p, double t);

double psi_n_eval(const ScalingTriple& t, double lambda);
double psi_n_drift(const ScalingTriple& t); // (b/a)(1 - s2/s1)

struct RegimeRow {
    long long n;
    double a, b;
    double b_over_a, b_over_a2, kappa_proxy;
    double C1, C2;
    std::vector<double> C3;   // w_j / a for j <= min(20, j_max)
    std::vector<double> C4;   // int_y^{a} dl/psi_n per y
};

struct RegimeReport {
    std::vector<double> y_grid;
    std::vector<RegimeRow> rows;
    bool apriori_ok = false;  // a_n and b_n/a_n increasing
    bool C1_ok = false, C2_ok = false, C3_ok = false;
    bool beta0_positive = false;
    bool C4_by_shortcut = false;
    std::vector<double> C4_limsup; // max over n, flagged as finite-n extrapolation
    std::vector<std::string> notes;
};

RegimeReport check_regime(const std::vector<ScalingTriple>& family, const LimitParams& p,
                          const std::vector<double>& y_grid);
void write_regime_csv(std::ostream& os, const RegimeReport& r);
void write_c3_csv(std::ostream& os, const RegimeReport& r);

struct AldousLimic {
    double kappa_al, tau_al;
    Eigen::VectorXd c;
};

AldousLimic aldous_limic_params(const LimitParams& p);

} // namespace mgraph

#endif
