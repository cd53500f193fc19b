#ifndef MGRAPH_WEIGHTS_HPP
#define MGRAPH_WEIGHTS_HPP

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <functional>
#include <initializer_list>
#include <optional>
#include <vector>

namespace mgraph {

template <typename Derived>
typename Derived::Scalar sigma_r(const Eigen::DenseBase<Derived>& w, typename Derived::Scalar r)
{
    using S = typename Derived::Scalar;
    S s(0);
    for (Eigen::Index j = 0; j < w.size(); ++j)
        if (w(j) > S(0)) s += (r == S(1)) ? w(j) : std::pow(w(j), r);
    return s;
}

// Nonincreasing, strictly positive weights. Zero entries are dropped,
// negative or non-finite entries rejected. Index 0 holds client 1.
class WeightSeq {
public:
    WeightSeq() = default;
    explicit WeightSeq(std::vector<double> raw);
    explicit WeightSeq(const Eigen::VectorXd& raw);
    WeightSeq(std::initializer_list<double> raw) : WeightSeq(std::vector<double>(raw)) {}

    const Eigen::VectorXd& w() const { return w_; }
    double operator[](Eigen::Index j) const { return w_(j); }
    int j_max() const { return static_cast<int>(w_.size()); }
    double sigma1() const { return s1_; }
    double sigma2() const { return s2_; }
    double sigma3() const { return s3_; }
    double sigma(double r) const { return sigma_r(w_, r); }

    std::vector<double> to_vector() const { return {w_.data(), w_.data() + w_.size()}; }

private:
    Eigen::VectorXd w_;
    double s1_ = 0, s2_ = 0, s3_ = 0;
};

enum class Criticality { subcritical, critical, supercritical };

constexpr double tol_crit = 1e-12;

Criticality classify_criticality(const WeightSeq& w);
const char* to_string(Criticality c);

struct LimitParams {
    double alpha = 0;
    double beta = 0;
    double kappa = 1;
    Eigen::VectorXd c; // nonincreasing, nonnegative

    void validate() const;
};

struct ScalingTriple {
    long long n = 1;
    double a = 1;
    double b = 1;
    WeightSeq weights;
    std::optional<LimitParams> limit;
};

ScalingTriple gen_er_triple(long long n, double p);

// Quantile-type function G of the weight law, nonincreasing on (0,1].
struct TailQuantile {
    std::function<double(double)> G;
    // Flat stretches of a tabulated G, as (y_lo, y_hi) intervals; a triple
    // whose a_n falls on one of them is refused.
    std::vector<std::pair<double, double>> flats;

    static TailQuantile pure_power(double rho);
    // Piecewise-linear interpolation through (y_k, G_k), y increasing in (0,1].
    static TailQuantile tabulated(std::vector<double> y, std::vector<double> g);
};

// 2 kappa q^2 (int_0^1 y {y^-rho} dy + 1/(rho-2))
double powerlaw_alpha0(double rho, double q, double kappa);
double fractional_part_integral(double rho);

// alpha == nullopt means the untilted family (equivalently alpha = alpha_0).
ScalingTriple gen_powerlaw_triple(long long n, double rho, double q, double kappa,
                                  std::optional<double> alpha = std::nullopt,
                                  const TailQuantile* tail = nullptr);

void to_json(nlohmann::json& j, const WeightSeq& w);
void from_json(const nlohmann::json& j, WeightSeq& w);
void to_json(nlohmann::json& j, const LimitParams& p);
void from_json(const nlohmann::json& j, LimitParams& p);
void to_json(nlohmann::json& j, const ScalingTriple& t);
void from_json(const nlohmann::json& j, ScalingTriple& t);

} // namespace mgraph

#endif
