#ifndef MGRAPH_STATS_HPP
#define MGRAPH_STATS_HPP

#include "direct_graph.hpp"
#include "weights.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mgraph {

struct TestResult {
    double statistic = 0;
    double p_value = 1;
    int df = 0;
};

constexpr double min_expected = 5.0;

// Adjacent cells are pooled left to right until each pooled cell expects >= 5.
TestResult chi_square_gof(const std::vector<long long>& counts, const std::vector<double>& probs);
// Two-sample homogeneity on a 2 x K table, pooling sparse columns the same way.
TestResult chi_square_homogeneity(const std::vector<long long>& a, const std::vector<long long>& b);

double kolmogorov_q(double lambda); // P(K > lambda)
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct EdgeMarginal {
    int u, v;
    double p, f_direct, f_lifo, sd;
    bool pass;
};

struct EdgeCompareReport {
    long long R = 0;
    std::uint64_t seed = 0;
    std::vector<EdgeMarginal> marginals;
    std::vector<long long> count_direct, count_lifo;
    std::vector<double> count_probs; // exact edge-count law
    TestResult count_homog, count_gof_direct, count_gof_lifo;
    bool joint_done = false;
    TestResult joint;
    double level = 1e-3;
    bool marginals_pass = false, counts_pass = false, joint_pass = true;

    bool pass() const { return marginals_pass && counts_pass && joint_pass; }
};

EdgeCompareReport edge_marginal_compare(const WeightSeq& w, long long R, std::uint64_t seed,
                                        unsigned workers = 1, double level = 1e-3);

void to_json(nlohmann::json& j, const EdgeCompareReport& r);
void write_summary(std::ostream& os, const EdgeCompareReport& r);

} // namespace mgraph

#endif
