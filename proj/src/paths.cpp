#include "paths.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgraph {

CadlagStepPath::CadlagStepPath(std::vector<double> t, std::vector<double> s, double hor)
    : times(std::move(t)), sizes(std::move(s)), horizon(hor)
{
    if (times.size() != sizes.size()) throw std::invalid_argument("step path: size mismatch");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(sizes[k] > 0) || !std::isfinite(times[k])) throw std::invalid_argument("step path: jumps must be positive");
        if (k && !(times[k] > times[k - 1])) throw std::invalid_argument("step path: times must increase strictly");
    }
}

double CadlagStepPath::value(double t) const
{
    double s = -t;
    for (std::size_t k = 0; k < times.size() && times[k] <= t; ++k) s += sizes[k];
    return s;
}

double CadlagStepPath::left_limit(double t) const
{
    double s = -t;
    for (std::size_t k = 0; k < times.size() && times[k] < t; ++k) s += sizes[k];
    return s;
}

IntStepPath height_of_path(const CadlagStepPath& y)
{
    // A jump stays counted while y stays above its pre-jump level, i.e. while
    // the work it brought is not used up; rem[i] is that unused work. Same
    // arithmetic as the queue replay, so both agree on event times.
    IntStepPath H;
    std::vector<double> rem;
    double now = 0;
    auto drain_until = [&](double t) {
        while (!rem.empty() && now + rem.back() <= t) {
            now += rem.back();
            rem.pop_back();
            H.push(now, int(rem.size()));
        }
        if (!rem.empty()) rem.back() -= t - now;
        now = t;
    };
    for (std::size_t k = 0; k < y.size(); ++k) {
        drain_until(y.times[k]);
        rem.push_back(y.sizes[k]);
        H.push(now, int(rem.size()));
    }
    drain_until(std::numeric_limits<double>::infinity());
    return H;
}

} // namespace mgraph
