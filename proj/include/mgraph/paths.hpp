#ifndef MGRAPH_PATHS_HPP
#define MGRAPH_PATHS_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mgraph {

// Drift -1 between positive jumps: y(t) = -t + sum_{t_k <= t} size_k.
struct CadlagStepPath {
    std::vector<double> times;
    std::vector<double> sizes;
    double horizon = 0;

    CadlagStepPath() = default;
    CadlagStepPath(std::vector<double> t, std::vector<double> s, double hor = 0);

    double value(double t) const;       // right-continuous
    double left_limit(double t) const;
    std::size_t size() const { return times.size(); }
};

// Right-continuous piecewise-constant path: value v[i] on [t[i], t[i+1]),
// v.back() on [t.back(), inf). Before t[0] the value is `before`.
template <typename T>
struct StepPath {
    std::vector<double> t;
    std::vector<T> v;
    T before{};

    void push(double time, T value)
    {
        if (!t.empty() && time < t.back()) throw std::logic_error("StepPath: time decreasing");
        if (!t.empty() && time == t.back()) {
            v.back() = value;
            T prev = v.size() >= 2 ? v[v.size() - 2] : before;
            if (prev == value) {
                t.pop_back();
                v.pop_back();
            }
            return;
        }
        T last = v.empty() ? before : v.back();
        if (value == last) return;
        t.push_back(time);
        v.push_back(value);
    }

    T operator()(double time) const
    {
        auto it = std::upper_bound(t.begin(), t.end(), time);
        if (it == t.begin()) return before;
        return v[static_cast<std::size_t>(it - t.begin()) - 1];
    }

    T left_limit(double time) const
    {
        auto it = std::lower_bound(t.begin(), t.end(), time);
        if (it == t.begin()) return before;
        return v[static_cast<std::size_t>(it - t.begin()) - 1];
    }

    std::size_t jumps() const { return t.size(); }
};

using IntStepPath = StepPath<int>;

// Stack functional: H_t = #{s <= t : inf_[s,t] y > y(s-)}.
IntStepPath height_of_path(const CadlagStepPath& y);

} // namespace mgraph

#endif
