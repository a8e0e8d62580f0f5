#pragma once

// Shared fixtures and independent reference implementations for the tests.

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "segp/data.hpp"
#include "segp/evaluation.hpp"
#include "segp/random.hpp"
#include "segp/tree.hpp"
#include "segp/variation.hpp"

namespace segp::test {

inline Dataset random_dataset(std::size_t n, std::size_t d, Task task, Random& rng, std::string name = "synthetic")
{
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            x(i, j) = normal(rng);
            s += (j % 2 == 0 ? 1.0 : -0.5) * x(i, j);
        }
        y[i] = task == Task::Regression ? 3.0 + 2.0 * s + 0.1 * normal(rng) : (s + 0.3 * normal(rng) > 0 ? 1.0 : 0.0);
    }
    return { std::move(name), std::move(x), std::move(y), task };
}

// Random tree of at most max_nodes nodes.
inline Tree random_tree(std::size_t d, std::size_t max_nodes, Random& rng)
{
    VariationConfig cfg;
    for (;;) {
        auto const h = uniform_index(rng, 8);
        auto t = bernoulli(rng, 0.5) ? grow_tree(h, cfg, d, rng) : full_tree(std::min<std::size_t>(h, 6), cfg, d, rng);
        if (t.size() <= max_nodes) { return t; }
    }
}

// Straightforward recursive interpretation of the protected primitives.
inline double reference_eval(Tree const& t, std::size_t at, Eigen::MatrixXd const& x, Eigen::Index row, std::size_t* next = nullptr)
{
    auto const& n = t[at];
    std::size_t cursor = at + 1;
    double result = 0.0;
    if (n.op == Op::Feature) {
        result = x(row, n.feature);
    } else if (n.op == Op::Constant) {
        result = n.value;
    } else if (arity(n.op) == 1) {
        double const a = reference_eval(t, cursor, x, row, &cursor);
        result = n.op == Op::Sqrt ? std::sqrt(std::fabs(a)) : std::log(std::fabs(a) + 1e-10);
    } else {
        double const a = reference_eval(t, cursor, x, row, &cursor);
        double const b = reference_eval(t, cursor, x, row, &cursor);
        switch (n.op) {
        case Op::Add: result = a + b; break;
        case Op::Sub: result = a - b; break;
        case Op::Mul: result = a * b; break;
        default: result = (b >= 0 ? a : -a) / (std::fabs(b) + 1e-10); break;
        }
        double const big = std::numeric_limits<double>::max();
        if (result > big) { result = big; }
        if (result < -big) { result = -big; }
    }
    if (next != nullptr) { *next = cursor; }
    return result;
}

inline std::vector<double> reference_outputs(Tree const& t, Eigen::MatrixXd const& x)
{
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) { out[static_cast<std::size_t>(i)] = reference_eval(t, 0, x, i); }
    return out;
}

// |a - b| <= tol * max(|a|, |b|), with equality required for exact zeros and
// matching infinities.
inline bool rel_close(double a, double b, double tol)
{
    if (a == b) { return true; }
    return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

inline std::filesystem::path temp_dir(std::string const& tag)
{
    auto dir = std::filesystem::temp_directory_path() / ("segp_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace segp::test
