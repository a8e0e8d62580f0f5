#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace segp {

// Linear-interpolation quantile (R type 7) of an ascending sample.
double quantile_sorted(std::span<double const> sorted, double p);

struct SampleSummary {
    double median { 0.0 };
    double q1 { 0.0 };
    double q3 { 0.0 };
    double iqr { 0.0 };
    std::size_t n { 0 };
};

SampleSummary summarize_sample(std::span<double const> values);

struct MannWhitney {
    double u { 0.0 }; // statistic of the first sample
    double p { 1.0 }; // two-sided
    bool exact { false };
};

// Exact enumeration when |a| + |b| <= 12, otherwise the normal
// approximation with tie and continuity corrections.
MannWhitney mann_whitney_u(std::span<double const> a, std::span<double const> b);

// Both paths exposed for testing; the exact one handles ties through
// midranks and works for any size (cost grows with |a| * |b| * N).
double mann_whitney_exact_p(std::span<double const> a, std::span<double const> b);
double mann_whitney_normal_p(std::span<double const> a, std::span<double const> b);

// Step-down rejection flags, in input order.
std::vector<bool> holm_bonferroni(std::span<double const> pvals, double alpha = 0.05);

enum class Better { Lower, Higher };

// Groups not significantly beaten by any other group after Holm over all
// pairwise tests.
std::set<std::string> compare_best(std::map<std::string, std::vector<double>> const& groups, Better better, double alpha = 0.05);

} // namespace segp
