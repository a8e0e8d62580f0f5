#include "segp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace segp {

double quantile_sorted(std::span<double const> sorted, double p)
{
    if (sorted.empty()) { throw std::invalid_argument("quantile of an empty sample"); }
    auto const h = static_cast<double>(sorted.size() - 1) * p;
    auto const lo = static_cast<std::size_t>(std::floor(h));
    auto const hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SampleSummary summarize_sample(std::span<double const> values)
{
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    SampleSummary s;
    s.n = v.size();
    s.median = quantile_sorted(v, 0.5);
    s.q1 = quantile_sorted(v, 0.25);
    s.q3 = quantile_sorted(v, 0.75);
    s.iqr = s.q3 - s.q1;
    return s;
}

namespace {

struct Ranked {
    std::vector<std::int64_t> doubled; // 2 * midrank, in a ++ b order
    std::int64_t rank_sum_a2 { 0 };     // 2 * R_a
    double tie_term { 0.0 };            // sum of t^3 - t over tie groups
};

Ranked rank(std::span<double const> a, std::span<double const> b)
{
    if (a.empty() || b.empty()) { throw std::invalid_argument("Mann-Whitney U needs two non-empty samples"); }
    std::vector<double> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return all[l] < all[r]; });

    Ranked out;
    out.doubled.resize(all.size());
    for (std::size_t i = 0; i < order.size();) {
        auto j = i;
        while (j + 1 < order.size() && all[order[j + 1]] == all[order[i]]) { ++j; }
        // Positions i..j (0-based) share the midrank (i + j + 2) / 2.
        auto const two_mid = static_cast<std::int64_t>(i + j + 2);
        for (auto k = i; k <= j; ++k) { out.doubled[order[k]] = two_mid; }
        auto const t = static_cast<double>(j - i + 1);
        out.tie_term += t * t * t - t;
        i = j + 1;
    }
    for (std::size_t i = 0; i < a.size(); ++i) { out.rank_sum_a2 += out.doubled[i]; }
    return out;
}

double u_statistic(Ranked const& r, std::size_t n1)
{
    auto const n = static_cast<double>(n1);
    return static_cast<double>(r.rank_sum_a2) / 2.0 - n * (n + 1) / 2.0;
}

bool all_tied(Ranked const& r)
{
    return std::all_of(r.doubled.begin(), r.doubled.end(), [&](auto v) { return v == r.doubled.front(); });
}

} // namespace

double mann_whitney_exact_p(std::span<double const> a, std::span<double const> b)
{
    auto const r = rank(a, b);
    if (all_tied(r)) { return 1.0; }
    auto const n1 = a.size();
    auto const total = std::accumulate(r.doubled.begin(), r.doubled.end(), std::int64_t { 0 });

    // ways[k][s]: subsets of k observations whose doubled ranks sum to s.
    auto const max_sum = static_cast<std::size_t>(total);
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (auto v : r.doubled) {
        auto const w = static_cast<std::size_t>(v);
        for (std::size_t k = n1; k >= 1; --k) {
            for (std::size_t s = max_sum; s >= w; --s) { ways[k][s] += ways[k - 1][s - w]; }
        }
    }

    // Two-sided: assignments at least as far from the null mean as observed.
    auto const mean2 = static_cast<std::int64_t>(n1) * (static_cast<std::int64_t>(r.doubled.size()) + 1);
    auto const observed = std::llabs(r.rank_sum_a2 - mean2);
    double extreme = 0.0;
    double all = 0.0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
        all += ways[n1][s];
        if (std::llabs(static_cast<std::int64_t>(s) - mean2) >= observed) { extreme += ways[n1][s]; }
    }
    return std::min(1.0, extreme / all);
}

double mann_whitney_normal_p(std::span<double const> a, std::span<double const> b)
{
    auto const r = rank(a, b);
    if (all_tied(r)) { return 1.0; }
    auto const n1 = static_cast<double>(a.size());
    auto const n2 = static_cast<double>(b.size());
    auto const n = n1 + n2;
    auto const u = u_statistic(r, a.size());
    auto const mu = n1 * n2 / 2.0;
    auto const var = n1 * n2 / 12.0 * ((n + 1.0) - r.tie_term / (n * (n - 1.0)));
    if (var <= 0.0) { return 1.0; }
    auto const z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MannWhitney mann_whitney_u(std::span<double const> a, std::span<double const> b)
{
    MannWhitney out;
    out.u = u_statistic(rank(a, b), a.size());
    out.exact = a.size() + b.size() <= 12;
    out.p = out.exact ? mann_whitney_exact_p(a, b) : mann_whitney_normal_p(a, b);
    return out;
}

std::vector<bool> holm_bonferroni(std::span<double const> pvals, double alpha)
{
    std::vector<std::size_t> order(pvals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return pvals[l] < pvals[r]; });
    std::vector<bool> reject(pvals.size(), false);
    auto const m = static_cast<double>(pvals.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (pvals[order[i]] > alpha / (m - static_cast<double>(i))) { break; }
        reject[order[i]] = true;
    }
    return reject;
}

std::set<std::string> compare_best(std::map<std::string, std::vector<double>> const& groups, Better better, double alpha)
{
    std::vector<std::string> names;
    for (auto const& [name, sample] : groups) { names.push_back(name); }

    struct Pair {
        std::size_t first;
        std::size_t second;
        int winner; // 0 first, 1 second, -1 neither
    };
    std::vector<Pair> pairs;
    std::vector<double> pvals;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            auto const& a = groups.at(names[i]);
            auto const& b = groups.at(names[j]);
            auto const t = mann_whitney_u(a, b);
            // Small U for a means a's values tend to be the smaller ones.
            auto const half = static_cast<double>(a.size() * b.size()) / 2.0;
            int winner = -1;
            if (t.u != half) { winner = (t.u < half) == (better == Better::Lower) ? 0 : 1; }
            pairs.push_back({ i, j, winner });
            pvals.push_back(t.p);
        }
    }

    auto const reject = holm_bonferroni(pvals, alpha);
    std::vector<bool> beaten(names.size(), false);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!reject[k] || pairs[k].winner < 0) { continue; }
        beaten[pairs[k].winner == 0 ? pairs[k].second : pairs[k].first] = true;
    }
    std::set<std::string> best;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!beaten[i]) { best.insert(names[i]); }
    }
    return best;
}

} // namespace segp
