#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "segp/random.hpp"
#include "segp/stats.hpp"

using namespace segp;

namespace {

// Two-sided p by enumerating every assignment of the pooled values to the
// first group; ties use midranks.
double brute_force_p(std::vector<double> const& a, std::vector<double> const& b)
{
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto const n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t k = i;
        while (k + 1 < n && pooled[order[k + 1]] == pooled[order[i]]) { ++k; }
        for (std::size_t t = i; t <= k; ++t) { rank[order[t]] = (i + k) / 2.0 + 1.0; }
        i = k + 1;
    }
    double const mid = a.size() * (n + 1) / 2.0;
    double observed = 0;
    for (std::size_t i = 0; i < a.size(); ++i) { observed += rank[i]; }
    double const dev = std::fabs(observed - mid);

    std::size_t extreme = 0;
    std::size_t total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) { continue; }
        double r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) { r += rank[i]; }
        }
        ++total;
        extreme += std::fabs(r - mid) >= dev - 1e-9;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

std::vector<double> draw(Random& rng, std::size_t n, double shift, int levels)
{
    std::vector<double> v(n);
    for (auto& x : v) { x = shift + static_cast<double>(uniform_index(rng, static_cast<std::size_t>(levels))); }
    return v;
}

} // namespace

TEST_SUITE("stats")
{
    TEST_CASE("quantiles")
    {
        std::vector<double> v { 1, 2, 3, 4 };
        auto s = summarize_sample(v);
        CHECK(s.median == 2.5);
        CHECK(s.q1 == 1.75);
        CHECK(s.q3 == 3.25);
        CHECK(s.iqr == 1.5);
        CHECK(s.n == 4);
        std::vector<double> one { 7 };
        CHECK(summarize_sample(one).median == 7);
        CHECK(summarize_sample(one).iqr == 0);
        std::vector<double> unsorted { 5, 1, 3 };
        CHECK(summarize_sample(unsorted).median == 3);
        CHECK_THROWS(summarize_sample(std::vector<double> {}));
    }

    TEST_CASE("exact Mann-Whitney reference values")
    {
        std::vector<double> a { 1, 2, 3 };
        std::vector<double> b { 4, 5, 6 };
        auto r = mann_whitney_u(a, b);
        CHECK(r.exact);
        CHECK(r.u == 0.0);
        CHECK(r.p == doctest::Approx(0.1));
        CHECK(mann_whitney_u(b, a).p == doctest::Approx(0.1));
        CHECK(mann_whitney_u(b, a).u == 9.0);

        CHECK(mann_whitney_u(a, a).p == doctest::Approx(1.0));
        std::vector<double> flat { 2, 2, 2 };
        CHECK(mann_whitney_u(flat, flat).p == 1.0);
    }

    TEST_CASE("exact p agrees with full enumeration")
    {
        Random rng(1);
        for (int rep = 0; rep < 300; ++rep) {
            auto const na = 1 + uniform_index(rng, 6);
            auto const nb = 1 + uniform_index(rng, 10 - na);
            int const levels = rep % 2 == 0 ? 3 : 1000; // with and without ties
            auto a = draw(rng, na, 0.0, levels);
            auto b = draw(rng, nb, rep % 3 == 0 ? 1.0 : 0.0, levels);
            CHECK(mann_whitney_exact_p(a, b) == doctest::Approx(brute_force_p(a, b)).epsilon(1e-9));
            CHECK(mann_whitney_exact_p(a, b) == doctest::Approx(mann_whitney_exact_p(b, a)).epsilon(1e-12));
        }
    }

    TEST_CASE("normal approximation is close for moderate samples")
    {
        Random rng(2);
        for (int rep = 0; rep < 30; ++rep) {
            auto a = draw(rng, 10, 0.0, 1000);
            auto b = draw(rng, 10, rep % 2 ? 150.0 : 0.0, 1000);
            CHECK(std::fabs(mann_whitney_normal_p(a, b) - mann_whitney_exact_p(a, b)) < 0.05);
        }
        std::vector<double> big(40, 1.0);
        CHECK(mann_whitney_normal_p(big, big) == 1.0);
        auto r = mann_whitney_u(std::vector<double>(20, 1.0), std::vector<double>(20, 2.0));
        CHECK_FALSE(r.exact);
        CHECK(r.p < 1e-6);
    }

    TEST_CASE("Holm step-down")
    {
        std::vector<double> p1 { 0.01, 0.04 };
        CHECK(holm_bonferroni(p1) == std::vector<bool> { true, true });
        std::vector<double> p2 { 0.03, 0.04 };
        CHECK(holm_bonferroni(p2) == std::vector<bool> { false, false });
        std::vector<double> p3 { 0.04, 0.001, 0.02 };
        CHECK(holm_bonferroni(p3) == std::vector<bool> { true, true, true });
        std::vector<double> p4 { 0.04, 0.001, 0.03 };
        CHECK(holm_bonferroni(p4) == std::vector<bool> { false, true, false });
        CHECK(holm_bonferroni(std::vector<double> {}).empty());
    }

    TEST_CASE("Holm rejects a subset of the uncorrected tests")
    {
        Random rng(3);
        for (int rep = 0; rep < 500; ++rep) {
            std::vector<double> p(1 + uniform_index(rng, 10));
            for (auto& x : p) { x = uniform_real(rng, 0, 0.1); }
            auto rej = holm_bonferroni(p);
            std::vector<bool> bonf(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (rej[i]) { CHECK(p[i] < 0.05); }
                if (p[i] < 0.05 / p.size()) { CHECK(rej[i]); }
            }
            // Monotone: a smaller p is never accepted while a larger one is rejected.
            for (std::size_t i = 0; i < p.size(); ++i) {
                for (std::size_t j = 0; j < p.size(); ++j) {
                    if (p[i] < p[j] && rej[j]) { CHECK(rej[i]); }
                }
            }
        }
    }

    TEST_CASE("compare_best")
    {
        std::map<std::string, std::vector<double>> groups {
            { "low", { 1, 2, 3, 4, 5, 6, 7, 8 } },
            { "high", { 11, 12, 13, 14, 15, 16, 17, 18 } },
        };
        CHECK(compare_best(groups, Better::Lower) == std::set<std::string> { "low" });
        CHECK(compare_best(groups, Better::Higher) == std::set<std::string> { "high" });

        groups["mid"] = { 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5 };
        CHECK(compare_best(groups, Better::Lower) == std::set<std::string> { "low", "mid" });

        std::map<std::string, std::vector<double>> same { { "a", { 1, 2, 3 } }, { "b", { 1, 2, 3 } } };
        CHECK(compare_best(same, Better::Lower) == std::set<std::string> { "a", "b" });
        CHECK(compare_best({ { "only", { 1.0 } } }, Better::Lower) == std::set<std::string> { "only" });
    }
}
