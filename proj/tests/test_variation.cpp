#include <doctest.h>

#include <map>

#include "segp/variation.hpp"
#include "support.hpp"

using namespace segp;

namespace {

bool valid(Tree const& t, std::size_t d, std::size_t max_nodes = 500)
{
    if (t.empty() || t.size() > max_nodes) { return false; }
    // Reconstructing from the raw prefix re-validates arities.
    Tree again(std::vector<Node>(t.nodes().begin(), t.nodes().end()));
    return again == t && (t.max_feature_index() < d || t.size() == 0);
}

bool all_leaves_at(Tree const& t, std::size_t h)
{
    auto depths = t.depths();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (is_terminal(t[i].op) && depths[i] != h) { return false; }
    }
    return true;
}

} // namespace

TEST_SUITE("variation")
{
    TEST_CASE("config validation")
    {
        VariationConfig cfg;
        CHECK_NOTHROW(cfg.validate());
        cfg.crossover_prob = 1.5;
        CHECK_THROWS(cfg.validate());
        cfg = {};
        cfg.init_min_height = 7;
        CHECK_THROWS(cfg.validate());
    }

    TEST_CASE("full binary tree of height 2 has 7 nodes")
    {
        VariationConfig cfg;
        cfg.functions = { Op::Add, Op::Sub, Op::Mul, Op::Div };
        Random rng(2);
        for (int i = 0; i < 50; ++i) {
            auto t = full_tree(2, cfg, 3, rng);
            CHECK(t.size() == 7);
            CHECK(t.height() == 2);
        }
    }

    TEST_CASE("ramped half-and-half rungs")
    {
        VariationConfig cfg;
        Random rng(3);
        auto pop = init_ramped_half_and_half(10, cfg, 4, rng);
        REQUIRE(pop.size() == 10);
        std::map<std::size_t, int> per_rung;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            auto const target = 2 + (i / 2) % 5;
            ++per_rung[target];
            CHECK(pop[i].height() <= target);
            CHECK(pop[i].height() >= 2);
            if (i % 2 == 0) { CHECK(all_leaves_at(pop[i], target)); }
            CHECK(valid(pop[i], 4));
        }
        for (auto const& [h, count] : per_rung) { CHECK(count == 2); }

        auto big = init_ramped_half_and_half(500, cfg, 8, rng);
        for (auto const& t : big) { CHECK(valid(t, 8)); }
    }

    TEST_CASE("terminal choice covers features and constants")
    {
        VariationConfig cfg;
        Random rng(4);
        std::map<int, int> counts;
        int const draws = 40000;
        for (int i = 0; i < draws; ++i) {
            auto n = random_terminal(cfg, 3, rng);
            if (n.op == Op::Constant) {
                CHECK(n.value >= -5.0);
                CHECK(n.value < 5.0);
                ++counts[-1];
            } else {
                ++counts[static_cast<int>(n.feature)];
            }
        }
        for (auto const& [k, c] : counts) { CHECK(std::fabs(c / double(draws) - 0.25) < 0.015); }
        CHECK(counts.size() == 4);
    }

    TEST_CASE("uniform depth node selection")
    {
        Random rng(5);
        CHECK(select_node_uniform_depth(parse_tree("(x0)"), rng) == 0);

        auto perfect = parse_tree("(+ (* (x0) (x1)) (- (x2) (x3)))");
        std::map<std::size_t, int> hits;
        int const draws = 30000;
        for (int i = 0; i < draws; ++i) { ++hits[select_node_uniform_depth(perfect, rng)]; }
        CHECK(std::fabs(hits[0] / double(draws) - 1.0 / 3.0) < 0.015);
        CHECK(std::fabs(hits[1] / double(draws) - 1.0 / 6.0) < 0.015);
        CHECK(std::fabs(hits[2] / double(draws) - 1.0 / 12.0) < 0.01);

        auto path = parse_tree("(psqrt (plog (psqrt (x0))))");
        int deepest = 0;
        for (int i = 0; i < draws; ++i) { deepest += select_node_uniform_depth(path, rng) == 3; }
        CHECK(std::fabs(deepest / double(draws) - 0.25) < 0.015);
    }

    TEST_CASE("crossover contracts")
    {
        VariationConfig cfg;
        Random rng(6);
        auto a = parse_tree("(x0)");
        auto b = parse_tree("(c:2.5)");
        CHECK(subtree_crossover(a, b, cfg, rng) == b);

        auto t = test::random_tree(3, 100, rng);
        // Identical parents grafted at the same node reproduce the parent;
        // in general the result still has valid shape.
        for (int i = 0; i < 200; ++i) {
            auto r = subtree_crossover(t, t, cfg, rng);
            CHECK(valid(r, 3));
        }

        cfg.max_nodes = 10;
        auto small = parse_tree("(+ (x0) (x1))");
        auto huge = parse_tree("(+ (+ (+ (x0) (x1)) (+ (x2) (x0))) (+ (+ (x0) (x1)) (+ (x2) (x0))))");
        // Every graft that lands on a depth-2 node of huge would exceed 10
        // nodes only for big donors; with a leaf receiver and donor = huge
        // (15 nodes) at its root, the cap returns the receiver.
        for (int i = 0; i < 100; ++i) {
            auto r = subtree_crossover(small, huge, cfg, rng);
            CHECK(r.size() <= 10);
        }
        CHECK(subtree_crossover(parse_tree("(x0)"), huge, cfg, rng).size() <= 10);
    }

    TEST_CASE("crossover of identical trees at matching nodes is the identity")
    {
        VariationConfig cfg;
        auto t = parse_tree("(+ (x0) (x1))");
        Random rng(7);
        int same = 0;
        for (int i = 0; i < 200; ++i) { same += subtree_crossover(t, t, cfg, rng) == t; }
        CHECK(same > 0);
    }

    TEST_CASE("mutation contracts")
    {
        VariationConfig cfg;
        Random rng(8);
        auto t = test::random_tree(4, 200, rng);
        for (int i = 0; i < 300; ++i) { CHECK(valid(subtree_mutation(t, cfg, 4, rng), 4)); }
        cfg.max_nodes = 3;
        auto leaf = parse_tree("(x0)");
        for (int i = 0; i < 100; ++i) { CHECK(subtree_mutation(leaf, cfg, 4, rng).size() <= 3); }
    }

    TEST_CASE("vary_population sizes and operator choice")
    {
        VariationConfig cfg;
        Random rng(9);
        std::vector<Tree> trees;
        for (int i = 0; i < 20; ++i) { trees.push_back(test::random_tree(3, 60, rng)); }
        std::vector<Tree const*> parents;
        for (auto const& t : trees) { parents.push_back(&t); }

        cfg.crossover_prob = 0.0;
        auto m = vary_population(parents, cfg, 3, rng);
        CHECK(m.size() == parents.size());
        for (std::size_t k = 0; k < m.size(); ++k) {
            CHECK_FALSE(m[k].by_crossover);
            CHECK(m[k].parent == k);
        }
        cfg.crossover_prob = 1.0;
        auto c = vary_population(parents, cfg, 3, rng);
        for (auto const& o : c) {
            CHECK(o.by_crossover);
            CHECK(valid(o.tree, 3));
        }
    }

    TEST_CASE("variation is deterministic per stream")
    {
        VariationConfig cfg;
        Random a(77);
        Random b(77);
        auto p = init_ramped_half_and_half(50, cfg, 5, a);
        auto q = init_ramped_half_and_half(50, cfg, 5, b);
        CHECK(p == q);
        std::vector<Tree const*> pp;
        for (auto const& t : p) { pp.push_back(&t); }
        auto x = vary_population(pp, cfg, 5, a);
        auto y = vary_population(pp, cfg, 5, b);
        for (std::size_t i = 0; i < x.size(); ++i) { CHECK(x[i].tree == y[i].tree); }
    }
}
