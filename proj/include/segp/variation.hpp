#pragma once

#include <vector>

#include "segp/random.hpp"
#include "segp/tree.hpp"

namespace segp {

struct VariationConfig {
    double crossover_prob { 0.5 };
    std::size_t max_nodes { 500 };
    std::size_t init_min_height { 2 };
    std::size_t init_max_height { 6 };
    double erc_low { -5.0 };
    double erc_high { 5.0 };
    std::vector<Op> functions { Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Sqrt, Op::Log };

    void validate() const;
};

// Terminal: one of the d features or a fresh constant, each with
// probability 1 / (d + 1).
Node random_terminal(VariationConfig const& cfg, std::size_t d, Random& rng);

Tree full_tree(std::size_t height, VariationConfig const& cfg, std::size_t d, Random& rng);
// Functions are forced above cfg.init_min_height, terminals at `height`;
// in between a fair coin decides.
Tree grow_tree(std::size_t height, VariationConfig const& cfg, std::size_t d, Random& rng);

// Slot i gets target height min + (i / 2) mod (max - min + 1); even slots use
// the full method, odd slots grow.
std::vector<Tree> init_ramped_half_and_half(std::size_t pop_size, VariationConfig const& cfg, std::size_t d, Random& rng);

// Uniform over the depths present, then uniform over nodes at that depth.
std::size_t select_node_uniform_depth(Tree const& tree, Random& rng);

Tree subtree_crossover(Tree const& receiver, Tree const& donor, VariationConfig const& cfg, Random& rng);
Tree subtree_mutation(Tree const& parent, VariationConfig const& cfg, std::size_t d, Random& rng);

struct Offspring {
    Tree tree;
    std::size_t parent;  // parent of record: the root donor for crossover
    bool by_crossover;
};

// One offspring per parent slot; the mate for crossover is drawn uniformly
// from the whole parent list.
std::vector<Offspring> vary_population(std::vector<Tree const*> const& parents, VariationConfig const& cfg, std::size_t d, Random& rng);

} // namespace segp
