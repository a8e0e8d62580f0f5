#include "segp/variation.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace segp {

void VariationConfig::validate() const
{
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
        throw std::invalid_argument(fmt::format("crossover probability {} outside [0, 1]", crossover_prob));
    }
    if (init_min_height > init_max_height) {
        throw std::invalid_argument("init_min_height exceeds init_max_height");
    }
    if (functions.empty()) {
        throw std::invalid_argument("empty function set");
    }
    for (auto op : functions) {
        if (is_terminal(op)) { throw std::invalid_argument("terminal in function set"); }
    }
    if (!(erc_low < erc_high)) {
        throw std::invalid_argument("empty constant range");
    }
    if (max_nodes == 0) {
        throw std::invalid_argument("max_nodes must be positive");
    }
}

Node random_terminal(VariationConfig const& cfg, std::size_t d, Random& rng)
{
    auto k = uniform_index(rng, d + 1);
    if (k < d) { return Node::variable(static_cast<std::uint32_t>(k)); }
    return Node::constant(uniform_real(rng, cfg.erc_low, cfg.erc_high));
}

namespace {

enum class Method { Full, Grow };

void build(std::vector<Node>& out, std::size_t depth, std::size_t height, Method method, VariationConfig const& cfg, std::size_t d, Random& rng)
{
    bool function = false;
    if (depth < height) {
        if (method == Method::Full || depth < cfg.init_min_height) {
            function = true;
        } else {
            function = bernoulli(rng, 0.5);
        }
    }
    if (!function) {
        out.push_back(random_terminal(cfg, d, rng));
        return;
    }
    auto op = cfg.functions[uniform_index(rng, cfg.functions.size())];
    out.push_back(Node::function(op));
    for (int c = 0; c < arity(op); ++c) {
        build(out, depth + 1, height, method, cfg, d, rng);
    }
}

Tree make(std::size_t height, Method method, VariationConfig const& cfg, std::size_t d, Random& rng)
{
    std::vector<Node> nodes;
    build(nodes, 0, height, method, cfg, d, rng);
    return Tree(std::move(nodes));
}

} // namespace

Tree full_tree(std::size_t height, VariationConfig const& cfg, std::size_t d, Random& rng)
{
    return make(height, Method::Full, cfg, d, rng);
}

Tree grow_tree(std::size_t height, VariationConfig const& cfg, std::size_t d, Random& rng)
{
    return make(height, Method::Grow, cfg, d, rng);
}

std::vector<Tree> init_ramped_half_and_half(std::size_t pop_size, VariationConfig const& cfg, std::size_t d, Random& rng)
{
    auto const rungs = cfg.init_max_height - cfg.init_min_height + 1;
    std::vector<Tree> pop;
    pop.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) {
        auto height = cfg.init_min_height + (i / 2) % rungs;
        pop.push_back(i % 2 == 0 ? full_tree(height, cfg, d, rng) : grow_tree(height, cfg, d, rng));
    }
    return pop;
}

std::size_t select_node_uniform_depth(Tree const& tree, Random& rng)
{
    auto depths = tree.depths();
    std::size_t height = 0;
    for (auto dep : depths) { height = std::max(height, dep); }
    // Every depth in [0, height] is populated.
    auto target = uniform_index(rng, height + 1);
    std::size_t count = 0;
    for (auto dep : depths) { count += dep == target; }
    auto pick = uniform_index(rng, count);
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (depths[i] == target && pick-- == 0) { return i; }
    }
    return 0;
}

Tree subtree_crossover(Tree const& receiver, Tree const& donor, VariationConfig const& cfg, Random& rng)
{
    auto at = select_node_uniform_depth(receiver, rng);
    auto from = select_node_uniform_depth(donor, rng);
    auto graft = donor.nodes().subspan(from, donor[from].length);
    if (receiver.size() - receiver[at].length + graft.size() > cfg.max_nodes) {
        return receiver;
    }
    return receiver.replace(at, graft);
}

Tree subtree_mutation(Tree const& parent, VariationConfig const& cfg, std::size_t d, Random& rng)
{
    auto at = select_node_uniform_depth(parent, rng);
    auto height = cfg.init_min_height + uniform_index(rng, cfg.init_max_height - cfg.init_min_height + 1);
    auto fresh = grow_tree(height, cfg, d, rng);
    if (parent.size() - parent[at].length + fresh.size() > cfg.max_nodes) {
        return parent;
    }
    return parent.replace(at, fresh.nodes());
}

std::vector<Offspring> vary_population(std::vector<Tree const*> const& parents, VariationConfig const& cfg, std::size_t d, Random& rng)
{
    if (parents.size() < 2) {
        throw std::invalid_argument("vary_population: need at least two parents");
    }
    std::vector<Offspring> out;
    out.reserve(parents.size());
    for (std::size_t i = 0; i < parents.size(); ++i) {
        if (bernoulli(rng, cfg.crossover_prob)) {
            auto const& mate = *parents[uniform_index(rng, parents.size())];
            out.push_back({ subtree_crossover(*parents[i], mate, cfg, rng), i, true });
        } else {
            out.push_back({ subtree_mutation(*parents[i], cfg, d, rng), i, false });
        }
    }
    return out;
}

} // namespace segp
