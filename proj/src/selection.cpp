#include "segp/selection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

namespace segp {

std::string to_string(SelectionKind kind)
{
    switch (kind) {
    case SelectionKind::PartitionedTruncation: return "partitioned";
    case SelectionKind::TruncPwb: return "trunc-pwb";
    case SelectionKind::TruncPwl: return "trunc-pwl";
    case SelectionKind::TournPwb: return "tourn-pwb";
    case SelectionKind::TournPwl: return "tourn-pwl";
    case SelectionKind::PlainTournament: return "tournament";
    }
    return "?";
}

SelectionKind parse_selection(std::string const& text)
{
    for (auto k : { SelectionKind::PartitionedTruncation, SelectionKind::TruncPwb, SelectionKind::TruncPwl,
             SelectionKind::TournPwb, SelectionKind::TournPwl, SelectionKind::PlainTournament }) {
        if (to_string(k) == text) { return k; }
    }
    throw std::invalid_argument(fmt::format("unknown selection '{}'", text));
}

double aggregate_pwb(std::span<double const> losses) { return *std::min_element(losses.begin(), losses.end()); }

double aggregate_pwl(std::span<double const> losses) { return *std::max_element(losses.begin(), losses.end()); }

std::vector<std::size_t> partition_sizes(std::size_t n_pop, std::size_t beta)
{
    std::vector<std::size_t> q(beta, n_pop / beta);
    for (std::size_t j = 0; j < n_pop % beta; ++j) { ++q[j]; }
    return q;
}

namespace {

// Strict total order on pool positions for a given key.
template <typename Key>
auto ranking(std::span<EvaluatedIndividual const> pool, Key key)
{
    return [pool, key](std::size_t l, std::size_t r) {
        auto kl = key(l);
        auto kr = key(r);
        if (kl != kr) { return kl < kr; }
        auto sl = pool[l].tree.size();
        auto sr = pool[r].tree.size();
        if (sl != sr) { return sl < sr; }
        return l < r;
    };
}

template <typename Key>
std::vector<std::size_t> best_k(std::span<EvaluatedIndividual const> pool, std::size_t k, Key key)
{
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    k = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), ranking(pool, key));
    order.resize(k);
    return order;
}

} // namespace

std::vector<std::size_t> partitioned_truncation_indices(std::span<EvaluatedIndividual const> pool, std::size_t beta, std::size_t n_pop)
{
    if (beta == 0 || beta > pool.size()) {
        throw std::invalid_argument(fmt::format("partitioned truncation: beta {} invalid for a pool of {}", beta, pool.size()));
    }
    auto q = partition_sizes(n_pop, beta);
    std::vector<std::size_t> selected;
    selected.reserve(n_pop);
    for (std::size_t j = 0; j < beta; ++j) {
        auto top = best_k(pool, q[j], [pool, j](std::size_t i) { return pool[i].fitness[j]; });
        selected.insert(selected.end(), top.begin(), top.end());
    }
    return selected;
}

std::vector<EvaluatedIndividual> partitioned_truncation(std::span<EvaluatedIndividual const> parents,
    std::span<EvaluatedIndividual const> offspring, std::size_t beta, std::size_t n_pop)
{
    std::vector<EvaluatedIndividual> pool(parents.begin(), parents.end());
    pool.insert(pool.end(), offspring.begin(), offspring.end());
    std::vector<EvaluatedIndividual> out;
    out.reserve(n_pop);
    for (auto i : partitioned_truncation_indices(pool, beta, n_pop)) { out.push_back(pool[i]); }
    return out;
}

std::vector<std::size_t> truncation_on_scalar(std::span<EvaluatedIndividual const> pool, ScalarKey const& key, std::size_t n_pop)
{
    if (pool.size() < n_pop) {
        throw std::invalid_argument("truncation: pool smaller than n_pop");
    }
    std::vector<double> keys(pool.size());
    std::transform(pool.begin(), pool.end(), keys.begin(), key);
    return best_k(pool, n_pop, [&keys](std::size_t i) { return keys[i]; });
}

std::vector<std::size_t> tournament_on_scalar(std::span<EvaluatedIndividual const> pool, ScalarKey const& key, std::size_t size,
    std::size_t n_pop, Random& rng)
{
    if (size == 0 || pool.empty()) {
        throw std::invalid_argument("tournament: empty pool or zero size");
    }
    std::vector<double> keys(pool.size());
    std::transform(pool.begin(), pool.end(), keys.begin(), key);
    std::vector<std::size_t> winners;
    winners.reserve(n_pop);
    std::vector<std::size_t> tied;
    for (std::size_t t = 0; t < n_pop; ++t) {
        tied.clear();
        double best = 0.0;
        for (std::size_t c = 0; c < size; ++c) {
            auto i = uniform_index(rng, pool.size());
            if (tied.empty() || keys[i] < best) {
                best = keys[i];
                tied.assign(1, i);
            } else if (keys[i] == best) {
                tied.push_back(i);
            }
        }
        winners.push_back(tied.size() == 1 ? tied.front() : tied[uniform_index(rng, tied.size())]);
    }
    return winners;
}

} // namespace segp
