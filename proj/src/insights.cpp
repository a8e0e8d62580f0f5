#include "segp/insights.hpp"

#include <unordered_set>

namespace segp {

namespace {

struct PtrHash {
    std::size_t operator()(Tree const* t) const { return t->hash(); }
};
struct PtrEq {
    bool operator()(Tree const* l, Tree const* r) const { return *l == *r; }
};

} // namespace

std::size_t distinct_count(std::span<Tree const* const> trees)
{
    std::unordered_set<Tree const*, PtrHash, PtrEq> seen(trees.begin(), trees.end());
    return seen.size();
}

std::size_t distinct_count(std::span<Tree const> trees)
{
    std::vector<Tree const*> ptrs;
    ptrs.reserve(trees.size());
    for (auto const& t : trees) { ptrs.push_back(&t); }
    return distinct_count(std::span<Tree const* const>(ptrs));
}

EvolvabilityTally EvolvabilityTally::zero(std::size_t generation, std::size_t beta)
{
    return { generation, std::vector<std::size_t>(beta, 0), std::vector<std::size_t>(beta, 0), 0 };
}

void evolvability_update(EvaluatedIndividual const& parent, EvaluatedIndividual const& child, EvolvabilityTally& tally)
{
    auto const beta = tally.same_improve.size();
    std::size_t improved = 0;
    for (std::size_t j = 0; j < beta; ++j) { improved += child.fitness[j] < parent.fitness[j]; }
    for (std::size_t j = 0; j < beta; ++j) {
        if (child.fitness[j] < parent.fitness[j]) {
            ++tally.same_improve[j];
        } else if (improved > 0) {
            // j itself did not improve, so any improvement is on another sample.
            ++tally.other_improve[j];
        }
    }
    ++tally.offspring_total;
}

DiversityRatios diversity_snapshot(Ensemble const& archive, std::span<EvaluatedIndividual const> pop)
{
    std::vector<Tree const*> ens;
    for (auto const& m : archive.members()) { ens.push_back(&m.tree); }
    std::vector<Tree const*> p;
    for (auto const& ind : pop) { p.push_back(&ind.tree); }
    DiversityRatios r;
    if (!ens.empty()) { r.ensemble_ratio = static_cast<double>(distinct_count(std::span<Tree const* const>(ens))) / static_cast<double>(ens.size()); }
    if (!p.empty()) { r.population_ratio = static_cast<double>(distinct_count(std::span<Tree const* const>(p))) / static_cast<double>(p.size()); }
    return r;
}

} // namespace segp
