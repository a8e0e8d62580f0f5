#pragma once

#include <span>
#include <vector>

#include "segp/ensemble.hpp"
#include "segp/evaluation.hpp"
#include "segp/tree.hpp"

namespace segp {

// Number of classes of exact syntactic copies.
std::size_t distinct_count(std::span<Tree const> trees);
std::size_t distinct_count(std::span<Tree const* const> trees);

struct EvolvabilityTally {
    std::size_t generation { 0 };
    std::vector<std::size_t> same_improve;  // child better than parent on sample j
    std::vector<std::size_t> other_improve; // not better on j, but better on some k != j
    std::size_t offspring_total { 0 };

    static EvolvabilityTally zero(std::size_t generation, std::size_t beta);
};

void evolvability_update(EvaluatedIndividual const& parent, EvaluatedIndividual const& child, EvolvabilityTally& tally);

struct DiversityRatios {
    double ensemble_ratio { 0.0 };
    double population_ratio { 0.0 };
};

DiversityRatios diversity_snapshot(Ensemble const& archive, std::span<EvaluatedIndividual const> pop);

} // namespace segp
