#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "segp/evaluation.hpp"
#include "segp/random.hpp"

namespace segp {

enum class SelectionKind {
    PartitionedTruncation,
    TruncPwb,
    TruncPwl,
    TournPwb,
    TournPwl,
    PlainTournament,
};

struct SelectionScheme {
    SelectionKind kind { SelectionKind::PartitionedTruncation };
    std::size_t tournament_size { 8 };

    [[nodiscard]] bool is_tournament() const
    {
        return kind == SelectionKind::TournPwb || kind == SelectionKind::TournPwl || kind == SelectionKind::PlainTournament;
    }
};

// CLI spelling: partitioned, trunc-pwb, trunc-pwl, tourn-pwb, tourn-pwl, tournament.
std::string to_string(SelectionKind kind);
SelectionKind parse_selection(std::string const& text);

// "Push further What is Best": the smallest per-sample loss.
double aggregate_pwb(std::span<double const> losses);
// "Push What Lacks behind": the largest per-sample loss.
double aggregate_pwl(std::span<double const> losses);

using ScalarKey = std::function<double(EvaluatedIndividual const&)>;

// Survivor counts per sample: n_pop / beta each, the first n_pop mod beta
// samples get one more.
std::vector<std::size_t> partition_sizes(std::size_t n_pop, std::size_t beta);

// Over the pool parents ++ offspring, for each sample j in order keep the
// q_j best by loss_j. Ranking ties go to the smaller tree, then the earlier
// pool position. An individual may be kept once per sample it tops.
std::vector<EvaluatedIndividual> partitioned_truncation(std::span<EvaluatedIndividual const> parents,
    std::span<EvaluatedIndividual const> offspring, std::size_t beta, std::size_t n_pop);

// Same result expressed as pool indices.
std::vector<std::size_t> partitioned_truncation_indices(std::span<EvaluatedIndividual const> pool, std::size_t beta, std::size_t n_pop);

std::vector<std::size_t> truncation_on_scalar(std::span<EvaluatedIndividual const> pool, ScalarKey const& key, std::size_t n_pop);

// n_pop independent tournaments drawn with replacement; smallest key wins,
// ties resolved uniformly at random.
std::vector<std::size_t> tournament_on_scalar(std::span<EvaluatedIndividual const> pool, ScalarKey const& key, std::size_t size,
    std::size_t n_pop, Random& rng);

} // namespace segp
