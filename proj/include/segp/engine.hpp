#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "segp/data.hpp"
#include "segp/ensemble.hpp"
#include "segp/insights.hpp"
#include "segp/selection.hpp"
#include "segp/variation.hpp"

namespace segp {

enum class Mode {
    Segp, // one population, one fitness per bootstrap sample
    Cgp,  // classic GP: single fitness on the whole training set
    Siel, // beta independent cGP evolutions aggregated into an ensemble
};

std::string to_string(Mode mode);
Mode parse_mode(std::string const& text);

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    Mode mode { Mode::Segp };
    std::size_t n_pop { 500 };
    std::size_t generations { 100 };
    std::size_t beta { 50 };
    bool use_scaling { true };
    SelectionScheme selection {};
    double test_fraction { 0.3 };
    std::uint64_t seed { 0 };
    VariationConfig variation {};

    bool log_generations { false };
    bool log_diversity { false };
    bool log_evolvability { false };
    bool keep_ensemble { false };

    // Mode defaults: cgp and siel use plain tournament selection of size 8.
    static RunConfig defaults(Mode mode);

    void validate() const;
};

struct GenerationLog {
    std::size_t generation { 0 };
    std::vector<double> elite_losses;
    std::optional<std::size_t> distinct_in_ensemble;
    std::optional<std::size_t> distinct_in_population;
    std::optional<EvolvabilityTally> evolvability;
    std::uint64_t node_evals { 0 }; // cumulative
};

struct RunResult {
    RunConfig config;
    std::string dataset;
    Task task { Task::Regression };
    double train_metric { 0.0 };
    double test_metric { 0.0 };
    std::size_t pruned_size { 0 };
    double wall_time_s { 0.0 };
    std::uint64_t node_evals { 0 };
    std::vector<GenerationLog> generations;
    std::optional<Ensemble> ensemble;
};

// Standardized 70/30 (or cfg.test_fraction) split drawn from the run stream.
Standardized prepare_split(Dataset const& ds, double test_fraction, Random& rng);

RunResult run_2segp(RunConfig const& cfg, Dataset const& ds);
RunResult run_cgp(RunConfig const& cfg, Dataset const& ds);
RunResult run_siel(RunConfig const& cfg, Dataset const& ds);
RunResult run(RunConfig const& cfg, Dataset const& ds);

struct CgpOutcome {
    EnsembleMember best;
    std::vector<GenerationLog> generations;
    std::uint64_t node_evals { 0 };
};

// The evolutionary loop of classic GP on an already prepared training set:
// tournament parent selection, one elite carried over each generation.
CgpOutcome evolve_cgp(RunConfig const& cfg, Dataset const& train, Random& rng);

// Seed of the member-th independent evolution inside a SIEL run.
std::uint64_t siel_member_seed(std::uint64_t run_seed, std::size_t member);

// G * |P| budget that makes beta independent evolutions cost about as much
// as one multi-sample run with generations x pop_size and trees of size ell.
std::uint64_t match_budget(std::uint64_t generations, std::uint64_t pop_size, std::uint64_t beta, std::uint64_t ell);

} // namespace segp
