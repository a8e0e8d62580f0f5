#include "segp/engine.hpp"

#include <chrono>

#include <fmt/core.h>

#include "segp/evaluation.hpp"

namespace segp {

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::Segp: return "segp";
    case Mode::Cgp: return "cgp";
    case Mode::Siel: return "siel";
    }
    return "?";
}

Mode parse_mode(std::string const& text)
{
    if (text == "segp" || text == "2segp") { return Mode::Segp; }
    if (text == "cgp") { return Mode::Cgp; }
    if (text == "siel") { return Mode::Siel; }
    throw ConfigError(fmt::format("unknown mode '{}' (expected segp, cgp or siel)", text));
}

RunConfig RunConfig::defaults(Mode mode)
{
    RunConfig cfg;
    cfg.mode = mode;
    if (mode != Mode::Segp) { cfg.selection = { SelectionKind::PlainTournament, 8 }; }
    return cfg;
}

void RunConfig::validate() const
{
    if (beta < 1) { throw ConfigError("beta must be at least 1"); }
    if (mode == Mode::Segp && beta > n_pop) {
        throw ConfigError(fmt::format("beta ({}) must not exceed the population size ({})", beta, n_pop));
    }
    // cGP keeps one elite and needs at least two varied offspring to mate.
    std::size_t const min_pop = mode == Mode::Segp ? 2 : 3;
    if (n_pop < min_pop) { throw ConfigError(fmt::format("population size must be at least {}", min_pop)); }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) { throw ConfigError("test fraction must lie in (0, 1)"); }
    bool const single_fitness = selection.kind == SelectionKind::PlainTournament;
    if (mode == Mode::Segp && single_fitness) {
        throw ConfigError("segp mode needs a multi-sample selection (partitioned, trunc-pwb, trunc-pwl, tourn-pwb, tourn-pwl)");
    }
    if (mode != Mode::Segp && !single_fitness) {
        throw ConfigError(fmt::format("{} mode only supports plain tournament selection", to_string(mode)));
    }
    if (selection.is_tournament() && selection.tournament_size < 2) { throw ConfigError("tournament size must be at least 2"); }
    try {
        variation.validate();
    } catch (std::exception const& e) {
        throw ConfigError(e.what());
    }
}

Standardized prepare_split(Dataset const& ds, double test_fraction, Random& rng)
{
    auto parts = split(ds, test_fraction, rng);
    return standardize(parts.train, parts.test);
}

std::uint64_t siel_member_seed(std::uint64_t run_seed, std::size_t member)
{
    return run_seed * 10007U + member;
}

std::uint64_t match_budget(std::uint64_t generations, std::uint64_t pop_size, std::uint64_t beta, std::uint64_t ell)
{
    if (generations == 0 || pop_size == 0 || beta == 0 || ell == 0) { throw ConfigError("match_budget arguments must be positive"); }
    auto const num = generations * pop_size * (beta + ell);
    auto const den = beta * ell;
    return (2 * num + den) / (2 * den);
}

namespace {

using Clock = std::chrono::steady_clock;

bool logging(RunConfig const& cfg) { return cfg.log_generations || cfg.log_diversity || cfg.log_evolvability; }

std::vector<double> elite_losses(Ensemble const& archive)
{
    std::vector<double> out;
    out.reserve(archive.size());
    for (auto const& m : archive.members()) { out.push_back(m.train_loss); }
    return out;
}

std::size_t distinct_trees(std::span<EvaluatedIndividual const> pop)
{
    std::vector<Tree const*> trees;
    trees.reserve(pop.size());
    for (auto const& ind : pop) { trees.push_back(&ind.tree); }
    return distinct_count(std::span<Tree const* const>(trees));
}

std::size_t distinct_members(Ensemble const& e)
{
    std::vector<Tree const*> trees;
    for (auto const& m : e.members()) { trees.push_back(&m.tree); }
    return distinct_count(std::span<Tree const* const>(trees));
}

std::vector<std::size_t> select_survivors(RunConfig const& cfg, std::span<EvaluatedIndividual const> pool, Random& rng)
{
    auto const& s = cfg.selection;
    ScalarKey const pwb = [](EvaluatedIndividual const& i) { return aggregate_pwb(i.fitness); };
    ScalarKey const pwl = [](EvaluatedIndividual const& i) { return aggregate_pwl(i.fitness); };
    switch (s.kind) {
    case SelectionKind::PartitionedTruncation: return partitioned_truncation_indices(pool, cfg.beta, cfg.n_pop);
    case SelectionKind::TruncPwb: return truncation_on_scalar(pool, pwb, cfg.n_pop);
    case SelectionKind::TruncPwl: return truncation_on_scalar(pool, pwl, cfg.n_pop);
    case SelectionKind::TournPwb: return tournament_on_scalar(pool, pwb, s.tournament_size, cfg.n_pop, rng);
    case SelectionKind::TournPwl: return tournament_on_scalar(pool, pwl, s.tournament_size, cfg.n_pop, rng);
    case SelectionKind::PlainTournament: break;
    }
    throw ConfigError("selection scheme not usable in segp mode");
}

void finish(RunResult& r, Ensemble const& archive, Standardized const& data, RunConfig const& cfg, Clock::time_point start)
{
    auto pruned = prune(archive);
    r.train_metric = ensemble_metric(pruned, data.train);
    r.test_metric = ensemble_metric(pruned, data.test);
    r.pruned_size = pruned.size();
    if (cfg.keep_ensemble) { r.ensemble = std::move(pruned); }
    r.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
}

RunResult start_result(RunConfig const& cfg, Dataset const& ds)
{
    cfg.validate();
    RunResult r;
    r.config = cfg;
    r.dataset = ds.name();
    r.task = ds.task();
    return r;
}

std::size_t best_by_full_fitness(std::span<EvaluatedIndividual const> pop)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i) {
        auto const& c = pop[i];
        auto const& b = pop[best];
        if (c.full_train_fitness < b.full_train_fitness
            || (c.full_train_fitness == b.full_train_fitness && c.tree.size() < b.tree.size())) {
            best = i;
        }
    }
    return best;
}

} // namespace

RunResult run_2segp(RunConfig const& cfg, Dataset const& ds)
{
    auto r = start_result(cfg, ds);
    if (cfg.mode != Mode::Segp) { throw ConfigError("run_2segp needs mode segp"); }
    auto const start = Clock::now();

    Random rng(cfg.seed);
    auto data = prepare_split(ds, cfg.test_fraction, rng);
    auto const& train = data.train;
    auto const d = train.cols();
    auto const plan = sample_bootstrap(train.rows(), cfg.beta, rng);
    FitnessEvaluator evaluator(train, plan, cfg.use_scaling);

    auto pop = evaluator.evaluate_all(init_ramped_half_and_half(cfg.n_pop, cfg.variation, d, rng));
    auto archive = update_elites(Ensemble::empty_archive(cfg.beta, ds.task()), pop);

    auto log = [&](std::size_t gen, std::optional<EvolvabilityTally> tally) {
        if (!logging(cfg)) { return; }
        GenerationLog g;
        g.generation = gen;
        g.elite_losses = elite_losses(archive);
        if (cfg.log_diversity) {
            g.distinct_in_ensemble = distinct_members(archive);
            g.distinct_in_population = distinct_trees(pop);
        }
        g.evolvability = std::move(tally);
        g.node_evals = evaluator.node_evals();
        r.generations.push_back(std::move(g));
    };
    log(0, std::nullopt);

    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<Tree const*> parents;
        parents.reserve(pop.size());
        for (auto const& ind : pop) { parents.push_back(&ind.tree); }
        auto varied = vary_population(parents, cfg.variation, d, rng);

        // Pool = parents ++ offspring, so offspring k sits at n_pop + k.
        std::vector<EvaluatedIndividual> pool = std::move(pop);
        pool.reserve(pool.size() + varied.size());
        for (auto& o : varied) { pool.push_back(evaluator.evaluate(std::move(o.tree))); }
        std::span<EvaluatedIndividual const> offspring(pool.data() + cfg.n_pop, varied.size());

        std::optional<EvolvabilityTally> tally;
        if (cfg.log_evolvability) {
            tally = EvolvabilityTally::zero(gen, cfg.beta);
            for (std::size_t k = 0; k < varied.size(); ++k) { evolvability_update(pool[varied[k].parent], offspring[k], *tally); }
        }

        // Offering every evaluated offspring to the archive keeps it the
        // best-found set even for selections that may discard a sample's best.
        archive = update_elites(archive, offspring);

        auto const keep = select_survivors(cfg, pool, rng);
        pop.clear();
        pop.reserve(keep.size());
        for (auto i : keep) { pop.push_back(pool[i]); }
        log(gen, std::move(tally));
    }

    r.node_evals = evaluator.node_evals();
    finish(r, archive, data, cfg, start);
    return r;
}

CgpOutcome evolve_cgp(RunConfig const& cfg, Dataset const& train, Random& rng)
{
    auto const d = train.cols();
    BootstrapPlan const no_samples;
    FitnessEvaluator evaluator(train, no_samples, cfg.use_scaling);
    ScalarKey const full = [](EvaluatedIndividual const& i) { return i.full_train_fitness; };

    CgpOutcome out;
    auto pop = evaluator.evaluate_all(init_ramped_half_and_half(cfg.n_pop, cfg.variation, d, rng));
    auto elite = best_by_full_fitness(pop);

    auto log = [&](std::size_t gen) {
        if (!logging(cfg)) { return; }
        GenerationLog g;
        g.generation = gen;
        g.elite_losses = { pop[elite].full_train_fitness };
        if (cfg.log_diversity) {
            g.distinct_in_ensemble = 1;
            g.distinct_in_population = distinct_trees(pop);
        }
        g.node_evals = evaluator.node_evals();
        out.generations.push_back(std::move(g));
    };
    log(0);

    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        auto const chosen = tournament_on_scalar(pop, full, cfg.selection.tournament_size, cfg.n_pop - 1, rng);
        std::vector<Tree const*> parents;
        parents.reserve(chosen.size());
        for (auto i : chosen) { parents.push_back(&pop[i].tree); }
        auto varied = vary_population(parents, cfg.variation, d, rng);

        std::vector<EvaluatedIndividual> next;
        next.reserve(cfg.n_pop);
        next.push_back(std::move(pop[elite]));
        for (auto& o : varied) { next.push_back(evaluator.evaluate(std::move(o.tree))); }
        pop = std::move(next);
        elite = best_by_full_fitness(pop);
        log(gen);
    }

    auto const& best = pop[elite];
    out.best = { best.tree, best.full_scaling, 1, 0, best.full_train_fitness };
    out.node_evals = evaluator.node_evals();
    return out;
}

namespace {

// SIEL with cfg.beta members; plain cGP is the one-member case, so a cGP run
// and a single-member SIEL run with the same seed coincide.
RunResult run_independent(RunConfig const& cfg, Dataset const& ds, std::size_t members)
{
    auto r = start_result(cfg, ds);
    auto const start = Clock::now();

    Random split_rng(cfg.seed);
    auto data = prepare_split(ds, cfg.test_fraction, split_rng);

    std::vector<EnsembleMember> best;
    std::vector<std::vector<GenerationLog>> logs;
    for (std::size_t m = 0; m < members; ++m) {
        Random rng(siel_member_seed(cfg.seed, m));
        auto outcome = evolve_cgp(cfg, data.train, rng);
        outcome.best.source_sample = m;
        best.push_back(std::move(outcome.best));
        r.node_evals += outcome.node_evals;
        logs.push_back(std::move(outcome.generations));
    }

    // Member m's elite loss at generation g becomes slot m of row g.
    if (logging(cfg)) {
        for (std::size_t g = 0; g <= cfg.generations; ++g) {
            GenerationLog row;
            row.generation = g;
            for (auto const& member_log : logs) {
                row.elite_losses.push_back(member_log[g].elite_losses.front());
                row.node_evals += member_log[g].node_evals;
            }
            if (members == 1 && cfg.log_diversity) {
                row.distinct_in_ensemble = 1;
                row.distinct_in_population = logs.front()[g].distinct_in_population;
            }
            r.generations.push_back(std::move(row));
        }
        if (members > 1 && cfg.log_diversity && !r.generations.empty()) {
            r.generations.back().distinct_in_ensemble = distinct_members(Ensemble(best, ds.task()));
        }
    }

    finish(r, Ensemble(std::move(best), ds.task()), data, cfg, start);
    return r;
}

} // namespace

RunResult run_cgp(RunConfig const& cfg, Dataset const& ds)
{
    if (cfg.mode != Mode::Cgp) { throw ConfigError("run_cgp needs mode cgp"); }
    return run_independent(cfg, ds, 1);
}

RunResult run_siel(RunConfig const& cfg, Dataset const& ds)
{
    if (cfg.mode != Mode::Siel) { throw ConfigError("run_siel needs mode siel"); }
    return run_independent(cfg, ds, cfg.beta);
}

RunResult run(RunConfig const& cfg, Dataset const& ds)
{
    switch (cfg.mode) {
    case Mode::Segp: return run_2segp(cfg, ds);
    case Mode::Cgp: return run_cgp(cfg, ds);
    case Mode::Siel: return run_siel(cfg, ds);
    }
    throw ConfigError("unknown mode");
}

} // namespace segp
