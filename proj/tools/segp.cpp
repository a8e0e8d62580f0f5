#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "segp/engine.hpp"
#include "segp/experiment.hpp"
#include "segp/fetch.hpp"
#include "segp/results.hpp"

namespace {

struct RunOptions {
    std::vector<std::string> datasets;
    std::string task;
    std::vector<std::string> modes { "segp" };
    std::optional<std::size_t> beta;
    std::size_t pop_size { 500 };
    std::size_t generations { 100 };
    std::size_t runs { 40 };
    std::uint64_t seed { 0 };
    double test_fraction { 0.3 };
    bool no_scaling { false };
    std::string selection { "partitioned" };
    std::size_t tournament_size { 8 };
    bool log_diversity { false };
    bool log_evolvability { false };
    bool log_generations { false };
    std::size_t jobs { 1 };
    std::string out { "results" };
};

int do_run(RunOptions const& o)
{
    segp::ExperimentSpec spec;
    std::optional<segp::Task> task;
    if (!o.task.empty()) { task = segp::parse_task(o.task); }
    for (auto const& d : o.datasets) { spec.datasets.push_back({ d, task }); }
    for (auto const& m : o.modes) {
        auto const mode = segp::parse_mode(m);
        auto cfg = segp::RunConfig::defaults(mode);
        cfg.n_pop = o.pop_size;
        cfg.generations = o.generations;
        cfg.beta = o.beta.value_or(std::max<std::size_t>(1, o.pop_size / 10));
        cfg.use_scaling = !o.no_scaling;
        cfg.test_fraction = o.test_fraction;
        if (mode == segp::Mode::Segp) { cfg.selection.kind = segp::parse_selection(o.selection); }
        cfg.selection.tournament_size = o.tournament_size;
        cfg.log_diversity = o.log_diversity;
        cfg.log_evolvability = o.log_evolvability;
        cfg.log_generations = o.log_generations;
        spec.configs.push_back(cfg);
    }
    spec.n_runs = o.runs;
    spec.base_seed = o.seed;
    spec.out_dir = o.out;
    spec.jobs = o.jobs;

    auto report = segp::run_experiment(spec, [](segp::RunResult const& r) {
        fmt::print(stderr, "{} {} seed {}: train {:.6g} test {:.6g} size {} ({:.2f} s)\n", r.dataset,
            segp::variant_label(segp::to_record(r)), r.config.seed, r.train_metric, r.test_metric, r.pruned_size, r.wall_time_s);
    });
    for (auto const& f : report.run_failures) {
        fmt::print(stderr, "run failed: {} {} seed {}: {}\n", f.dataset, f.variant, f.seed, f.error);
    }
    for (auto const& e : report.dataset_errors) { fmt::print(stderr, "dataset failed: {}\n", e); }
    fmt::print("{} runs written to {}\n", report.results.size(), (spec.out_dir / "results.jsonl").string());
    return report.ok() ? 0 : 2;
}

std::filesystem::path results_file(std::string const& in)
{
    std::filesystem::path p(in);
    return std::filesystem::is_directory(p) ? p / "results.jsonl" : p;
}

int do_summarize(std::string const& in)
{
    auto const rows = segp::summarize(segp::read_results(results_file(in)));
    fmt::print("{:<12} {:<28} {:<6} {:>12} {:>12} {:>6}\n", "dataset", "variant", "split", "median", "iqr", "runs");
    for (auto const& r : rows) {
        fmt::print("{:<12} {:<28} {:<6} {:>12.6g} {:>12.6g} {:>6}\n", r.dataset, r.variant, r.split, r.median, r.iqr, r.n_runs);
    }
    return 0;
}

int do_compare(std::string const& in, double alpha)
{
    auto const rows = segp::compare(segp::read_results(results_file(in)), alpha);
    for (auto const& r : rows) {
        fmt::print("{} {}: best {{{}}} among {{{}}}\n", r.dataset, r.split, fmt::join(r.best, ", "), fmt::join(r.variants, ", "));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Evolve bagging ensembles of expression trees and run benchmark experiments" };
    app.set_config("--config", "", "TOML/INI file with option defaults");
    app.require_subcommand(1);

    RunOptions run;
    auto* r = app.add_subcommand("run", "Run independent evolutions and append results");
    r->add_option("--dataset", run.datasets, "CSV path or known dataset name (repeatable)")->required();
    r->add_option("--task", run.task, "regression or classification (default: from registry, else regression)")
        ->check(CLI::IsMember({ "regression", "classification" }));
    r->add_option("--mode", run.modes, "segp, cgp or siel (repeatable)")->check(CLI::IsMember({ "segp", "2segp", "cgp", "siel" }));
    r->add_option("--beta", run.beta, "bootstrap samples / independent evolutions (default pop-size / 10)");
    r->add_option("--pop-size", run.pop_size, "population size")->capture_default_str();
    r->add_option("--generations", run.generations, "generations per run")->capture_default_str();
    r->add_option("--runs", run.runs, "runs per dataset and mode")->capture_default_str();
    r->add_option("--seed", run.seed, "seed of the first run")->capture_default_str();
    r->add_option("--test-fraction", run.test_fraction, "held-out fraction")->capture_default_str();
    r->add_flag("--no-linear-scaling", run.no_scaling, "disable linear scaling");
    r->add_option("--selection", run.selection, "segp survivor selection")
        ->check(CLI::IsMember({ "partitioned", "trunc-pwb", "trunc-pwl", "tourn-pwb", "tourn-pwl" }))
        ->capture_default_str();
    r->add_option("--tournament-size", run.tournament_size, "tournament size")->check(CLI::IsMember({ 4, 8 }))->capture_default_str();
    r->add_flag("--log-diversity", run.log_diversity, "log distinct trees in ensemble and population");
    r->add_flag("--log-evolvability", run.log_evolvability, "log same/other-sample improvement counts");
    r->add_flag("--log-generations", run.log_generations, "log per-slot elite losses every generation");
    r->add_option("--jobs", run.jobs, "concurrent runs")->capture_default_str();
    r->add_option("--out", run.out, "output directory")->capture_default_str();

    std::string in = "results";
    double alpha = 0.05;
    auto* s = app.add_subcommand("summarize", "Median and IQR per dataset, variant and split");
    s->add_option("--in", in, "results directory or file")->capture_default_str();
    auto* c = app.add_subcommand("compare", "Best variants per dataset and split (Mann-Whitney U, Holm)");
    c->add_option("--in", in, "results directory or file")->capture_default_str();
    c->add_option("--alpha", alpha, "family-wise significance level")->capture_default_str();

    std::string name;
    std::string url;
    std::string dest = segp::data_dir().string();
    auto* f = app.add_subcommand("fetch", "Download a benchmark dataset as canonical CSV");
    f->add_option("--name", name, "dataset name")->required();
    f->add_option("--url", url, "override the download address");
    f->add_option("--out", dest, "destination directory")->capture_default_str();

    std::uint64_t mb_beta = 0;
    std::uint64_t mb_ell = 0;
    std::uint64_t mb_generations = 100;
    std::uint64_t mb_pop = 500;
    auto* m = app.add_subcommand("match-budget", "Generations x population for beta independent runs at equal cost");
    m->add_option("--beta", mb_beta, "ensemble size")->required();
    m->add_option("--ell", mb_ell, "average tree size")->required();
    m->add_option("--generations", mb_generations)->capture_default_str();
    m->add_option("--pop-size", mb_pop)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*r) { return do_run(run); }
        if (*s) { return do_summarize(in); }
        if (*c) { return do_compare(in, alpha); }
        if (*f) {
            fmt::print("{}\n", segp::fetch_dataset(name, url, dest).string());
            return 0;
        }
        if (*m) {
            fmt::print("{}\n", segp::match_budget(mb_generations, mb_pop, mb_beta, mb_ell));
            return 0;
        }
    } catch (std::exception const& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
