#include "segp/experiment.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/core.h>
#include <json.hpp>

#include "segp/fetch.hpp"
#include "segp/results.hpp"

namespace segp {

Dataset resolve_dataset(DatasetRef const& ref)
{
    std::filesystem::path const path(ref.source);
    if (std::filesystem::is_regular_file(path)) {
        auto const known = find_known(path.stem().string());
        auto const task = ref.task.value_or(known ? known->task : Task::Regression);
        return load_csv(path, task);
    }
    auto const known = find_known(ref.source);
    if (!known) { throw DataError(fmt::format("'{}' is neither a file nor a known dataset name", ref.source)); }
    auto const file = data_dir() / (known->name + ".csv");
    if (!std::filesystem::is_regular_file(file)) {
        throw DataError(fmt::format("dataset '{}' is not available: {} is missing (try `segp fetch --name {}`)", known->name,
            file.string(), known->name));
    }
    return load_csv(file, ref.task.value_or(known->task));
}

void ExperimentSpec::validate() const
{
    if (n_runs < 1) { throw ConfigError("at least one run is required"); }
    if (datasets.empty()) { throw ConfigError("no dataset given"); }
    if (configs.empty()) { throw ConfigError("no mode given"); }
    for (auto const& c : configs) { c.validate(); }
}

namespace {

class Sink {
public:
    explicit Sink(std::filesystem::path dir)
        : dir_(std::move(dir))
    {
        if (dir_.empty()) { return; }
        std::filesystem::create_directories(dir_);
        results_.open(dir_ / "results.jsonl", std::ios::app | std::ios::binary);
        if (!results_) { throw std::runtime_error(fmt::format("cannot open {}", (dir_ / "results.jsonl").string())); }
    }

    void result(RunResult const& r)
    {
        if (dir_.empty()) { return; }
        if (!r.generations.empty()) {
            auto const logs = dir_ / "logs";
            std::filesystem::create_directories(logs);
            std::ofstream csv(logs / generation_log_filename(r), std::ios::binary);
            write_generation_csv(r, csv);
        }
        std::lock_guard lock(mutex_);
        results_ << to_json_line(to_record(r)) << '\n';
        results_.flush();
    }

    void failure(RunFailure const& f)
    {
        if (dir_.empty()) { return; }
        std::lock_guard lock(mutex_);
        std::ofstream out(dir_ / "failures.jsonl", std::ios::app | std::ios::binary);
        out << nlohmann::json { { "dataset", f.dataset }, { "variant", f.variant }, { "seed", f.seed }, { "error", f.error } }.dump()
            << '\n';
    }

private:
    std::filesystem::path dir_;
    std::ofstream results_;
    std::mutex mutex_;
};

} // namespace

ExperimentReport run_experiment(ExperimentSpec const& spec, std::function<void(RunResult const&)> const& on_result)
{
    spec.validate();
    ExperimentReport report;
    Sink sink(spec.out_dir);

    for (auto const& ref : spec.datasets) {
        Dataset ds;
        try {
            ds = resolve_dataset(ref);
        } catch (std::exception const& e) {
            report.dataset_errors.push_back(fmt::format("{}: {}", ref.source, e.what()));
            continue;
        }

        struct Job {
            RunConfig cfg;
            std::optional<RunResult> result;
        };
        std::vector<Job> jobs;
        for (auto const& base : spec.configs) {
            for (std::size_t i = 0; i < spec.n_runs; ++i) {
                auto cfg = base;
                cfg.seed = spec.base_seed + i;
                jobs.push_back({ cfg, std::nullopt });
            }
        }

        std::mutex report_mutex;
        std::atomic<std::size_t> next { 0 };
        auto worker = [&] {
            for (auto k = next++; k < jobs.size(); k = next++) {
                auto& job = jobs[k];
                try {
                    job.result = run(job.cfg, ds);
                    sink.result(*job.result);
                    if (on_result) {
                        std::lock_guard lock(report_mutex);
                        on_result(*job.result);
                    }
                } catch (std::exception const& e) {
                    RunResult stub;
                    stub.config = job.cfg;
                    stub.dataset = ds.name();
                    RunFailure f { ds.name(), variant_label(to_record(stub)), job.cfg.seed, e.what() };
                    sink.failure(f);
                    std::lock_guard lock(report_mutex);
                    report.run_failures.push_back(std::move(f));
                }
            }
        };
        auto const threads = std::max<std::size_t>(1, std::min(spec.jobs, jobs.size()));
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < threads; ++t) { pool.emplace_back(worker); }
        }
        for (auto& job : jobs) {
            if (job.result) { report.results.push_back(std::move(*job.result)); }
        }
    }
    return report;
}

} // namespace segp
