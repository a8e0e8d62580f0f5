#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segp/engine.hpp"

namespace segp {

struct DatasetRef {
    std::string source; // CSV path or registry name
    std::optional<Task> task;
};

// A path that exists is loaded directly (task defaults to regression unless
// the file stem is a registry name); otherwise the registry name is looked up
// in data_dir().
Dataset resolve_dataset(DatasetRef const& ref);

struct ExperimentSpec {
    std::vector<DatasetRef> datasets;
    std::vector<RunConfig> configs; // one per mode/variant; the seed field is ignored
    std::size_t n_runs { 40 };
    std::uint64_t base_seed { 0 };
    std::filesystem::path out_dir;
    std::size_t jobs { 1 };

    void validate() const;
};

struct RunFailure {
    std::string dataset;
    std::string variant;
    std::uint64_t seed { 0 };
    std::string error;
};

struct ExperimentReport {
    std::vector<RunResult> results; // in (dataset, config, seed) order
    std::vector<std::string> dataset_errors;
    std::vector<RunFailure> run_failures;

    [[nodiscard]] bool ok() const { return dataset_errors.empty(); }
};

// Runs n_runs seeds (base_seed + i) per dataset and configuration. Each
// finished run is appended to out_dir/results.jsonl (flushed per line) and,
// when the configuration logs generations, written to out_dir/logs/*.csv.
// Failed runs go to out_dir/failures.jsonl and are skipped.
ExperimentReport run_experiment(ExperimentSpec const& spec, std::function<void(RunResult const&)> const& on_result = {});

} // namespace segp
