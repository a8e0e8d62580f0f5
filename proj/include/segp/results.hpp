#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "segp/engine.hpp"

namespace segp {

// One line of results.jsonl.
struct ResultRecord {
    std::string dataset;
    Task task { Task::Regression };
    Mode mode { Mode::Segp };
    std::uint64_t seed { 0 };
    std::size_t beta { 0 };
    std::size_t n_pop { 0 };
    std::size_t generations { 0 };
    bool use_scaling { true };
    SelectionKind selection { SelectionKind::PartitionedTruncation };
    std::size_t tournament_size { 8 };
    double train_metric { 0.0 };
    double test_metric { 0.0 };
    std::size_t pruned_size { 0 };
    double wall_time_s { 0.0 };
    std::uint64_t node_evals { 0 };
};

ResultRecord to_record(RunResult const& r);
std::string to_json_line(ResultRecord const& r);
ResultRecord parse_result_line(std::string_view line);

// Every complete line of the file. A trailing line cut short by an
// interrupted writer is ignored; any other malformed line is an error.
std::vector<ResultRecord> read_results(std::filesystem::path const& file);

// Group label distinguishing configurations of the same mode, e.g.
// "segp", "segp:trunc-pwb", "segp:nols", "siel:b5:p105".
std::string variant_label(ResultRecord const& r);

// Generation log as CSV: gen,slot,elite_loss,distinct_ens,distinct_pop,
// same_impr,other_impr. Quantities that were not logged are left empty.
void write_generation_csv(RunResult const& r, std::ostream& out);
std::string generation_log_filename(RunResult const& r);

struct SummaryRow {
    std::string dataset;
    std::string variant;
    std::string split; // "train" or "test"
    double median { 0.0 };
    double iqr { 0.0 };
    std::size_t n_runs { 0 };
};

std::vector<SummaryRow> summarize(std::vector<ResultRecord> const& results);

struct ComparisonRow {
    std::string dataset;
    std::string split;
    std::vector<std::string> variants;
    std::vector<std::string> best;
};

// Holm-corrected pairwise tests within each (dataset, split) family.
std::vector<ComparisonRow> compare(std::vector<ResultRecord> const& results, double alpha);

} // namespace segp
