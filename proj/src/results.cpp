#include "segp/results.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <fmt/core.h>
#include <json.hpp>

#include "segp/stats.hpp"

namespace segp {

using nlohmann::json;

ResultRecord to_record(RunResult const& r)
{
    auto const& c = r.config;
    ResultRecord rec;
    rec.dataset = r.dataset;
    rec.task = r.task;
    rec.mode = c.mode;
    rec.seed = c.seed;
    rec.beta = c.beta;
    rec.n_pop = c.n_pop;
    rec.generations = c.generations;
    rec.use_scaling = c.use_scaling;
    rec.selection = c.selection.kind;
    rec.tournament_size = c.selection.tournament_size;
    rec.train_metric = r.train_metric;
    rec.test_metric = r.test_metric;
    rec.pruned_size = r.pruned_size;
    rec.wall_time_s = r.wall_time_s;
    rec.node_evals = r.node_evals;
    return rec;
}

std::string to_json_line(ResultRecord const& r)
{
    json j = {
        { "dataset", r.dataset },
        { "task", to_string(r.task) },
        { "mode", to_string(r.mode) },
        { "seed", r.seed },
        { "beta", r.beta },
        { "n_pop", r.n_pop },
        { "generations", r.generations },
        { "use_scaling", r.use_scaling },
        { "selection", to_string(r.selection) },
        { "tournament_size", r.tournament_size },
        { "train_metric", r.train_metric },
        { "test_metric", r.test_metric },
        { "pruned_size", r.pruned_size },
        { "wall_time_s", r.wall_time_s },
        { "node_evals", r.node_evals },
    };
    return j.dump();
}

ResultRecord parse_result_line(std::string_view line)
{
    auto const j = json::parse(line);
    ResultRecord r;
    r.dataset = j.at("dataset").get<std::string>();
    r.task = parse_task(j.value("task", std::string("regression")));
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.beta = j.at("beta").get<std::size_t>();
    r.n_pop = j.at("n_pop").get<std::size_t>();
    r.generations = j.at("generations").get<std::size_t>();
    r.use_scaling = j.at("use_scaling").get<bool>();
    r.selection = parse_selection(j.at("selection").get<std::string>());
    r.tournament_size = j.value("tournament_size", std::size_t { 8 });
    r.train_metric = j.at("train_metric").get<double>();
    r.test_metric = j.at("test_metric").get<double>();
    r.pruned_size = j.at("pruned_size").get<std::size_t>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.node_evals = j.value("node_evals", std::uint64_t { 0 });
    return r;
}

std::vector<ResultRecord> read_results(std::filesystem::path const& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) { throw std::runtime_error(fmt::format("cannot open results file {}", file.string())); }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto const text = buffer.str();

    std::vector<ResultRecord> out;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        auto const end = text.find('\n', start);
        bool const terminated = end != std::string::npos;
        auto line = std::string_view(text).substr(start, terminated ? end - start : std::string::npos);
        start = terminated ? end + 1 : text.size();
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) { continue; }
        try {
            out.push_back(parse_result_line(line));
        } catch (std::exception const& e) {
            if (!terminated) { break; }
            throw std::runtime_error(fmt::format("{}:{}: {}", file.string(), line_no, e.what()));
        }
    }
    return out;
}

std::string variant_label(ResultRecord const& r)
{
    auto label = to_string(r.mode);
    auto const default_selection = r.mode == Mode::Segp ? SelectionKind::PartitionedTruncation : SelectionKind::PlainTournament;
    if (r.selection != default_selection) { label += ":" + to_string(r.selection); }
    bool const tournament = r.selection == SelectionKind::TournPwb || r.selection == SelectionKind::TournPwl
        || r.selection == SelectionKind::PlainTournament;
    if (tournament && r.tournament_size != 8) { label += fmt::format(":t{}", r.tournament_size); }
    if (!r.use_scaling) { label += ":nols"; }
    if (r.mode != Mode::Cgp && r.beta != r.n_pop / 10) { label += fmt::format(":b{}", r.beta); }
    if (r.n_pop != 500) { label += fmt::format(":p{}", r.n_pop); }
    if (r.generations != 100) { label += fmt::format(":g{}", r.generations); }
    return label;
}

std::string generation_log_filename(RunResult const& r)
{
    auto label = variant_label(to_record(r));
    for (auto& c : label) {
        if (c == ':') { c = '-'; }
    }
    return fmt::format("{}_{}_seed{}.csv", r.dataset, label, r.config.seed);
}

void write_generation_csv(RunResult const& r, std::ostream& out)
{
    out << "gen,slot,elite_loss,distinct_ens,distinct_pop,same_impr,other_impr\n";
    auto opt = [](std::optional<std::size_t> v) { return v ? std::to_string(*v) : std::string(); };
    for (auto const& g : r.generations) {
        for (std::size_t slot = 0; slot < g.elite_losses.size(); ++slot) {
            std::string same;
            std::string other;
            if (g.evolvability) {
                same = std::to_string(g.evolvability->same_improve[slot]);
                other = std::to_string(g.evolvability->other_improve[slot]);
            }
            out << fmt::format("{},{},{:.17g},{},{},{},{}\n", g.generation, slot, g.elite_losses[slot],
                opt(g.distinct_in_ensemble), opt(g.distinct_in_population), same, other);
        }
    }
}

namespace {

using GroupKey = std::tuple<std::string, std::string>; // dataset, variant

struct Samples {
    std::vector<double> train;
    std::vector<double> test;
    Task task { Task::Regression };
};

std::map<GroupKey, Samples> group(std::vector<ResultRecord> const& results)
{
    std::map<GroupKey, Samples> groups;
    for (auto const& r : results) {
        auto& s = groups[{ r.dataset, variant_label(r) }];
        s.train.push_back(r.train_metric);
        s.test.push_back(r.test_metric);
        s.task = r.task;
    }
    return groups;
}

} // namespace

std::vector<SummaryRow> summarize(std::vector<ResultRecord> const& results)
{
    std::vector<SummaryRow> rows;
    for (auto const& [key, s] : group(results)) {
        auto const& [dataset, variant] = key;
        for (auto const* split : { "train", "test" }) {
            auto const& v = std::string_view(split) == "train" ? s.train : s.test;
            auto const sum = summarize_sample(v);
            rows.push_back({ dataset, variant, split, sum.median, sum.iqr, sum.n });
        }
    }
    return rows;
}

std::vector<ComparisonRow> compare(std::vector<ResultRecord> const& results, double alpha)
{
    struct Family {
        std::map<std::string, std::vector<double>> train;
        std::map<std::string, std::vector<double>> test;
        Task task { Task::Regression };
    };
    std::map<std::string, Family> families;
    for (auto const& [key, s] : group(results)) {
        auto const& [dataset, variant] = key;
        auto& f = families[dataset];
        f.train[variant] = s.train;
        f.test[variant] = s.test;
        f.task = s.task;
    }

    std::vector<ComparisonRow> rows;
    for (auto const& [dataset, f] : families) {
        auto const better = f.task == Task::Regression ? Better::Lower : Better::Higher;
        for (auto const* split : { "train", "test" }) {
            auto const& groups = std::string_view(split) == "train" ? f.train : f.test;
            ComparisonRow row { dataset, split, {}, {} };
            for (auto const& [variant, sample] : groups) { row.variants.push_back(variant); }
            if (groups.size() < 2) {
                row.best = row.variants;
            } else {
                auto const best = compare_best(groups, better, alpha);
                row.best.assign(best.begin(), best.end());
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace segp
