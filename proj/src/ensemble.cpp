#include "segp/ensemble.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <fmt/core.h>

#include "segp/interpreter.hpp"

namespace segp {

Ensemble::Ensemble(std::vector<EnsembleMember> members, Task task)
    : members_(std::move(members))
    , task_(task)
{
    for (auto const& m : members_) {
        if (m.weight == 0) { throw std::invalid_argument("ensemble member with zero weight"); }
    }
}

Ensemble Ensemble::empty_archive(std::size_t beta, Task task)
{
    std::vector<EnsembleMember> slots(beta);
    for (std::size_t j = 0; j < beta; ++j) {
        slots[j].source_sample = j;
        slots[j].train_loss = std::numeric_limits<double>::infinity();
    }
    return { std::move(slots), task };
}

std::size_t Ensemble::total_weight() const
{
    std::size_t w = 0;
    for (auto const& m : members_) { w += m.weight; }
    return w;
}

bool Ensemble::filled() const
{
    for (auto const& m : members_) {
        if (m.tree.empty()) { return false; }
    }
    return !members_.empty();
}

Eigen::MatrixXd Ensemble::member_outputs(Eigen::MatrixXd const& features) const
{
    Eigen::MatrixXd out(features.rows(), static_cast<Eigen::Index>(members_.size()));
    for (std::size_t m = 0; m < members_.size(); ++m) {
        auto o = eval_tree_outputs(members_[m].tree, features).values;
        auto const& s = members_[m].scaling;
        out.col(static_cast<Eigen::Index>(m)) = (s.a + s.b * o.array()).matrix();
    }
    return out;
}

Ensemble update_elites(Ensemble const& archive, std::span<EvaluatedIndividual const> pop)
{
    auto members = archive.members();
    for (std::size_t j = 0; j < members.size(); ++j) {
        EvaluatedIndividual const* best = nullptr;
        double best_loss = members[j].train_loss;
        for (auto const& ind : pop) {
            if (ind.fitness[j] < best_loss) {
                best_loss = ind.fitness[j];
                best = &ind;
            }
        }
        if (best != nullptr) {
            members[j] = { best->tree, best->scaling[j], 1, j, best_loss };
        }
    }
    return { std::move(members), archive.task() };
}

Eigen::VectorXd predict_regression(Ensemble const& e, Eigen::MatrixXd const& features)
{
    if (e.task() != Task::Regression) { throw std::logic_error("predict_regression on a classification ensemble"); }
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(features.rows());
    for (auto const& m : e.members()) {
        auto o = eval_tree_outputs(m.tree, features).values;
        acc.array() += static_cast<double>(m.weight) * (m.scaling.a + m.scaling.b * o.array());
    }
    return acc / static_cast<double>(e.total_weight());
}

Eigen::VectorXi predict_classification(Ensemble const& e, Eigen::MatrixXd const& features)
{
    if (e.task() != Task::Classification) { throw std::logic_error("predict_classification on a regression ensemble"); }
    auto const n = features.rows();
    Eigen::VectorXd ones = Eigen::VectorXd::Zero(n);
    for (auto const& m : e.members()) {
        auto o = eval_tree_outputs(m.tree, features).values;
        for (Eigen::Index i = 0; i < n; ++i) {
            ones[i] += static_cast<double>(m.weight * static_cast<std::size_t>(round_and_clamp(m.scaling.apply(o[i]))));
        }
    }
    auto const half = static_cast<double>(e.total_weight()) / 2.0;
    Eigen::VectorXi out(n);
    for (Eigen::Index i = 0; i < n; ++i) { out[i] = ones[i] > half ? 1 : 0; }
    return out;
}

Ensemble prune(Ensemble const& e)
{
    struct Group {
        EnsembleMember first;
        double sum_a { 0.0 };
        double sum_b { 0.0 };
        std::size_t weight { 0 };
    };
    auto same_coeffs = [](LinearScaling const& l, LinearScaling const& r) {
        return std::bit_cast<std::uint64_t>(l.a) == std::bit_cast<std::uint64_t>(r.a)
            && std::bit_cast<std::uint64_t>(l.b) == std::bit_cast<std::uint64_t>(r.b);
    };
    bool const merge_coeffs = e.task() == Task::Regression;

    std::vector<Group> groups;
    std::unordered_multimap<std::size_t, std::size_t> by_hash;
    for (auto const& m : e.members()) {
        Group* target = nullptr;
        auto [lo, hi] = by_hash.equal_range(m.tree.hash());
        for (auto it = lo; it != hi && target == nullptr; ++it) {
            auto& g = groups[it->second];
            if (g.first.tree == m.tree && (merge_coeffs || same_coeffs(g.first.scaling, m.scaling))) { target = &g; }
        }
        if (target == nullptr) {
            by_hash.emplace(m.tree.hash(), groups.size());
            groups.push_back({ m });
            target = &groups.back();
        }
        auto const w = static_cast<double>(m.weight);
        target->sum_a += w * m.scaling.a;
        target->sum_b += w * m.scaling.b;
        target->weight += m.weight;
    }

    std::vector<EnsembleMember> members;
    members.reserve(groups.size());
    for (auto& g : groups) {
        auto m = std::move(g.first);
        if (g.weight != m.weight) {
            auto const w = static_cast<double>(g.weight);
            m.scaling = { g.sum_a / w, g.sum_b / w };
            m.weight = g.weight;
        }
        members.push_back(std::move(m));
    }
    return { std::move(members), e.task() };
}

double rmse(Eigen::VectorXd const& y, Eigen::VectorXd const& prediction)
{
    return std::sqrt((y - prediction).squaredNorm() / static_cast<double>(y.size()));
}

double accuracy(Eigen::VectorXd const& y, Eigen::VectorXi const& prediction)
{
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) { hits += static_cast<int>(y[i]) == prediction[i]; }
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

double ensemble_metric(Ensemble const& e, Dataset const& ds)
{
    if (e.task() == Task::Regression) { return rmse(ds.labels(), predict_regression(e, ds.features())); }
    return accuracy(ds.labels(), predict_classification(e, ds.features()));
}

std::string export_ensemble(Ensemble const& e)
{
    std::string out;
    for (auto const& m : e.members()) {
        out += fmt::format("{};{:.17g};{:.17g};{}\n", m.weight, m.scaling.a, m.scaling.b, to_string(m.tree));
    }
    return out;
}

Ensemble import_ensemble(std::string_view text, Task task)
{
    std::vector<EnsembleMember> members;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() : end + 1;
        if (line.empty() || line == "\r") { continue; }

        std::string_view fields[4];
        for (int f = 0; f < 3; ++f) {
            auto semi = line.find(';');
            if (semi == std::string_view::npos) { throw std::invalid_argument(fmt::format("ensemble line '{}': expected 4 fields", line)); }
            fields[f] = line.substr(0, semi);
            line.remove_prefix(semi + 1);
        }
        fields[3] = line;
        EnsembleMember m;
        double a = 0;
        double b = 0;
        auto bad = [&](std::string_view f, auto& v) {
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            return ec != std::errc {} || p != f.data() + f.size();
        };
        if (bad(fields[0], m.weight) || bad(fields[1], a) || bad(fields[2], b)) {
            throw std::invalid_argument("ensemble line: bad number");
        }
        m.scaling = { a, b };
        m.tree = parse_tree(fields[3]);
        m.source_sample = members.size();
        members.push_back(std::move(m));
    }
    return { std::move(members), task };
}

} // namespace segp
