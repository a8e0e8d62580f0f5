#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "segp/data.hpp"
#include "segp/evaluation.hpp"
#include "segp/tree.hpp"

namespace segp {

struct EnsembleMember {
    Tree tree;
    LinearScaling scaling;
    std::size_t weight { 1 };
    std::size_t source_sample { 0 };
    double train_loss { 0.0 };
};

// A bagging ensemble: weighted mean of scaled outputs for regression,
// weighted majority vote (ties -> class 0) for classification.
class Ensemble {
public:
    Ensemble() = default;
    Ensemble(std::vector<EnsembleMember> members, Task task);

    // Archive with beta empty slots (infinite loss) waiting for elites.
    static Ensemble empty_archive(std::size_t beta, Task task);

    [[nodiscard]] std::vector<EnsembleMember> const& members() const { return members_; }
    [[nodiscard]] Task task() const { return task_; }
    [[nodiscard]] std::size_t size() const { return members_.size(); }
    [[nodiscard]] std::size_t total_weight() const;
    [[nodiscard]] bool filled() const;

    // Scaled outputs of every member, one column per member.
    [[nodiscard]] Eigen::MatrixXd member_outputs(Eigen::MatrixXd const& features) const;

private:
    std::vector<EnsembleMember> members_;
    Task task_ { Task::Regression };
};

// Slot j takes any individual with a strictly smaller loss_j than the
// incumbent; among equal candidates the first in population order wins.
Ensemble update_elites(Ensemble const& archive, std::span<EvaluatedIndividual const> pop);

Eigen::VectorXd predict_regression(Ensemble const& e, Eigen::MatrixXd const& features);
Eigen::VectorXi predict_classification(Ensemble const& e, Eigen::MatrixXd const& features);

// Regression: members with syntactically equal trees merge; their a and b
// become weight-averaged and weights add up, which leaves predictions
// unchanged. Classification: only exact (tree, a, b) duplicates merge.
Ensemble prune(Ensemble const& e);

// RMSE for regression, accuracy for classification.
double ensemble_metric(Ensemble const& e, Dataset const& ds);

double rmse(Eigen::VectorXd const& y, Eigen::VectorXd const& prediction);
double accuracy(Eigen::VectorXd const& y, Eigen::VectorXi const& prediction);

// One member per line: weight;a;b;prefix-tree.
std::string export_ensemble(Ensemble const& e);
Ensemble import_ensemble(std::string_view text, Task task);

} // namespace segp
