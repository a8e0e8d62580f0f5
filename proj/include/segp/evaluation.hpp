#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "segp/data.hpp"
#include "segp/tree.hpp"

namespace segp {

struct LinearScaling {
    double a { 0.0 };
    double b { 1.0 };

    [[nodiscard]] double apply(double o) const { return a + b * o; }
};

// One loss and one scaling pair per bootstrap sample, in plan row order,
// plus the loss on the whole training set.
struct EvaluatedIndividual {
    Tree tree;
    std::vector<double> fitness;
    std::vector<LinearScaling> scaling;
    double full_train_fitness { 0.0 };
    LinearScaling full_scaling;
};

struct EvaluationResult {
    EvaluatedIndividual individual;
    std::uint64_t node_evals { 0 };
};

// Least-squares a, b for y ~ a + b * o. A constant output yields b = 0,
// a = mean(y).
LinearScaling linear_scaling_coeffs(std::span<double const> y, std::span<double const> o);

// v < 0.5 -> 0, otherwise 1.
inline int round_and_clamp(double v) { return v < 0.5 ? 0 : 1; }

// Precomputes per-sample label material for a fixed (train, plan) pair so
// each individual costs one tree pass over the training rows plus O(beta n)
// gathers. Safe to call evaluate() concurrently.
class FitnessEvaluator {
public:
    FitnessEvaluator(Dataset const& train, BootstrapPlan const& plan, bool use_scaling);

    [[nodiscard]] EvaluatedIndividual evaluate(Tree tree) const;
    [[nodiscard]] std::vector<EvaluatedIndividual> evaluate_all(std::vector<Tree> trees) const;

    [[nodiscard]] std::uint64_t node_evals() const { return node_evals_.load(); }
    [[nodiscard]] std::size_t beta() const { return plan_->beta(); }
    [[nodiscard]] Dataset const& train() const { return *train_; }

private:
    struct SampleLabels {
        std::vector<double> y;
        std::vector<double> centered;
        double mean { 0.0 };
    };

    void score(std::span<double const> outputs, std::span<std::uint32_t const> rows, SampleLabels const& labels,
        std::vector<double>& gathered, double& loss, LinearScaling& coeffs) const;

    Dataset const* train_;
    BootstrapPlan const* plan_;
    bool use_scaling_;
    std::vector<SampleLabels> samples_;
    SampleLabels full_;
    std::vector<std::uint32_t> identity_;
    mutable std::atomic<std::uint64_t> node_evals_ { 0 };
};

EvaluationResult evaluate_individual(Tree const& tree, Dataset const& train, BootstrapPlan const& plan, bool use_scaling);

// Reference path: materializes every bootstrap sample and re-runs the tree
// on it (beta * size * n primitive evaluations).
EvaluationResult evaluate_naive(Tree const& tree, Dataset const& train, BootstrapPlan const& plan, bool use_scaling);

std::vector<EvaluatedIndividual> evaluate_population(std::vector<Tree> trees, Dataset const& train, BootstrapPlan const& plan, bool use_scaling);

// Loss of a fixed scaled output against labels: MSE for regression, error
// rate after round_and_clamp for classification. Non-finite results map to
// the largest finite double.
double scaled_loss(std::span<double const> y, std::span<double const> o, LinearScaling s, Task task);

} // namespace segp
