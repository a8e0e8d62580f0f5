#include "segp/evaluation.hpp"

#include <cmath>
#include <limits>

#include "segp/interpreter.hpp"

namespace segp {

namespace {

constexpr double worst_loss = std::numeric_limits<double>::max();

double finite_or_worst(double loss) { return std::isfinite(loss) ? loss : worst_loss; }

// An output whose spread is below ~1e-12 of its magnitude is constant up to
// rounding in the mean; fitting a slope to that noise is meaningless.
LinearScaling finish_coeffs(double y_mean, double o_mean, double cov, double var, double n)
{
    if (!(var > 1e-24 * n * o_mean * o_mean)) { return { y_mean, 0.0 }; }
    double b = cov / var;
    double a = y_mean - b * o_mean;
    if (!std::isfinite(a) || !std::isfinite(b)) { return { y_mean, 0.0 }; }
    return { a, b };
}

} // namespace

LinearScaling linear_scaling_coeffs(std::span<double const> y, std::span<double const> o)
{
    auto const n = static_cast<double>(y.size());
    double sy = 0.0;
    double so = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sy += y[i];
        so += o[i];
    }
    double const y_mean = sy / n;
    double const o_mean = so / n;
    double cov = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double const dy = y[i] - y_mean;
        double const dob = o[i] - o_mean;
        cov += dy * dob;
        var += dob * dob;
    }
    return finish_coeffs(y_mean, o_mean, cov, var, n);
}

double scaled_loss(std::span<double const> y, std::span<double const> o, LinearScaling s, Task task)
{
    double acc = 0.0;
    if (task == Task::Regression) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            double const r = y[i] - s.apply(o[i]);
            acc += r * r;
        }
    } else {
        for (std::size_t i = 0; i < y.size(); ++i) {
            acc += static_cast<double>(round_and_clamp(s.apply(o[i])) != static_cast<int>(y[i]));
        }
    }
    return finite_or_worst(acc / static_cast<double>(y.size()));
}

FitnessEvaluator::FitnessEvaluator(Dataset const& train, BootstrapPlan const& plan, bool use_scaling)
    : train_(&train)
    , plan_(&plan)
    , use_scaling_(use_scaling)
    , identity_(train.rows())
{
    if (plan.beta() > 0 && plan.n() != train.rows()) {
        throw DataError("bootstrap plan size does not match the training set");
    }
    auto const& y = train.labels();
    auto labels_for = [&](std::span<std::uint32_t const> rows) {
        SampleLabels s;
        s.y.resize(rows.size());
        double sum = 0.0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            s.y[k] = y[rows[k]];
            sum += s.y[k];
        }
        s.mean = sum / static_cast<double>(rows.size());
        s.centered.resize(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) { s.centered[k] = s.y[k] - s.mean; }
        return s;
    };
    for (std::size_t i = 0; i < identity_.size(); ++i) { identity_[i] = static_cast<std::uint32_t>(i); }
    full_ = labels_for(identity_);
    samples_.reserve(plan.beta());
    for (std::size_t j = 0; j < plan.beta(); ++j) { samples_.push_back(labels_for(plan.row(j))); }
}

void FitnessEvaluator::score(std::span<double const> outputs, std::span<std::uint32_t const> rows, SampleLabels const& labels,
    std::vector<double>& gathered, double& loss, LinearScaling& coeffs) const
{
    auto const n = rows.size();
    double so = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        gathered[k] = outputs[rows[k]];
        so += gathered[k];
    }
    coeffs = {};
    if (use_scaling_) {
        double const o_mean = so / static_cast<double>(n);
        double cov = 0.0;
        double var = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double const dob = gathered[k] - o_mean;
            cov += labels.centered[k] * dob;
            var += dob * dob;
        }
        coeffs = finish_coeffs(labels.mean, o_mean, cov, var, static_cast<double>(n));
    }
    loss = scaled_loss(labels.y, { gathered.data(), n }, coeffs, train_->task());
}

EvaluatedIndividual FitnessEvaluator::evaluate(Tree tree) const
{
    auto const n = train_->rows();
    std::vector<double> outputs(n);
    node_evals_ += eval_tree_into(tree, train_->features(), outputs);

    EvaluatedIndividual ind;
    ind.fitness.resize(samples_.size());
    ind.scaling.resize(samples_.size());
    std::vector<double> gathered(n);
    score(outputs, identity_, full_, gathered, ind.full_train_fitness, ind.full_scaling);
    for (std::size_t j = 0; j < samples_.size(); ++j) {
        score(outputs, plan_->row(j), samples_[j], gathered, ind.fitness[j], ind.scaling[j]);
    }
    ind.tree = std::move(tree);
    return ind;
}

std::vector<EvaluatedIndividual> FitnessEvaluator::evaluate_all(std::vector<Tree> trees) const
{
    std::vector<EvaluatedIndividual> out;
    out.reserve(trees.size());
    for (auto& t : trees) { out.push_back(evaluate(std::move(t))); }
    return out;
}

EvaluationResult evaluate_individual(Tree const& tree, Dataset const& train, BootstrapPlan const& plan, bool use_scaling)
{
    FitnessEvaluator evaluator(train, plan, use_scaling);
    auto ind = evaluator.evaluate(tree);
    return { std::move(ind), evaluator.node_evals() };
}

EvaluationResult evaluate_naive(Tree const& tree, Dataset const& train, BootstrapPlan const& plan, bool use_scaling)
{
    EvaluationResult result;
    auto& ind = result.individual;
    ind.tree = tree;

    auto fit = [&](Dataset const& sample, double& loss, LinearScaling& coeffs) {
        auto out = eval_tree_outputs(tree, sample.features());
        result.node_evals += out.node_evals;
        std::span<double const> y(sample.labels().data(), sample.rows());
        std::span<double const> o(out.values.data(), sample.rows());
        coeffs = use_scaling ? linear_scaling_coeffs(y, o) : LinearScaling {};
        loss = scaled_loss(y, o, coeffs, sample.task());
    };

    // The whole-set loss is bookkeeping, not part of the per-sample cost.
    {
        auto out = eval_tree_outputs(tree, train.features());
        std::span<double const> y(train.labels().data(), train.rows());
        std::span<double const> o(out.values.data(), train.rows());
        ind.full_scaling = use_scaling ? linear_scaling_coeffs(y, o) : LinearScaling {};
        ind.full_train_fitness = scaled_loss(y, o, ind.full_scaling, train.task());
    }

    ind.fitness.resize(plan.beta());
    ind.scaling.resize(plan.beta());
    for (std::size_t j = 0; j < plan.beta(); ++j) {
        fit(train.subset(plan.row(j)), ind.fitness[j], ind.scaling[j]);
    }
    return result;
}

std::vector<EvaluatedIndividual> evaluate_population(std::vector<Tree> trees, Dataset const& train, BootstrapPlan const& plan, bool use_scaling)
{
    return FitnessEvaluator(train, plan, use_scaling).evaluate_all(std::move(trees));
}

} // namespace segp
