#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "segp/random.hpp"

namespace segp {

enum class Task { Regression, Classification };

std::string to_string(Task task);
Task parse_task(std::string const& text);

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Feature matrix (n x d, column-major) plus label vector. Construction
// validates shape, finiteness and, for classification, labels in {0, 1}.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::string name, Eigen::MatrixXd features, Eigen::VectorXd labels, Task task);

    [[nodiscard]] std::string const& name() const { return name_; }
    [[nodiscard]] Eigen::MatrixXd const& features() const { return features_; }
    [[nodiscard]] Eigen::VectorXd const& labels() const { return labels_; }
    [[nodiscard]] Task task() const { return task_; }
    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(features_.rows()); }
    [[nodiscard]] std::size_t cols() const { return static_cast<std::size_t>(features_.cols()); }

    // Rows in the given order; repeated indices duplicate rows.
    [[nodiscard]] Dataset subset(std::span<std::uint32_t const> rows) const;

private:
    std::string name_;
    Eigen::MatrixXd features_;
    Eigen::VectorXd labels_;
    Task task_ { Task::Regression };
};

struct StandardizationStats {
    Eigen::VectorXd means;
    Eigen::VectorXd stdevs;      // population form; 0 for constant columns
    std::vector<bool> constant;  // zero-variance columns map to 0
};

// beta rows of n indices in [0, n), stored row-major.
class BootstrapPlan {
public:
    BootstrapPlan() = default;
    BootstrapPlan(std::size_t beta, std::size_t n, std::vector<std::uint32_t> indices);

    [[nodiscard]] std::size_t beta() const { return beta_; }
    [[nodiscard]] std::size_t n() const { return n_; }
    [[nodiscard]] std::span<std::uint32_t const> row(std::size_t j) const
    {
        return { indices_.data() + j * n_, n_ };
    }

    static BootstrapPlan identity(std::size_t n);

private:
    std::size_t beta_ { 0 };
    std::size_t n_ { 0 };
    std::vector<std::uint32_t> indices_;
};

struct TrainTest {
    Dataset train;
    Dataset test;
};

struct Standardized {
    Dataset train;
    Dataset test;
    StandardizationStats stats;
};

// Canonical CSV: comma separated, last column is the label, at most one
// header row (detected by a non-numeric first cell).
Dataset load_csv(std::filesystem::path const& path, Task task);
Dataset parse_csv(std::string_view text, std::string name, Task task);
void write_csv(Dataset const& ds, std::filesystem::path const& path);

TrainTest split(Dataset const& ds, double test_fraction, Random& rng);
std::size_t train_size(std::size_t n, double test_fraction);

Standardized standardize(Dataset const& train, Dataset const& test);

BootstrapPlan sample_bootstrap(std::size_t n, std::size_t beta, Random& rng);

} // namespace segp
