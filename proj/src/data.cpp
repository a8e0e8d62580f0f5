#include "segp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/core.h>

namespace segp {

std::string to_string(Task task)
{
    return task == Task::Regression ? "regression" : "classification";
}

Task parse_task(std::string const& text)
{
    if (text == "regression") { return Task::Regression; }
    if (text == "classification") { return Task::Classification; }
    throw DataError(fmt::format("unknown task '{}'", text));
}

Dataset::Dataset(std::string name, Eigen::MatrixXd features, Eigen::VectorXd labels, Task task)
    : name_(std::move(name))
    , features_(std::move(features))
    , labels_(std::move(labels))
    , task_(task)
{
    if (features_.rows() != labels_.size()) {
        throw DataError(fmt::format("{}: {} feature rows but {} labels", name_, features_.rows(), labels_.size()));
    }
    if (!features_.allFinite() || !labels_.allFinite()) {
        throw DataError(fmt::format("{}: non-finite values", name_));
    }
    if (task_ == Task::Classification) {
        for (Eigen::Index i = 0; i < labels_.size(); ++i) {
            if (labels_[i] != 0.0 && labels_[i] != 1.0) {
                throw DataError(fmt::format("{}: classification label {} at row {} is not 0 or 1", name_, labels_[i], i));
            }
        }
    }
}

Dataset Dataset::subset(std::span<std::uint32_t const> rows) const
{
    auto const m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x(m, features_.cols());
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        x.row(i) = features_.row(rows[static_cast<std::size_t>(i)]);
        y[i] = labels_[rows[static_cast<std::size_t>(i)]];
    }
    return { name_, std::move(x), std::move(y), task_ };
}

BootstrapPlan::BootstrapPlan(std::size_t beta, std::size_t n, std::vector<std::uint32_t> indices)
    : beta_(beta)
    , n_(n)
    , indices_(std::move(indices))
{
    if (indices_.size() != beta_ * n_) {
        throw DataError("bootstrap plan: index count does not match beta x n");
    }
    if (std::any_of(indices_.begin(), indices_.end(), [&](auto k) { return k >= n_; })) {
        throw DataError("bootstrap plan: index out of range");
    }
}

BootstrapPlan BootstrapPlan::identity(std::size_t n)
{
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0U);
    return { 1, n, std::move(idx) };
}

namespace {

std::string_view trim(std::string_view s)
{
    auto const ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) { return {}; }
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view cell, double& out)
{
    cell = trim(cell);
    if (cell.empty()) { return false; }
    if (cell.front() == '+') { cell.remove_prefix(1); }
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc {} && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::vector<std::string_view> split_cells(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) { break; }
        start = pos + 1;
    }
    return cells;
}

} // namespace

Dataset parse_csv(std::string_view text, std::string name, Task task)
{
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    bool seen_first = false;

    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        auto line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (line.empty()) { continue; }

        auto cells = split_cells(line);
        double v = 0;
        if (!seen_first) {
            seen_first = true;
            if (!parse_double(cells.front(), v)) {
                continue; // header
            }
        }
        if (width == 0) {
            width = cells.size();
            if (width < 2) {
                throw DataError(fmt::format("{}: need at least one feature and a label", name));
            }
        } else if (cells.size() != width) {
            throw DataError(fmt::format("{}:{}: expected {} cells, found {}", name, line_no, width, cells.size()));
        }
        for (auto cell : cells) {
            if (!parse_double(cell, v)) {
                throw DataError(fmt::format("{}:{}: non-numeric cell '{}'", name, line_no, trim(cell)));
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) {
        throw DataError(fmt::format("{}: no data rows", name));
    }

    auto const d = static_cast<Eigen::Index>(width - 1);
    auto const n = static_cast<Eigen::Index>(rows);
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto const* row = values.data() + static_cast<std::size_t>(i) * width;
        for (Eigen::Index j = 0; j < d; ++j) { x(i, j) = row[j]; }
        y[i] = row[d];
    }
    return { std::move(name), std::move(x), std::move(y), task };
}

Dataset load_csv(std::filesystem::path const& path, Task task)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(fmt::format("cannot read '{}'", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.stem().string(), task);
}

void write_csv(Dataset const& ds, std::filesystem::path const& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path.string()));
    }
    auto const& x = ds.features();
    for (Eigen::Index j = 0; j < x.cols(); ++j) { out << 'x' << j << ','; }
    out << "y\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) { out << fmt::format("{},", x(i, j)); }
        out << fmt::format("{}\n", ds.labels()[i]);
    }
}

std::size_t train_size(std::size_t n, double test_fraction)
{
    // ceil(n * (1 - f)), guarded against representation error in f.
    return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (1.0 - test_fraction) - 1e-9));
}

TrainTest split(Dataset const& ds, double test_fraction, Random& rng)
{
    auto const n = ds.rows();
    if (n < 2) {
        throw DataError("split: need at least two rows");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw DataError(fmt::format("split: test fraction {} outside (0, 1)", test_fraction));
    }
    auto const n_train = train_size(n, test_fraction);
    if (n_train == 0 || n_train >= n) {
        throw DataError(fmt::format("split: fraction {} leaves an empty side for n = {}", test_fraction, n));
    }
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0U);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::span<std::uint32_t const> all(perm);
    return { ds.subset(all.first(n_train)), ds.subset(all.subspan(n_train)) };
}

Standardized standardize(Dataset const& train, Dataset const& test)
{
    if (train.rows() == 0) {
        throw DataError("standardize: empty training set");
    }
    auto const d = train.features().cols();
    auto const n = static_cast<double>(train.rows());
    StandardizationStats stats { Eigen::VectorXd(d), Eigen::VectorXd(d), std::vector<bool>(static_cast<std::size_t>(d)) };

    Eigen::MatrixXd xtr = train.features();
    Eigen::MatrixXd xte = test.features();
    for (Eigen::Index j = 0; j < d; ++j) {
        double mean = xtr.col(j).sum() / n;
        double var = (xtr.col(j).array() - mean).square().sum() / n;
        stats.means[j] = mean;
        stats.stdevs[j] = var > 0 ? std::sqrt(var) : 0.0;
        stats.constant[static_cast<std::size_t>(j)] = !(var > 0);
        if (var > 0) {
            xtr.col(j) = (xtr.col(j).array() - mean) / stats.stdevs[j];
            if (xte.rows() > 0) { xte.col(j) = (xte.col(j).array() - mean) / stats.stdevs[j]; }
        } else {
            xtr.col(j).setZero();
            xte.col(j).setZero();
        }
    }
    return {
        Dataset(train.name(), std::move(xtr), train.labels(), train.task()),
        Dataset(test.name(), std::move(xte), test.labels(), test.task()),
        std::move(stats),
    };
}

BootstrapPlan sample_bootstrap(std::size_t n, std::size_t beta, Random& rng)
{
    if (n == 0 || beta == 0) {
        throw DataError("sample_bootstrap: n and beta must be positive");
    }
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    std::vector<std::uint32_t> idx(n * beta);
    for (auto& k : idx) { k = pick(rng); }
    return { beta, n, std::move(idx) };
}

} // namespace segp
