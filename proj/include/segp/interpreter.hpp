#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "segp/tree.hpp"

namespace segp {

struct TreeOutput {
    Eigen::VectorXd values;
    // Primitive evaluations performed: size(tree) * rows, always.
    std::uint64_t node_evals { 0 };
};

// Evaluates `tree` on every row of `features` (n x d) with protected
// semantics. Intermediate results saturate to +/-DBL_MAX, so outputs are
// always finite.
TreeOutput eval_tree_outputs(Tree const& tree, Eigen::MatrixXd const& features);

// Same as above, writing into caller storage of length features.rows().
std::uint64_t eval_tree_into(Tree const& tree, Eigen::MatrixXd const& features, std::span<double> out);

} // namespace segp
