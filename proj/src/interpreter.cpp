#include "segp/interpreter.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace segp {

namespace {

constexpr Eigen::Index chunk_rows = 256;

// Largest number of simultaneously live operands under reverse-prefix evaluation.
std::size_t stack_depth(Tree const& tree)
{
    std::size_t depth = 0;
    std::size_t peak = 0;
    for (auto i = tree.size(); i-- > 0;) {
        depth = depth - static_cast<std::size_t>(arity(tree[i].op)) + 1;
        peak = std::max(peak, depth);
    }
    return peak;
}

} // namespace

std::uint64_t eval_tree_into(Tree const& tree, Eigen::MatrixXd const& features, std::span<double> out)
{
    using Map = Eigen::Map<Eigen::ArrayXd>;
    constexpr double hi = std::numeric_limits<double>::max();

    auto const n = features.rows();
    if (tree.empty() || n == 0) { return 0; }

    auto const slots = stack_depth(tree);
    std::vector<double> buffer(slots * static_cast<std::size_t>(chunk_rows));
    auto slot = [&](std::size_t s, Eigen::Index m) { return Map(buffer.data() + s * chunk_rows, m); };

    for (Eigen::Index r0 = 0; r0 < n; r0 += chunk_rows) {
        auto const m = std::min(chunk_rows, n - r0);
        std::size_t top = 0; // number of live slots
        for (auto i = tree.size(); i-- > 0;) {
            auto const& node = tree[i];
            switch (node.op) {
            case Op::Feature:
                slot(top++, m) = features.col(node.feature).segment(r0, m).array();
                break;
            case Op::Constant:
                slot(top++, m).setConstant(node.value);
                break;
            case Op::Sqrt: {
                auto x = slot(top - 1, m);
                x = x.abs().sqrt();
                break;
            }
            case Op::Log: {
                auto x = slot(top - 1, m);
                x = (x.abs() + protection_epsilon).log();
                break;
            }
            default: {
                // Left operand is on top, right operand just below it.
                auto a = slot(top - 1, m);
                auto b = slot(top - 2, m);
                switch (node.op) {
                case Op::Add: b = a + b; break;
                case Op::Sub: b = a - b; break;
                case Op::Mul: b = a * b; break;
                case Op::Div: b = (b >= 0.0).select(a, -a) / (b.abs() + protection_epsilon); break;
                default: break;
                }
                b = b.max(-hi).min(hi);
                --top;
            }
            }
        }
        std::copy_n(buffer.data(), m, out.data() + r0);
    }
    return static_cast<std::uint64_t>(tree.size()) * static_cast<std::uint64_t>(n);
}

TreeOutput eval_tree_outputs(Tree const& tree, Eigen::MatrixXd const& features)
{
    TreeOutput result { Eigen::VectorXd(features.rows()), 0 };
    result.node_evals = eval_tree_into(tree, features, { result.values.data(), static_cast<std::size_t>(result.values.size()) });
    return result;
}

} // namespace segp
