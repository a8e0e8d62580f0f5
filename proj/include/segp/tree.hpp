#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace segp {

enum class Op : std::uint8_t {
    Add,
    Sub,
    Mul,
    Div,  // protected: a * sign(b) / (|b| + eps)
    Sqrt, // protected: sqrt(|x|)
    Log,  // protected: log(|x| + eps)
    Feature,
    Constant,
};

inline constexpr double protection_epsilon = 1e-10;

constexpr int arity(Op op)
{
    switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
        return 2;
    case Op::Sqrt:
    case Op::Log:
        return 1;
    default:
        return 0;
    }
}

constexpr bool is_terminal(Op op) { return arity(op) == 0; }

std::string_view symbol(Op op);

struct Node {
    Op op { Op::Constant };
    std::uint32_t feature { 0 };
    double value { 0.0 };
    // Number of nodes in the subtree rooted here (prefix layout).
    std::uint32_t length { 1 };

    static Node function(Op op) { return { op, 0, 0.0, 1 }; }
    static Node variable(std::uint32_t index) { return { Op::Feature, index, 0.0, 1 }; }
    static Node constant(double v) { return { Op::Constant, 0, v, 1 }; }
};

// Exact comparison: same operator, same feature index, bit-identical constant.
bool same_primitive(Node const& a, Node const& b);

class TreeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Expression tree stored in prefix order. A subtree rooted at node i occupies
// the contiguous range [i, i + nodes[i].length). Trees are values: variation
// builds new trees rather than editing existing ones.
class Tree {
public:
    Tree() = default;
    // Takes prefix-ordered nodes; recomputes subtree lengths and validates arity.
    explicit Tree(std::vector<Node> prefix);

    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] bool empty() const { return nodes_.empty(); }
    [[nodiscard]] std::span<Node const> nodes() const { return nodes_; }
    [[nodiscard]] Node const& operator[](std::size_t i) const { return nodes_[i]; }

    // Edges on the longest root-to-leaf path; a single node has height 0.
    [[nodiscard]] std::size_t height() const;
    [[nodiscard]] std::vector<std::size_t> depths() const;
    [[nodiscard]] std::uint32_t max_feature_index() const;

    [[nodiscard]] Tree subtree(std::size_t i) const;
    // Copy of this tree with the subtree at `at` replaced by `donor`.
    [[nodiscard]] Tree replace(std::size_t at, std::span<Node const> donor) const;

    [[nodiscard]] std::size_t hash() const;

    friend bool operator==(Tree const& a, Tree const& b);

private:
    std::vector<Node> nodes_;
};

bool tree_equals(Tree const& a, Tree const& b);

struct TreeHash {
    std::size_t operator()(Tree const& t) const { return t.hash(); }
};

// Prefix text form, e.g. "(+ (x0) (plog (c:1.25)))". Constants carry 17
// significant digits so that parse(to_string(t)) == t.
std::string to_string(Tree const& tree);
Tree parse_tree(std::string_view text);

} // namespace segp
