#include "segp/tree.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>

#include <fmt/core.h>

namespace segp {

std::string_view symbol(Op op)
{
    switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "pdiv";
    case Op::Sqrt: return "psqrt";
    case Op::Log: return "plog";
    case Op::Feature: return "x";
    case Op::Constant: return "c";
    }
    return "?";
}

bool same_primitive(Node const& a, Node const& b)
{
    if (a.op != b.op) { return false; }
    if (a.op == Op::Feature) { return a.feature == b.feature; }
    if (a.op == Op::Constant) { return std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value); }
    return true;
}

Tree::Tree(std::vector<Node> prefix)
    : nodes_(std::move(prefix))
{
    // Walk backwards with a stack of pending subtree lengths.
    std::vector<std::uint32_t> stack;
    stack.reserve(nodes_.size());
    for (auto i = nodes_.size(); i-- > 0;) {
        auto& node = nodes_[i];
        auto const k = arity(node.op);
        if (stack.size() < static_cast<std::size_t>(k)) {
            throw TreeError("malformed prefix tree: missing operands");
        }
        std::uint32_t len = 1;
        for (int c = 0; c < k; ++c) {
            len += stack.back();
            stack.pop_back();
        }
        node.length = len;
        stack.push_back(len);
    }
    if (!nodes_.empty() && stack.size() != 1) {
        throw TreeError("malformed prefix tree: dangling operands");
    }
}

std::vector<std::size_t> Tree::depths() const
{
    std::vector<std::size_t> depth(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto child = i + 1;
        for (int c = 0; c < arity(nodes_[i].op); ++c) {
            depth[child] = depth[i] + 1;
            child += nodes_[child].length;
        }
    }
    return depth;
}

std::size_t Tree::height() const
{
    auto d = depths();
    return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

std::uint32_t Tree::max_feature_index() const
{
    std::uint32_t m = 0;
    for (auto const& n : nodes_) {
        if (n.op == Op::Feature) { m = std::max(m, n.feature); }
    }
    return m;
}

Tree Tree::subtree(std::size_t i) const
{
    auto first = nodes_.begin() + static_cast<std::ptrdiff_t>(i);
    return Tree(std::vector<Node>(first, first + nodes_[i].length));
}

Tree Tree::replace(std::size_t at, std::span<Node const> donor) const
{
    std::vector<Node> out;
    out.reserve(nodes_.size() - nodes_[at].length + donor.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(at));
    out.insert(out.end(), donor.begin(), donor.end());
    out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(at + nodes_[at].length), nodes_.end());
    return Tree(std::move(out));
}

std::size_t Tree::hash() const
{
    // FNV-1a over the fields that define syntactic identity.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    for (auto const& n : nodes_) {
        mix(static_cast<std::uint64_t>(n.op));
        if (n.op == Op::Feature) { mix(n.feature); }
        if (n.op == Op::Constant) { mix(std::bit_cast<std::uint64_t>(n.value)); }
    }
    return static_cast<std::size_t>(h);
}

bool operator==(Tree const& a, Tree const& b)
{
    return std::equal(a.nodes_.begin(), a.nodes_.end(), b.nodes_.begin(), b.nodes_.end(), same_primitive);
}

bool tree_equals(Tree const& a, Tree const& b) { return a == b; }

namespace {

void print(Tree const& t, std::size_t i, std::string& out)
{
    auto const& n = t[i];
    out += '(';
    switch (n.op) {
    case Op::Feature:
        out += fmt::format("x{}", n.feature);
        break;
    case Op::Constant:
        out += fmt::format("c:{:.17g}", n.value);
        break;
    default: {
        out += symbol(n.op);
        auto child = i + 1;
        for (int c = 0; c < arity(n.op); ++c) {
            out += ' ';
            print(t, child, out);
            child += t[child].length;
        }
    }
    }
    out += ')';
}

class Parser {
public:
    explicit Parser(std::string_view text)
        : text_(text)
    {
    }

    std::vector<Node> parse()
    {
        std::vector<Node> nodes;
        node(nodes);
        skip_ws();
        if (pos_ != text_.size()) { fail("trailing characters"); }
        return nodes;
    }

private:
    void node(std::vector<Node>& out)
    {
        skip_ws();
        expect('(');
        auto tok = token();
        if (tok.size() > 1 && tok[0] == 'x') {
            std::uint32_t idx = 0;
            auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
            if (ec != std::errc {} || p != tok.data() + tok.size()) { fail("bad feature token"); }
            out.push_back(Node::variable(idx));
        } else if (tok.starts_with("c:")) {
            double v = 0;
            auto [p, ec] = std::from_chars(tok.data() + 2, tok.data() + tok.size(), v);
            if (ec != std::errc {} || p != tok.data() + tok.size() || !std::isfinite(v)) { fail("bad constant token"); }
            out.push_back(Node::constant(v));
        } else {
            Op op {};
            if (tok == "+") { op = Op::Add; }
            else if (tok == "-") { op = Op::Sub; }
            else if (tok == "*") { op = Op::Mul; }
            else if (tok == "pdiv") { op = Op::Div; }
            else if (tok == "psqrt") { op = Op::Sqrt; }
            else if (tok == "plog") { op = Op::Log; }
            else { fail(fmt::format("unknown symbol '{}'", tok)); }
            out.push_back(Node::function(op));
            for (int c = 0; c < arity(op); ++c) { node(out); }
        }
        skip_ws();
        expect(')');
    }

    std::string_view token()
    {
        skip_ws();
        auto start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '(' && text_[pos_] != ')') { ++pos_; }
        if (start == pos_) { fail("empty token"); }
        return text_.substr(start, pos_ - start);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n')) { ++pos_; }
    }

    void expect(char c)
    {
        if (pos_ >= text_.size() || text_[pos_] != c) { fail(fmt::format("expected '{}'", c)); }
        ++pos_;
    }

    [[noreturn]] void fail(std::string const& what) const
    {
        throw TreeError(fmt::format("parse error at offset {}: {}", pos_, what));
    }

    std::string_view text_;
    std::size_t pos_ { 0 };
};

} // namespace

std::string to_string(Tree const& tree)
{
    std::string out;
    if (!tree.empty()) { print(tree, 0, out); }
    return out;
}

Tree parse_tree(std::string_view text) { return Tree(Parser(text).parse()); }

} // namespace segp
