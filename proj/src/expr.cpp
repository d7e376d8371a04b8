#include "calabi/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <utility>

namespace calabi {

namespace {

NodePtr node(NodeKind kind) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    return n;
}

NodePtr binary(NodeKind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

NodePtr unary(NodeKind kind, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    return n;
}

} // namespace

NodePtr make_constant(double v) {
    auto n = node(NodeKind::Constant);
    const_cast<Node&>(*n).value = v;
    return n;
}

NodePtr make_variable(int index) {
    if (index < 0)
        throw InvalidArgument("variable index must be non-negative");
    auto n = node(NodeKind::Variable);
    const_cast<Node&>(*n).index = index;
    return n;
}

NodePtr make_add(NodePtr a, NodePtr b) { return binary(NodeKind::Add, std::move(a), std::move(b)); }
NodePtr make_sub(NodePtr a, NodePtr b) { return binary(NodeKind::Sub, std::move(a), std::move(b)); }
NodePtr make_mul(NodePtr a, NodePtr b) { return binary(NodeKind::Mul, std::move(a), std::move(b)); }
NodePtr make_div(NodePtr a, NodePtr b) { return binary(NodeKind::Div, std::move(a), std::move(b)); }
NodePtr make_neg(NodePtr a) { return unary(NodeKind::Neg, std::move(a)); }
NodePtr make_ln(NodePtr a) { return unary(NodeKind::Ln, std::move(a)); }
NodePtr make_exp(NodePtr a) { return unary(NodeKind::Exp, std::move(a)); }

NodePtr make_pow(NodePtr base, int exponent) {
    auto n = unary(NodeKind::Pow, std::move(base));
    const_cast<Node&>(*n).exponent = exponent;
    return n;
}

NodePtr make_affine_compose(NodePtr child, Eigen::MatrixXd m, Eigen::VectorXd t) {
    if (m.rows() != m.cols() || m.rows() != t.size())
        throw InvalidArgument("affine composition needs a square matrix and a matching offset");
    auto n = unary(NodeKind::AffineCompose, std::move(child));
    auto& mut = const_cast<Node&>(*n);
    mut.matrix = std::move(m);
    mut.offset = std::move(t);
    return n;
}

std::string to_string(const Node& n) {
    std::ostringstream os;
    switch (n.kind) {
    case NodeKind::Constant: {
        os << n.value;
        return os.str();
    }
    case NodeKind::Variable:
        return "x" + std::to_string(n.index + 1);
    case NodeKind::Add:
        return "(" + to_string(*n.lhs) + "+" + to_string(*n.rhs) + ")";
    case NodeKind::Sub:
        return "(" + to_string(*n.lhs) + "-" + to_string(*n.rhs) + ")";
    case NodeKind::Mul:
        return "(" + to_string(*n.lhs) + "*" + to_string(*n.rhs) + ")";
    case NodeKind::Div:
        return "(" + to_string(*n.lhs) + "/" + to_string(*n.rhs) + ")";
    case NodeKind::Pow:
        return to_string(*n.lhs) + "^" + std::to_string(n.exponent);
    case NodeKind::Neg:
        return "-" + to_string(*n.lhs);
    case NodeKind::Ln:
        return "ln(" + to_string(*n.lhs) + ")";
    case NodeKind::Exp:
        return "exp(" + to_string(*n.lhs) + ")";
    case NodeKind::AffineCompose:
        return "compose(" + to_string(*n.lhs) + ")";
    }
    return "?";
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr run(int& max_index) {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        max_index = max_index_;
        return e;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    int max_index_ = -1; // 0-based

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+'))
                lhs = make_add(lhs, term());
            else if (eat('-'))
                lhs = make_sub(lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*'))
                lhs = make_mul(lhs, factor());
            else if (eat('/'))
                lhs = make_div(lhs, factor());
            else
                return lhs;
        }
    }

    NodePtr factor() {
        NodePtr b = base();
        if (eat('^'))
            return make_pow(b, integer());
        return b;
    }

    int integer() {
        skip_ws();
        std::size_t start = pos_;
        bool negative = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            negative = text_[pos_] == '-';
            ++pos_;
        }
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw ParseError("expected integer exponent", start);
        long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 64)
                throw ParseError("exponent too large", start);
            ++pos_;
        }
        return static_cast<int>(negative ? -v : v);
    }

    NodePtr base() {
        skip_ws();
        if (pos_ >= text_.size())
            throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return make_neg(base());
        }
        if (c == '(') {
            std::size_t open = pos_;
            ++pos_;
            NodePtr e = expr();
            if (!eat(')'))
                throw ParseError("missing ')'", open);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return word();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // the 'e' belongs to a following identifier
            }
        }
        return make_constant(std::stod(text_.substr(start, pos_ - start)));
    }

    NodePtr word() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string w = text_.substr(start, pos_ - start);
        if (w == "x") {
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                throw ParseError("expected variable index after 'x'", start);
            long idx = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                idx = idx * 10 + (text_[pos_] - '0');
                if (idx > 8)
                    throw ParseError("variable index exceeds the supported dimension (8)", start);
                ++pos_;
            }
            if (idx < 1)
                throw ParseError("variable indices start at 1", start);
            max_index_ = std::max(max_index_, static_cast<int>(idx - 1));
            return make_variable(static_cast<int>(idx - 1));
        }
        if (w == "ln" || w == "exp") {
            if (!eat('('))
                throw ParseError("expected '(' after '" + w + "'", pos_);
            NodePtr e = expr();
            if (!eat(')'))
                throw ParseError("missing ')'", pos_);
            return w == "ln" ? make_ln(e) : make_exp(e);
        }
        throw ParseError("unknown identifier '" + w + "'", start);
    }
};

} // namespace

FunctionSpec parse(const std::string& text) {
    Parser p(text);
    int max_index = -1;
    NodePtr root = p.run(max_index);
    if (max_index < 0)
        throw InvalidArgument("function has zero dimension (no variables)");
    return FunctionSpec{root, max_index + 1};
}

FunctionSpec parse(const std::string& text, int dim) {
    Parser p(text);
    int max_index = -1;
    NodePtr root = p.run(max_index);
    if (dim <= 0)
        throw InvalidArgument("function has zero dimension");
    if (max_index + 1 > dim)
        throw InvalidArgument("explicit dimension " + std::to_string(dim) +
                              " does not cover variable x" + std::to_string(max_index + 1));
    return FunctionSpec{root, dim};
}

} // namespace calabi
