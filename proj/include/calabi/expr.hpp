#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "calabi/errors.hpp"

namespace calabi {

// Expression tree for a smooth function of x_1..x_n. Nodes are immutable
// after construction and shared freely between threads.
//
// AffineCompose is not reachable from the DSL grammar; it is produced by the
// affine group action and represents child(M*x + t).
enum class NodeKind {
    Constant,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Ln,
    Exp,
    AffineCompose,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double value = 0.0; // Constant
    int index = 0;      // Variable, 0-based
    int exponent = 0;   // Pow
    NodePtr lhs;        // unary child / left operand / composed child
    NodePtr rhs;        // right operand
    Eigen::MatrixXd matrix; // AffineCompose: inner linear map
    Eigen::VectorXd offset; // AffineCompose: inner translation
};

NodePtr make_constant(double v);
NodePtr make_variable(int index);
NodePtr make_add(NodePtr a, NodePtr b);
NodePtr make_sub(NodePtr a, NodePtr b);
NodePtr make_mul(NodePtr a, NodePtr b);
NodePtr make_div(NodePtr a, NodePtr b);
NodePtr make_pow(NodePtr base, int exponent);
NodePtr make_neg(NodePtr a);
NodePtr make_ln(NodePtr a);
NodePtr make_exp(NodePtr a);
NodePtr make_affine_compose(NodePtr child, Eigen::MatrixXd m, Eigen::VectorXd t);

std::string to_string(const Node& node);

// A strictly convex function given as an expression tree over x_1..x_n.
struct FunctionSpec {
    NodePtr root;
    int dim = 0;

    std::string text() const { return root ? to_string(*root) : std::string(); }
};

// Parses the DSL grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' integer)?
//   base   := number | 'x' index | '(' expr ')'
//           | 'ln' '(' expr ')' | 'exp' '(' expr ')' | '-' base
// Whitespace is insignificant. Rational constants are written p/q and handled
// by the division node, which rounds identically.
//
// The dimension is the maximal variable index, or `dim` when given (must
// cover every index). A function with no variables is rejected.
FunctionSpec parse(const std::string& text);
FunctionSpec parse(const std::string& text, int dim);

// Plain value evaluation, with the same domain guards as jet evaluation.
double eval_value(const FunctionSpec& f, const std::vector<double>& x);

} // namespace calabi
