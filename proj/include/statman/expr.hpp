#pragma once

#include <memory>
#include <string>
#include <vector>

#include "statman/jet.hpp"

namespace statman {

/// Parsed expression over chart coordinates. Immutable, shareable.
class Expression {
  public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    Expression() = default;
    Expression(NodePtr root, int nvars, std::string source)
        : root_(std::move(root)), nvars_(nvars), source_(std::move(source)) {}

    Jet eval(const Point& p, int order) const;
    double value(const Point& p) const;
    int nvars() const { return nvars_; }
    const std::string& source() const { return source_; }
    bool valid() const { return root_ != nullptr; }

    /// Analytic jet field backed by this expression.
    ScalarField field() const;
    /// Value-only FD field, for the finite-difference jet strategy.
    ScalarField fd_field(double step_scale) const;

  private:
    NodePtr root_;
    int nvars_ = 0;
    std::string source_;
};

/// Parse `src` against the coordinate names (canonical aliases x1..xn are
/// always accepted). Precedence: ^ (right) > unary - > * / > + -.
/// Functions: sin cos exp log sqrt pow digamma trigamma.
Expression parse_expression(const std::string& src, const std::vector<std::string>& coords);
Expression parse_expression(const std::string& src, int nvars);

}  // namespace statman
