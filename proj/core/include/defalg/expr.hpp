#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "defalg/jet.hpp"

namespace defalg::expr {

// Closed-form scalar expressions over chart coordinates x1..xn (and, in
// state mode, velocities v1..vn mapped to slots n..2n-1). The grammar,
// associativity, and printing rules are documented in docs/expr-grammar.md;
// the load-bearing choices are:
//   - '^' is right-associative and binds tighter than '*', looser than a
//     leading sign on its base: -x1^2 parses as (-x1)^2,
//   - pi and e are named constants kept as distinct node kinds so printing
//     round-trips to a structurally identical tree,
//   - numbers print with %.17g.
enum class Builtin : std::uint8_t {
  Sin,
  Cos,
  Tan,
  Exp,
  Log,
  Sqrt,
  Sinh,
  Cosh,
  Tanh,
  Atan,
};

const char* builtin_name(Builtin f);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind : std::uint8_t {
    Number,
    Var,
    Pi,
    E,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Call,
  };

  Kind kind;
  double number = 0.0;  // Number
  int var = -1;         // Var: 0-based evaluation slot
  Builtin fn{};         // Call
  NodePtr a, b;         // operands (a only for Neg/Call)
};

class Expr {
 public:
  Expr(NodePtr root, int chart_dim, bool state)
      : root_(std::move(root)), chart_dim_(chart_dim), state_(state) {}

  const NodePtr& root() const { return root_; }

  int chart_dim() const { return chart_dim_; }

  // True when parsed with velocity aliases v1..vn (slots n..2n-1).
  bool state_mode() const { return state_; }

  // Number of evaluation slots an input vector must provide (n, or 2n in
  // state mode).
  int slots() const { return state_ ? 2 * chart_dim_ : chart_dim_; }

 private:
  NodePtr root_;
  int chart_dim_;
  bool state_;
};

// Parses over coordinates x1..xdim.
Expr parse(std::string_view text, int dim);

// Parses over x1..xn and v1..vn, with vk reading slot n+k-1 of the input.
Expr parse_state(std::string_view text, int chart_dim);

std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

// Expressions compiled to a flat postfix program. Value evaluation uses a
// fixed-size stack and performs no allocation; jet evaluation reuses a
// per-call jet stack.
class Compiled {
 public:
  struct Ins {
    std::uint8_t op;
    std::int32_t arg = 0;  // variable slot, builtin id, or integer exponent
    double c = 0.0;        // constant operand or real exponent
  };

  double value(std::span<const double> x) const;
  Jet2 jet(std::span<const double> x) const;

  int slots() const { return slots_; }
  const Expr& ast() const { return ast_; }
  int program_size() const { return static_cast<int>(code_.size()); }

 private:
  friend Compiled compile(const Expr& e);
  Compiled(Expr ast, std::vector<Ins> code, int slots, int depth);

  Expr ast_;
  std::vector<Ins> code_;
  int slots_;
  int depth_;
};

Compiled compile(const Expr& e);
Compiled compile(std::string_view text, int dim);
Compiled compile_state(std::string_view text, int chart_dim);

}  // namespace defalg::expr
