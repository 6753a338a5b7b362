#include "defalg/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "defalg/errors.hpp"

namespace defalg::expr {

namespace {

constexpr std::array<const char*, 10> kBuiltinNames = {
    "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh", "atan"};

// Tape opcodes. Stack effect: Const/Var push one, Neg/Call/PowInt/PowReal
// transform the top, the binary ops pop two and push one.
enum Op : std::uint8_t {
  kConst,
  kVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kPowInt,
  kPowReal,
  kPowDyn,
  kCall,
};

constexpr int kInlineStack = 128;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

struct VarSpec {
  int chart_dim = 0;
  bool state = false;
  int slots() const { return state ? 2 * chart_dim : chart_dim; }
};

struct Parser {
  std::string_view s;
  std::size_t pos = 0;
  VarSpec vars;

  void skip_ws() {
    while (pos < s.size() &&
           std::isspace(static_cast<unsigned char>(s[pos]))) {
      ++pos;
    }
  }

  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& expected, std::size_t at) {
    throw SyntaxError(expected, at);
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node({Node::Kind::Add, 0, -1, {}, lhs, parse_term()});
      } else if (accept('-')) {
        lhs = make_node({Node::Kind::Sub, 0, -1, {}, lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_power();
    for (;;) {
      if (accept('*')) {
        lhs = make_node({Node::Kind::Mul, 0, -1, {}, lhs, parse_power()});
      } else if (accept('/')) {
        lhs = make_node({Node::Kind::Div, 0, -1, {}, lhs, parse_power()});
      } else {
        return lhs;
      }
    }
  }

  // power := unary ('^' power)?   -- right-associative, and a leading sign
  // belongs to the base: -x1^2 is (-x1)^2.
  NodePtr parse_power() {
    NodePtr base = parse_unary();
    if (accept('^')) {
      return make_node({Node::Kind::Pow, 0, -1, {}, base, parse_power()});
    }
    return base;
  }

  NodePtr parse_unary() {
    skip_ws();
    if (pos < s.size() && s[pos] == '-') {
      ++pos;
      return make_node({Node::Kind::Neg, 0, -1, {}, parse_unary(), nullptr});
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= s.size()) fail("a value", pos);
    const char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!accept(')')) fail("')'", pos);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_identifier();
    }
    fail("a value", pos);
  }

  NodePtr parse_number() {
    const std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ++pos;
    }
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() &&
             std::isdigit(static_cast<unsigned char>(s[pos]))) {
        ++pos;
      }
    }
    if (pos == start || (pos == start + 1 && s[start] == '.')) {
      fail("a number", start);
    }
    // Exponent part only counts when digits actually follow it; otherwise a
    // trailing 'e' is a separate identifier token and the expression is left
    // to fail on the missing operator.
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
      std::size_t p = pos + 1;
      if (p < s.size() && (s[p] == '+' || s[p] == '-')) ++p;
      if (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
        pos = p;
        while (pos < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[pos]))) {
          ++pos;
        }
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data() + start, s.data() + pos, v);
    if (res.ec != std::errc{} || res.ptr != s.data() + pos) {
      fail("a number", start);
    }
    return make_node({Node::Kind::Number, v, -1, {}, nullptr, nullptr});
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) ||
            s[pos] == '_')) {
      ++pos;
    }
    const std::string name(s.substr(start, pos - start));
    if (name == "pi") {
      return make_node({Node::Kind::Pi, 0, -1, {}, nullptr, nullptr});
    }
    if (name == "e") {
      return make_node({Node::Kind::E, 0, -1, {}, nullptr, nullptr});
    }
    for (std::size_t i = 0; i < kBuiltinNames.size(); ++i) {
      if (name == kBuiltinNames[i]) {
        if (!accept('(')) fail("'(' after function name", pos);
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("')'", pos);
        Node n{Node::Kind::Call, 0, -1, static_cast<Builtin>(i), arg, nullptr};
        return make_node(std::move(n));
      }
    }
    const auto var_index = [&](char prefix) -> int {
      if (name.size() < 2 || name[0] != prefix) return -1;
      int k = 0;
      const auto res =
          std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (res.ec != std::errc{} || res.ptr != name.data() + name.size()) {
        return -1;
      }
      return k;
    };
    if (const int k = var_index('x'); k != -1) {
      if (k < 1 || k > vars.chart_dim) {
        throw VariableOutOfRange(name, vars.chart_dim, start);
      }
      return make_node({Node::Kind::Var, 0, k - 1, {}, nullptr, nullptr});
    }
    if (vars.state) {
      if (const int k = var_index('v'); k != -1) {
        if (k < 1 || k > vars.chart_dim) {
          throw VariableOutOfRange(name, vars.chart_dim, start);
        }
        return make_node(
            {Node::Kind::Var, 0, vars.chart_dim + k - 1, {}, nullptr, nullptr});
      }
    }
    throw UnknownIdentifier(name, start);
  }
};

Expr parse_with(std::string_view text, VarSpec vars) {
  if (vars.chart_dim < 1) {
    throw InvalidArgument("expression dimension must be at least 1");
  }
  Parser p{text, 0, vars};
  NodePtr root = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("end of input", p.pos);
  return Expr(std::move(root), vars.chart_dim, vars.state);
}

// --- printing --------------------------------------------------------------

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool is_additive(const Node& n) {
  return n.kind == Node::Kind::Add || n.kind == Node::Kind::Sub;
}

bool is_multiplicative(const Node& n) {
  return n.kind == Node::Kind::Mul || n.kind == Node::Kind::Div;
}

// Minimal-parenthesis printer. Parens are inserted exactly where re-parsing
// the output would otherwise build a different tree:
//   - the right operand of +,-,*,/ is parenthesized when it has the same or
//     lower precedence (the parser is left-associative),
//   - a power base keeps a leading '-' bare (the grammar gives (-x)^2) but
//     parenthesizes anything binary, including a nested power,
//   - a power exponent stays bare for '-' and nested powers (both re-parse
//     identically on the right of '^').
void print_with_names(const NodePtr& n, int chart_dim, bool state,
                      std::string& out);

void print_named_child(const NodePtr& c, bool parens, int chart_dim, bool state,
                       std::string& out) {
  if (parens) {
    out += '(';
    print_with_names(c, chart_dim, state, out);
    out += ')';
  } else {
    print_with_names(c, chart_dim, state, out);
  }
}

void print_with_names(const NodePtr& n, int chart_dim, bool state,
                      std::string& out) {
  switch (n->kind) {
    case Node::Kind::Number:
      out += format_number(n->number);
      return;
    case Node::Kind::Var:
      if (state && n->var >= chart_dim) {
        out += "v" + std::to_string(n->var - chart_dim + 1);
      } else {
        out += "x" + std::to_string(n->var + 1);
      }
      return;
    case Node::Kind::Pi:
      out += "pi";
      return;
    case Node::Kind::E:
      out += "e";
      return;
    case Node::Kind::Neg:
      out += '-';
      print_named_child(n->a,
                        is_additive(*n->a) || is_multiplicative(*n->a) ||
                            n->a->kind == Node::Kind::Pow,
                        chart_dim, state, out);
      return;
    case Node::Kind::Add:
      print_with_names(n->a, chart_dim, state, out);
      out += '+';
      print_named_child(n->b, is_additive(*n->b), chart_dim, state, out);
      return;
    case Node::Kind::Sub:
      print_with_names(n->a, chart_dim, state, out);
      out += '-';
      print_named_child(n->b, is_additive(*n->b), chart_dim, state, out);
      return;
    case Node::Kind::Mul:
      print_named_child(n->a, is_additive(*n->a), chart_dim, state, out);
      out += '*';
      print_named_child(n->b, is_additive(*n->b) || is_multiplicative(*n->b),
                        chart_dim, state, out);
      return;
    case Node::Kind::Div:
      print_named_child(n->a, is_additive(*n->a), chart_dim, state, out);
      out += '/';
      print_named_child(n->b, is_additive(*n->b) || is_multiplicative(*n->b),
                        chart_dim, state, out);
      return;
    case Node::Kind::Pow:
      print_named_child(n->a,
                        is_additive(*n->a) || is_multiplicative(*n->a) ||
                            n->a->kind == Node::Kind::Pow,
                        chart_dim, state, out);
      out += '^';
      print_named_child(n->b, is_additive(*n->b) || is_multiplicative(*n->b),
                        chart_dim, state, out);
      return;
    case Node::Kind::Call:
      out += builtin_name(n->fn);
      out += '(';
      print_with_names(n->a, chart_dim, state, out);
      out += ')';
      return;
  }
}

// --- compilation -----------------------------------------------------------

bool is_const_subtree(const NodePtr& n) {
  switch (n->kind) {
    case Node::Kind::Var:
      return false;
    case Node::Kind::Number:
    case Node::Kind::Pi:
    case Node::Kind::E:
      return true;
    case Node::Kind::Neg:
    case Node::Kind::Call:
      return is_const_subtree(n->a);
    default:
      return is_const_subtree(n->a) && is_const_subtree(n->b);
  }
}

double ipow(double x, long long n) {
  double r = 1.0, b = x;
  unsigned long long m = n < 0 ? static_cast<unsigned long long>(-n)
                               : static_cast<unsigned long long>(n);
  while (m) {
    if (m & 1ull) r *= b;
    b *= b;
    m >>= 1;
  }
  return n < 0 ? 1.0 / r : r;
}

double call_builtin(Builtin f, double x) {
  switch (f) {
    case Builtin::Sin:
      return std::sin(x);
    case Builtin::Cos:
      return std::cos(x);
    case Builtin::Tan:
      return std::tan(x);
    case Builtin::Exp:
      return std::exp(x);
    case Builtin::Log:
      if (x <= 0.0) throw DomainError("log", x);
      return std::log(x);
    case Builtin::Sqrt:
      if (x <= 0.0) throw DomainError("sqrt", x);
      return std::sqrt(x);
    case Builtin::Sinh:
      return std::sinh(x);
    case Builtin::Cosh:
      return std::cosh(x);
    case Builtin::Tanh:
      return std::tanh(x);
    case Builtin::Atan:
      return std::atan(x);
  }
  throw InvalidArgument("unknown builtin");
}

Jet2 call_builtin_jet(Builtin f, const Jet2& x) {
  switch (f) {
    case Builtin::Sin:
      return jet_sin(x);
    case Builtin::Cos:
      return jet_cos(x);
    case Builtin::Tan:
      return jet_tan(x);
    case Builtin::Exp:
      return jet_exp(x);
    case Builtin::Log:
      return jet_log(x);
    case Builtin::Sqrt:
      return jet_sqrt(x);
    case Builtin::Sinh:
      return jet_sinh(x);
    case Builtin::Cosh:
      return jet_cosh(x);
    case Builtin::Tanh:
      return jet_tanh(x);
    case Builtin::Atan:
      return jet_atan(x);
  }
  throw InvalidArgument("unknown builtin");
}

double eval_const(const NodePtr& n) {
  switch (n->kind) {
    case Node::Kind::Number:
      return n->number;
    case Node::Kind::Pi:
      return std::numbers::pi;
    case Node::Kind::E:
      return std::numbers::e;
    case Node::Kind::Neg:
      return -eval_const(n->a);
    case Node::Kind::Add:
      return eval_const(n->a) + eval_const(n->b);
    case Node::Kind::Sub:
      return eval_const(n->a) - eval_const(n->b);
    case Node::Kind::Mul:
      return eval_const(n->a) * eval_const(n->b);
    case Node::Kind::Div: {
      const double d = eval_const(n->b);
      if (d == 0.0) throw DomainError("/", 0.0);
      return eval_const(n->a) / d;
    }
    case Node::Kind::Pow: {
      const double b = eval_const(n->a), e = eval_const(n->b);
      const long long k = std::llround(e);
      if (std::abs(e - static_cast<double>(k)) <=
              1e-12 * std::max(1.0, std::abs(e)) &&
          std::llabs(k) <= 64) {
        if (k < 0 && b == 0.0) throw DomainError("^", 0.0);
        return ipow(b, k);
      }
      if (b <= 0.0) throw DomainError("^", b);
      return std::pow(b, e);
    }
    case Node::Kind::Call:
      return call_builtin(n->fn, eval_const(n->a));
    case Node::Kind::Var:
      break;
  }
  throw InvalidArgument("constant evaluation reached a variable");
}

struct Emitter {
  std::vector<Compiled::Ins> code;
  int depth = 0;
  int max_depth = 0;

  void push_effect() {
    ++depth;
    if (depth > max_depth) max_depth = depth;
  }

  void emit(const NodePtr& n) {
    if (n->kind != Node::Kind::Number && is_const_subtree(n)) {
      code.push_back({kConst, 0, eval_const(n)});
      push_effect();
      return;
    }
    switch (n->kind) {
      case Node::Kind::Number:
        code.push_back({kConst, 0, n->number});
        push_effect();
        return;
      case Node::Kind::Var:
        code.push_back({kVar, n->var, 0.0});
        push_effect();
        return;
      case Node::Kind::Neg:
        emit(n->a);
        code.push_back({kNeg, 0, 0.0});
        return;
      case Node::Kind::Add:
        emit(n->a);
        emit(n->b);
        code.push_back({kAdd, 0, 0.0});
        --depth;
        return;
      case Node::Kind::Sub:
        emit(n->a);
        emit(n->b);
        code.push_back({kSub, 0, 0.0});
        --depth;
        return;
      case Node::Kind::Mul:
        emit(n->a);
        emit(n->b);
        code.push_back({kMul, 0, 0.0});
        --depth;
        return;
      case Node::Kind::Div:
        emit(n->a);
        emit(n->b);
        code.push_back({kDiv, 0, 0.0});
        --depth;
        return;
      case Node::Kind::Pow: {
        // A constant exponent selects a specialized power op at compile
        // time: integer powers stay valid for negative bases, real powers
        // demand a positive base, and only a truly varying exponent pays
        // for exp(b log a).
        if (is_const_subtree(n->b)) {
          const double e = eval_const(n->b);
          const long long k = std::llround(e);
          emit(n->a);
          if (std::abs(e - static_cast<double>(k)) <=
                  1e-12 * std::max(1.0, std::abs(e)) &&
              std::llabs(k) <= 64) {
            code.push_back({kPowInt, static_cast<std::int32_t>(k), 0.0});
          } else {
            code.push_back({kPowReal, 0, e});
          }
          return;
        }
        emit(n->a);
        emit(n->b);
        code.push_back({kPowDyn, 0, 0.0});
        --depth;
        return;
      }
      case Node::Kind::Call:
        emit(n->a);
        code.push_back({kCall, static_cast<std::int32_t>(n->fn), 0.0});
        return;
      case Node::Kind::Pi:
      case Node::Kind::E:
        // Handled by the constant fold above.
        code.push_back({kConst, 0, eval_const(n)});
        push_effect();
        return;
    }
  }
};

double run_value(const std::vector<Compiled::Ins>& code,
                 std::span<const double> x, double* stack) {
  int sp = 0;
  for (const auto& ins : code) {
    switch (ins.op) {
      case kConst:
        stack[sp++] = ins.c;
        break;
      case kVar:
        stack[sp++] = x[static_cast<std::size_t>(ins.arg)];
        break;
      case kAdd:
        --sp;
        stack[sp - 1] += stack[sp];
        break;
      case kSub:
        --sp;
        stack[sp - 1] -= stack[sp];
        break;
      case kMul:
        --sp;
        stack[sp - 1] *= stack[sp];
        break;
      case kDiv:
        --sp;
        if (stack[sp] == 0.0) throw DomainError("/", 0.0);
        stack[sp - 1] /= stack[sp];
        break;
      case kNeg:
        stack[sp - 1] = -stack[sp - 1];
        break;
      case kPowInt: {
        double& b = stack[sp - 1];
        if (ins.arg < 0 && b == 0.0) throw DomainError("^", 0.0);
        b = ipow(b, ins.arg);
        break;
      }
      case kPowReal: {
        double& b = stack[sp - 1];
        if (b <= 0.0) throw DomainError("^", b);
        b = std::pow(b, ins.c);
        break;
      }
      case kPowDyn: {
        --sp;
        double& b = stack[sp - 1];
        if (b <= 0.0) throw DomainError("^", b);
        b = std::pow(b, stack[sp]);
        break;
      }
      case kCall:
        stack[sp - 1] =
            call_builtin(static_cast<Builtin>(ins.arg), stack[sp - 1]);
        break;
    }
  }
  return stack[0];
}

}  // namespace

const char* builtin_name(Builtin f) {
  return kBuiltinNames[static_cast<std::size_t>(f)];
}

Expr parse(std::string_view text, int dim) {
  return parse_with(text, VarSpec{dim, false});
}

Expr parse_state(std::string_view text, int chart_dim) {
  return parse_with(text, VarSpec{chart_dim, true});
}

std::string to_string(const Expr& e) {
  std::string out;
  print_with_names(e.root(), e.chart_dim(), e.state_mode(), out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  const auto eq = [](const NodePtr& x, const NodePtr& y, auto&& self) -> bool {
    if (!x || !y) return !x && !y;
    if (x->kind != y->kind) return false;
    switch (x->kind) {
      case Node::Kind::Number:
        return x->number == y->number;
      case Node::Kind::Var:
        return x->var == y->var;
      case Node::Kind::Pi:
      case Node::Kind::E:
        return true;
      case Node::Kind::Call:
        if (x->fn != y->fn) return false;
        return self(x->a, y->a, self);
      case Node::Kind::Neg:
        return self(x->a, y->a, self);
      default:
        return self(x->a, y->a, self) && self(x->b, y->b, self);
    }
  };
  return eq(a.root(), b.root(), eq);
}

Compiled::Compiled(Expr ast, std::vector<Ins> code, int slots, int depth)
    : ast_(std::move(ast)), code_(std::move(code)), slots_(slots),
      depth_(depth) {}

Compiled compile(const Expr& e) {
  Emitter em;
  em.emit(e.root());
  return Compiled(e, std::move(em.code), e.slots(), em.max_depth);
}

Compiled compile(std::string_view text, int dim) {
  return compile(parse(text, dim));
}

Compiled compile_state(std::string_view text, int chart_dim) {
  return compile(parse_state(text, chart_dim));
}

double Compiled::value(std::span<const double> x) const {
  if (static_cast<int>(x.size()) < slots_) {
    throw InvalidArgument("expression expects " + std::to_string(slots_) +
                          " input slots, got " + std::to_string(x.size()));
  }
  if (depth_ <= kInlineStack) {
    double stack[kInlineStack];
    return run_value(code_, x, stack);
  }
  std::vector<double> stack(static_cast<std::size_t>(depth_));
  return run_value(code_, x, stack.data());
}

Jet2 Compiled::jet(std::span<const double> x) const {
  if (static_cast<int>(x.size()) < slots_) {
    throw InvalidArgument("expression expects " + std::to_string(slots_) +
                          " input slots, got " + std::to_string(x.size()));
  }
  const int n = slots_;
  std::vector<Jet2> stack;
  stack.reserve(static_cast<std::size_t>(depth_));
  for (const auto& ins : code_) {
    switch (ins.op) {
      case kConst:
        stack.push_back(Jet2::constant(n, ins.c));
        break;
      case kVar:
        stack.push_back(Jet2::variable(n, ins.arg, x[ins.arg]));
        break;
      case kAdd: {
        Jet2 b = std::move(stack.back());
        stack.pop_back();
        stack.back() = stack.back() + b;
        break;
      }
      case kSub: {
        Jet2 b = std::move(stack.back());
        stack.pop_back();
        stack.back() = stack.back() - b;
        break;
      }
      case kMul: {
        Jet2 b = std::move(stack.back());
        stack.pop_back();
        stack.back() = stack.back() * b;
        break;
      }
      case kDiv: {
        Jet2 b = std::move(stack.back());
        stack.pop_back();
        stack.back() = stack.back() / b;
        break;
      }
      case kNeg:
        stack.back() = -stack.back();
        break;
      case kPowInt:
        stack.back() = jet_pow_int(stack.back(), ins.arg);
        break;
      case kPowReal:
        stack.back() = jet_pow_real(stack.back(), ins.c);
        break;
      case kPowDyn: {
        Jet2 b = std::move(stack.back());
        stack.pop_back();
        stack.back() = jet_pow(stack.back(), b);
        break;
      }
      case kCall:
        stack.back() = call_builtin_jet(static_cast<Builtin>(ins.arg),
                                        stack.back());
        break;
    }
  }
  return stack.front();
}

}  // namespace defalg::expr
