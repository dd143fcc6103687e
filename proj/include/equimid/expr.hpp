#pragma once

// Expression language for scalar fields over variables t1..tn.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := unary ("^" factor)?
//   unary  := "-" unary | atom
//   atom   := NUMBER | VAR | FUNC "(" [expr ("," expr)*] ")" | "(" expr ")"
//   VAR    := "t" [1-9][0-9]*
//   FUNC   := sqrt | exp | log | abs | min | max | norm2
//
// norm2() with no arguments is t1^2 + ... + tn^2; with arguments it is the
// sum of their squares. The unicode minus sign is accepted for "-".
//
// Trees are stored in post-order, so evaluation is a single stack pass and
// works for any scalar type with the usual arithmetic (double, Dual<...>).

#include "equimid/dual.hpp"
#include "equimid/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace equimid {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sqrt, Exp, Log, Abs, Min, Max, Norm2 };

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // literal, or the folded value of a constant subtree
  int index = 0;       // 0-based variable index for Var, argument count for n-ary ops
  bool constant = false;  // subtree has no variables
  bool constant_exponent = false;
};

class Expr {
 public:
  Expr() = default;

  /// Parses `source` over `dimension` variables. Throws SyntaxError or
  /// DimensionError.
  static Expr parse(std::string_view source, int dimension);

  static Expr constant(double value, int dimension) {
    Expr e;
    e.dimension_ = dimension;
    e.push({Op::Const, value, 0, true, false}, 0);
    return e;
  }

  /// Applies an n-ary function (Min, Max or Norm2) to a list of subtrees.
  static Expr combine(Op op, std::span<const Expr> args);

  int dimension() const { return dimension_; }
  std::span<const Node> nodes() const { return nodes_; }

  /// False when the tree contains abs, min or max.
  bool smooth() const {
    return std::none_of(nodes_.begin(), nodes_.end(), [](const Node& n) {
      return n.op == Op::Abs || n.op == Op::Min || n.op == Op::Max;
    });
  }

  template <typename T>
  T evaluate(std::span<const T> t) const;

  /// Renders the tree in the grammar above; re-parsing yields a tree with
  /// identical evaluation.
  std::string to_string() const;

 private:
  void push(const Node& node, int popped) {
    nodes_.push_back(node);
    depth_ += 1 - popped;
    max_depth_ = std::max(max_depth_, depth_);
  }

  friend class ExprParser;

  std::vector<Node> nodes_;
  int dimension_ = 0;
  int depth_ = 0;
  int max_depth_ = 0;
};

namespace detail {

inline int arity(const Node& n) {
  switch (n.op) {
    case Op::Const:
    case Op::Var:
      return 0;
    case Op::Neg:
    case Op::Sqrt:
    case Op::Exp:
    case Op::Log:
    case Op::Abs:
      return 1;
    case Op::Min:
    case Op::Max:
    case Op::Norm2:
      return n.index;
    default:
      return 2;
  }
}

template <typename T>
T square(const T& x) {
  return x * x;
}

inline double fold(Op op, std::span<const double> a) {
  switch (op) {
    case Op::Add: return a[0] + a[1];
    case Op::Sub: return a[0] - a[1];
    case Op::Mul: return a[0] * a[1];
    case Op::Div: return a[0] / a[1];
    case Op::Pow: return std::pow(a[0], a[1]);
    case Op::Neg: return -a[0];
    case Op::Sqrt: return std::sqrt(a[0]);
    case Op::Exp: return std::exp(a[0]);
    case Op::Log: return std::log(a[0]);
    case Op::Abs: return std::abs(a[0]);
    case Op::Min: return *std::min_element(a.begin(), a.end());
    case Op::Max: return *std::max_element(a.begin(), a.end());
    case Op::Norm2: {
      double s = 0.0;
      for (double x : a) s += x * x;
      return s;
    }
    default: return 0.0;
  }
}

}  // namespace detail

template <typename T>
T Expr::evaluate(std::span<const T> t) const {
  using std::abs;
  using std::exp;
  using std::log;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  if (static_cast<int>(t.size()) != dimension_)
    throw DimensionError("expression over " + std::to_string(dimension_) + " variables evaluated at a point of dimension " +
                         std::to_string(t.size()));

  std::vector<T> stack;
  stack.reserve(static_cast<std::size_t>(max_depth_));
  for (const Node& n : nodes_) {
    switch (n.op) {
      case Op::Const:
        stack.push_back(T(n.value));
        break;
      case Op::Var:
        stack.push_back(t[static_cast<std::size_t>(n.index)]);
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Pow: {
        T rhs = std::move(stack.back());
        stack.pop_back();
        T& lhs = stack.back();
        if (n.op == Op::Add) lhs = lhs + rhs;
        else if (n.op == Op::Sub) lhs = lhs - rhs;
        else if (n.op == Op::Mul) lhs = lhs * rhs;
        else if (n.op == Op::Div) lhs = lhs / rhs;
        else if (n.constant_exponent) lhs = pow(lhs, primal(rhs));
        else lhs = pow(lhs, rhs);
        break;
      }
      case Op::Neg: stack.back() = -stack.back(); break;
      case Op::Sqrt: stack.back() = sqrt(stack.back()); break;
      case Op::Exp: stack.back() = exp(stack.back()); break;
      case Op::Log: stack.back() = log(stack.back()); break;
      case Op::Abs: stack.back() = abs(stack.back()); break;
      case Op::Min:
      case Op::Max: {
        const auto first = stack.end() - n.index;
        T acc = *first;
        for (auto it = first + 1; it != stack.end(); ++it) acc = n.op == Op::Min ? T(min(acc, *it)) : T(max(acc, *it));
        stack.erase(first, stack.end());
        stack.push_back(std::move(acc));
        break;
      }
      case Op::Norm2: {
        if (n.index == 0) {
          T acc(0.0);
          for (const T& x : t) acc = acc + detail::square(x);
          stack.push_back(std::move(acc));
        } else {
          const auto first = stack.end() - n.index;
          T acc(0.0);
          for (auto it = first; it != stack.end(); ++it) acc = acc + detail::square(*it);
          stack.erase(first, stack.end());
          stack.push_back(std::move(acc));
        }
        break;
      }
    }
  }
  return stack.back();
}

class ExprParser {
 public:
  ExprParser(std::string_view src, int dimension) : src_(src) { out_.dimension_ = dimension; }

  Expr run() {
    if (out_.dimension_ < 1) throw DimensionError("dimension must be at least 1");
    skip_space();
    if (pos_ >= src_.size()) fail("expression", "empty expression");
    parse_expr();
    skip_space();
    if (pos_ < src_.size()) fail("operator or end of input", "unexpected trailing input");
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& expected, const std::string& message) const {
    throw SyntaxError(pos_, expected, message);
  }

  void skip_space() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  // Consumes a minus sign, ASCII or U+2212.
  bool eat_minus() {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '-') {
      ++pos_;
      return true;
    }
    if (src_.substr(pos_, 3) == "\xE2\x88\x92") {
      pos_ += 3;
      return true;
    }
    return false;
  }

  bool eat(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op, int popped, int index = 0) {
    Node n{op, 0.0, index, true, false};
    const auto& nodes = out_.nodes_;
    // Children occupy the tail of the post-order array; collect their
    // constant values by walking back over whole subtrees.
    std::vector<double> values(static_cast<std::size_t>(popped));
    std::size_t end = nodes.size();
    for (int k = popped - 1; k >= 0; --k) {
      std::size_t root = end - 1;
      values[static_cast<std::size_t>(k)] = nodes[root].value;
      n.constant = n.constant && nodes[root].constant;
      end = subtree_begin(root);
    }
    if (op == Op::Pow) {
      const Node& exponent = nodes.back();
      n.constant_exponent = exponent.constant;
    }
    if (op == Op::Norm2 && popped == 0) n.constant = false;
    if (n.constant) n.value = detail::fold(op, values);
    out_.push(n, popped);
  }

  std::size_t subtree_begin(std::size_t root) const {
    int need = 1;
    std::size_t i = root + 1;
    while (need > 0) {
      --i;
      need += detail::arity(out_.nodes_[i]) - 1;
    }
    return i;
  }

  void parse_expr() {
    parse_term();
    for (;;) {
      if (eat('+')) {
        parse_term();
        emit(Op::Add, 2);
      } else if (eat_minus()) {
        parse_term();
        emit(Op::Sub, 2);
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_factor();
    for (;;) {
      if (eat('*')) {
        parse_factor();
        emit(Op::Mul, 2);
      } else if (eat('/')) {
        parse_factor();
        emit(Op::Div, 2);
      } else {
        return;
      }
    }
  }

  void parse_factor() {
    parse_unary();
    if (eat('^')) {
      parse_factor();
      emit(Op::Pow, 2);
    }
  }

  void parse_unary() {
    if (eat_minus()) {
      parse_unary();
      emit(Op::Neg, 1);
    } else {
      parse_atom();
    }
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  void parse_atom() {
    skip_space();
    constexpr const char* kAtom = "number, variable, function or '('";
    if (pos_ >= src_.size()) fail(kAtom, "unexpected end of input");
    const char c = src_[pos_];
    if (is_digit(c) || c == '.') {
      parse_number();
    } else if (is_alpha(c)) {
      parse_identifier();
    } else if (c == '(') {
      ++pos_;
      parse_expr();
      if (!eat(')')) fail("')'", "unbalanced parenthesis");
    } else {
      fail(kAtom, "unexpected character");
    }
  }

  void parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && is_digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const auto* first = src_.data() + start;
    const auto* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      pos_ = start;
      fail("number", "malformed number");
    }
    out_.push({Op::Const, value, 0, true, false}, 0);
  }

  void parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 't' && std::all_of(name.begin() + 1, name.end(), is_digit)) {
      if (name[1] == '0') {
        pos_ = start;
        fail("variable t1..tn", "variable indices start at 1");
      }
      long index = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (index > out_.dimension_ || name.size() > 10)
        throw DimensionError("variable " + std::string(name) + " at position " + std::to_string(start) +
                             " exceeds dimension " + std::to_string(out_.dimension_));
      out_.push({Op::Var, 0.0, static_cast<int>(index - 1), false, false}, 0);
      return;
    }

    Op op{};
    int min_args = 1;
    int max_args = 1;
    if (name == "sqrt") op = Op::Sqrt;
    else if (name == "exp") op = Op::Exp;
    else if (name == "log") op = Op::Log;
    else if (name == "abs") op = Op::Abs;
    else if (name == "min") op = Op::Min, max_args = -1;
    else if (name == "max") op = Op::Max, max_args = -1;
    else if (name == "norm2") op = Op::Norm2, min_args = 0, max_args = -1;
    else {
      pos_ = start;
      fail("variable t1..tn or one of sqrt, exp, log, abs, min, max, norm2", "unknown identifier '" + std::string(name) + "'");
    }

    if (!eat('(')) fail("'('", "function name without argument list");
    int count = 0;
    if (!eat(')')) {
      do {
        parse_expr();
        ++count;
      } while (eat(','));
      if (!eat(')')) fail("',' or ')'", "unterminated argument list");
    }
    if (count < min_args || (max_args >= 0 && count > max_args)) {
      pos_ = start;
      fail(max_args < 0 ? "at least " + std::to_string(min_args) + " argument(s)" : "exactly 1 argument",
           "wrong number of arguments to " + std::string(name));
    }
    emit(op, count, detail::arity(Node{op}) == 1 ? 0 : count);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Expr out_;
};

inline Expr Expr::parse(std::string_view source, int dimension) { return ExprParser(source, dimension).run(); }

inline Expr Expr::combine(Op op, std::span<const Expr> args) {
  if (op != Op::Min && op != Op::Max && op != Op::Norm2) throw Error("combine expects min, max or norm2");
  if (args.empty() && op != Op::Norm2) throw EmptyFamily("combine needs at least one operand");
  Expr out;
  out.dimension_ = args.empty() ? 0 : args.front().dimension_;
  bool constant = !args.empty();
  std::vector<double> values;
  for (const Expr& a : args) {
    if (a.dimension_ != out.dimension_) throw DimensionError("combined expressions differ in dimension");
    for (const Node& n : a.nodes_) out.push(n, detail::arity(n));
    constant = constant && a.nodes_.back().constant;
    values.push_back(a.nodes_.back().value);
  }
  Node n{op, 0.0, static_cast<int>(args.size()), constant, false};
  if (constant) n.value = detail::fold(op, values);
  out.push(n, static_cast<int>(args.size()));
  return out;
}

namespace detail {

// Binding strength used by the printer; higher binds tighter.
inline int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline std::string Expr::to_string() const {
  struct Piece {
    std::string text;
    Op op;
  };
  std::vector<Piece> stack;
  auto wrap = [](const Piece& p, bool paren) { return paren ? "(" + p.text + ")" : p.text; };

  for (const Node& n : nodes_) {
    const int k = detail::arity(n);
    std::vector<Piece> args(stack.end() - k, stack.end());
    stack.erase(stack.end() - k, stack.end());
    Piece out{"", n.op};
    switch (n.op) {
      case Op::Const: out.text = detail::format_number(n.value); break;
      case Op::Var: out.text = "t" + std::to_string(n.index + 1); break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: {
        const int p = detail::precedence(n.op);
        const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
        out.text = wrap(args[0], detail::precedence(args[0].op) < p) + sym +
                   wrap(args[1], detail::precedence(args[1].op) <= p);
        break;
      }
      case Op::Pow: {
        // Base must be a unary (negation or atom); exponent may be any factor.
        const bool base_paren = args[0].op == Op::Pow || detail::precedence(args[0].op) < 3;
        out.text = wrap(args[0], base_paren) + "^" + wrap(args[1], detail::precedence(args[1].op) < 3);
        break;
      }
      case Op::Neg: {
        const bool paren = args[0].op == Op::Pow || detail::precedence(args[0].op) < 3;
        out.text = "-" + wrap(args[0], paren);
        break;
      }
      default: {
        const char* name = n.op == Op::Sqrt ? "sqrt"
                           : n.op == Op::Exp ? "exp"
                           : n.op == Op::Log ? "log"
                           : n.op == Op::Abs ? "abs"
                           : n.op == Op::Min ? "min"
                           : n.op == Op::Max ? "max"
                                             : "norm2";
        out.text = std::string(name) + "(";
        for (std::size_t i = 0; i < args.size(); ++i) out.text += (i ? ", " : "") + args[i].text;
        out.text += ")";
      }
    }
    stack.push_back(std::move(out));
  }
  return stack.empty() ? std::string() : stack.back().text;
}

}  // namespace equimid
