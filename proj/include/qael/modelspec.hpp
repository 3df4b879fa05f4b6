// Copyright 2026 The qael developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAEL_MODELSPEC_HPP
#define QAEL_MODELSPEC_HPP

// Model-definition files: a small operator-expression language plus a JSON
// container binding two generators (fast and slow), the timescale parameter
// and numerical options.
//
// Grammar:
//   expr    := term (("+"|"-") term)*
//   term    := unary ("*" unary)*
//   unary   := "-" unary | postfix
//   postfix := atom ("'")*
//   atom    := number | name "(" args ")" | name | "(" expr ")"
// Numbers are decimal literals with an optional "i" suffix. The dagger '
// binds tightest; * binds over +/-; operators associate left.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qael/operators.hpp"

namespace qael::modelspec {

using json = nlohmann::ordered_json;

struct ParseError : Error {
  int line = 0, col = 0;
  ParseError(int line_, int col_, const std::string& msg)
      : Error("parse error at line " + std::to_string(line_) + ", col " +
              std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

struct SchemaError : Error {
  using Error::Error;
};

struct EvalError : Error {
  using Error::Error;
};

//===========================================================================
// AST
//===========================================================================

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Name, Call, Unary, Binary, Dagger };
  Kind kind;
  Complex value{};            // Number
  std::string name;           // Name, Call
  char op = 0;                // Binary: '+', '-', '*'
  std::vector<ExprPtr> args;  // Call arguments, Binary operands, Unary/Dagger child
};

inline ExprPtr make_number(Complex v) {
  return std::make_shared<Expr>(Expr{Expr::Kind::Number, v, {}, 0, {}});
}
inline ExprPtr make_name(std::string n) {
  return std::make_shared<Expr>(
      Expr{Expr::Kind::Name, {}, std::move(n), 0, {}});
}
inline ExprPtr make_call(std::string n, std::vector<ExprPtr> args) {
  return std::make_shared<Expr>(
      Expr{Expr::Kind::Call, {}, std::move(n), 0, std::move(args)});
}
inline ExprPtr make_unary(ExprPtr child) {
  return std::make_shared<Expr>(
      Expr{Expr::Kind::Unary, {}, {}, '-', {std::move(child)}});
}
inline ExprPtr make_binary(char op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Expr>(Expr{
      Expr::Kind::Binary, {}, {}, op, {std::move(lhs), std::move(rhs)}});
}
inline ExprPtr make_dagger(ExprPtr child) {
  return std::make_shared<Expr>(
      Expr{Expr::Kind::Dagger, {}, {}, 0, {std::move(child)}});
}

inline bool ast_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.op != b.op || a.name != b.name ||
      a.args.size() != b.args.size())
    return false;
  if (a.kind == Expr::Kind::Number && a.value != b.value) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!ast_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

// Builtins callable with parentheses, name -> arity.
inline const std::map<std::string, int>& call_builtins() {
  static const std::map<std::string, int> table = {
      {"eye", 1},   {"destroy", 1}, {"create", 1},   {"num", 1},
      {"basis", 3}, {"kron", 2},    {"displace", 2},
  };
  return table;
}

// Builtins used as bare names (two-level operators).
inline const std::set<std::string>& name_builtins() {
  static const std::set<std::string> table = {"sigmax", "sigmay", "sigmaz",
                                              "sigmap", "sigmam"};
  return table;
}

//===========================================================================
// Lexer / parser
//===========================================================================

namespace detail_parse {

struct Token {
  enum class Kind {
    Number, Name, Plus, Minus, Star, Dagger, LParen, RParen, Comma, End
  };
  Kind kind;
  Complex value{};
  std::string text;
  int line = 1, col = 1;
};

inline const char* token_name(Token::Kind k) {
  switch (k) {
    case Token::Kind::Number: return "number";
    case Token::Kind::Name: return "name";
    case Token::Kind::Plus: return "'+'";
    case Token::Kind::Minus: return "'-'";
    case Token::Kind::Star: return "'*'";
    case Token::Kind::Dagger: return "'''";
    case Token::Kind::LParen: return "'('";
    case Token::Kind::RParen: return "')'";
    case Token::Kind::Comma: return "','";
    case Token::Kind::End: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      bump();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': tok_.kind = Token::Kind::Plus; bump(); return;
      case '-': tok_.kind = Token::Kind::Minus; bump(); return;
      case '*': tok_.kind = Token::Kind::Star; bump(); return;
      case '\'': tok_.kind = Token::Kind::Dagger; bump(); return;
      case '(': tok_.kind = Token::Kind::LParen; bump(); return;
      case ')': tok_.kind = Token::Kind::RParen; bump(); return;
      case ',': tok_.kind = Token::Kind::Comma; bump(); return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        name += src_[pos_];
        bump();
      }
      tok_.kind = Token::Kind::Name;
      tok_.text = std::move(name);
      return;
    }
    throw ParseError(line_, col_,
                     std::string("unexpected character '") + c + "'");
  }

  void lex_number() {
    std::string digits;
    auto take_digits = [&] {
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits += src_[pos_];
        bump();
      }
    };
    take_digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      digits += '.';
      bump();
      take_digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      // Exponent only if followed by digits (possibly signed); otherwise the
      // 'e' starts a name.
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-'))
        ++look;
      if (look < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[look]))) {
        digits += src_[pos_];
        bump();
        if (src_[pos_] == '+' || src_[pos_] == '-') {
          digits += src_[pos_];
          bump();
        }
        take_digits();
      }
    }
    double v = 0;
    try {
      v = std::stod(digits);
    } catch (const std::exception&) {
      throw ParseError(tok_.line, tok_.col, "malformed number '" + digits + "'");
    }
    bool imaginary = false;
    if (pos_ < src_.size() && src_[pos_] == 'i') {
      const std::size_t after = pos_ + 1;
      const bool name_continues =
          after < src_.size() &&
          (std::isalnum(static_cast<unsigned char>(src_[after])) ||
           src_[after] == '_');
      if (!name_continues) {
        imaginary = true;
        bump();
      }
    }
    tok_.kind = Token::Kind::Number;
    tok_.value = imaginary ? Complex(0.0, v) : Complex(v, 0.0);
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    expect(Token::Kind::End);
    return e;
  }

 private:
  using Kind = Token::Kind;

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (lex_.peek().kind == Kind::Plus || lex_.peek().kind == Kind::Minus) {
      const char op = lex_.next().kind == Kind::Plus ? '+' : '-';
      lhs = make_binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (lex_.peek().kind == Kind::Star) {
      lex_.next();
      lhs = make_binary('*', std::move(lhs), unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    if (lex_.peek().kind == Kind::Minus) {
      lex_.next();
      return make_unary(unary());
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = atom();
    while (lex_.peek().kind == Kind::Dagger) {
      lex_.next();
      e = make_dagger(std::move(e));
    }
    return e;
  }

  ExprPtr atom() {
    const Token t = lex_.peek();
    switch (t.kind) {
      case Kind::Number:
        lex_.next();
        return make_number(t.value);
      case Kind::Name: {
        lex_.next();
        if (lex_.peek().kind == Kind::LParen) {
          lex_.next();
          std::vector<ExprPtr> args;
          args.push_back(expr());
          while (lex_.peek().kind == Kind::Comma) {
            lex_.next();
            args.push_back(expr());
          }
          expect(Kind::RParen);
          auto it = call_builtins().find(t.text);
          if (it == call_builtins().end())
            throw ParseError(t.line, t.col,
                             "unknown builtin '" + t.text + "'");
          if (it->second != static_cast<int>(args.size()))
            throw ParseError(t.line, t.col,
                             "builtin '" + t.text + "' expects " +
                                 std::to_string(it->second) +
                                 " argument(s), got " +
                                 std::to_string(args.size()));
          return make_call(t.text, std::move(args));
        }
        return make_name(t.text);
      }
      case Kind::LParen: {
        lex_.next();
        ExprPtr e = expr();
        expect(Kind::RParen);
        return e;
      }
      default:
        throw ParseError(t.line, t.col,
                         std::string("expected number, name or '(', got ") +
                             token_name(t.kind));
    }
  }

  void expect(Kind k) {
    const Token t = lex_.peek();
    if (t.kind != k)
      throw ParseError(t.line, t.col, std::string("expected ") +
                                          token_name(k) + ", got " +
                                          token_name(t.kind));
    lex_.next();
  }

  Lexer lex_;
};

}  // namespace detail_parse

inline ExprPtr parse_expression(std::string_view src) {
  if (src.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError(1, 1, "empty expression");
  return detail_parse::Parser(src).parse();
}

//===========================================================================
// Printing
//===========================================================================

namespace detail_print {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Precedence: additive 1, multiplicative 2, unary 3, postfix 4, atom 5.
inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary: return e.op == '*' ? 2 : 1;
    case Expr::Kind::Unary: return 3;
    case Expr::Kind::Dagger: return 4;
    default: return 5;
  }
}

inline void print_node(const Expr& e, int min_prec, std::string& out) {
  const int prec = precedence(e);
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case Expr::Kind::Number:
      if (e.value.imag() == 0.0) {
        out += fmt(e.value.real());
      } else if (e.value.real() == 0.0) {
        out += fmt(e.value.imag());
        out += 'i';
      } else {
        out += '(';
        out += fmt(e.value.real());
        out += '+';
        out += fmt(e.value.imag());
        out += "i)";
      }
      break;
    case Expr::Kind::Name:
      out += e.name;
      break;
    case Expr::Kind::Call: {
      out += e.name;
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*e.args[i], 1, out);
      }
      out += ')';
      break;
    }
    case Expr::Kind::Unary:
      out += '-';
      print_node(*e.args[0], 3, out);
      break;
    case Expr::Kind::Dagger:
      print_node(*e.args[0], 4, out);
      out += '\'';
      break;
    case Expr::Kind::Binary: {
      print_node(*e.args[0], prec, out);
      out += e.op;
      print_node(*e.args[1], prec + 1, out);
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace detail_print

inline std::string print_expression(const Expr& e) {
  std::string out;
  detail_print::print_node(e, 1, out);
  return out;
}

//===========================================================================
// Evaluation
//===========================================================================

// Evaluation produces either a scalar or an operator; scalars promote to
// s * I only at the top level, where the target dimension is known.
struct Value {
  bool is_scalar = true;
  Complex s{};
  Operator m;
};

namespace detail_eval {

struct Context {
  const std::map<std::string, std::string>* symbols = nullptr;
  std::map<std::string, ExprPtr> parsed;
  std::map<std::string, Value> cache;
  std::set<std::string> in_progress;
};

inline Value eval(const Expr& e, Context& ctx);

inline Index as_index(const Value& v, const char* what) {
  Complex c;
  if (v.is_scalar) c = v.s;
  else if (v.m.rows() == 1 && v.m.cols() == 1) c = v.m(0, 0);
  else throw EvalError(std::string(what) + " must be a scalar integer");
  if (std::abs(c.imag()) > 1e-9)
    throw EvalError(std::string(what) + " must be real");
  const double r = std::round(c.real());
  if (std::abs(c.real() - r) > 1e-9)
    throw EvalError(std::string(what) + " must be an integer");
  return static_cast<Index>(r);
}

inline Complex as_scalar(const Value& v, const char* what) {
  if (v.is_scalar) return v.s;
  if (v.m.rows() == 1 && v.m.cols() == 1) return v.m(0, 0);
  throw EvalError(std::string(what) + " must be a scalar");
}

inline Operator as_matrix(const Value& v) {
  if (!v.is_scalar) return v.m;
  Operator m(1, 1);
  m(0, 0) = v.s;
  return m;
}

inline Value scalar(Complex c) { return Value{true, c, {}}; }
inline Value matrix(Operator m) { return Value{false, {}, std::move(m)}; }

inline Value eval_call(const Expr& e, Context& ctx) {
  std::vector<Value> av;
  for (const auto& a : e.args) av.push_back(eval(*a, ctx));
  if (e.name == "eye") {
    const Index n = as_index(av[0], "eye dimension");
    if (n < 1) throw EvalError("eye dimension must be >= 1");
    return matrix(Operator::Identity(n, n));
  }
  if (e.name == "destroy" || e.name == "create" || e.name == "num") {
    const Index n = as_index(av[0], (e.name + " dimension").c_str());
    if (n < 1) throw EvalError(e.name + " dimension must be >= 1");
    if (e.name == "destroy") return matrix(destroy_op(n));
    if (e.name == "create") return matrix(create_op(n));
    return matrix(number_op(n));
  }
  if (e.name == "basis") {
    const Index n = as_index(av[0], "basis dimension");
    const Index i = as_index(av[1], "basis row");
    const Index j = as_index(av[2], "basis column");
    if (n < 1 || i < 0 || j < 0 || i >= n || j >= n)
      throw EvalError("basis index out of range");
    return matrix(basis_op(n, i, j));
  }
  if (e.name == "kron")
    return matrix(kron(as_matrix(av[0]), as_matrix(av[1])));
  if (e.name == "displace") {
    const Index n = as_index(av[0], "displace dimension");
    if (n < 1) throw EvalError("displace dimension must be >= 1");
    return matrix(displacement_op(n, as_scalar(av[1], "displace amplitude")));
  }
  throw EvalError("unknown builtin '" + e.name + "'");
}

inline Value eval_name(const Expr& e, Context& ctx) {
  if (ctx.symbols) {
    auto it = ctx.symbols->find(e.name);
    if (it != ctx.symbols->end()) {
      auto cached = ctx.cache.find(e.name);
      if (cached != ctx.cache.end()) return cached->second;
      if (ctx.in_progress.count(e.name))
        throw EvalError("cyclic symbol definition involving '" + e.name + "'");
      ctx.in_progress.insert(e.name);
      auto parsed = ctx.parsed.find(e.name);
      if (parsed == ctx.parsed.end())
        parsed = ctx.parsed.emplace(e.name, parse_expression(it->second)).first;
      Value v = eval(*parsed->second, ctx);
      ctx.in_progress.erase(e.name);
      ctx.cache.emplace(e.name, v);
      return v;
    }
  }
  if (e.name == "sigmax") return matrix(sigma_x());
  if (e.name == "sigmay") return matrix(sigma_y());
  if (e.name == "sigmaz") return matrix(sigma_z());
  if (e.name == "sigmap") return matrix(sigma_plus());
  if (e.name == "sigmam") return matrix(sigma_minus());
  throw EvalError("unknown name '" + e.name + "'");
}

inline Value eval_binary(const Expr& e, Context& ctx) {
  Value lhs = eval(*e.args[0], ctx);
  Value rhs = eval(*e.args[1], ctx);
  if (e.op == '*') {
    if (lhs.is_scalar && rhs.is_scalar) return scalar(lhs.s * rhs.s);
    if (lhs.is_scalar) return matrix((lhs.s * rhs.m).eval());
    if (rhs.is_scalar) return matrix((rhs.s * lhs.m).eval());
    if (lhs.m.cols() != rhs.m.rows())
      throw DimensionError("product of " + std::to_string(lhs.m.rows()) +
                           "x" + std::to_string(lhs.m.cols()) + " and " +
                           std::to_string(rhs.m.rows()) + "x" +
                           std::to_string(rhs.m.cols()) + " operators");
    return matrix(lhs.m * rhs.m);
  }
  const double sign = e.op == '+' ? 1.0 : -1.0;
  if (lhs.is_scalar && rhs.is_scalar) return scalar(lhs.s + sign * rhs.s);
  if (lhs.is_scalar != rhs.is_scalar)
    throw DimensionError(
        "cannot add a scalar and an operator; multiply by an identity "
        "explicitly");
  if (lhs.m.rows() != rhs.m.rows() || lhs.m.cols() != rhs.m.cols())
    throw DimensionError("sum of operators with different dimensions");
  return matrix(lhs.m + sign * rhs.m);
}

inline Value eval(const Expr& e, Context& ctx) {
  switch (e.kind) {
    case Expr::Kind::Number: return scalar(e.value);
    case Expr::Kind::Name: return eval_name(e, ctx);
    case Expr::Kind::Call: return eval_call(e, ctx);
    case Expr::Kind::Unary: {
      Value v = eval(*e.args[0], ctx);
      if (v.is_scalar) return scalar(-v.s);
      return matrix((-v.m).eval());
    }
    case Expr::Kind::Dagger: {
      Value v = eval(*e.args[0], ctx);
      if (v.is_scalar) return scalar(std::conj(v.s));
      return matrix(v.m.adjoint().eval());
    }
    case Expr::Kind::Binary: return eval_binary(e, ctx);
  }
  throw EvalError("corrupt expression tree");
}

}  // namespace detail_eval

// Evaluates an expression to an operator of dimension prod(factor dims);
// scalar results are promoted to multiples of the identity.
inline Operator evaluate(const Expr& ast,
                         const std::map<std::string, std::string>& symbols,
                         const std::vector<std::pair<std::string, Index>>& factors) {
  Index dim = 1;
  for (const auto& f : factors) dim *= f.second;
  detail_eval::Context ctx;
  ctx.symbols = &symbols;
  Value v = detail_eval::eval(ast, ctx);
  if (v.is_scalar) return v.s * Operator::Identity(dim, dim);
  if (v.m.rows() != dim || v.m.cols() != dim)
    throw DimensionError("expression evaluates to a " +
                         std::to_string(v.m.rows()) + "x" +
                         std::to_string(v.m.cols()) +
                         " operator; model dimension is " +
                         std::to_string(dim));
  return v.m;
}

//===========================================================================
// Model container
//===========================================================================

struct ModelOptions {
  Tolerances tol;
  json extra = json::object();  // unrecognized option keys, passed through
};

struct Model {
  LindbladGenerator fast, slow;
  double epsilon = 0.0;
  Index dim = 0;
  std::vector<std::pair<std::string, Index>> factors;
  ModelOptions options;
  std::vector<std::string> warnings;
};

// Applies recognized tolerance keys from a JSON object; returns the keys it
// did not recognize.
inline std::vector<std::string> apply_tolerance_overrides(Tolerances& tol,
                                                          const json& obj) {
  std::vector<std::string> unknown;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    auto num = [&]() -> double {
      if (!it->is_number())
        throw SchemaError("option '" + key + "' must be a number");
      return it->get<double>();
    };
    if (key == "tol_herm") tol.herm = num();
    else if (key == "tol_trace") tol.trace = num();
    else if (key == "tol_psd") tol.psd = num();
    else if (key == "rel_tol_pinv") tol.pinv_rel = num();
    else if (key == "tol_zero") tol.zero_rel = num();
    else if (key == "tol_support") tol.support = num();
    else if (key == "tol_choi_cut") tol.choi_cut_rel = num();
    else if (key == "tol_jump_drop") tol.jump_drop_rel = num();
    else if (key == "tol_consolidate") tol.consolidate_rel = num();
    else if (key == "tol_dfs_residual") tol.dfs_residual = num();
    else if (key == "tol_kraus_scalar") tol.kraus_scalar = num();
    else if (key == "tol_cert_residual") tol.cert_residual = num();
    else if (key == "tol_l0s0") tol.l0s0 = num();
    else unknown.push_back(key);
  }
  return unknown;
}

namespace detail_model {

inline const json& require_key(const json& j, const char* key,
                               const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw SchemaError(std::string("missing key '") + key + "' in " + where);
  return *it;
}

inline LindbladGenerator load_generator(
    const json& j, const char* which,
    const std::map<std::string, std::string>& symbols,
    const std::vector<std::pair<std::string, Index>>& factors,
    const Tolerances& tol) {
  if (!j.is_object())
    throw SchemaError(std::string(which) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "hamiltonian" && it.key() != "jumps")
      throw SchemaError("unknown key '" + it.key() + "' in " + which);
  const json& ham = require_key(j, "hamiltonian", which);
  if (!ham.is_string())
    throw SchemaError(std::string(which) + ".hamiltonian must be a string");
  LindbladGenerator gen;
  gen.hamiltonian =
      evaluate(*parse_expression(ham.get<std::string>()), symbols, factors);
  const double defect = hermiticity_defect(gen.hamiltonian);
  if (defect > tol.herm * std::max(1.0, gen.hamiltonian.norm()))
    throw SchemaError(std::string(which) +
                      ".hamiltonian is not Hermitian (max |H - H'| = " +
                      std::to_string(defect) + ")");
  if (auto it = j.find("jumps"); it != j.end()) {
    if (!it->is_array())
      throw SchemaError(std::string(which) + ".jumps must be an array");
    for (const auto& expr : *it) {
      if (!expr.is_string())
        throw SchemaError(std::string(which) + ".jumps entries must be strings");
      gen.jumps.push_back(
          evaluate(*parse_expression(expr.get<std::string>()), symbols, factors));
    }
  }
  return gen;
}

}  // namespace detail_model

inline Model load_model_json(const json& j) {
  if (!j.is_object()) throw SchemaError("model file must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "factors" && k != "symbols" && k != "fast" && k != "slow" &&
        k != "epsilon" && k != "options")
      throw SchemaError("unknown top-level key '" + k + "'");
  }
  Model model;

  const json& factors = detail_model::require_key(j, "factors", "model");
  if (!factors.is_array() || factors.empty())
    throw SchemaError("factors must be a non-empty array");
  for (const auto& f : factors) {
    if (!f.is_object() || !f.contains("name") || !f.contains("dim") ||
        !f["name"].is_string() || !f["dim"].is_number_integer())
      throw SchemaError("each factor needs a string name and integer dim");
    const Index d = f["dim"].get<Index>();
    if (d < 1) throw SchemaError("factor dimensions must be >= 1");
    model.factors.emplace_back(f["name"].get<std::string>(), d);
  }
  model.dim = 1;
  for (const auto& f : model.factors) model.dim *= f.second;

  std::map<std::string, std::string> symbols;
  if (auto it = j.find("symbols"); it != j.end()) {
    if (!it->is_object()) throw SchemaError("symbols must be an object");
    for (auto s = it->begin(); s != it->end(); ++s) {
      if (!s->is_string())
        throw SchemaError("symbol '" + s.key() + "' must map to a string");
      symbols[s.key()] = s->get<std::string>();
    }
  }

  if (auto it = j.find("options"); it != j.end()) {
    if (!it->is_object()) throw SchemaError("options must be an object");
    auto unknown = apply_tolerance_overrides(model.options.tol, *it);
    for (const auto& key : unknown) model.options.extra[key] = (*it)[key];
  }

  const json& eps = detail_model::require_key(j, "epsilon", "model");
  if (!eps.is_number()) throw SchemaError("epsilon must be a number");
  model.epsilon = eps.get<double>();
  if (!(model.epsilon > 0)) throw SchemaError("epsilon must be positive");

  model.fast = detail_model::load_generator(
      detail_model::require_key(j, "fast", "model"), "fast", symbols,
      model.factors, model.options.tol);
  model.slow = detail_model::load_generator(
      detail_model::require_key(j, "slow", "model"), "slow", symbols,
      model.factors, model.options.tol);
  return model;
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("invalid JSON in '" + path + "': " + e.what());
  }
  return load_model_json(j);
}

}  // namespace qael::modelspec

#endif  // QAEL_MODELSPEC_HPP
