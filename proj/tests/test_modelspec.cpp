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

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "qael/modelspec.hpp"
#include "support/test_helpers.hpp"

using namespace qael;
using namespace qael::modelspec;

namespace {

const std::vector<std::pair<std::string, Index>> kQubitFactor = {{"q", 2}};

Operator eval2(const std::string& src,
               const std::map<std::string, std::string>& symbols = {}) {
  return evaluate(*parse_expression(src), symbols, kQubitFactor);
}

}  // namespace

TEST_CASE("parse basic forms") {
  SECTION("nested calls") {
    const ExprPtr e = parse_expression("kron(destroy(5), eye(2))");
    REQUIRE(e->kind == Expr::Kind::Call);
    REQUIRE(e->name == "kron");
    REQUIRE(e->args.size() == 2);
    REQUIRE(e->args[0]->kind == Expr::Kind::Call);
    REQUIRE(e->args[0]->name == "destroy");
    REQUIRE(e->args[0]->args[0]->value == Complex(5.0));
    REQUIRE(e->args[1]->name == "eye");
  }
  SECTION("precedence: * over +, dagger tightest") {
    const ExprPtr e = parse_expression("0.5*(a + a')");
    REQUIRE(e->kind == Expr::Kind::Binary);
    REQUIRE(e->op == '*');
    REQUIRE(e->args[0]->value == Complex(0.5));
    const Expr& sum = *e->args[1];
    REQUIRE(sum.kind == Expr::Kind::Binary);
    REQUIRE(sum.op == '+');
    REQUIRE(sum.args[0]->kind == Expr::Kind::Name);
    REQUIRE(sum.args[1]->kind == Expr::Kind::Dagger);
  }
  SECTION("a*b+c associates as (a*b)+c") {
    const ExprPtr e = parse_expression("a*b+c");
    REQUIRE(e->op == '+');
    REQUIRE(e->args[0]->op == '*');
  }
  SECTION("imaginary literals") {
    const ExprPtr e = parse_expression("2+3i");
    REQUIRE(e->op == '+');
    REQUIRE(e->args[1]->value == Complex(0.0, 3.0));
  }
}

TEST_CASE("parse errors carry position and expectation") {
  SECTION("missing closing paren") {
    try {
      parse_expression("kron(destroy(5)");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      REQUIRE(std::string(e.what()).find("expected ')'") != std::string::npos);
      REQUIRE(e.line == 1);
      REQUIRE(e.col == 16);
    }
  }
  SECTION("unknown builtin") {
    REQUIRE_THROWS_MATCHES(
        parse_expression("frobnicate(3)"), ParseError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("unknown builtin")));
  }
  SECTION("arity mismatch") {
    REQUIRE_THROWS_MATCHES(
        parse_expression("kron(eye(2))"), ParseError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("expects 2")));
  }
  SECTION("empty input") {
    REQUIRE_THROWS_AS(parse_expression("   "), ParseError);
  }
  SECTION("stray token") {
    REQUIRE_THROWS_AS(parse_expression("a + * b"), ParseError);
  }
}

TEST_CASE("evaluate builtins") {
  SECTION("truncated annihilation operator") {
    const Operator a =
        evaluate(*parse_expression("destroy(3)"), {}, {{"f", 3}});
    REQUIRE(a(0, 1) == Complex(1.0));
    REQUIRE(a(1, 2) == Complex(std::sqrt(2.0)));
    REQUIRE(a(2, 2) == Complex(0.0));
  }
  SECTION("sigmap*sigmam is the excited projector") {
    REQUIRE((eval2("sigmap*sigmam") - basis_op(2, 1, 1)).norm() == 0.0);
  }
  SECTION("basis and num") {
    const Operator n =
        evaluate(*parse_expression("num(4)"), {}, {{"f", 4}});
    REQUIRE(n(3, 3) == Complex(3.0));
    const Operator b =
        evaluate(*parse_expression("basis(4,1,2)"), {}, {{"f", 4}});
    REQUIRE(b(1, 2) == Complex(1.0));
    REQUIRE(b.norm() == 1.0);
  }
  SECTION("displacement generates coherent amplitudes") {
    const Operator d = evaluate(*parse_expression("displace(20, 0.2)"), {},
                                {{"f", 20}});
    for (Index n = 0; n <= 5; ++n)
      REQUIRE(std::abs(d(n, 0) - testing::coherent_amplitude(0.2, n)) < 1e-8);
  }
  SECTION("scalar promotion at top level") {
    const Operator z = eval2("0");
    REQUIRE(z.norm() == 0.0);
    REQUIRE(z.rows() == 2);
    const Operator half = eval2("0.5");
    REQUIRE((half - 0.5 * Operator::Identity(2, 2)).norm() == 0.0);
  }
  SECTION("symbols resolve recursively") {
    std::map<std::string, std::string> symbols = {
        {"a", "destroy(2)"}, {"n", "a'*a"}};
    REQUIRE((eval2("n", symbols) - basis_op(2, 1, 1)).norm() < 1e-15);
  }
}

TEST_CASE("evaluate errors") {
  SECTION("dimension mismatch in a sum") {
    REQUIRE_THROWS_AS(eval2("destroy(2) + destroy(3)"), DimensionError);
  }
  SECTION("scalar plus operator is rejected") {
    REQUIRE_THROWS_AS(eval2("1 + destroy(2)"), DimensionError);
  }
  SECTION("cyclic symbols") {
    std::map<std::string, std::string> symbols = {{"x", "y"}, {"y", "x"}};
    REQUIRE_THROWS_MATCHES(
        eval2("x", symbols), EvalError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("cyclic")));
  }
  SECTION("unknown name") {
    REQUIRE_THROWS_AS(eval2("nosuch"), EvalError);
  }
  SECTION("non-integer dimension argument") {
    REQUIRE_THROWS_AS(eval2("eye(2.5)"), EvalError);
  }
  SECTION("wrong top-level dimension") {
    REQUIRE_THROWS_AS(eval2("eye(3)"), DimensionError);
  }
}

namespace {

// Random well-formed AST for the round-trip property. Number literals are
// pure real or pure imaginary and non-negative, as produced by the lexer.
ExprPtr random_ast(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  switch (pick(rng)) {
    case 0: {
      const double v = val(rng);
      return make_number(rng() % 2 ? Complex(v, 0.0) : Complex(0.0, v));
    }
    case 1: {
      static const char* names[] = {"a", "b", "x_1", "sigmax"};
      return make_name(names[rng() % 4]);
    }
    case 2:
      return make_unary(random_ast(rng, depth - 1));
    case 3:
      return make_dagger(random_ast(rng, depth - 1));
    case 4: {
      static const char ops[] = {'+', '-', '*'};
      return make_binary(ops[rng() % 3], random_ast(rng, depth - 1),
                         random_ast(rng, depth - 1));
    }
    default:
      return make_call("kron", {random_ast(rng, depth - 1),
                                random_ast(rng, depth - 1)});
  }
}

}  // namespace

TEST_CASE("print/parse round trip") {
  std::mt19937_64 rng(0);
  for (int trial = 0; trial < 200; ++trial) {
    const ExprPtr ast = random_ast(rng, 4);
    const std::string text = print_expression(*ast);
    ExprPtr back;
    REQUIRE_NOTHROW(back = parse_expression(text));
    INFO("printed: " << text);
    REQUIRE(ast_equal(*ast, *back));
  }
}

TEST_CASE("evaluation is homomorphic over + and *") {
  std::map<std::string, std::string> symbols = {{"a", "destroy(2)"},
                                                {"b", "sigmax"}};
  const std::vector<std::string> exprs = {"a", "b", "a'*a", "0.5*b", "a+b'"};
  for (const auto& lhs : exprs)
    for (const auto& rhs : exprs) {
      const Operator sum = eval2("(" + lhs + ")+(" + rhs + ")", symbols);
      REQUIRE((sum - (eval2(lhs, symbols) + eval2(rhs, symbols))).norm() <
              1e-14);
      const Operator prod = eval2("(" + lhs + ")*(" + rhs + ")", symbols);
      REQUIRE((prod - (eval2(lhs, symbols) * eval2(rhs, symbols))).norm() <
              1e-14);
    }
}

TEST_CASE("truncated ladder commutator") {
  const Index n = 7;
  const Operator comm =
      commutator(destroy_op(n), create_op(n));
  for (Index i = 0; i + 1 < n; ++i)
    REQUIRE(std::abs(comm(i, i) - Complex(1.0)) < 1e-14);
  // Truncation breaks only the last diagonal entry.
  REQUIRE(std::abs(comm(n - 1, n - 1) - Complex(1.0 - double(n))) < 1e-13);
}

TEST_CASE("load_model") {
  json good = {
      {"factors", json::array({json{{"name", "A"}, {"dim", 3}},
                               json{{"name", "B"}, {"dim", 2}}})},
      {"symbols", json{{"a", "kron(destroy(3), eye(2))"},
                       {"b", "kron(eye(3), sigmam)"}}},
      {"fast", json{{"hamiltonian", "0"}, {"jumps", json::array({"a"})}}},
      {"slow", json{{"hamiltonian", "a'*b + a*b'"}, {"jumps", json::array()}}},
      {"epsilon", 0.05},
      {"options", json{{"rel_tol_pinv", 1e-9}, {"n_note", 3}}},
  };
  SECTION("valid file") {
    const Model m = load_model_json(good);
    REQUIRE(m.dim == 6);
    REQUIRE(m.epsilon == 0.05);
    REQUIRE(m.fast.jumps.size() == 1);
    REQUIRE(m.options.tol.pinv_rel == 1e-9);
    REQUIRE(m.options.extra.contains("n_note"));
  }
  SECTION("non-Hermitian Hamiltonian is reported with the defect") {
    json bad = good;
    bad["slow"]["hamiltonian"] = "kron(destroy(3), eye(2))";
    REQUIRE_THROWS_MATCHES(
        load_model_json(bad), SchemaError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("not Hermitian")));
  }
  SECTION("epsilon must be positive") {
    json bad = good;
    bad["epsilon"] = 0.0;
    REQUIRE_THROWS_AS(load_model_json(bad), SchemaError);
    bad["epsilon"] = -1.0;
    REQUIRE_THROWS_AS(load_model_json(bad), SchemaError);
  }
  SECTION("unknown top-level key") {
    json bad = good;
    bad["extra_stuff"] = 1;
    REQUIRE_THROWS_AS(load_model_json(bad), SchemaError);
  }
  SECTION("jump with wrong dimension") {
    json bad = good;
    bad["fast"]["jumps"].push_back("sigmam");
    REQUIRE_THROWS_AS(load_model_json(bad), DimensionError);
  }
  SECTION("missing file") {
    REQUIRE_THROWS_AS(load_model("/nonexistent/path.json"), SchemaError);
  }
}
