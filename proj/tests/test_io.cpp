#include <doctest.h>

#include "liftlab/errors.hpp"
#include "liftlab/io.hpp"
#include "support.hpp"

using namespace liftlab;
using namespace testsupport;

TEST_CASE("complex, matrix and polynomial round trips") {
  std::mt19937_64 rng(1);
  const CMatrix M = random_matrix(3, 2, rng);
  CHECK(io::matrix_from(io::to_json(M)) == M);
  const CVector v = random_vector(4, rng);
  CHECK(io::vector_from(io::vector_to_json(v)) == v);
  const h2::MatPoly P({random_matrix(2, 2, rng), random_matrix(2, 2, rng)});
  const h2::MatPoly Q = io::matpoly_from(io::parse(io::dump(io::to_json(P))));
  CHECK(Q.degree() == 1);
  CHECK(Q.coeff(1) == P.coeff(1));
  CHECK(io::complex_from(io::parse("2.5")) == cplx(2.5, 0.0));
}

TEST_CASE("schema errors carry the JSON path") {
  auto expect_path = [](const std::string& text, const std::string& path) {
    try {
      io::matpoly_from(io::parse(text));
      FAIL("no error");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).rfind(path, 0) == 0);
    }
  };
  expect_path(R"({"coeffs": [[[1, 2]], [[1, [0]]]]})", "/coeffs/1/0/1");
  expect_path(R"({"coeffs": []})", "/coeffs");
  expect_path(R"({"coef": []})", "/");
  expect_path(R"({"coeffs": [[[1, 2]], [[1]]]})", "/coeffs/1");
}

TEST_CASE("syntax errors report line and column") {
  try {
    io::parse("{\n  \"a\": [1,\n  ]\n}", "f.json");
    FAIL("no error");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).rfind("f.json:3:", 0) == 0);
  }
}

TEST_CASE("operator specs") {
  auto s = io::operator_spec_from(io::parse(R"({"shift": {"mult": 2, "degree": 5}})"));
  REQUIRE(std::holds_alternative<clt::ShiftSpec>(s));
  CHECK(std::get<clt::ShiftSpec>(s).mult == 2);
  auto m = io::operator_spec_from(
      io::parse(R"({"mult_op": {"symbol": {"coeffs": [[[0]], [[1]]]}, "degree": 4}})"));
  CHECK(std::get<clt::MultOpSpec>(m).symbol.degree() == 1);
  CHECK_THROWS_AS(io::operator_spec_from(io::parse(R"({"banded": 1})")), SchemaError);
  CHECK_THROWS_AS(io::operator_spec_from(io::parse(R"({"shift": {"mult": 1.5, "degree": 2}})")),
                  SchemaError);
}

TEST_CASE("problem files with an explicit window") {
  auto f = io::problem_from(io::parse(R"({
    "T": {"dense": [[0, 0], [1, 0]]}, "T_prime": [[0]], "X": [[0, 0]],
    "window": [[1], [0]]})"));
  auto p = io::build(f);
  CHECK(p.window.cols() == 1);
  CHECK_THROWS_AS(io::problem_from(io::parse(R"({
    "T": {"shift": {"mult": 1, "degree": 2}}, "T_prime": [[0]], "X": [[0, 0, 0]],
    "window": [[1], [0], [0]]})")),
                  SchemaError);
}

TEST_CASE("criterion reports round trip") {
  criteria::CriterionReport r;
  r.criterion_id = "x";
  r.verdict = criteria::Verdict::inconclusive;
  r.rho_ladder = {{0.9, 0.1}, {0.99, 0.01}};
  r.taylor_trace = {{0, 1.0}, {1, 0.5}};
  r.metrics["m"] = 3.0;
  r.tolerances["t"] = 1e-3;
  r.notes = {"n"};
  criteria::CriterionReport part;
  part.criterion_id = "y";
  part.verdict = criteria::Verdict::pass;
  r.parts.push_back(part);
  const auto back = io::report_from(io::parse(io::dump(io::to_json(r))));
  CHECK(back.criterion_id == "x");
  CHECK(back.verdict == criteria::Verdict::inconclusive);
  CHECK(back.rho_ladder[1].value == 0.01);
  CHECK(back.taylor_trace[1].n == 1);
  CHECK(back.metrics.at("m") == 3.0);
  CHECK(back.notes == r.notes);
  CHECK(back.part("y")->verdict == criteria::Verdict::pass);
}

TEST_CASE("CSV keeps 17 significant digits") {
  const std::string csv = io::ladder_csv({{0.9, 1.0 / 3.0}});
  CHECK(csv == "rho,value\n0.90000000000000002,0.33333333333333331\n");
  CHECK(io::trace_csv({{2, 0.5}}) == "n,value\n2,0.5\n");
  const double x = 0.1 + 0.2;
  const std::string line = io::ladder_csv({{0.5, x}});
  CHECK(std::stod(line.substr(line.rfind(',') + 1)) == x);
}
