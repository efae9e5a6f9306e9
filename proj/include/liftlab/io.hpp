#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "liftlab/clt.hpp"
#include "liftlab/criteria.hpp"
#include "liftlab/h2.hpp"

namespace liftlab::io {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// Parses text, reporting syntax errors with line and column.
json parse(const std::string& text, const std::string& source = "<input>");
json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

// Readers report the JSON path of the offending value in a SchemaError.
cplx complex_from(const json& j, const std::string& path = "");
CMatrix matrix_from(const json& j, const std::string& path = "");
CVector vector_from(const json& j, const std::string& path = "");
h2::MatPoly matpoly_from(const json& j, const std::string& path = "");
clt::OperatorSpec operator_spec_from(const json& j, const std::string& path = "");

json to_json(cplx z);
json to_json(const CMatrix& M);
json vector_to_json(const CVector& v);
json to_json(const h2::MatPoly& P);
json to_json(const criteria::CriterionReport& r);
criteria::CriterionReport report_from(const json& j, const std::string& path = "");

struct ProblemFile {
  clt::OperatorSpec T;
  CMatrix T_prime;
  CMatrix X;
  double tol = kClassifyTol;
};

ProblemFile problem_from(const json& j);
clt::CLTProblem build(const ProblemFile& f);

// Columns rho,value or n,value with 17 significant digits.
std::string ladder_csv(const std::vector<criteria::LadderPoint>& ladder);
std::string trace_csv(const std::vector<criteria::TracePoint>& trace);

std::string dump(const json& j);

}  // namespace liftlab::io
