#include "liftlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "liftlab/errors.hpp"

namespace liftlab::io {

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  throw SchemaError((path.empty() ? std::string("/") : path) + ": " + what);
}

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, size_t i) { return path + "/" + std::to_string(i); }

const json& field(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) schema(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(path, "missing field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema(path, "expected an integer");
  return j.get<int>();
}

json real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v == 0.0 ? 0.0 : v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": malformed JSON");
  }
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw SchemaError(path.string() + ": cannot write file");
  out << text;
}

cplx complex_from(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) schema(path, "expected a complex number [re, im]");
  return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
}

CMatrix matrix_from(const json& j, const std::string& path) {
  if (!j.is_array()) schema(path, "expected a matrix (array of rows)");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return CMatrix(0, 0);
  if (!j[0].is_array()) schema(at(path, 0), "expected a row");
  const Index cols = static_cast<Index>(j[0].size());
  CMatrix M(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto rp = at(path, static_cast<size_t>(r));
    if (!j[r].is_array() || static_cast<Index>(j[r].size()) != cols)
      schema(rp, "expected a row of length " + std::to_string(cols));
    for (Index c = 0; c < cols; ++c) M(r, c) = complex_from(j[r][c], at(rp, static_cast<size_t>(c)));
  }
  return M;
}

CVector vector_from(const json& j, const std::string& path) {
  if (!j.is_array()) schema(path, "expected a vector");
  CVector v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from(j[i], at(path, i));
  return v;
}

h2::MatPoly matpoly_from(const json& j, const std::string& path) {
  const auto cp = at(path, "coeffs");
  const json& c = field(j, path, "coeffs");
  if (!c.is_array() || c.empty()) schema(cp, "expected a non-empty list of matrices");
  std::vector<CMatrix> coeffs;
  for (size_t n = 0; n < c.size(); ++n) {
    coeffs.push_back(matrix_from(c[n], at(cp, n)));
    if (coeffs.back().rows() != coeffs.front().rows() || coeffs.back().cols() != coeffs.front().cols())
      schema(at(cp, n), "coefficient shapes differ");
  }
  return h2::MatPoly(std::move(coeffs));
}

clt::OperatorSpec operator_spec_from(const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1)
    schema(path, "expected one of {\"dense\": …}, {\"shift\": …}, {\"mult_op\": …}");
  const std::string key = j.begin().key();
  const json& val = j.begin().value();
  const auto p = at(path, key);
  if (key == "dense") return clt::DenseSpec{matrix_from(val, p)};
  if (key == "shift")
    return clt::ShiftSpec{integer(field(val, p, "mult"), at(p, "mult")),
                          integer(field(val, p, "degree"), at(p, "degree"))};
  if (key == "mult_op")
    return clt::MultOpSpec{matpoly_from(field(val, p, "symbol"), at(p, "symbol")),
                           integer(field(val, p, "degree"), at(p, "degree"))};
  schema(path, "unknown operator kind '" + key + "'");
}

json to_json(cplx z) { return json::array({real(z.real()), real(z.imag())}); }

json to_json(const CMatrix& M) {
  json rows = json::array();
  for (Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(to_json(M(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const CVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

json to_json(const h2::MatPoly& P) {
  json c = json::array();
  for (const auto& m : P.coeffs) c.push_back(to_json(m));
  return {{"coeffs", c}};
}

json to_json(const criteria::CriterionReport& r) {
  json j;
  j["criterion_id"] = r.criterion_id;
  j["verdict"] = criteria::to_string(r.verdict);
  json ladder = json::array(), trace = json::array(), parts = json::array();
  for (const auto& p : r.rho_ladder) ladder.push_back({{"rho", p.rho}, {"value", real(p.value)}});
  for (const auto& t : r.taylor_trace) trace.push_back({{"n", t.n}, {"value", real(t.value)}});
  for (const auto& p : r.parts) parts.push_back(to_json(p));
  j["rho_ladder"] = ladder;
  j["taylor_trace"] = trace;
  json tol = json::object(), met = json::object();
  for (const auto& [k, v] : r.tolerances) tol[k] = real(v);
  for (const auto& [k, v] : r.metrics) met[k] = real(v);
  j["tolerances"] = tol;
  j["metrics"] = met;
  j["notes"] = r.notes;
  j["parts"] = parts;
  return j;
}

criteria::CriterionReport report_from(const json& j, const std::string& path) {
  criteria::CriterionReport r;
  r.criterion_id = field(j, path, "criterion_id").get<std::string>();
  try {
    r.verdict = criteria::verdict_from_string(field(j, path, "verdict").get<std::string>());
  } catch (const SchemaError& e) {
    schema(at(path, "verdict"), e.what());
  }
  auto num = [](const json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
  for (const auto& p : field(j, path, "rho_ladder")) r.rho_ladder.push_back({p.at("rho"), num(p.at("value"))});
  for (const auto& t : field(j, path, "taylor_trace")) r.taylor_trace.push_back({t.at("n"), num(t.at("value"))});
  for (const auto& [k, v] : field(j, path, "tolerances").items()) r.tolerances[k] = num(v);
  for (const auto& [k, v] : field(j, path, "metrics").items()) r.metrics[k] = num(v);
  r.notes = field(j, path, "notes").get<std::vector<std::string>>();
  const json& parts = field(j, path, "parts");
  for (size_t i = 0; i < parts.size(); ++i) r.parts.push_back(report_from(parts[i], at(at(path, "parts"), i)));
  return r;
}

ProblemFile problem_from(const json& j) {
  ProblemFile f;
  f.T = operator_spec_from(field(j, "", "T"), "/T");
  f.T_prime = matrix_from(field(j, "", "T_prime"), "/T_prime");
  f.X = matrix_from(field(j, "", "X"), "/X");
  if (j.contains("tol")) f.tol = number(j["tol"], "/tol");
  if (j.contains("window")) {
    auto* dense = std::get_if<clt::DenseSpec>(&f.T);
    if (!dense) schema("/window", "an explicit window is only allowed for dense T");
    dense->window = matrix_from(j["window"], "/window");
  }
  return f;
}

clt::CLTProblem build(const ProblemFile& f) {
  return clt::build_problem(f.T, f.T_prime, f.X, f.tol);
}

std::string ladder_csv(const std::vector<criteria::LadderPoint>& ladder) {
  std::string s = "rho,value\n";
  for (const auto& p : ladder) s += fmt17(p.rho) + "," + fmt17(p.value) + "\n";
  return s;
}

std::string trace_csv(const std::vector<criteria::TracePoint>& trace) {
  std::string s = "n,value\n";
  for (const auto& t : trace) s += std::to_string(t.n) + "," + fmt17(t.value) + "\n";
  return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace liftlab::io
