#include "cli.hpp"

#include <CLI11.hpp>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "liftlab/bimodel.hpp"
#include "liftlab/coiso.hpp"
#include "liftlab/errors.hpp"
#include "liftlab/io.hpp"
#include "liftlab/scenarios.hpp"

namespace liftlab::cli {

namespace {

using criteria::CriterionReport;
using criteria::Settings;
using criteria::Verdict;
using io::json;

struct Config {
  std::string command;
  std::string example;
  std::string input;
  std::string schur;
  std::string out;
  std::string csv;
  std::string taylor_csv;
  std::optional<int> degree;
  std::optional<int> grid;
  std::string ladder;
  std::optional<double> tol_int;
  std::optional<double> tol_taylor;
  std::uint64_t seed = 1;
};

std::vector<double> parse_ladder(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw SchemaError("--ladder: cannot read '" + item + "'");
    }
  }
  if (out.empty()) throw SchemaError("--ladder: empty");
  for (size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0 && out[i] < 1.0)) throw SchemaError("--ladder: radii must lie in (0, 1)");
    if (i > 0 && !(out[i] > out[i - 1])) throw SchemaError("--ladder: radii must increase");
  }
  return out;
}

Settings apply_overrides(Settings s, const Config& c) {
  if (c.degree) s.N = *c.degree;
  if (c.grid) s.K = *c.grid;
  if (!c.ladder.empty()) s.ladder = parse_ladder(c.ladder);
  if (c.tol_int) s.tol_int = *c.tol_int;
  if (c.tol_taylor) s.tol_taylor = *c.tol_taylor;
  if (s.N < 1) throw SchemaError("--degree must be positive");
  if (s.K < 8) throw SchemaError("--grid must be at least 8");
  return s;
}

json config_echo(const Config& c, const Settings& s) {
  json j;
  j["command"] = c.command;
  if (!c.example.empty()) j["example"] = c.example;
  if (!c.input.empty()) j["input"] = c.input;
  if (!c.schur.empty()) j["schur"] = c.schur;
  j["degree"] = s.N;
  j["grid"] = s.K;
  j["ladder"] = s.ladder;
  j["tol_int"] = s.tol_int;
  j["tol_taylor"] = s.tol_taylor;
  j["seed"] = c.seed;
  return j;
}

// "expect" maps report targets to verdicts, either directly or per command:
// {"expect": {"lift": {"obstruction_search": "fail"}, "dims": {...}}}.
std::vector<scenarios::Expectation> expectations_from(const json& doc, const std::string& command) {
  std::vector<scenarios::Expectation> out;
  if (!doc.is_object() || !doc.contains("expect")) return out;
  const json* e = &doc["expect"];
  std::string path = "/expect";
  if (!e->is_object()) throw SchemaError(path + ": expected an object");
  bool sectioned = false;
  for (const auto& item : e->items()) sectioned = sectioned || item.value().is_object();
  if (sectioned) {
    if (!e->contains(command)) return out;
    e = &(*e)[command];
    path += "/" + command;
  }
  for (const auto& [target, v] : e->items()) {
    if (!v.is_string()) throw SchemaError(path + "/" + target + ": expected a verdict string");
    try {
      out.push_back({target, criteria::verdict_from_string(v.get<std::string>())});
    } catch (const SchemaError&) {
      throw SchemaError(path + "/" + target + ": unknown verdict '" + v.get<std::string>() + "'");
    }
  }
  return out;
}

json expectations_json(const std::vector<scenarios::Expectation>& ex) {
  json arr = json::array();
  for (const auto& e : ex)
    arr.push_back({{"target", e.target},
                   {"expected", criteria::to_string(e.expected)},
                   {"actual", e.found ? json(criteria::to_string(e.actual)) : json(nullptr)},
                   {"met", e.met()}});
  return arr;
}

bool all_met(const std::vector<scenarios::Expectation>& ex) {
  for (const auto& e : ex)
    if (!e.met()) return false;
  return true;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << (v == 0.0 ? 0.0 : v);
  return s.str();
}

std::string cnum(cplx z) {
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  return num(z.real()) + (std::signbit(im) ? "-" : "+") + num(std::abs(im)) + "i";
}

void summarize(std::ostream& out, const CriterionReport& r, int indent = 2) {
  out << std::string(indent, ' ') << r.criterion_id << ": " << criteria::to_string(r.verdict);
  if (!r.rho_ladder.empty()) out << "  (last ladder value " << num(r.rho_ladder.back().value) << ")";
  out << "\n";
  for (const auto& n : r.notes) out << std::string(indent + 4, ' ') << "note: " << n << "\n";
  for (const auto& p : r.parts) summarize(out, p, indent + 2);
}

void summarize_expectations(std::ostream& out, const std::vector<scenarios::Expectation>& ex) {
  for (const auto& e : ex)
    out << "  expect " << e.target << " = " << criteria::to_string(e.expected) << ": "
        << (e.met() ? "met" : (e.found ? "got " + criteria::to_string(e.actual) : "missing")) << "\n";
}

void write_outputs(const Config& c, const json& doc, const std::vector<CriterionReport>& reports) {
  if (!c.out.empty()) io::write_file(c.out, io::dump(doc));
  const CriterionReport* first_ladder = nullptr;
  const CriterionReport* first_trace = nullptr;
  for (const auto& r : reports) {
    if (!first_ladder && !r.rho_ladder.empty()) first_ladder = &r;
    if (!first_trace && !r.taylor_trace.empty()) first_trace = &r;
  }
  if (!c.csv.empty()) io::write_file(c.csv, io::ladder_csv(first_ladder ? first_ladder->rho_ladder
                                                                        : std::vector<criteria::LadderPoint>{}));
  if (!c.taylor_csv.empty())
    io::write_file(c.taylor_csv, io::trace_csv(first_trace ? first_trace->taylor_trace
                                                           : std::vector<criteria::TracePoint>{}));
}

json base_doc(const Config& c, const Settings& s) {
  json doc;
  doc["liftlab_version"] = io::kVersion;
  doc["config"] = config_echo(c, s);
  return doc;
}

json reports_json(const std::vector<CriterionReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(io::to_json(r));
  return arr;
}

int finish(const Config& c, json doc, const std::vector<CriterionReport>& reports,
           std::vector<scenarios::Expectation> ex, std::ostream& out) {
  scenarios::resolve(ex, reports);
  doc["reports"] = reports_json(reports);
  doc["expectations"] = expectations_json(ex);
  doc["matched"] = all_met(ex);
  write_outputs(c, doc, reports);
  for (const auto& r : reports) summarize(out, r);
  summarize_expectations(out, ex);
  return all_met(ex) ? 0 : 1;
}

int cmd_examples(const Config& c, std::ostream& out) {
  std::vector<std::string> todo;
  if (c.example == "all") todo = scenarios::names();
  else todo = {c.example};
  for (const auto& n : todo) scenarios::default_settings(n);  // validates the name

  json doc = base_doc(c, apply_overrides(Settings{}, c));
  json runs = json::array();
  std::vector<CriterionReport> all_reports;
  bool matched = true;
  for (const auto& name : todo) {
    const Settings s = apply_overrides(scenarios::default_settings(name), c);
    const auto r = scenarios::run(name, s, c.seed);
    json j;
    j["name"] = name;
    j["settings"] = {{"degree", s.N}, {"grid", s.K}, {"ladder", s.ladder},
                     {"tol_int", s.tol_int}, {"tol_taylor", s.tol_taylor}};
    json met = json::object();
    for (const auto& [k, v] : r.metrics) met[k] = std::isfinite(v) ? json(v) : json(nullptr);
    j["metrics"] = met;
    j["reports"] = reports_json(r.reports);
    j["expectations"] = expectations_json(r.expectations);
    j["matched"] = r.matched();
    runs.push_back(j);
    matched = matched && r.matched();
    all_reports.insert(all_reports.end(), r.reports.begin(), r.reports.end());

    out << name << " (N = " << s.N << ", K = " << s.K << ")\n";
    for (const auto& [k, v] : r.metrics) out << "  " << k << " = " << num(v) << "\n";
    for (const auto& rep : r.reports) summarize(out, rep);
    summarize_expectations(out, r.expectations);
  }
  doc["examples"] = runs;
  doc["matched"] = matched;
  write_outputs(c, doc, all_reports);
  out << (matched ? "all expected verdicts met\n" : "verdict mismatch\n");
  return matched ? 0 : 1;
}

h2::AnalyticFn schur_from(const Config& c, const clt::LiftingData& ld, std::string& kind) {
  const Index k = ld.ker_omega.dim(), ks = ld.ker_omega_star.dim();
  json j = c.schur.empty() ? json{{"kind", "isometry"}} : io::read_file(c.schur);
  if (j.is_object() && j.contains("coeffs")) {
    kind = "coeffs";
    h2::MatPoly R = io::matpoly_from(j);
    if (R.rows() != ks || R.cols() != k)
      throw SchemaError("/coeffs: R must be " + std::to_string(ks) + " x " + std::to_string(k) +
                        " in kernel coordinates");
    return R;
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("/: expected {\"coeffs\": …} or {\"kind\": \"zero\" | \"isometry\"}");
  kind = j["kind"].get<std::string>();
  if (kind == "zero") return clt::zero_schur(ld);
  if (kind == "isometry") return clt::constant_schur(CMatrix::Identity(ks, k));
  throw SchemaError("/kind: unknown Schur kind '" + kind + "'");
}

int cmd_lift(const Config& c, std::ostream& out) {
  const Settings s = apply_overrides(Settings{}, c);
  const json input = io::read_file(c.input);
  const auto file = io::problem_from(input);
  auto ex = expectations_from(input, c.command);
  const auto prob = io::build(file);
  const auto ld = clt::build_omega(prob);
  std::string kind;
  const h2::AnalyticFn R = schur_from(c, ld, kind);
  const auto L = clt::lift(prob, R, s.N);

  json doc = base_doc(c, s);
  json met;
  met["intertwining_residual"] = L.intertwining_residual;
  met["max_norm_gap"] = L.max_norm_gap;
  met["max_norm_excess"] = L.max_norm_excess;
  met["dim_ker_omega"] = ld.ker_omega.dim();
  met["dim_ker_omega_star"] = ld.ker_omega_star.dim();
  const auto sv = linalg::singular_values(ld.D_X);
  const double smin = sv.empty() ? 0.0 : sv.back();
  met["sigma_min_DX"] = smin;
  if (smin >= prob.tol) {
    const auto ex_ld = clt::build_omega_explicit(prob);
    met["explicit_vs_definitional"] =
        linalg::op_norm(ex_ld.omega_bar_ambient() - ld.omega_bar_ambient());
  }
  doc["schur_kind"] = kind;
  doc["metrics"] = met;

  std::vector<CriterionReport> reports;
  reports.push_back(criteria::check_free_schur_lifting(ld, R, CMatrix(), s));
  const CMatrix R0 = R(0.0);
  const Index k = ld.ker_omega.dim();
  if (k == 0 || linalg::op_norm(R0.adjoint() * R0 - linalg::identity(k)) <= 1e-8) {
    reports.push_back(criteria::obstruction_search(ld, R0));
  } else {
    reports.front().notes.push_back("R(0) is not isometric, obstruction search skipped");
  }
  out << "lift " << c.input << "\n";
  for (const auto& [key, v] : met.items()) out << "  " << key << " = " << num(v.get<double>()) << "\n";
  return finish(c, doc, reports, ex, out);
}

int cmd_bimodel(const Config& c, std::ostream& out) {
  Settings s = Settings{};
  s.N = 64;
  s.K = 256;
  s = apply_overrides(s, c);
  const json input = io::read_file(c.input);
  auto ex = expectations_from(input, c.command);
  if (ex.empty()) ex.push_back({"bi_isometry", Verdict::pass});
  const auto model = bimodel::build_model(io::matpoly_from(input), s.K, s.N);
  std::vector<CriterionReport> reports{bimodel::verify_bi_isometry(model, 8, c.seed)};
  out << "bimodel " << c.input << " (N = " << s.N << ", K = " << s.K << ")\n";
  return finish(c, base_doc(c, s), reports, ex, out);
}

int cmd_coiso(const Config& c, std::ostream& out) {
  const Settings s = apply_overrides(Settings{}, c);
  const json input = io::read_file(c.input);
  auto ex = expectations_from(input, c.command);
  auto field = [&](const char* key) -> const json& {
    if (!input.is_object() || !input.contains(key))
      throw SchemaError(std::string("/: missing field '") + key + "'");
    return input[key];
  };
  const double tol = input.contains("tol") ? input["tol"].get<double>() : kClassifyTol;
  const auto p = coiso::make_problem(io::matrix_from(field("M"), "/M"),
                                     io::matrix_from(field("M_prime"), "/M_prime"),
                                     io::matrix_from(field("C"), "/C"), tol);
  const auto count = coiso::can_extend(p);
  json doc = base_doc(c, s);
  doc["counts"] = {{"codim_M_prime", count.codim_M_prime},
                   {"codim_M", count.codim_M},
                   {"defect_C_star", count.defect_C_star},
                   {"rank_C", count.rank_C},
                   {"dense_range", count.dense_range},
                   {"feasible", count.feasible}};
  CriterionReport r;
  r.criterion_id = "coisometric_extension";
  r.metrics["codim_M_prime"] = static_cast<double>(count.codim_M_prime);
  r.metrics["required"] = static_cast<double>(count.required());
  r.tolerances["residual"] = 1e-10;
  out << "coiso " << c.input << "\n  dim(H' - M') = " << count.codim_M_prime
      << ", dim(H - M) + dim D_C* = " << count.required() << "\n";
  if (count.feasible) {
    const std::optional<std::uint64_t> seed =
        input.contains("randomize") && input["randomize"].get<bool>() ? std::optional(c.seed) : std::nullopt;
    const CMatrix C_hat = coiso::build_extension(p, seed);
    const auto res = coiso::residuals(p, C_hat);
    r.metrics["coisometry_residual"] = res.coisometry;
    r.metrics["restriction_residual"] = res.restriction;
    r.metrics["complement_residual"] = res.complement_orthogonal;
    r.metrics["compression_residual"] = res.compression;
    const double worst = std::max({res.coisometry, res.restriction, res.complement_orthogonal, res.compression});
    r.verdict = worst <= 1e-10 ? Verdict::pass : Verdict::fail;
    doc["C_hat"] = io::to_json(C_hat);
    out << "  C_hat =";
    for (Index i = 0; i < C_hat.rows(); ++i) {
      out << (i ? "\n         " : " ");
      for (Index j = 0; j < C_hat.cols(); ++j) out << " " << cnum(C_hat(i, j));
    }
    out << "\n";
  } else {
    r.verdict = Verdict::fail;
    r.notes.push_back(count.dense_range ? "dimension count rules out a coisometric extension"
                                        : "C does not have dense range");
  }
  return finish(c, doc, {r}, ex, out);
}

int cmd_dims(const Config& c, std::ostream& out) {
  const Settings s = apply_overrides(Settings{}, c);
  const json input = io::read_file(c.input);
  auto ex = expectations_from(input, c.command);
  const auto prob = io::build(io::problem_from(input));
  const auto ld = clt::build_omega(prob);
  const auto d = clt::dims_report(prob, ld);
  CriterionReport r;
  r.criterion_id = "dimension_bounds";
  r.metrics = {{"ker_omega", double(d.ker_omega)},
               {"ker_omega_star", double(d.ker_omega_star)},
               {"defect_Tprime", double(d.defect_Tprime)},
               {"defect_Tstar", double(d.defect_Tstar)},
               {"ker_Tstar", double(d.ker_Tstar)},
               {"DX_cap_DTstar", double(d.DX_cap_DTstar)},
               {"DTprime_cap_DXstar", double(d.DTprime_cap_DXstar)}};
  json doc = base_doc(c, s);
  doc["dims"] = {{"kernel_bounds", d.kernel_bounds},
                 {"defect_bounds", d.defect_bounds},
                 {"intersection_bounds", d.intersection_bounds},
                 {"intersections_match", d.intersections_match}};
  const bool ok = d.kernel_bounds && d.defect_bounds && d.intersection_bounds && d.intersections_match;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  if (!d.intersections_match) r.notes.push_back("kernel dimensions differ from the intersection form");
  out << "dims " << c.input << "\n";
  for (const auto& [k, v] : r.metrics) out << "  " << k << " = " << v << "\n";
  return finish(c, doc, {r}, ex, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Commutant lifting and bi-isometry toolkit", "liftlab"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "JSON report path");
    sub->add_option("--csv", c.csv, "rho ladder CSV path");
    sub->add_option("--taylor-csv", c.taylor_csv, "Taylor trace CSV path");
    sub->add_option("--degree", c.degree, "truncation degree N");
    sub->add_option("--grid", c.grid, "circle grid size K");
    sub->add_option("--ladder", c.ladder, "comma separated radii, e.g. 0.9,0.99,0.999");
    sub->add_option("--tol-int", c.tol_int, "integral tolerance");
    sub->add_option("--tol-taylor", c.tol_taylor, "Taylor tolerance");
    sub->add_option("--seed", c.seed, "random seed");
  };
  auto* ex = app.add_subcommand("examples", "reproduce a worked example");
  ex->add_option("name", c.example, "ex3_1 | ex3_2 | rk3_1 | cor3_3 | prop4_6 | all")->required();
  common(ex);
  auto* lift = app.add_subcommand("lift", "lift an intertwiner and check isometry");
  lift->add_option("--input", c.input, "problem JSON")->required();
  lift->add_option("--schur", c.schur, "free Schur symbol JSON");
  common(lift);
  auto* bm = app.add_subcommand("bimodel", "build and verify the bi-isometry model");
  bm->add_option("--input", c.input, "Theta as MatPoly JSON")->required();
  common(bm);
  auto* co = app.add_subcommand("coiso", "coisometric extension of a contraction");
  co->add_option("--input", c.input, "extension problem JSON")->required();
  common(co);
  auto* di = app.add_subcommand("dims", "defect and kernel dimension report");
  di->add_option("--input", c.input, "problem JSON")->required();
  common(di);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (ex->parsed()) {
      c.command = "examples";
      return cmd_examples(c, out);
    }
    if (lift->parsed()) {
      c.command = "lift";
      return cmd_lift(c, out);
    }
    if (bm->parsed()) {
      c.command = "bimodel";
      return cmd_bimodel(c, out);
    }
    if (co->parsed()) {
      c.command = "coiso";
      return cmd_coiso(c, out);
    }
    c.command = "dims";
    return cmd_dims(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace liftlab::cli
