#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "liftlab/criteria.hpp"

namespace liftlab::scenarios {

// Expected verdict for a report, addressed as "id" or "id/part".
struct Expectation {
  std::string target;
  criteria::Verdict expected;
  criteria::Verdict actual = criteria::Verdict::inconclusive;
  bool found = false;

  bool met() const { return found && expected == actual; }
};

struct ScenarioResult {
  std::string name;
  criteria::Settings settings;
  std::vector<criteria::CriterionReport> reports;
  std::map<std::string, double> metrics;
  std::vector<Expectation> expectations;

  bool matched() const;
};

// Looks up "id" or "id/part/..." among the reports.
const criteria::CriterionReport* find_report(const std::vector<criteria::CriterionReport>& reports,
                                             const std::string& target);
void resolve(std::vector<Expectation>& expectations,
             const std::vector<criteria::CriterionReport>& reports);

const std::vector<std::string>& names();
criteria::Settings default_settings(const std::string& name);
ScenarioResult run(const std::string& name, const criteria::Settings& s, std::uint64_t seed = 1);

// Individual scenarios.
ScenarioResult half_column(const criteria::Settings& s);
ScenarioResult step_measure(const criteria::Settings& s);
ScenarioResult identity_corner(const criteria::Settings& s);
ScenarioResult constant_isometry(const criteria::Settings& s, std::uint64_t seed);
ScenarioResult shift_lifting(const criteria::Settings& s, std::uint64_t seed);

// Pieces of the step-measure example, exposed for tests.
struct StepMeasureData {
  h2::CircleMeasure mu;
  h2::MatPoly a_series;
  h2::OuterFunction b;
  h2::AnalyticFn W;
};
StepMeasureData step_measure_data(int K, int N);
cplx step_measure_a(const h2::CircleMeasure& mu, const h2::MatPoly& a_series, cplx z);

}  // namespace liftlab::scenarios
