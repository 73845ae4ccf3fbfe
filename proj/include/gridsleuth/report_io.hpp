#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gridsleuth/analytics.hpp"
#include "gridsleuth/planner.hpp"

namespace gridsleuth {

/// Everything one `localize run` produced for one scenario.
struct ScenarioOutcome {
  std::string scenario;
  std::vector<EdgeId> alarms;
  std::vector<LocalizationReport> episodes;
  NodeSet final_suspects;
  NodeSet unresolved;
};

std::string report_json(const Topology& t, const ScenarioOutcome& outcome);
std::string step_log(const Topology& t, const ScenarioOutcome& outcome);

/// meter_id,node,s_a,p_a,index,rank
void write_scores_csv(std::ostream& out, std::string_view node, const std::vector<MeterScore>& ranked);

std::string format_number(double x);

}  // namespace gridsleuth
