#include "gridsleuth/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace gridsleuth {

namespace {

using nlohmann::ordered_json;

ordered_json label_json(const std::string& label) {
  const bool numeric = !label.empty() && label.size() < 10 &&
                       std::all_of(label.begin(), label.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (numeric) return std::stoll(label);
  return label;
}

ordered_json nodes_json(const Topology& t, const NodeSet& nodes) {
  ordered_json arr = ordered_json::array();
  for (NodeId n : nodes) arr.push_back(label_json(t.node(n).label));
  return arr;
}

ordered_json action_json(const Topology& t, const SwitchingAction& a) {
  return {{"step", a.step},
          {"group", a.group},
          {"edge", t.edge(a.edge).label},
          {"kind", std::string(to_string(t.edge(a.edge).kind.kind))},
          {"action", a.action == SwitchOp::Close ? "close" : "open"}};
}

ordered_json check_json(const Topology& t, const FrtuCheck& c) {
  return {{"frtu", t.frtu(c.breaker).name},
          {"alarm", c.alarm},
          {"after_step", c.after_step},
          {"zone", nodes_json(t, c.zone)}};
}

ordered_json step_json(const Topology& t, const SuspectStep& s) {
  return {{"frtu", t.frtu(s.frtu).name}, {"nodes", nodes_json(t, s.nodes)}};
}

ordered_json episode_json(const Topology& t, const LocalizationReport& r) {
  ordered_json ep;
  ep["alarm"] = t.frtu(r.alarm).name;
  ep["initial_state"] = r.initial_state.str();
  ep["final_state"] = r.final_state.str();
  ordered_json islands = ordered_json::array();
  for (const auto& isl : r.islands) {
    ordered_json opened = ordered_json::array();
    for (EdgeId e : isl.opened) opened.push_back(t.edge(e).label);
    islands.push_back({{"nodes", nodes_json(t, isl.nodes)},
                       {"opened", opened},
                       {"reconnect", isl.reconnect ? ordered_json(t.edge(*isl.reconnect).label) : ordered_json()}});
  }
  ep["islands"] = islands;
  ep["actions"] = ordered_json::array();
  for (const auto& a : r.actions) ep["actions"].push_back(action_json(t, a));
  ep["checks"] = ordered_json::array();
  for (const auto& c : r.checks) ep["checks"].push_back(check_json(t, c));
  ep["suspect_history"] = ordered_json::array();
  for (const auto& s : r.suspect_history) ep["suspect_history"].push_back(step_json(t, s));
  ep["final_suspects"] = nodes_json(t, r.final_suspects);
  ep["unresolved"] = nodes_json(t, r.unresolved);
  ep["irreducible"] = r.irreducible;
  ep["cleared_by_isolation"] = r.cleared_by_isolation;
  ep["constraint_violations"] = r.constraint_violations;
  ep["log"] = r.log;
  return ep;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string report_json(const Topology& t, const ScenarioOutcome& outcome) {
  ordered_json doc;
  doc["scenario"] = outcome.scenario;
  doc["alarms"] = ordered_json::array();
  for (EdgeId a : outcome.alarms) doc["alarms"].push_back(t.frtu(a).name);

  // Flat views across episodes; every episode starts from the same operating state.
  ordered_json actions = ordered_json::array();
  ordered_json checks = ordered_json::array();
  ordered_json history = ordered_json::array();
  ordered_json violations = ordered_json::array();
  bool irreducible = false;
  for (const auto& ep : outcome.episodes) {
    const std::string alarm = t.frtu(ep.alarm).name;
    for (const auto& a : ep.actions) {
      auto j = action_json(t, a);
      j["episode_alarm"] = alarm;
      actions.push_back(j);
    }
    for (const auto& c : ep.checks) {
      auto j = check_json(t, c);
      j["episode_alarm"] = alarm;
      checks.push_back(j);
    }
    for (const auto& s : ep.suspect_history) history.push_back(step_json(t, s));
    for (const auto& v : ep.constraint_violations) violations.push_back(v);
    irreducible = irreducible || ep.irreducible;
  }
  doc["actions"] = actions;
  doc["checks"] = checks;
  doc["suspect_history"] = history;
  doc["final_suspects"] = nodes_json(t, outcome.final_suspects);
  doc["unresolved"] = nodes_json(t, outcome.unresolved);
  doc["irreducible"] = irreducible;
  doc["constraint_violations"] = violations;
  doc["episodes"] = ordered_json::array();
  for (const auto& ep : outcome.episodes) doc["episodes"].push_back(episode_json(t, ep));
  return doc.dump(2) + "\n";
}

std::string step_log(const Topology& t, const ScenarioOutcome& outcome) {
  std::string out = "scenario " + outcome.scenario + "\n";
  if (outcome.episodes.empty()) out += "no alarm\n";
  for (const auto& ep : outcome.episodes) {
    for (const auto& line : ep.log) out += line + "\n";
  }
  if (!outcome.episodes.empty()) out += "final suspects " + format_nodes(t, outcome.final_suspects) + "\n";
  return out;
}

void write_scores_csv(std::ostream& out, std::string_view node, const std::vector<MeterScore>& ranked) {
  out << "meter_id,node,s_a,p_a,index,rank\n";
  int rank = 0;
  for (const auto& m : ranked) {
    out << m.meter_id << ',' << node << ',' << format_number(m.score.value) << ',' << format_number(m.probability.value)
        << ',' << format_number(m.index()) << ',' << ++rank << '\n';
  }
}

}  // namespace gridsleuth
