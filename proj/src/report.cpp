#include "cooproute/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "cooproute/error.hpp"

namespace cooproute {

namespace {

using ordered = nlohmann::ordered_json;

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// JSON has no inf/nan; emit null for them.
ordered number_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered numbers_json(const std::vector<double>& v) {
  ordered a = ordered::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

std::vector<std::string> cost_and_flow_header(
    const std::vector<UserId>& users, const std::vector<LinkId>& links) {
  std::vector<std::string> h;
  for (UserId u : users) {
    h.push_back("J_" + std::to_string(u.value));
    h.push_back("Jhat_" + std::to_string(u.value));
  }
  for (UserId u : users)
    for (LinkId l : links)
      h.push_back("f_" + std::to_string(u.value) + "_" +
                  std::to_string(l.value));
  return h;
}

void append_cost_and_flow(std::vector<std::string>& row,
                          const EquilibriumResult& eq) {
  for (std::size_t u = 0; u < eq.raw_cost.size(); ++u) {
    row.push_back(format_number(eq.raw_cost[u]));
    row.push_back(format_number(eq.operating_cost[u]));
  }
  for (std::size_t u = 0; u < eq.profile.num_users(); ++u)
    for (double f : eq.profile.user_link_flows(u))
      row.push_back(format_number(f));
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
  return buf;
}

std::string emit_csv(const SweepTable& table) {
  std::vector<std::string> header = {"param", "cluster", "basin_count"};
  for (auto& h : cost_and_flow_header(table.users, table.links))
    header.push_back(std::move(h));
  std::string out;
  append_row(out, header);
  for (const auto& point : table.rows) {
    if (!point.set) continue;
    const auto& eqs = point.set->equilibria;
    for (std::size_t k = 0; k < eqs.size(); ++k) {
      const int track =
          k < point.track.size() ? point.track[k] : static_cast<int>(k);
      std::vector<std::string> row = {format_number(point.param),
                                      std::to_string(track),
                                      std::to_string(eqs[k].basin_count)};
      append_cost_and_flow(row, eqs[k]);
      append_row(out, row);
    }
  }
  return out;
}

std::string emit_csv(const CsvData& data) {
  std::string out;
  append_row(out, data.header);
  for (const auto& r : data.rows) {
    std::vector<std::string> cells;
    for (double v : r) cells.push_back(format_number(v));
    append_row(out, cells);
  }
  return out;
}

CsvData parse_csv(const std::string& text) {
  CsvData data;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ConfigError("csv: missing header row");
  data.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != data.header.size())
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(data.header.size()) + " fields, got " +
                        std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0')
        throw ConfigError("csv line " + std::to_string(lineno) +
                          ": not a number: '" + c + "'");
      row.push_back(v);
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::string emit_equilibria_csv(const Game& game, const EquilibriumSet& set) {
  std::vector<UserId> users;
  for (const auto& u : game.users()) users.push_back(u.id);
  std::vector<LinkId> links;
  for (const auto& l : game.network().links()) links.push_back(l.id);

  std::vector<std::string> header = {"cluster", "basin_count",
                                     "stationary_hits"};
  for (auto& h : cost_and_flow_header(users, links))
    header.push_back(std::move(h));
  header.push_back("kkt_residual");
  header.push_back("deviation_gain");
  std::string out;
  append_row(out, header);
  for (std::size_t k = 0; k < set.equilibria.size(); ++k) {
    const auto& eq = set.equilibria[k];
    std::vector<std::string> row = {std::to_string(k),
                                    std::to_string(eq.basin_count),
                                    std::to_string(eq.stationary_hits)};
    append_cost_and_flow(row, eq);
    row.push_back(format_number(eq.kkt_residual));
    row.push_back(format_number(eq.deviation_gain));
    append_row(out, row);
  }
  return out;
}

std::string emit_mixed_csv(const std::vector<MixedCsvRow>& rows) {
  std::string out =
      "alpha,source,case,subcase,variant,x,w2,verified\n";
  for (const auto& r : rows) {
    const auto& s = r.solution;
    append_row(out, {format_number(r.alpha), r.source, to_string(s.kind),
                     to_string(s.subcase), to_string(s.variant),
                     format_number(s.group_link1),
                     format_number(s.wardrop_link2),
                     s.check.passed && !s.rejected ? "1" : "0"});
  }
  return out;
}

std::string paradox_json(const ParadoxReport& report) {
  ordered o;
  o["kind"] = to_string(report.kind);
  if (!report.direction.empty()) o["direction"] = report.direction;
  o["multiplicity_in_sweep"] = report.multiplicity_in_sweep;
  o["discrepancy"] = report.discrepancy;
  ordered ws = ordered::array();
  for (const auto& w : report.witnesses) {
    ordered jw;
    jw["from"] = w.from;
    jw["to"] = w.to;
    jw["points"] = w.points;
    jw["track"] = w.track;
    if (w.user >= 0) jw["user"] = w.user;
    jw["evidence"] = w.evidence;
    jw["cost_start"] = numbers_json(w.cost_start);
    jw["cost_end"] = numbers_json(w.cost_end);
    ws.push_back(jw);
  }
  o["witnesses"] = ws;
  return o.dump(2) + "\n";
}

std::string verification_json(const Game& game, const FlowProfile& profile,
                              const NashVerification& v) {
  ordered o;
  o["passed"] = v.passed;
  o["feasible"] = v.feasible;
  o["max_kkt_residual"] = number_json(v.max_kkt_residual);
  o["max_deviation_gain"] = number_json(v.max_deviation_gain);
  ordered users = ordered::array();
  const auto raw = game.raw_costs(profile);
  const auto op = game.operating_costs(profile);
  for (std::size_t u = 0; u < game.num_users(); ++u) {
    ordered ju;
    ju["id"] = game.users()[u].id.value;
    ju["J"] = number_json(raw[u]);
    ju["Jhat"] = number_json(op[u]);
    ordered paths = ordered::array();
    for (std::size_t k = 0; k < game.paths()[u].size(); ++k) {
      ordered jp;
      jp["path"] = format_path(game.network(), game.paths()[u][k]);
      jp["flow"] = profile.path_flows(u)[k];
      paths.push_back(jp);
    }
    ju["paths"] = paths;
    if (u < v.lambda.size()) ju["lambda"] = number_json(v.lambda[u]);
    if (u < v.kkt_residual.size())
      ju["kkt_residual"] = number_json(v.kkt_residual[u]);
    if (u < v.deviation_gain.size())
      ju["deviation_gain"] = number_json(v.deviation_gain[u]);
    users.push_back(ju);
  }
  o["users"] = users;
  return o.dump(2) + "\n";
}

void RunManifest::warn_assumed(const std::vector<Assumption>& assumed) {
  for (const auto& a : assumed)
    warnings.push_back("assumed " + a.field + " = " + a.value + ": " +
                       a.reason);
}

void RunManifest::warn_solver(const std::string& where,
                              const SetDiagnostics& d) {
  auto add = [&](std::size_t n, const char* what) {
    if (n)
      warnings.push_back(where + ": " + std::to_string(n) + " " + what);
  };
  add(d.br_nonconverged, "best-response starts did not converge");
  add(d.br_oscillating, "best-response starts oscillated");
  add(d.br_failed, "starts raised errors");
  add(d.rejected, "candidates failed verification");
}

std::string RunManifest::json() const {
  ordered o;
  o["version"] = version;
  o["command"] = command;
  o["source"] = source;
  ordered s;
  s["br_tolerance"] = solver.br_tolerance;
  s["fixed_point_tolerance"] = solver.fixed_point_tolerance;
  s["max_sweeps"] = solver.max_sweeps;
  s["grid_density"] = solver.grid_density;
  s["cluster_radius"] = solver.cluster_radius;
  s["verify_tolerance"] = solver.verify_tolerance;
  s["stationary_search"] = solver.stationary_search;
  s["max_starts"] = solver.max_starts;
  s["threads"] = solver.threads;
  s["path_cap"] = solver.path_cap;
  o["solver"] = s;
  ordered p = ordered::object();
  for (const auto& [name, secs] : phases) p[name] = secs;
  o["phases_seconds"] = p;
  o["warnings"] = warnings;
  return o.dump(2) + "\n";
}

std::vector<std::vector<double>> parse_flows(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("flows: ") + e.what());
  }
  if (!j.is_object() || !j.contains("flows") || j.size() != 1 ||
      !j["flows"].is_array())
    throw ConfigError("flows: expected {\"flows\": [[...], ...]}");
  std::vector<std::vector<double>> flows;
  for (std::size_t u = 0; u < j["flows"].size(); ++u) {
    const auto& row = j["flows"][u];
    const std::string path = "flows[" + std::to_string(u) + "]";
    if (!row.is_array()) throw ConfigError(path + ": must be an array");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ConfigError(path + ": must hold numbers");
      r.push_back(v.get<double>());
    }
    flows.push_back(std::move(r));
  }
  return flows;
}

}  // namespace cooproute
