#include "cooproute/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cooproute/error.hpp"

namespace cooproute {

namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError((path.empty() ? std::string("document") : path) + ": " +
                    msg);
}

// Strict view of one JSON object: every key must be in the allowed set.
class Fields {
 public:
  Fields(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object");
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) fail(path_, "unknown key '" + key + "'");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json& raw(const std::string& key) const {
    if (!has(key)) fail(at(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number()) fail(at(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(at(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  long long integer(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(at(key), "must be an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(at(key), "must be true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_string()) fail(at(key), "must be a string");
    return v.get<std::string>();
  }
  const json& array(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) fail(at(key), "must be an array");
    return v;
  }

 private:
  const json& j_;
  std::string path_;
};

int id_value(const Fields& f, const std::string& key) {
  const long long v = f.integer(key);
  if (v < 0 || v > 1'000'000'000) fail(f.at(key), "id out of range");
  return static_cast<int>(v);
}

std::string indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

CostSpec parse_cost(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind"))
    fail(path, "expected an object with a 'kind'");
  const std::string kind = j.at("kind").is_string()
                               ? j.at("kind").get<std::string>()
                               : std::string();
  if (kind == "linear") {
    Fields f(j, path, {"kind", "a", "g"});
    return LinearCost{f.number("a"), f.number("g")};
  }
  if (kind == "mm1") {
    Fields f(j, path, {"kind", "capacity"});
    return MM1Cost{f.number("capacity")};
  }
  fail(path + ".kind", "must be \"linear\" or \"mm1\"");
}

SolverConfig parse_solver(const json& j) {
  Fields f(j, "solver",
           {"br_tolerance", "fixed_point_tolerance", "max_sweeps",
            "grid_density", "cluster_radius", "verify_tolerance",
            "stationary_search", "max_starts", "threads", "path_cap"});
  SolverConfig c;
  c.br_tolerance = f.number("br_tolerance", c.br_tolerance);
  c.fixed_point_tolerance =
      f.number("fixed_point_tolerance", c.fixed_point_tolerance);
  c.max_sweeps = static_cast<int>(f.integer("max_sweeps", c.max_sweeps));
  c.grid_density = static_cast<int>(f.integer("grid_density", c.grid_density));
  c.cluster_radius = f.number("cluster_radius", c.cluster_radius);
  c.verify_tolerance = f.number("verify_tolerance", c.verify_tolerance);
  c.stationary_search = f.boolean("stationary_search", c.stationary_search);
  const long long starts =
      f.integer("max_starts", static_cast<long long>(c.max_starts));
  const long long threads = f.integer("threads", c.threads);
  const long long cap = f.integer("path_cap", static_cast<long long>(c.path_cap));
  if (starts < 1) fail("solver.max_starts", "must be >= 1");
  if (threads < 0) fail("solver.threads", "must be >= 0");
  if (cap < 1) fail("solver.path_cap", "must be >= 1");
  c.max_starts = static_cast<std::size_t>(starts);
  c.threads = static_cast<unsigned>(threads);
  c.path_cap = static_cast<std::size_t>(cap);
  c.validate();
  return c;
}

void check_topology(Topology topo, const Network& net) {
  auto shape = [&net](int id, int from, int to) {
    const auto& links = net.links();
    return std::any_of(links.begin(), links.end(), [&](const LinkSpec& l) {
      return l.id.value == id && l.from.value == from && l.to.value == to;
    });
  };
  if (topo == Topology::Parallel) {
    const auto links = net.links();
    const bool ok = links.size() >= 2 &&
                    std::all_of(links.begin(), links.end(), [&](const auto& l) {
                      return l.from == links[0].from && l.to == links[0].to;
                    });
    if (!ok)
      fail("topology",
           "\"parallel\" needs two or more links sharing one source and sink");
  } else if (topo == Topology::LoadBalancing) {
    const bool ok = net.num_links() == 4 && shape(1, 1, 3) && shape(2, 2, 3) &&
                    shape(3, 1, 2) && shape(4, 2, 1);
    if (!ok)
      fail("topology",
           "\"load_balancing\" needs links 1: 1->3, 2: 2->3, 3: 1->2, 4: 2->1");
  }
}

Scenario parse_scenario_object(const json& root, const Fields& top) {
  Scenario s;
  if (top.has("name")) s.name = top.string("name");
  s.topology = Topology::Custom;
  if (top.has("topology")) {
    try {
      s.topology = topology_from_string(top.string("topology"));
    } catch (const ConfigError& e) {
      fail("topology", e.what());
    }
  }

  std::vector<LinkSpec> links;
  const json& jl = top.array("links");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string path = indexed("links", i);
    Fields f(jl[i], path, {"id", "from", "to", "cost"});
    LinkSpec l{LinkId{id_value(f, "id")}, NodeId{id_value(f, "from")},
               NodeId{id_value(f, "to")},
               parse_cost(f.raw("cost"), path + ".cost")};
    links.push_back(l);
  }

  std::vector<NodeId> nodes;
  if (top.has("nodes")) {
    const json& jn = top.array("nodes");
    for (std::size_t i = 0; i < jn.size(); ++i) {
      if (!jn[i].is_number_integer())
        fail(indexed("nodes", i), "must be an integer");
      nodes.push_back(NodeId{jn[i].get<int>()});
    }
  } else {
    std::set<NodeId> seen;
    for (const auto& l : links) {
      seen.insert(l.from);
      seen.insert(l.to);
    }
    nodes.assign(seen.begin(), seen.end());
  }
  try {
    s.network = build_network(nodes, links);
  } catch (const ConfigError& e) {
    fail("links", e.what());
  }
  check_topology(s.topology, s.network);

  const json& ju = top.array("users");
  if (ju.empty()) fail("users", "at least one user is required");
  std::vector<double> alphas;
  std::vector<std::vector<double>> beta;
  for (std::size_t i = 0; i < ju.size(); ++i) {
    const std::string path = indexed("users", i);
    Fields f(ju[i], path, {"id", "source", "dest", "demand", "alpha", "beta_row"});
    UserSpec u{UserId{id_value(f, "id")}, NodeId{id_value(f, "source")},
               NodeId{id_value(f, "dest")}, f.number("demand")};
    if (u.demand < 0.0) fail(f.at("demand"), "demand must be nonnegative");
    if (f.has("alpha") && f.has("beta_row"))
      fail(path, "give either alpha or beta_row, not both");
    if (f.has("beta_row")) {
      if (i > 0 && beta.empty())
        fail(f.at("beta_row"), "beta_row must be given for every user or none");
      std::vector<double> row;
      const json& jb = f.array("beta_row");
      for (std::size_t k = 0; k < jb.size(); ++k) {
        if (!jb[k].is_number())
          fail(indexed(f.at("beta_row"), k), "must be a number");
        row.push_back(jb[k].get<double>());
      }
      beta.push_back(std::move(row));
    } else {
      if (!beta.empty())
        fail(path, "beta_row must be given for every user or none");
      const double a = f.number("alpha", 0.0);
      if (a < 0.0 || a > 1.0) fail(f.at("alpha"), "must lie in [0, 1]");
      alphas.push_back(a);
    }
    s.users.push_back(u);
  }
  std::set<UserId> ids;
  for (const auto& u : s.users)
    if (!ids.insert(u.id).second) fail("users", "duplicate user id");
  try {
    s.coop = beta.empty() ? CooperationProfile::from_degrees(alphas)
                          : CooperationProfile::from_matrix(std::move(beta));
  } catch (const ConfigError& e) {
    fail("users.beta_row", e.what());
  }
  if (top.has("solver")) s.solver = parse_solver(top.raw("solver"));
  try {
    enumerate_user_paths(s.network, s.users, s.solver.path_cap);
  } catch (const ConfigError& e) {
    fail("users", e.what());
  }
  const auto check = demand_capacity_check(s.network, s.users);
  if (!check.ok) throw InfeasibleError(check.detail);
  (void)root;
  return s;
}

SweepGrid parse_grid(const Fields& f) {
  SweepGrid g{f.number("from"), f.number("to"), f.number("step")};
  try {
    g.values();
  } catch (const ConfigError& e) {
    fail(f.at("step").substr(0, f.at("step").rfind('.')), e.what());
  }
  return g;
}

SweepSpec parse_sweep(const json& j, Scenario base) {
  Fields f(j, "sweep", {"param", "from", "to", "step", "mode", "links"});
  SweepSpec spec;
  try {
    spec.param = sweep_parameter_from_string(f.string("param"));
    if (f.has("mode")) spec.mode = alpha_mode_from_string(f.string("mode"));
  } catch (const ConfigError& e) {
    fail("sweep", e.what());
  }
  spec.grid = parse_grid(f);
  if (f.has("links")) {
    const json& jl = f.array("links");
    for (std::size_t i = 0; i < jl.size(); ++i) {
      if (!jl[i].is_number_integer())
        fail(indexed("sweep.links", i), "must be a link id");
      spec.links.push_back(LinkId{jl[i].get<int>()});
    }
  }
  if (spec.param != SweepParameter::Alpha && spec.links.empty())
    fail("sweep.links", "required for linear_slope and capacity sweeps");
  if (spec.param == SweepParameter::Alpha) {
    if (f.has("links")) fail("sweep.links", "not used by alpha sweeps");
    for (double v : spec.grid.values())
      if (v < 0.0 || v > 1.0) fail("sweep", "alpha grid must lie in [0, 1]");
  } else if (f.has("mode")) {
    fail("sweep.mode", "only used by alpha sweeps");
  }
  spec.base = std::move(base);
  try {
    for (LinkId id : spec.links) spec.base.network.link_index(id);
    spec.at(spec.grid.from);
  } catch (const ConfigError& e) {
    fail("sweep.links", e.what());
  }
  return spec;
}

MixedDocument parse_mixed(const json& j) {
  Fields f(j, "mixed", {"c1", "c2", "r1", "r2", "alpha", "alpha_grid"});
  MixedDocument d;
  d.scenario = {f.number("c1"), f.number("c2"), f.number("r1"), f.number("r2"),
                f.number("alpha", 0.0)};
  try {
    d.scenario.validate();
  } catch (const InfeasibleError&) {
    throw;
  } catch (const ConfigError& e) {
    fail("mixed", e.what());
  }
  if (f.has("alpha_grid")) {
    Fields g(f.raw("alpha_grid"), "mixed.alpha_grid", {"from", "to", "step"});
    d.alpha_grid = parse_grid(g);
    for (double v : d.alpha_grid->values())
      if (v < 0.0 || v > 1.0)
        fail("mixed.alpha_grid", "alpha grid must lie in [0, 1]");
  }
  return d;
}

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

ordered cost_json(const CostSpec& c) {
  ordered o;
  if (const auto* lin = std::get_if<LinearCost>(&c)) {
    o["kind"] = "linear";
    o["a"] = lin->slope;
    o["g"] = lin->intercept;
  } else {
    o["kind"] = "mm1";
    o["capacity"] = std::get<MM1Cost>(c).capacity;
  }
  return o;
}

ordered grid_json(const SweepGrid& g) {
  ordered o;
  o["from"] = g.from;
  o["to"] = g.to;
  o["step"] = g.step;
  return o;
}

ordered scenario_json(const Scenario& s) {
  ordered o;
  if (!s.name.empty()) o["name"] = s.name;
  o["topology"] = to_string(s.topology);
  ordered nodes = ordered::array();
  for (NodeId n : s.network.nodes()) nodes.push_back(n.value);
  o["nodes"] = nodes;
  ordered links = ordered::array();
  for (const auto& l : s.network.links()) {
    ordered jl;
    jl["id"] = l.id.value;
    jl["from"] = l.from.value;
    jl["to"] = l.to.value;
    jl["cost"] = cost_json(l.cost);
    links.push_back(jl);
  }
  o["links"] = links;

  std::vector<double> degrees;
  for (std::size_t u = 0; u < s.coop.num_users(); ++u)
    degrees.push_back(s.coop.degree(u));
  bool scalar = false;
  try {
    scalar = CooperationProfile::from_degrees(degrees) == s.coop;
  } catch (const ConfigError&) {
  }
  ordered users = ordered::array();
  for (std::size_t u = 0; u < s.users.size(); ++u) {
    ordered ju;
    ju["id"] = s.users[u].id.value;
    ju["source"] = s.users[u].source.value;
    ju["dest"] = s.users[u].dest.value;
    ju["demand"] = s.users[u].demand;
    if (scalar) ju["alpha"] = degrees[u];
    else ju["beta_row"] = s.coop.rows()[u];
    users.push_back(ju);
  }
  o["users"] = users;

  const SolverConfig& c = s.solver;
  ordered solver;
  solver["br_tolerance"] = c.br_tolerance;
  solver["fixed_point_tolerance"] = c.fixed_point_tolerance;
  solver["max_sweeps"] = c.max_sweeps;
  solver["grid_density"] = c.grid_density;
  solver["cluster_radius"] = c.cluster_radius;
  solver["verify_tolerance"] = c.verify_tolerance;
  solver["stationary_search"] = c.stationary_search;
  solver["max_starts"] = c.max_starts;
  solver["threads"] = c.threads;
  solver["path_cap"] = c.path_cap;
  o["solver"] = solver;
  return o;
}

}  // namespace

Document parse_document(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string detail = e.what();
    if (const auto colon = detail.rfind(": "); colon != std::string::npos)
      detail = detail.substr(colon + 2);
    if (const auto dash = detail.find(" - "); dash != std::string::npos)
      detail = detail.substr(dash + 3);
    throw ConfigError("syntax error at " + position(text, e.byte) + ": " +
                      detail);
  }
  if (root.is_object() && root.contains("mixed")) {
    Fields top(root, "", {"name", "mixed"});
    return parse_mixed(top.raw("mixed"));
  }
  Fields top(root, "",
             {"name", "topology", "nodes", "links", "users", "solver", "sweep"});
  Scenario s = parse_scenario_object(root, top);
  if (top.has("sweep")) return parse_sweep(top.raw("sweep"), std::move(s));
  return s;
}

Scenario parse_scenario(const std::string& text) {
  Document d = parse_document(text);
  if (auto* s = std::get_if<Scenario>(&d)) return std::move(*s);
  if (auto* sw = std::get_if<SweepSpec>(&d)) return std::move(sw->base);
  throw ConfigError("document describes a mixed scenario, not a network");
}

std::string serialize(const Document& doc) {
  ordered o;
  if (const auto* m = std::get_if<MixedDocument>(&doc)) {
    ordered jm;
    jm["c1"] = m->scenario.c1;
    jm["c2"] = m->scenario.c2;
    jm["r1"] = m->scenario.r1;
    jm["r2"] = m->scenario.r2;
    jm["alpha"] = m->scenario.alpha;
    if (m->alpha_grid) jm["alpha_grid"] = grid_json(*m->alpha_grid);
    o["mixed"] = jm;
  } else if (const auto* s = std::get_if<Scenario>(&doc)) {
    o = scenario_json(*s);
  } else {
    const auto& sw = std::get<SweepSpec>(doc);
    o = scenario_json(sw.base);
    ordered js = grid_json(sw.grid);
    js["param"] = to_string(sw.param);
    if (sw.param == SweepParameter::Alpha) {
      js["mode"] = to_string(sw.mode);
    } else {
      ordered ids = ordered::array();
      for (LinkId id : sw.links) ids.push_back(id.value);
      js["links"] = ids;
    }
    o["sweep"] = js;
  }
  return o.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace cooproute
