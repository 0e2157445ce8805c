#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cooproute/config.hpp"
#include "cooproute/error.hpp"
#include "cooproute/experiments.hpp"
#include "cooproute/report.hpp"
#include "cooproute/version.hpp"

namespace py = pybind11;
namespace cr = cooproute;

namespace {

cr::SweepSpec load_sweep(const std::optional<std::string>& preset,
                         const std::optional<std::string>& config) {
  if (preset.has_value() == config.has_value())
    throw cr::ConfigError("give exactly one of preset or config");
  if (preset) {
    cr::Preset p = cr::preset(*preset);
    if (p.kind == cr::PresetKind::Mixed)
      throw cr::ConfigError("preset " + *preset + " is a mixed preset");
    if (!p.feasibility.ok) throw cr::InfeasibleError(p.feasibility.detail);
    return p.sweep;
  }
  cr::Document d = cr::parse_document(*config);
  if (auto* sw = std::get_if<cr::SweepSpec>(&d)) return *sw;
  if (auto* s = std::get_if<cr::Scenario>(&d)) {
    cr::SweepSpec spec;
    spec.base = *s;
    return spec;
  }
  throw cr::ConfigError("config describes a mixed scenario");
}

cr::Scenario load_scenario(const std::optional<std::string>& preset,
                           const std::optional<std::string>& config,
                           std::optional<double> param) {
  const cr::SweepSpec spec = load_sweep(preset, config);
  return param ? spec.at(*param) : spec.base;
}

py::dict equilibrium_dict(const cr::EquilibriumResult& eq) {
  py::dict d;
  d["raw_cost"] = eq.raw_cost;
  d["operating_cost"] = eq.operating_cost;
  d["path_flows"] = eq.profile.path_flows();
  std::vector<std::vector<double>> links;
  for (std::size_t u = 0; u < eq.profile.num_users(); ++u) {
    auto f = eq.profile.user_link_flows(u);
    links.emplace_back(f.begin(), f.end());
  }
  d["link_flows"] = links;
  d["lambda"] = eq.lambda;
  d["kkt_residual"] = eq.kkt_residual;
  d["deviation_gain"] = eq.deviation_gain;
  d["basin_count"] = eq.basin_count;
  d["stationary_hits"] = eq.stationary_hits;
  return d;
}

py::dict mixed_dict(const cr::MixedSolution& s) {
  py::dict d;
  d["x"] = s.group_link1;
  d["w2"] = s.wardrop_link2;
  d["case"] = cr::to_string(s.kind);
  d["subcase"] = cr::to_string(s.subcase);
  d["variant"] = cr::to_string(s.variant);
  d["verified"] = s.check.passed && !s.rejected;
  d["note"] = s.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Equilibria of routing games with cooperating users";
  m.attr("__version__") = cr::kVersion;

  auto base = py::register_exception<cr::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<cr::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<cr::InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<cr::ConvergenceError>(m, "ConvergenceError",
                                               base.ptr());

  m.def("preset_names", &cr::preset_names, py::arg("include_variants") = false);

  m.def(
      "canonical_config",
      [](const std::string& text) {
        return cr::serialize(cr::parse_document(text));
      },
      py::arg("text"), "Parse a JSON config and return its canonical form.");

  m.def(
      "solve",
      [](std::optional<std::string> preset, std::optional<std::string> config,
         std::optional<double> param) {
        const cr::Scenario s = load_scenario(preset, config, param);
        cr::EquilibriumSet set;
        {
          py::gil_scoped_release release;
          set = cr::multistart_nash(s.game(), s.solver);
        }
        py::list out;
        for (const auto& eq : set.equilibria) out.append(equilibrium_dict(eq));
        return out;
      },
      py::kw_only(), py::arg("preset") = py::none(),
      py::arg("config") = py::none(), py::arg("param") = py::none());

  m.def(
      "sweep",
      [](std::optional<std::string> preset, std::optional<std::string> config,
         std::optional<std::string> mode) {
        cr::SweepSpec spec = load_sweep(preset, config);
        if (mode) spec.mode = cr::alpha_mode_from_string(*mode);
        cr::SweepTable table;
        cr::ParadoxReport report;
        {
          py::gil_scoped_release release;
          table = cr::run_sweep(spec);
          report = spec.param == cr::SweepParameter::Alpha
                       ? cr::detect_cooperation_paradox(table, spec.mode)
                       : cr::detect_braess(table);
        }
        return py::make_tuple(cr::emit_csv(table), cr::paradox_json(report));
      },
      py::kw_only(), py::arg("preset") = py::none(),
      py::arg("config") = py::none(), py::arg("mode") = py::none(),
      "Run a sweep; returns (csv_text, paradox_report_json).");

  m.def(
      "verify",
      [](std::vector<std::vector<double>> flows,
         std::optional<std::string> preset, std::optional<std::string> config,
         std::optional<double> param) {
        const cr::Scenario s = load_scenario(preset, config, param);
        const cr::Game game = s.game();
        const auto profile = game.profile(std::move(flows));
        const auto v = cr::verify_nash(game, profile, s.solver.verify_tolerance);
        py::dict d;
        d["passed"] = v.passed;
        d["max_kkt_residual"] = v.max_kkt_residual;
        d["max_deviation_gain"] = v.max_deviation_gain;
        d["raw_cost"] = game.raw_costs(profile);
        return d;
      },
      py::arg("flows"), py::kw_only(), py::arg("preset") = py::none(),
      py::arg("config") = py::none(), py::arg("param") = py::none());

  m.def(
      "mixed",
      [](double c1, double c2, double r1, double r2, double alpha,
         bool case_audit) {
        const cr::MixedScenario s{c1, c2, r1, r2, alpha};
        s.validate();
        cr::ClosedFormOptions opt;
        opt.case_audit = case_audit;
        const auto numeric = cr::mixed_numeric(s);
        const auto all = cr::mixed_closed_form(s, opt);
        py::list num, cf;
        for (const auto& x : numeric.solutions) num.append(mixed_dict(x));
        for (const auto& x : case_audit ? all : cr::accepted_candidates(all))
          cf.append(mixed_dict(x));
        py::dict d;
        d["numeric"] = num;
        d["closed_form"] = cf;
        return d;
      },
      py::arg("c1"), py::arg("c2"), py::arg("r1"), py::arg("r2"),
      py::arg("alpha"), py::arg("case_audit") = false);

  m.def(
      "wardrop_split",
      [](double c1, double c2, double g1, double g2, double mass) {
        const auto w = cr::wardrop_split(c1, c2, g1, g2, mass);
        return py::make_tuple(w.link1, w.link2);
      },
      py::arg("c1"), py::arg("c2"), py::arg("group1"), py::arg("group2"),
      py::arg("mass"));
}
