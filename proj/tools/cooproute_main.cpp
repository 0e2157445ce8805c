// cooproute: command-line front end for the routing-game solvers.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cooproute/config.hpp"
#include "cooproute/error.hpp"
#include "cooproute/experiments.hpp"
#include "cooproute/report.hpp"
#include "cooproute/version.hpp"

namespace cr = cooproute;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitConvergence = 4;

struct Options {
  std::string preset;
  std::string config;
  std::string out;
  std::string report;
  std::string manifest;
  std::string flows;
  std::string mode;
  std::string grid;
  std::string alpha_grid;
  std::optional<double> param;
  bool case_audit = false;
  bool all = false;
  std::string show;
};

class Timer {
 public:
  explicit Timer(cr::RunManifest& m, std::string name)
      : m_(m), name_(std::move(name)), start_(Clock::now()) {}
  ~Timer() {
    const std::chrono::duration<double> d = Clock::now() - start_;
    m_.phases.emplace_back(name_, d.count());
  }

 private:
  using Clock = std::chrono::steady_clock;
  cr::RunManifest& m_;
  std::string name_;
  Clock::time_point start_;
};

cr::SweepGrid parse_grid(const std::string& text, const char* flag) {
  cr::SweepGrid g;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &g.from, &g.to, &g.step,
                  &tail) != 3)
    throw cr::ConfigError(std::string(flag) + " expects from:to:step, got '" +
                          text + "'");
  g.values();
  return g;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cr::ConfigError("cannot write " + path);
  out << text;
}

// The loaded input: a preset or a config document.
struct Input {
  std::optional<cr::Preset> preset;
  std::optional<cr::Document> doc;
};

Input load(const Options& o, cr::RunManifest& m) {
  if (o.preset.empty() == o.config.empty())
    throw cr::ConfigError("give exactly one of --preset or --config");
  Timer t(m, "load");
  Input in;
  if (!o.preset.empty()) {
    in.preset = cr::preset(o.preset);
    m.source = "preset:" + o.preset;
    m.warn_assumed(in.preset->assumed);
    if (in.preset->kind != cr::PresetKind::Mixed) {
      m.solver = in.preset->sweep.base.solver;
      if (!in.preset->feasibility.ok)
        throw cr::InfeasibleError("preset " + o.preset + ": " +
                                  in.preset->feasibility.detail);
    }
  } else {
    m.source = o.config;
    in.doc = cr::parse_document(cr::read_text_file(o.config));
    if (const auto* s = std::get_if<cr::Scenario>(&*in.doc))
      m.solver = s->solver;
    else if (const auto* sw = std::get_if<cr::SweepSpec>(&*in.doc))
      m.solver = sw->base.solver;
  }
  return in;
}

std::optional<cr::SweepSpec> sweep_of(const Input& in) {
  if (in.preset && in.preset->kind != cr::PresetKind::Mixed)
    return in.preset->sweep;
  if (in.doc)
    if (const auto* sw = std::get_if<cr::SweepSpec>(&*in.doc)) return *sw;
  return std::nullopt;
}

cr::Scenario scenario_of(const Input& in, const Options& o) {
  if (const auto sw = sweep_of(in))
    return o.param ? sw->at(*o.param) : sw->base;
  if (in.doc)
    if (const auto* s = std::get_if<cr::Scenario>(&*in.doc)) {
      if (o.param) throw cr::ConfigError("--param needs a sweep document");
      return *s;
    }
  throw cr::ConfigError("input describes a mixed scenario; use 'mixed'");
}

int cmd_presets(const Options& o) {
  if (!o.show.empty()) {
    const cr::Preset p = cr::preset(o.show);
    if (p.kind == cr::PresetKind::Mixed)
      std::cout << cr::serialize(cr::MixedDocument{p.mixed, std::nullopt});
    else
      std::cout << cr::serialize(p.sweep);
    return 0;
  }
  for (const auto& name : cr::preset_names(o.all))
    std::cout << name << '\t' << cr::preset(name).description << '\n';
  return 0;
}

int cmd_solve(const Options& o, cr::RunManifest& m) {
  const Input in = load(o, m);
  const cr::Scenario s = scenario_of(in, o);
  const cr::Game game = s.game();
  cr::EquilibriumSet set;
  {
    Timer t(m, "solve");
    set = cr::multistart_nash(game, s.solver);
  }
  m.warn_solver("solve", set.diagnostics);
  write_output(o.out, cr::emit_equilibria_csv(game, set));
  return 0;
}

int cmd_sweep(const Options& o, cr::RunManifest& m) {
  const Input in = load(o, m);
  auto spec = sweep_of(in);
  if (!spec) throw cr::ConfigError("input has no sweep; use a sweep document");
  if (!o.grid.empty()) spec->grid = parse_grid(o.grid, "--grid");
  if (!o.mode.empty()) {
    if (spec->param != cr::SweepParameter::Alpha)
      throw cr::ConfigError("--mode applies to alpha sweeps only");
    spec->mode = cr::alpha_mode_from_string(o.mode);
  }
  cr::SweepTable table;
  {
    Timer t(m, "sweep");
    table = cr::run_sweep(*spec);
  }
  std::size_t failed = 0;
  for (const auto& row : table.rows) {
    const std::string where = spec->param == cr::SweepParameter::Alpha
                                  ? "alpha=" + cr::format_number(row.param)
                                  : cr::to_string(spec->param) + "=" +
                                        cr::format_number(row.param);
    if (row.set) {
      m.warn_solver(where, row.set->diagnostics);
    } else {
      ++failed;
      m.warnings.push_back(where + ": " + row.error);
      std::cerr << where << ": " << row.error << '\n';
    }
  }
  write_output(o.out, cr::emit_csv(table));
  cr::ParadoxReport report;
  {
    Timer t(m, "paradox");
    report = spec->param == cr::SweepParameter::Alpha
                 ? cr::detect_cooperation_paradox(table, spec->mode)
                 : cr::detect_braess(table);
  }
  if (report.discrepancy)
    m.warnings.push_back(
        "cooperation paradox reported without multiple equilibria");
  if (!o.report.empty()) write_output(o.report, cr::paradox_json(report));
  if (!table.rows.empty() && failed == table.rows.size()) {
    std::cerr << "no grid point produced an equilibrium\n";
    return kExitConvergence;
  }
  return 0;
}

int cmd_mixed(const Options& o, cr::RunManifest& m) {
  const Input in = load(o, m);
  cr::MixedScenario base;
  std::optional<cr::SweepGrid> grid;
  if (in.preset) {
    if (in.preset->kind != cr::PresetKind::Mixed)
      throw cr::ConfigError("preset " + o.preset + " is not a mixed preset");
    base = in.preset->mixed;
    grid = in.preset->mixed_alpha_grid;
  } else {
    const auto* d = std::get_if<cr::MixedDocument>(&*in.doc);
    if (!d) throw cr::ConfigError("config has no 'mixed' object");
    base = d->scenario;
    grid = d->alpha_grid;
  }
  if (!o.alpha_grid.empty()) grid = parse_grid(o.alpha_grid, "--alpha-grid");
  std::vector<double> alphas =
      grid ? grid->values() : std::vector<double>{base.alpha};

  cr::ClosedFormOptions cf;
  cf.case_audit = o.case_audit;
  std::vector<cr::MixedCsvRow> rows;
  Timer t(m, "mixed");
  for (double a : alphas) {
    cr::MixedScenario s = base;
    s.alpha = a;
    s.validate();
    const std::string where = "alpha=" + cr::format_number(a);
    const auto numeric = cr::mixed_numeric(s);
    if (numeric.nonconverged_starts)
      m.warnings.push_back(where + ": " +
                           std::to_string(numeric.nonconverged_starts) +
                           " alternation starts did not converge");
    for (const auto& sol : numeric.solutions)
      rows.push_back({a, "numeric", sol});
    const auto all = cr::mixed_closed_form(s, cf);
    for (const auto& sol : all)
      if (sol.rejected && sol.note.find("skipped") != std::string::npos)
        m.warnings.push_back(where + ": interior closed form skipped near "
                                     "alpha = 0.5");
    const auto shown = o.case_audit ? all : cr::accepted_candidates(all);
    for (const auto& sol : shown) {
      if (std::isnan(sol.group_link1)) continue;
      rows.push_back({a, "closed_form", sol});
    }
  }
  write_output(o.out, cr::emit_mixed_csv(rows));
  return 0;
}

int cmd_verify(const Options& o, cr::RunManifest& m) {
  const Input in = load(o, m);
  const cr::Scenario s = scenario_of(in, o);
  const cr::Game game = s.game();
  const cr::FlowProfile profile =
      game.profile(cr::parse_flows(cr::read_text_file(o.flows)));
  const auto v = cr::verify_nash(game, profile, s.solver.verify_tolerance);
  write_output(o.out, cr::verification_json(game, profile, v));
  if (!v.passed) std::cerr << "profile is not a Nash equilibrium\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria of routing games with cooperating users"};
  app.set_version_flag("--version", cr::kVersion);
  app.require_subcommand(1);
  Options o;

  auto add_input = [&o](CLI::App* sub) {
    sub->add_option("--preset", o.preset, "built-in preset name");
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--manifest", o.manifest, "run manifest JSON file");
  };

  auto* presets = app.add_subcommand("presets", "list built-in presets");
  presets->add_flag("--all", o.all, "include variant presets");
  presets->add_option("--show", o.show, "print a preset as a config document");

  auto* solve = app.add_subcommand("solve", "equilibria of one scenario");
  add_input(solve);
  solve->add_option("--param", o.param, "sweep parameter value to solve at");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep and paradoxes");
  add_input(sweep);
  sweep->add_option("--report", o.report, "paradox report JSON file");
  sweep->add_option("--grid", o.grid, "override grid as from:to:step");
  sweep->add_option("--mode", o.mode, "alpha mode: symmetric|asymmetric");

  auto* mixed = app.add_subcommand("mixed", "mixed Nash-Wardrop equilibria");
  add_input(mixed);
  mixed->add_option("--alpha-grid", o.alpha_grid, "alphas as from:to:step");
  mixed->add_flag("--case-audit", o.case_audit,
                  "include every closed-form coefficient variant");

  auto* verify = app.add_subcommand("verify", "check a flow profile");
  add_input(verify);
  verify->add_option("--flows", o.flows, "JSON {\"flows\": [[...], ...]}")
      ->required();
  verify->add_option("--param", o.param, "sweep parameter value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  cr::RunManifest manifest;
  manifest.version = cr::kVersion;
  int code = 0;
  try {
    if (*presets) return cmd_presets(o);
    if (*solve) {
      manifest.command = "solve";
      code = cmd_solve(o, manifest);
    } else if (*sweep) {
      manifest.command = "sweep";
      code = cmd_sweep(o, manifest);
    } else if (*mixed) {
      manifest.command = "mixed";
      code = cmd_mixed(o, manifest);
    } else if (*verify) {
      manifest.command = "verify";
      code = cmd_verify(o, manifest);
    }
  } catch (const cr::InfeasibleError& e) {
    std::cerr << e.what() << '\n';
    code = kExitInfeasible;
  } catch (const cr::ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    code = kExitConvergence;
  } catch (const cr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = 1;
  }
  if (!o.manifest.empty()) {
    try {
      write_output(o.manifest, manifest.json());
    } catch (const std::exception& e) {
      std::cerr << "manifest: " << e.what() << '\n';
    }
  }
  return code;
}
