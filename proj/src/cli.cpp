#include "fluxq/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fluxq/netlist.hpp"
#include "fluxq/quantize.hpp"
#include "fluxq/serialize.hpp"
#include "fluxq/simulate.hpp"
#include "fluxq/topology.hpp"

namespace fluxq::cli {

using nlohmann::json;

std::string format_ghz(double ghz) {
  if (!(ghz > 0.0) || !std::isfinite(ghz)) return ghz == 0.0 ? "0" : std::to_string(ghz);
  auto digits = static_cast<int>(std::floor(std::log10(ghz)));
  const double scale = std::pow(10.0, digits - 2);
  const double rounded = std::round(ghz / scale) * scale;
  digits = static_cast<int>(std::floor(std::log10(rounded)));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", std::max(0, 2 - digits), rounded);
  return buf;
}

namespace {

std::optional<Circuit> load(const RunConfig& cfg, std::ostream& err, int& code) {
  Circuit circuit;
  try {
    circuit = load_netlist(cfg.netlist);
  } catch (const ParseError& e) {
    err << cfg.netlist << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    code = kParseFailure;
    return std::nullopt;
  } catch (const std::exception& e) {
    err << cfg.netlist << ": " << e.what() << "\n";
    code = kParseFailure;
    return std::nullopt;
  }
  const auto violations = validate_circuit(circuit);
  if (!violations.empty()) {
    for (const auto& v : violations) err << cfg.netlist << ": " << v.message << "\n";
    code = kValidationFailure;
    return std::nullopt;
  }
  return circuit;
}

GeometricPolicy policy_of(const RunConfig& cfg) {
  GeometricPolicy p;
  p.mode = cfg.geometric;
  p.default_cg = cfg.cg;
  p.default_lg = cfg.lg;
  return p;
}

struct Pipeline {
  Augmentation aug;
  QuadraticLagrangian lag;
  HamiltonianSystem h;
  ModeDecomposition modes;
};

std::optional<Pipeline> quantize(const RunConfig& cfg, std::ostream& err, int& code) {
  auto circuit = load(cfg, err, code);
  if (!circuit) return std::nullopt;
  Pipeline p;
  p.aug = augment_geometric(*circuit, policy_of(cfg));
  p.lag = build_lagrangian(p.aug, cfg.rep);
  try {
    p.h = legendre_transform(p.lag);
  } catch (const SingularKineticMatrix& e) {
    err << e.diagnosis().summary() << "\n";
    code = kUnquantizable;
    return std::nullopt;
  }
  p.modes = normal_modes(p.h);
  return p;
}

std::string sci(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string sci3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool quantizable_in(const QuadraticLagrangian& lag) { return diagnose_quantizability(lag).quantizable; }

}  // namespace

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  int code = kOk;
  auto circuit = load(cfg, err, code);
  if (!circuit) return code;
  const auto report = analyze_topology(*circuit);
  const auto node = node_lagrangian(*circuit);
  const auto loop = loop_lagrangian(*circuit, report.loops);
  const auto node_diag = diagnose_quantizability(node);
  const auto loop_diag = diagnose_quantizability(loop);

  const auto reduction = reduce_circuit(*circuit);
  json suggestion = nullptr;
  if (reduction.changed()) {
    const auto rtree = build_spanning_tree(reduction.circuit);
    suggestion = reduction_json(reduction);
    suggestion["quantizable"] = {
        {"node", quantizable_in(node_lagrangian(reduction.circuit))},
        {"loop", quantizable_in(loop_lagrangian(reduction.circuit, fundamental_loops(reduction.circuit, rtree)))}};
  }

  if (cfg.format == Format::Table) {
    out << "nodes (n)          " << report.n << "\n"
        << "components (c)     " << report.c << "\n"
        << "loops (l)          " << report.l << "\n"
        << "passive nodes      ";
    for (std::size_t i = 0; i < report.passive_nodes.size(); ++i)
      out << (i ? ", " : "") << report.passive_nodes[i];
    out << (report.passive_nodes.empty() ? "none" : "") << "\n"
        << "loop deficiency    " << report.loop_deficiency.deficiency << "\n"
        << "reducible          " << (report.reducible ? "yes" : "no") << "\n"
        << node_diag.summary() << "\n"
        << loop_diag.summary() << "\n";
    if (reduction.changed()) out << "reduction:\n" << serialize_netlist(reduction.circuit);
    return kOk;
  }

  json j = topology_json(*circuit, report);
  j["quantizable"] = {{"node", node_diag.quantizable}, {"loop", loop_diag.quantizable}};
  j["diagnosis"] = {{"node", node_diag.summary()}, {"loop", loop_diag.summary()}};
  j["reduction"] = suggestion;
  out << j.dump(2) << "\n";
  return kOk;
}

int cmd_modes(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  int code = kOk;
  auto p = quantize(cfg, err, code);
  if (!p) return code;
  const auto attribution = mode_attribution(p->modes, p->h);
  const auto spread = coordinate_spreads(ground_state(p->modes, p->h));

  switch (cfg.format) {
    case Format::Table: {
      out << "representation: " << to_string(cfg.rep) << "  geometric: " << to_string(cfg.geometric) << "\n";
      out << std::left << std::setw(12) << "variable" << std::setw(14) << "freq (GHz)" << std::setw(12)
          << "delta_x" << "delta_p" << "\n";
      for (std::size_t i = 0; i < attribution.size(); ++i) {
        const auto& a = attribution[i];
        const auto ii = static_cast<Eigen::Index>(i);
        out << std::setw(12) << a.coordinate << std::setw(14) << format_ghz(to_ghz(a.omega)) << std::setw(12)
            << sci3(spread.delta_x(ii)) << sci3(spread.delta_p(ii)) << "\n";
      }
      if (p->modes.zero_modes) out << "zero modes: " << p->modes.zero_modes << "\n";
      return kOk;
    }
    case Format::Csv: {
      out << "coordinate,frequency_ghz,delta_x,delta_p\n";
      for (std::size_t i = 0; i < attribution.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out << attribution[i].coordinate << "," << sci(to_ghz(attribution[i].omega)) << ","
            << sci(spread.delta_x(ii)) << "," << sci(spread.delta_p(ii)) << "\n";
      }
      return kOk;
    }
    default: {
      json j = modes_json(p->h, p->modes);
      j["geometric"] = to_string(cfg.geometric);
      j["added_capacitors"] = p->aug.added_capacitors;
      out << j.dump(2) << "\n";
      return kOk;
    }
  }
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.samples == 0) {
    err << "samples must be at least 1\n";
    return kUsage;
  }
  if (cfg.format == Format::Table) {
    err << "simulate writes csv or json\n";
    return kUsage;
  }
  int code = kOk;
  auto p = quantize(cfg, err, code);
  if (!p) return code;

  std::map<std::string, double> ics = p->aug.design.initial_conditions();
  if (ics.empty())
    for (const auto& c : p->aug.design.components()) ics[c.id] = c.is_capacitor() ? 2e-3 : 0.0;

  PhasePoint z0;
  try {
    z0 = initial_state(p->lag, ics);
  } catch (const InconsistentInitialConditions& e) {
    err << e.what() << "\n";
    return kInconsistentIcs;
  }
  const auto times = uniform_times(cfg.tmax, cfg.samples);
  const auto traj = evolve_modes(p->h, p->modes, z0, times);
  const auto obs = observables(p->lag, p->h, traj);

  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> series;
  for (std::size_t i = 0; i < obs.ids.size(); ++i) {
    if (p->lag.find_branch(obs.ids[i])->geometric) continue;
    const auto col = static_cast<Eigen::Index>(i);
    names.push_back(obs.ids[i] + "_V");
    series.emplace_back(obs.voltage.col(col));
    names.push_back(obs.ids[i] + "_A");
    series.emplace_back(obs.current.col(col));
  }
  for (const auto& m : reduce_circuit(p->aug.design).merges) {
    bool original = true;
    for (const auto& mem : m.members) original = original && p->aug.design.find_component(mem.id);
    if (!original) continue;
    std::string name;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(traj.coords.rows());
    const bool parallel = m.kind == Merge::Kind::Parallel;
    for (const auto& mem : m.members) {
      name += mem.id;
      const auto col = obs.column(mem.id);
      sum += mem.sign * (parallel ? obs.current.col(col) : obs.voltage.col(col));
    }
    names.push_back(name + (parallel ? "_sum_A" : "_sum_V"));
    series.push_back(std::move(sum));
  }

  if (cfg.format == Format::Json) {
    json cols = json::array();
    for (std::size_t k = 0; k < names.size(); ++k)
      cols.push_back({{"name", names[k]}, {"values", std::vector<double>(series[k].data(), series[k].data() + series[k].size())}});
    out << json{{"representation", to_string(cfg.rep)}, {"t_s", times}, {"series", cols}}.dump() << "\n";
    return kOk;
  }
  out << "t_s";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << sci(times[i]);
    for (const auto& s : series) out << "," << sci(s(static_cast<Eigen::Index>(i)));
    out << "\n";
  }
  return kOk;
}

int cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  int code = kOk;
  auto circuit = load(cfg, err, code);
  if (!circuit) return code;
  const auto reduction = reduce_circuit(*circuit);
  if (cfg.format == Format::Json)
    out << reduction_json(reduction).dump(2) << "\n";
  else
    out << serialize_netlist(reduction.circuit);
  return kOk;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) {
      err << "cannot write " << cfg.out << "\n";
      return kUsage;
    }
    sink = &file;
  }
  if (cfg.subcommand == "analyze") return cmd_analyze(cfg, *sink, err);
  if (cfg.subcommand == "modes") return cmd_modes(cfg, *sink, err);
  if (cfg.subcommand == "simulate") return cmd_simulate(cfg, *sink, err);
  if (cfg.subcommand == "reduce") return cmd_reduce(cfg, *sink, err);
  err << "unknown subcommand '" << cfg.subcommand << "'\n";
  return kUsage;
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Lumped-element circuit quantization", "fluxq"};
  app.add_option("command", cfg.subcommand, "analyze | modes | simulate | reduce")
      ->required()
      ->check(CLI::IsMember({"analyze", "modes", "simulate", "reduce"}));
  app.add_option("netlist", cfg.netlist, "netlist file")->required();
  const std::map<std::string, Representation> reps{
      {"node", Representation::NodeFlux}, {"loop", Representation::LoopCharge},
      {"extended", Representation::ExtendedNodeFlux}};
  const std::map<std::string, GeometricPolicy::Mode> geos{{"off", GeometricPolicy::Mode::Off},
                                                          {"minimal", GeometricPolicy::Mode::Minimal},
                                                          {"allpairs", GeometricPolicy::Mode::AllPairs}};
  const std::map<std::string, Format> formats{{"json", Format::Json}, {"csv", Format::Csv}, {"table", Format::Table}};
  app.add_option("--rep", cfg.rep, "node | loop | extended")->transform(CLI::CheckedTransformer(reps));
  app.add_option("--geometric", cfg.geometric, "off | minimal | allpairs")
      ->transform(CLI::CheckedTransformer(geos));
  app.add_option("--cg", cfg.cg, "geometric capacitance (F)")->check(CLI::PositiveNumber);
  app.add_option("--lg", cfg.lg, "geometric loop inductance (H)")->check(CLI::PositiveNumber);
  app.add_option("--tmax", cfg.tmax, "simulation horizon (s)")->check(CLI::NonNegativeNumber);
  app.add_option("--samples", cfg.samples, "number of time samples")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "output path");
  app.add_option("--format", cfg.format, "json | csv | table")->transform(CLI::CheckedTransformer(formats));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }
  return run(cfg, out, err);
}

}  // namespace fluxq::cli
