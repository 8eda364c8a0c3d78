// Command-line front end: dispatches experiment configurations to the core
// library and emits CSV/JSON artifacts plus a human summary on stdout.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtt/clock.hpp"
#include "qtt/ctime.hpp"
#include "qtt/evolve.hpp"
#include "qtt/ionise.hpp"
#include "qtt/model.hpp"
#include "qtt/scatter.hpp"
#include "qtt/taudist.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::string out;
  std::string format = "csv";
  int threads = 1;
  unsigned seed = 0;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void print_summary(const json& summary) {
  for (auto it = summary.begin(); it != summary.end(); ++it) {
    std::cout << it.key() << " = ";
    if (it->is_number_float())
      std::cout << fmt6(it->get<double>());
    else
      std::cout << it->dump();
    std::cout << "\n";
  }
}

void emit(const Common& c, const json& summary, const Table* table) {
  print_summary(summary);
  if (c.out.empty()) return;
  std::ofstream f(c.out);
  if (!f) throw qtt::SchemaError("cannot open output file: " + c.out);
  if (c.format == "json") {
    json doc;
    doc["summary"] = summary;
    if (table) {
      doc["table"] = json::object();
      doc["table"]["columns"] = table->columns;
      doc["table"]["rows"] = table->rows;
    }
    f << doc.dump(2) << "\n";
  } else if (c.format == "csv") {
    if (table) {
      for (std::size_t i = 0; i < table->columns.size(); ++i)
        f << (i ? "," : "") << table->columns[i];
      f << "\n";
      for (const auto& row : table->rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
          f << (i ? "," : "") << fmt17(row[i]);
        f << "\n";
      }
    } else {
      f << "key,value\n";
      for (auto it = summary.begin(); it != summary.end(); ++it)
        if (it->is_number())
          f << it.key() << "," << fmt17(it->get<double>()) << "\n";
    }
  } else {
    throw qtt::SchemaError("unknown output format: " + c.format);
  }
}

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw qtt::SchemaError(std::string(what) + ": expected two comma-separated numbers");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw qtt::SchemaError(std::string(what) + ": malformed number");
  }
}

json complex_json(qtt::Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// ---------------------------------------------------------------------------
// command implementations

struct ScatterArgs {
  std::string barrier;    // "v0,d"
  std::string potential;  // JSON file, alternative to --barrier
  double x0 = 0.0;
  double p = 1.0;
  double lambda = 0.0;
};

void cmd_scatter(const Common& c, const ScatterArgs& a) {
  qtt::PotentialSpec v;
  if (!a.potential.empty()) {
    std::ifstream f(a.potential);
    if (!f) throw qtt::SchemaError("cannot read potential file: " + a.potential);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    v = qtt::potential_from_json(text);
  } else if (!a.barrier.empty()) {
    const auto [v0, d] = parse_pair(a.barrier, "--barrier");
    v = qtt::PotentialSpec::rectangular_barrier(v0, a.x0, a.x0 + d);
  } else {
    throw qtt::SchemaError("scatter: give --barrier or --potential");
  }
  const auto sup = v.support();
  const qtt::RegionOfInterest omega{sup.first, sup.second};
  const auto r = qtt::scattering_amplitudes(v, omega, a.lambda, a.p);
  json summary = {{"p", r.p},
                  {"T", complex_json(r.T)},
                  {"R", complex_json(r.R)},
                  {"transmission_probability", std::norm(r.T)},
                  {"unitarity_defect", r.unitarity_defect()}};
  Table t;
  t.columns = {"p", "lambda", "Re_T", "Im_T", "Re_R", "Im_R", "unitarity_defect"};
  t.rows = {{r.p, a.lambda, r.T.real(), r.T.imag(), r.R.real(), r.R.imag(),
             r.unitarity_defect()}};
  emit(c, summary, &t);
}

struct CtimeArgs {
  std::string barrier = "1,2";
  double x0 = 0.0;
  double p = 1.0;
};

void cmd_ctime(const Common& c, const CtimeArgs& a) {
  const auto [v0, d] = parse_pair(a.barrier, "--barrier");
  const auto v = qtt::PotentialSpec::rectangular_barrier(v0, a.x0, a.x0 + d);
  const qtt::RegionOfInterest omega{a.x0, a.x0 + d};
  const auto tt = qtt::tunnelling_time(v, omega, a.p);
  const auto tr = qtt::reflection_time(v, omega, a.p);
  json summary = {{"tau_tunn", complex_json(tt.value)},
                  {"tau_tunn_err", tt.error_estimate},
                  {"tau_refl", complex_json(tr.value)},
                  {"tau_refl_err", tr.error_estimate},
                  {"tau_dwell", qtt::dwell_time_monochromatic(v, omega, a.p)},
                  {"swp_all", qtt::swp_time_monochromatic_all(v, omega, a.p)}};
  emit(c, summary, nullptr);
}

struct DwellArgs {
  std::string barrier = "0,2";
  double x0 = 0.0;
  double p = 1.0;
};

void cmd_dwell(const Common& c, const DwellArgs& a) {
  const auto [v0, d] = parse_pair(a.barrier, "--barrier");
  const auto v = v0 == 0.0 ? qtt::PotentialSpec::free_space()
                           : qtt::PotentialSpec::rectangular_barrier(v0, a.x0, a.x0 + d);
  const qtt::RegionOfInterest omega{a.x0, a.x0 + d};
  const double dwell = qtt::dwell_time_monochromatic(v, omega, a.p);
  const double swp_all = qtt::swp_time_monochromatic_all(v, omega, a.p);
  json summary = {{"tau_dwell", dwell}, {"swp_all", swp_all}, {"ratio", swp_all / dwell}};
  emit(c, summary, nullptr);
}

struct TaudistArgs {
  std::string barrier = "1,2";
  double x0 = 0.0;
  double p = 1.0;
  std::string channel = "transmit";
  double lambda_max = 0.0;  // 0: default 40 / t_span
  int n_lambda = 1024;
  std::string window = "hann";
  double t_span = 10.0;
};

void cmd_taudist(const Common& c, const TaudistArgs& a) {
  const auto [v0, d] = parse_pair(a.barrier, "--barrier");
  const auto v = v0 == 0.0 ? qtt::PotentialSpec::free_space()
                           : qtt::PotentialSpec::rectangular_barrier(v0, a.x0, a.x0 + d);
  const qtt::RegionOfInterest omega{a.x0, a.x0 + d};
  qtt::AmplitudeFn f;
  if (a.channel == "transmit")
    f = qtt::transmission_amplitude(v, omega, a.p);
  else if (a.channel == "reflect")
    f = qtt::reflection_amplitude(v, omega, a.p);
  else
    throw qtt::SchemaError("taudist: channel must be transmit or reflect");
  const double lambda_max = a.lambda_max > 0.0 ? a.lambda_max : 40.0 / a.t_span;
  qtt::Window w;
  if (a.window == "hann")
    w = qtt::Window::kHann;
  else if (a.window == "none")
    w = qtt::Window::kNone;
  else
    throw qtt::SchemaError("taudist: window must be hann or none");
  const auto dist = qtt::conditioned_amplitude(f, 0.0, a.t_span, lambda_max, a.n_lambda, w);
  const auto m1 = qtt::moment(dist, 1);
  const auto [p_acc, p_free] = qtt::accurate_measurement_probability(dist);
  json summary = {{"moment1", complex_json(m1)},
                  {"P_acc", p_acc},
                  {"P_free", p_free},
                  {"leaked_mass_fraction", qtt::leaked_mass_fraction(dist)}};
  Table t;
  t.columns = {"tau", "Re_A", "Im_A"};
  for (int i = 0; i < dist.tau_grid.size(); ++i)
    t.rows.push_back({dist.tau_grid[i], dist.amplitudes[i].real(), dist.amplitudes[i].imag()});
  emit(c, summary, &t);
}

struct ClockArgs {
  std::string preset = "free-running";
  double j = 0.5;
  double span = 3.0;
};

void cmd_clock(const Common& c, const ClockArgs& a) {
  using namespace qtt;
  if (a.preset == "free-running" || a.preset == "appendix-modified-clock") {
    const bool modified = a.preset != "free-running";
    const SpatialGrid grid{-60.0, 60.0, 512};
    const RegionOfInterest omega{grid.x_min, grid.x_max};
    const auto v = PotentialSpec::free_space();
    const Wavefunction psi = gaussian_packet(grid, 0.0, 0.0, 5.0);
    ClockConfig cfg;
    cfg.j = a.j;
    if (modified) {
      const int j_int = static_cast<int>(std::lround(a.j));
      cfg.gamma_i = ClockBasis{a.j}.beta(j_int);
    }
    auto t_of = [&](double w) {
      ClockConfig run = cfg;
      run.omega_l = w;
      const JointState joint = evolve_coupled(psi, run, v, omega, 0.0, a.span);
      return (modified ? readout_modified(joint, Postselector::all())
                       : readout(joint, Postselector::all()))
          .t_omega;
    };
    const auto grid_w = default_omega_grid(a.j, a.span);
    const Extraction e = modified ? modified_clock_extract(t_of, a.j, grid_w)
                                  : weak_limit_extract(t_of, a.j, grid_w);
    json summary = {{"T_SWP", e.value},
                    {"error_estimate", e.error_estimate},
                    {"expected", a.span}};
    emit(c, summary, nullptr);
  } else if (a.preset == "barrier") {
    const auto v = PotentialSpec::rectangular_barrier(1.0, 0.0, 2.0);
    const RegionOfInterest omega{0.0, 2.0};
    const SpatialGrid grid{-100.0, 100.0, 1024};
    const Wavefunction psi = gaussian_packet(grid, -40.0, 1.0, 5.0);
    const double t2 = 60.0;
    ClockConfig cfg;
    cfg.j = a.j;
    auto t_of = [&](double w) {
      ClockConfig run = cfg;
      run.omega_l = w;
      const JointState joint = evolve_coupled(psi, run, v, omega, 0.0, t2);
      return readout(joint, Postselector::all()).t_omega;
    };
    const Extraction e = weak_limit_extract(t_of, a.j, default_omega_grid(a.j, t2));
    json summary = {{"T_SWP", e.value}, {"error_estimate", e.error_estimate}};
    emit(c, summary, nullptr);
  } else {
    throw qtt::SchemaError("clock: unknown preset " + a.preset);
  }
}

struct TwoPathArgs {
  double a1 = 0.5, tau1 = 1.0, a2 = -0.25, tau2 = 2.0;
};

void cmd_two_path(const Common& c, const TwoPathArgs& a) {
  const double t = qtt::two_path_time(a.a1, a.tau1, a.a2, a.tau2);
  json summary = {{"two_path_time", t}};
  emit(c, summary, nullptr);
}

struct IoniseArgs {
  double f_strength = -1.0;  // <0: model default
  bool smoke = false;
};

void cmd_ionise(const Common& c, const IoniseArgs& a) {
  qtt::IonisationModel model;
  if (a.f_strength >= 0.0) model.f_strength = a.f_strength;
  if (a.smoke) {
    model.t_pulse = 10.0;
    model.t2 = 10.0;
    model.grid = qtt::SpatialGrid{-6.5, 43.5, 512};
    model.refine_span = 30.0;
  }
  const auto prep = qtt::prepare(model);
  const auto scan = qtt::scan_ionisation(prep);
  const auto swp = qtt::swp_times_ionisation(scan);
  double residue = 0.0;
  const double dwell = qtt::dwell_ionisation(scan, &residue);
  json summary = {{"E0", prep.energy},
                  {"C", complex_json(scan.c[2])},
                  {"W_ion", swp.w_ion},
                  {"T_bound", swp.t_bound},
                  {"T_all", swp.t_all},
                  {"tau_dwell", dwell}};
  if (swp.t_free)
    summary["T_free"] = *swp.t_free;
  Table t;
  t.columns = {"p", "Re_B", "Im_B"};
  for (int k = 0; k < scan.p_nodes.size(); ++k)
    t.rows.push_back({scan.p_nodes[k], scan.b[2][k].real(), scan.b[2][k].imag()});
  emit(c, summary, &t);
}

// ---------------------------------------------------------------------------
// presets

struct Preset {
  const char* name;
  const char* description;
};

const std::vector<Preset>& preset_catalog() {
  static const std::vector<Preset> presets = {
      {"i9-ratio", "free-segment clock-to-dwell ratio sqrt(1 + sinc^2(pd))"},
      {"step-e11a", "total-reflection step: clock reading equals the dwell time"},
      {"two-path-dz6", "two-path calibrated reading that reads exactly zero"},
      {"free-running", "field over the whole line; clock must read t2 - t1"},
      {"appendix-modified-clock", "quadratic-order clock, linear term suppressed"},
      {"ionise-default", "pulsed well-plus-barrier ionisation fixture"},
  };
  return presets;
}

void cmd_presets() {
  for (const auto& p : preset_catalog())
    std::cout << p.name << "  -  " << p.description << "\n";
}

void run_preset(const Common& c, const std::string& name, bool smoke) {
  if (name == "i9-ratio") {
    DwellArgs a;
    a.barrier = "0,2";
    a.p = 1.0;
    cmd_dwell(c, a);
    const double pd = 2.0;
    json extra = {{"predicted_ratio",
                   std::sqrt(1.0 + std::pow(std::sin(pd) / pd, 2))}};
    print_summary(extra);
  } else if (name == "step-e11a") {
    DwellArgs a;
    a.barrier = "1,40";  // opaque slab: indistinguishable from a step
    a.p = 1.0;
    cmd_dwell(c, a);
    print_summary(json{{"predicted", 1.0}});
  } else if (name == "two-path-dz6") {
    cmd_two_path(c, TwoPathArgs{});
  } else if (name == "free-running") {
    ClockArgs a;
    a.j = 1.0;
    a.span = smoke ? 2.0 : 3.0;
    cmd_clock(c, a);
  } else if (name == "appendix-modified-clock") {
    ClockArgs a;
    a.preset = "appendix-modified-clock";
    a.j = 1.0;
    a.span = 2.0;
    cmd_clock(c, a);
  } else if (name == "ionise-default") {
    IoniseArgs a;
    a.smoke = smoke;
    cmd_ionise(c, a);
  } else {
    throw qtt::SchemaError("unknown preset: " + name);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum traversal-time laboratory"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--out", common.out, "artifact output path");
  app.add_option("--format", common.format, "artifact format: csv|json");
  app.add_option("--threads", common.threads, "worker thread cap");
  app.add_option("--seed", common.seed, "seed for randomized drivers");

  ScatterArgs sa;
  auto* scatter = app.add_subcommand("scatter", "stationary amplitudes T, R");
  scatter->add_option("--barrier", sa.barrier, "rectangular barrier: height,width");
  scatter->add_option("--potential", sa.potential, "potential JSON file");
  scatter->add_option("--x0", sa.x0, "barrier left edge");
  scatter->add_option("--p", sa.p, "incident momentum");
  scatter->add_option("--lambda", sa.lambda, "probe-field strength in Omega");

  CtimeArgs ca;
  auto* ctime = app.add_subcommand("ctime", "complex channel times");
  ctime->add_option("--barrier", ca.barrier, "rectangular barrier: height,width");
  ctime->add_option("--x0", ca.x0, "barrier left edge");
  ctime->add_option("--p", ca.p, "incident momentum");

  DwellArgs da;
  auto* dwell = app.add_subcommand("dwell", "dwell time and calibrated clock reading");
  dwell->add_option("--barrier", da.barrier, "height,width (height 0: free segment)");
  dwell->add_option("--x0", da.x0, "segment left edge");
  dwell->add_option("--p", da.p, "incident momentum");

  TaudistArgs ta;
  auto* taudist = app.add_subcommand("taudist", "traversal-time amplitude distribution");
  taudist->add_option("--barrier", ta.barrier, "height,width");
  taudist->add_option("--x0", ta.x0, "segment left edge");
  taudist->add_option("--p", ta.p, "incident momentum");
  taudist->add_option("--channel", ta.channel, "transmit|reflect");
  taudist->add_option("--lambda-max", ta.lambda_max, "probe-strength half range");
  taudist->add_option("--n-lambda", ta.n_lambda, "lambda samples (power of two)");
  taudist->add_option("--window", ta.window, "hann|none");
  taudist->add_option("--t-span", ta.t_span, "transition duration t2 - t1");

  ClockArgs ka;
  auto* clock_cmd = app.add_subcommand("clock", "coupled spin-clock simulation");
  clock_cmd->add_option("--preset", ka.preset,
                        "free-running|appendix-modified-clock|barrier");
  clock_cmd->add_option("--j", ka.j, "spin size");
  clock_cmd->add_option("--T", ka.span, "propagation span t2 - t1");

  TwoPathArgs pa;
  auto* two_path = app.add_subcommand("two-path", "two-path calibrated reading");
  two_path->add_option("--A1", pa.a1, "first amplitude");
  two_path->add_option("--tau1", pa.tau1, "first duration");
  two_path->add_option("--A2", pa.a2, "second amplitude");
  two_path->add_option("--tau2", pa.tau2, "second duration");

  IoniseArgs ia;
  auto* ionise = app.add_subcommand("ionise", "pulsed-well ionisation model");
  ionise->add_option("--F", ia.f_strength, "pulse strength");
  ionise->add_flag("--smoke", ia.smoke, "coarse, fast settings");

  auto* presets = app.add_subcommand("presets", "list the preset catalog");

  std::string preset_name;
  bool preset_smoke = false;
  auto* preset = app.add_subcommand("preset", "run a named preset");
  preset->add_option("name", preset_name, "preset name")->required();
  preset->add_flag("--smoke", preset_smoke, "coarse, fast settings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (scatter->parsed())
      cmd_scatter(common, sa);
    else if (ctime->parsed())
      cmd_ctime(common, ca);
    else if (dwell->parsed())
      cmd_dwell(common, da);
    else if (taudist->parsed())
      cmd_taudist(common, ta);
    else if (clock_cmd->parsed())
      cmd_clock(common, ka);
    else if (two_path->parsed())
      cmd_two_path(common, pa);
    else if (ionise->parsed())
      cmd_ionise(common, ia);
    else if (presets->parsed())
      cmd_presets();
    else if (preset->parsed())
      run_preset(common, preset_name, preset_smoke);
  } catch (const qtt::Error& e) {
    const char* category = "schema";
    int code = 2;
    switch (e.category()) {
      case qtt::Error::Category::kSchema:
        break;
      case qtt::Error::Category::kNumericalDomain:
        category = "numerical-domain";
        code = 3;
        break;
      case qtt::Error::Category::kPostSelection:
        category = "post-selection";
        code = 4;
        break;
    }
    std::cerr << "error (" << category << "): " << e.what() << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
