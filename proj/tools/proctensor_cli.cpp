// Command-line front end for the process-tensor library.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "proctensor/instruments.hpp"
#include "proctensor/io.hpp"
#include "proctensor/memory.hpp"
#include "proctensor/models.hpp"
#include "proctensor/process_tensor.hpp"

namespace pt = proctensor;
using nlohmann::json;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    pt::write_text_file(out, text);
}

pt::Aggregation parse_aggregation(const std::string& s) {
  if (s == "mean") return pt::Aggregation::Mean;
  if (s == "max") return pt::Aggregation::Max;
  throw std::invalid_argument("unknown aggregation '" + s + "' (expected mean or max)");
}

std::vector<pt::Regime> select_regimes(const std::string& name) {
  if (name == "all") return pt::cs_regimes();
  return {pt::cs_regime(name)};
}

std::vector<int> select_ells(int ell) {
  if (ell == 0) return {1, 2, 3, 4};
  return {ell};
}

// --- shallow-pocket --------------------------------------------------------

struct PocketOptions {
  double g = 0.8;
  double gamma = 0.3;
  double t1 = 5.0;
  double tau_max = 7.0;
  double dt = 0.05;
  double p = 0.95;
  std::string out;
};

int run_shallow_pocket(const PocketOptions& o) {
  const auto rows = pt::sp_curves(o.g, o.gamma, o.t1, o.t1 + o.tau_max, o.dt, o.p);
  pt::CsvWriter csv({"t", "I_free", "I_sigmax", "I_offset", "I_measure", "I_trash"});
  int bad = 0;
  for (const auto& r : rows) {
    csv.add_row(std::vector<double>{r.t, r.free, r.sigmax, r.offset, r.measure, r.trash});
    for (double v : {r.free, r.sigmax, r.offset, r.measure, r.trash})
      if (!std::isfinite(v) || v < -1e-12 || v > 2.0 + 1e-12) ++bad;
  }
  emit(o.out, csv.str());
  if (bad) {
    std::cerr << "shallow-pocket: " << bad << " mutual-information values outside [0, 2]\n";
    return 1;
  }
  return 0;
}

// --- case-study ------------------------------------------------------------

struct CaseOptions {
  std::string regime = "all";
  std::optional<double> xi;
  std::optional<double> kappa;
  int steps = 6;
  double dt = 0.3;
  std::string instrument = "all";
  int ell = 0;
  std::string aggregate = "mean";
  std::uint64_t seed = 20200101;
  std::size_t samples = 200;
  std::string metric = "nm";
  double xi_min = 0.0, xi_max = 2.0, xi_step = 0.1;
  double kappa_min = 0.0, kappa_max = 10.0, kappa_step = 0.1;
  std::string out;
};

pt::CaseStudyParams params_for(const CaseOptions& o, const pt::Regime& r) {
  pt::CaseStudyParams p;
  p.xi = r.xi;
  p.kappa = r.kappa;
  p.dt = o.dt;
  p.n_steps = o.steps;
  return p;
}

int run_build(const CaseOptions& o) {
  pt::Regime r{"custom", 1.0, 1.0};
  if (o.xi || o.kappa) {
    if (!(o.xi && o.kappa)) throw std::invalid_argument("build: give both --xi and --kappa, or --regime");
    r.xi = *o.xi;
    r.kappa = *o.kappa;
  } else {
    if (o.regime == "all") throw std::invalid_argument("build: choose a single --regime or give --xi/--kappa");
    r = pt::cs_regime(o.regime);
  }
  if (o.out.empty()) throw std::invalid_argument("build: --out is required");
  const pt::ProcessTensor upsilon = pt::cs_process_tensor(params_for(o, r));
  const pt::CausalityReport rep = pt::validate_causality(upsilon);
  pt::save_process_tensor(o.out, upsilon);
  std::cout << "wrote " << o.out << " (dimension " << upsilon.layout.dim() << ", trace "
            << pt::format_double(upsilon.trace()) << ", max causality residual "
            << pt::format_double(rep.max_residual()) << ")\n";
  return rep.passed() ? 0 : 1;
}

int run_grid(const CaseOptions& o) {
  pt::GridMetric metric;
  if (o.metric == "n2")
    metric = pt::GridMetric::N2;
  else if (o.metric == "nm")
    metric = pt::GridMetric::NonMarkovianity;
  else
    throw std::invalid_argument("unknown metric '" + o.metric + "' (expected n2 or nm)");
  pt::CaseStudyParams base;
  base.dt = o.dt;
  base.n_steps = o.steps;
  const auto pts = pt::cs_grid_scan(pt::linspace_step(o.xi_min, o.xi_max, o.xi_step),
                                    pt::linspace_step(o.kappa_min, o.kappa_max, o.kappa_step), metric, base);
  pt::CsvWriter csv({"xi", "kappa", o.metric});
  int bad = 0;
  for (const auto& p : pts) {
    csv.add_row(std::vector<double>{p.xi, p.kappa, p.value});
    if (std::isnan(p.value) || p.value < 0.0) ++bad;
  }
  emit(o.out, csv.str());
  if (bad) {
    std::cerr << "grid: " << bad << " points with negative or undefined values\n";
    return 1;
  }
  return 0;
}

std::vector<std::string> select_instruments(const std::string& name, bool include_noisy) {
  if (name == "all") {
    std::vector<std::string> v{"identity", "causal-break"};
    if (include_noisy) v.push_back("noisy");
    return v;
  }
  pt::cs_memory_instrument(name, 1);  // validates the name
  return {name};
}

int run_memory_strength(const CaseOptions& o) {
  const pt::Aggregation agg = parse_aggregation(o.aggregate);
  pt::CsvWriter csv({"regime", "instrument", "ell", "theta_bits"});
  int bad = 0;
  for (const auto& r : select_regimes(o.regime)) {
    const pt::ProcessTensor upsilon = pt::cs_process_tensor(params_for(o, r));
    for (const auto& name : select_instruments(o.instrument, true)) {
      for (int ell : select_ells(o.ell)) {
        const auto inst = pt::cs_memory_instrument(name, ell);
        const auto cond = pt::condition(upsilon, pt::cs_partition(upsilon, ell), inst);
        const double th = pt::big_theta(cond, agg);
        if (!std::isfinite(th) || th < 0.0) ++bad;
        csv.add_row(std::vector<std::string>{r.name, name, std::to_string(ell), pt::format_double(th)});
      }
    }
  }
  emit(o.out, csv.str());
  return bad ? 1 : 0;
}

json cor2_json(const pt::Cor2Result& c) {
  return {{"t", c.t},
          {"max_distance", c.max_distance},
          {"max_normalized_distance", c.max_normalized_distance},
          {"rhs", c.rhs},
          {"holds", c.max_distance <= c.rhs + 1e-8}};
}

int run_verify_bounds(const CaseOptions& o) {
  const pt::Aggregation agg = parse_aggregation(o.aggregate);
  json records = json::array();
  bool ok = true;
  for (const auto& r : select_regimes(o.regime)) {
    const pt::ProcessTensor upsilon = pt::cs_process_tensor(params_for(o, r));
    for (const auto& name : select_instruments(o.instrument, false)) {
      for (int ell : select_ells(o.ell)) {
        const pt::BoundRecord b = pt::cs_verify_bounds(upsilon, r.name, name, ell, agg, o.seed, o.samples);
        json rec;
        rec["config"] = r.name + "/" + name + "/ell=" + std::to_string(ell);
        rec["regime"] = r.name;
        rec["instrument"] = name;
        rec["ell"] = ell;
        rec["seed"] = o.seed;
        rec["aggregate"] = o.aggregate;
        rec["theta_bits"] = b.theta_bits;
        rec["lhs"] = b.thm1.lhs;
        rec["rhs"] = b.thm1.rhs_plotted;
        rec["margin"] = b.thm1.margin_plotted;
        rec["rhs_general"] = b.thm1.rhs;
        rec["margin_general"] = b.thm1.margin;
        rec["c_norm"] = b.thm1.c_norm;
        rec["expect_true"] = b.thm1.expect_true.real();
        rec["expect_restricted"] = b.thm1.expect_restricted.real();
        json c2 = json::array();
        for (const auto& c : b.cor2) c2.push_back(cor2_json(c));
        rec["cor2"] = c2;
        if (b.diamond) {
          rec["diamond"] = {{"lower_bound", b.diamond->lower_bound},
                         {"rhs", b.diamond->rhs},
                         {"samples", o.samples},
                         {"holds", b.diamond_holds()}};
        } else {
          rec["diamond"] = nullptr;
        }
        rec["passed"] = b.passed();
        ok = ok && b.passed();
        records.push_back(rec);
        if (!b.passed()) std::cerr << "verify-bounds: violation in " << rec["config"].get<std::string>() << "\n";
      }
    }
  }
  emit(o.out, records.dump(2) + "\n");
  return ok ? 0 : 1;
}

// --- validate --------------------------------------------------------------

int run_validate(const std::string& path) {
  const std::string text = pt::read_text_file(path);
  if (pt::detect_file_kind(text) == pt::FileKind::Instrument) {
    const pt::Instrument inst = pt::instrument_from_json(text);
    const pt::InstrumentReport rep = pt::validate_instrument(inst);
    double worst = 0.0;
    for (double v : rep.hierarchy) worst = std::max(worst, v);
    std::cout << "instrument '" << inst.name() << "' with " << inst.outcome_count() << " outcomes\n"
              << "  min element eigenvalue: " << pt::format_double(rep.min_element_eigenvalue)
              << (rep.psd() ? "" : "  FAIL") << "\n"
              << "  causality residual:     " << pt::format_double(worst) << (rep.causal() ? "" : "  FAIL") << "\n"
              << "  trace:                  " << pt::format_double(rep.trace) << " (expected "
              << pt::format_double(rep.expected_trace) << ")" << (rep.normalized() ? "" : "  FAIL") << "\n";
    std::cout << (rep.passed() ? "PASS" : "FAIL") << "\n";
    return rep.passed() ? 0 : 1;
  }
  const pt::ProcessTensor upsilon = pt::process_tensor_from_json(text);
  const pt::CausalityReport rep = pt::validate_causality(upsilon);
  std::cout << "process tensor on " << upsilon.layout.size() << " legs (dimension " << upsilon.layout.dim() << ")\n"
            << "  min eigenvalue: " << pt::format_double(rep.min_eigenvalue) << (rep.psd() ? "" : "  FAIL") << "\n";
  for (std::size_t k = 0; k < rep.levels.size(); ++k) {
    const bool last = k + 1 == rep.levels.size();
    const std::string name = last ? "normalization" : "causality at " + pt::to_string(rep.levels[k]);
    std::cout << "  " << name << " residual: " << pt::format_double(rep.level_residuals[k])
              << (rep.level_residuals[k] <= rep.residual_tolerance ? "" : "  FAIL") << "\n";
  }
  std::cout << "  trace: " << pt::format_double(rep.trace) << " (expected " << pt::format_double(rep.expected_trace)
            << ")" << (rep.normalized() ? "" : "  FAIL") << "\n";
  std::cout << (rep.passed() ? "PASS" : "FAIL") << "\n";
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Process tensors, memory strength and recoverability bounds"};
  app.require_subcommand(1);

  PocketOptions po;
  auto* sp = app.add_subcommand("shallow-pocket", "I(S:A) curves for the shallow pocket model (CSV)");
  sp->add_option("--g", po.g, "coupling strength")->capture_default_str();
  sp->add_option("--gamma", po.gamma, "Lorentzian width")->capture_default_str();
  sp->add_option("--t1", po.t1, "intervention time")->capture_default_str();
  sp->add_option("--tau-max", po.tau_max, "evolution after the intervention")->capture_default_str();
  sp->add_option("--dt", po.dt, "time step")->capture_default_str()->check(CLI::PositiveNumber);
  sp->add_option("--p", po.p, "offset rotation weight")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  sp->add_option("--out", po.out, "output file (default stdout)");

  CaseOptions co;
  auto* cs = app.add_subcommand("case-study", "dissipative qubit-pair case study");
  cs->require_subcommand(1);
  auto common = [&](CLI::App* c, bool sampling) {
    c->add_option("--regime", co.regime, "cp, int, snm or all")->capture_default_str();
    c->add_option("--steps", co.steps, "number of timesteps")->capture_default_str()->check(CLI::Range(2, 8));
    c->add_option("--dt", co.dt, "step spacing")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--out", co.out, "output file (default stdout)");
    if (sampling) {
      c->add_option("--instrument", co.instrument, "identity, causal-break, noisy or all")->capture_default_str();
      c->add_option("--ell", co.ell, "memory length (0 runs 1..4)")->capture_default_str()->check(CLI::Range(0, 4));
      c->add_option("--aggregate", co.aggregate, "mean or max")->capture_default_str();
    }
  };
  auto* build = cs->add_subcommand("build", "write a process tensor file");
  common(build, false);
  build->add_option("--xi", co.xi, "XX coupling");
  build->add_option("--kappa", co.kappa, "cooling rate");

  auto* grid = cs->add_subcommand("grid", "scan N2 or multi-time non-Markovianity over (xi, kappa)");
  common(grid, false);
  grid->add_option("--metric", co.metric, "n2 or nm")->capture_default_str();
  grid->add_option("--xi-min", co.xi_min)->capture_default_str();
  grid->add_option("--xi-max", co.xi_max)->capture_default_str();
  grid->add_option("--xi-step", co.xi_step)->capture_default_str()->check(CLI::PositiveNumber);
  grid->add_option("--kappa-min", co.kappa_min)->capture_default_str();
  grid->add_option("--kappa-max", co.kappa_max)->capture_default_str();
  grid->add_option("--kappa-step", co.kappa_step)->capture_default_str()->check(CLI::PositiveNumber);

  auto* ms = cs->add_subcommand("memory-strength", "memory strength per regime, instrument and ell (CSV)");
  common(ms, true);

  auto* vb = cs->add_subcommand("verify-bounds", "evaluate the recoverability bounds (JSON records)");
  common(vb, true);
  vb->add_option("--seed", co.seed, "seed for the sampled comb estimate")->capture_default_str();
  vb->add_option("--samples", co.samples, "sampled combs per configuration")->capture_default_str();

  std::string file;
  auto* val = app.add_subcommand("validate", "check a process tensor or instrument file");
  val->add_option("file", file, "JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sp->parsed()) return run_shallow_pocket(po);
    if (build->parsed()) return run_build(co);
    if (grid->parsed()) return run_grid(co);
    if (ms->parsed()) return run_memory_strength(co);
    if (vb->parsed()) return run_verify_bounds(co);
    if (val->parsed()) return run_validate(file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
