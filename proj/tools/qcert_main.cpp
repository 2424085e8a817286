// qcert: certification toolkit for nonlocal properties of bipartite quantum
// channels. Batch commands over JSON matrix files; figure data as CSV.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>
#include <vector>

#include "qcert/catalog.hpp"
#include "qcert/tensor.hpp"
#include "qcert/channels.hpp"
#include "qcert/correlations.hpp"
#include "qcert/dephasing.hpp"
#include "qcert/io.hpp"
#include "qcert/negativity.hpp"
#include "qcert/npa.hpp"
#include "qcert/protocols.hpp"
#include "qcert/witness.hpp"

using namespace qcert;
using nlohmann::json;

namespace {

// exit codes: 0 inside/success, 1 certified-outside or invariant violation,
// 2 input error, 3 solver non-convergence
constexpr int kExitOk = 0;
constexpr int kExitOutside = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct ReportSink {
  json report;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  ReportSink(const std::string& command, uint64_t seed) {
    report["format"] = "qcert-report/1";
    report["command"] = command;
    report["seed"] = seed;
    report["results"] = json::array();
  }
  void add(const CertificateReport& rep) { report["results"].push_back(io::report_to_json(rep)); }
  void emit(const std::string& output_path) {
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    if (output_path.empty())
      std::cout << report.dump(2) << "\n";
    else
      io::save_json_file(output_path, report);
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw io::ParseError("cannot write file: " + path);
  out << text;
}

void write_json_output(const std::string& path, const json& j) {
  if (path.empty())
    std::cout << j.dump(2) << "\n";
  else
    io::save_json_file(path, j);
}

BellFunctional load_functional(const std::string& name_or_path) {
  if (name_or_path == "chsh") return BellFunctional::chsh();
  return io::parse_functional(io::load_json_file(name_or_path));
}

int default_jobs() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  return n > 0 ? n : 1;
}

void parallel_rows(int rows, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1) {
    for (int i = 0; i < rows; ++i) fn(i);
    return;
  }
  std::vector<std::thread> ts;
  for (int t = 0; t < jobs; ++t)
    ts.emplace_back([&, t] {
      for (int i = t; i < rows; i += jobs) fn(i);
    });
  for (auto& th : ts) th.join();
}

//=========================================================================
// validate
//=========================================================================

int cmd_validate(const std::string& path, const std::string& output) {
  json file = io::load_json_file(path);
  std::string kind = io::kind_of(file);
  ReportSink sink("validate", 0);
  bool violation = false;

  auto add_check = [&](const std::string& name, double residual, double tol,
                       bool ok) {
    CertificateReport rep;
    rep.set_tested = name;
    rep.residual = residual;
    rep.tolerance = tol;
    rep.verdict = ok ? Verdict::inside : Verdict::outside;
    sink.add(rep);
    if (!ok) violation = true;
  };

  if (kind == "choi") {
    ChoiChannel ch = io::parse_choi(file, false);
    CptpReport cptp = ch.cptp_report();
    add_check("cp (min eigenvalue)", -cptp.min_eigenvalue, 1e-9, cptp.cp_ok);
    add_check("tp (input marginal)", cptp.tp_residual, 1e-9, cptp.tp_ok);
    if (ch.is_bipartite()) {
      CertificateReport qns = is_qns(ch);
      sink.add(qns);
      if (qns.verdict != Verdict::inside) violation = true;
    }
  } else if (kind == "superchannel") {
    SuperchannelChoi sc = io::parse_superchannel(file);
    CertificateReport rep = is_superchannel(sc);
    sink.add(rep);
    violation = rep.verdict != Verdict::inside;
  } else if (kind == "gram") {
    ComplexMatrix g = io::parse_gram_matrix(file);
    GramMatrix gram(g, false);
    auto [min_eig, diag_res] = gram.residuals();
    add_check("psd (min eigenvalue)", -min_eig, 1e-9, min_eig >= -1e-9);
    add_check("unit diagonal", diag_res, 1e-10, diag_res <= 1e-10);
  } else if (kind == "state") {
    ComplexMatrix rho = io::parse_state(file);
    double herm = rho.hermiticity_residual();
    double tr = std::abs(rho.trace().real() - 1.0);
    double min_eig = herm <= 1e-9 ? min_eigenvalue(rho) : -1.0;
    add_check("hermitian", herm, 1e-9, herm <= 1e-9);
    add_check("unit trace", tr, 1e-9, tr <= 1e-9);
    add_check("psd (min eigenvalue)", -min_eig, 1e-9, min_eig >= -1e-9);
  } else if (kind == "stochastic") {
    auto s = io::parse_stochastic(file);
    double col = column_sum_residual(s);
    double min_entry = 0;
    for (const auto& row : s)
      for (double v : row) min_entry = std::min(min_entry, v);
    add_check("column sums", col, 1e-10, col <= 1e-10);
    add_check("nonnegative entries", -min_entry, 1e-12, min_entry >= -1e-12);
  } else if (kind == "povm-family") {
    MeasurementFamily fam = io::parse_povm_family(file);
    double res = fam.validation_residual();
    add_check("povm (psd + completeness)", res, 1e-9, res <= 1e-9);
  } else if (kind == "strategy") {
    QuantumStrategy s = io::parse_strategy(file);
    double res = s.validation_residual();
    add_check("strategy (projective + completeness + state)", res, 1e-9, res <= 1e-9);
  } else if (kind == "distribution") {
    ConditionalDistribution p = io::parse_distribution(file);
    auto [norm, min_entry] = p.validation_residuals();
    add_check("normalization", norm, 1e-10, norm <= 1e-10);
    add_check("nonnegative entries", -min_entry, 1e-12, min_entry >= -1e-12);
  } else {
    throw io::ParseError("validate: unsupported kind " + kind);
  }

  sink.emit(output);
  return violation ? kExitOutside : kExitOk;
}

//=========================================================================
// decohere
//=========================================================================

int cmd_decohere(const std::string& path, const std::string& output) {
  json file = io::load_json_file(path);
  ChoiChannel ch = io::parse_choi(file);
  auto s = decoherent_action(ch);
  json out = io::stochastic_file(s);
  if (ch.is_bipartite())
    out["scenario"] = json{{"na", ch.d_a1()}, {"nb", ch.d_b1()},
                           {"nx", ch.d_a0()}, {"ny", ch.d_b0()}};
  write_json_output(output, out);
  return kExitOk;
}

//=========================================================================
// certify
//=========================================================================

int cmd_certify(const std::string& path, const std::string& set,
                const std::string& output) {
  json file = io::load_json_file(path);
  ConditionalDistribution p = io::distribution_from_file(file);
  ReportSink sink("certify --set " + set, 0);
  CertificateReport rep;
  if (set == "local")
    rep = is_local(p);
  else if (set == "ns")
    rep = is_nonsignaling(p);
  else if (set == "npa1")
    rep = npa_membership(p, 1);
  else if (set == "npa2")
    rep = npa_membership(p, 2);
  else
    throw io::ParseError("certify: unknown set " + set);
  sink.add(rep);
  sink.emit(output);
  if (rep.verdict == Verdict::inside) return kExitOk;
  if (rep.verdict == Verdict::outside) return kExitOutside;
  return kExitSolver;
}

//=========================================================================
// witness
//=========================================================================

int cmd_witness(const std::string& path, const std::string& functional,
                const std::string& set, const std::string& output) {
  json file = io::load_json_file(path);
  ChoiChannel ch = io::parse_choi(file);
  if (!ch.is_bipartite())
    throw io::ParseError("witness: bipartite channel required");
  BellFunctional gamma = load_functional(functional);

  WitnessSet target;
  if (set == "L")
    target = WitnessSet::local;
  else if (set == "Q")
    target = WitnessSet::quantum;
  else if (set == "NS")
    target = WitnessSet::nonsignaling;
  else
    throw io::ParseError("witness: unknown set " + set);

  ChannelWitness w = build_witness(gamma, target);
  double value = witness_value(w, ch);

  // cross-check against the decoherent-action route
  auto s = decoherent_action(ch);
  ConditionalDistribution p = ConditionalDistribution::from_stochastic(
      s, Scenario{ch.d_a1(), ch.d_b1(), ch.d_a0(), ch.d_b0()});
  double via_action = w.bound - bell_value(gamma, p);

  ReportSink sink("witness --set " + set, 0);
  CertificateReport rep;
  rep.set_tested = "witness (" + set + ")";
  rep.bell_value = value;
  rep.tolerance = 1e-9;
  rep.details["trace_value"] = value;
  rep.details["bound"] = w.bound;
  rep.details["value_via_decoherent_action"] = via_action;
  rep.details["route_consistency"] = std::abs(value - via_action);
  bool outside = value < -1e-9;
  rep.verdict = outside ? Verdict::outside : Verdict::inconclusive;
  rep.note = outside ? "negative witness value certifies the channel outside the set"
                     : "nonnegative witness value is inconclusive";
  sink.add(rep);
  sink.emit(output);
  return outside ? kExitOutside : kExitOk;
}

//=========================================================================
// noise-sweep
//=========================================================================

int cmd_noise_sweep(int resolution, int jobs, const std::string& output) {
  if (resolution < 2) throw io::ParseError("noise-sweep: resolution must be >= 2");
  auto grid = negativity_grid(resolution, jobs);
  std::string csv = "p,q,negativity\n";
  char line[128];
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      double p = static_cast<double>(i) / (resolution - 1);
      double q = static_cast<double>(j) / (resolution - 1);
      std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g\n", p, q, grid[i][j]);
      csv += line;
    }
  write_text(output, csv);
  return kExitOk;
}

//=========================================================================
// cross-section
//=========================================================================

struct SliceVerdicts {
  bool local = false, npa1 = false, npa2 = false, ns = false;
  bool nested() const {
    return (!local || npa2) && (!npa2 || npa1) && (!npa1 || ns);
  }
  const char* label() const {
    if (local) return "local";
    if (npa2) return "npa2";
    if (npa1) return "npa1";
    if (ns) return "ns";
    return "signaling-excluded";
  }
};

SliceVerdicts classify_slice_point(double s, double t) {
  ConditionalDistribution p = ConditionalDistribution::from_stochastic(
      catalog::box_mixture(s, t), Scenario{2, 2, 2, 2});
  SliceVerdicts v;
  v.local = is_local(p).verdict == Verdict::inside;
  v.npa1 = npa_membership(p, 1).verdict == Verdict::inside;
  v.npa2 = npa_membership(p, 2).verdict == Verdict::inside;
  v.ns = is_nonsignaling(p).verdict == Verdict::inside;
  return v;
}

int cmd_cross_section(int resolution, int jobs, const std::string& output) {
  if (resolution < 2) throw io::ParseError("cross-section: resolution must be >= 2");
  int n = resolution;
  std::vector<std::vector<SliceVerdicts>> verdicts(n);
  std::atomic<bool> nesting_ok{true};
  parallel_rows(n, jobs <= 0 ? default_jobs() : jobs, [&](int i) {
    double s = static_cast<double>(i) / (n - 1);
    for (int j = 0; j < n; ++j) {
      double t = static_cast<double>(j) / (n - 1);
      if (s + t > 1.0 + 1e-12) break;
      SliceVerdicts v = classify_slice_point(s, t);
      if (!v.nested()) nesting_ok = false;
      verdicts[i].push_back(v);
    }
  });
  if (!nesting_ok) {
    std::cerr << "cross-section: region nesting violated\n";
    return kExitSolver;
  }
  std::string csv = "s,t,region\n";
  char line[128];
  for (int i = 0; i < n; ++i)
    for (size_t j = 0; j < verdicts[i].size(); ++j) {
      double s = static_cast<double>(i) / (n - 1);
      double t = static_cast<double>(j) / (n - 1);
      std::snprintf(line, sizeof line, "%.10g,%.10g,%s\n", s, t,
                    verdicts[i][j].label());
      csv += line;
    }
  write_text(output, csv);
  return kExitOk;
}

//=========================================================================
// simulate / seesaw / lose-from-strategy
//=========================================================================

int cmd_simulate(const std::string& spec_path, const std::string& output) {
  json file = io::load_json_file(spec_path);
  if (io::kind_of(file) != "protocol-spec")
    throw io::ParseError("simulate: protocol-spec file required");
  if (!file.contains("channel"))
    throw io::ParseError("simulate: protocol-spec requires an inline channel");
  ProtocolSpec spec = io::parse_protocol_spec(file);
  ChoiChannel ch = io::parse_choi(file.at("channel"));
  ConditionalDistribution p = run_protocol(spec, ch);
  write_json_output(output, io::distribution_file(p));
  return kExitOk;
}

int cmd_seesaw(const std::string& channel_path, const std::string& inputs_path,
               const std::string& functional, int restarts, uint64_t seed,
               const std::string& output) {
  ChoiChannel ch = io::parse_choi(io::load_json_file(channel_path));
  json inputs = io::load_json_file(inputs_path);
  if (io::kind_of(inputs) != "input-family")
    throw io::ParseError("seesaw: input-family file required");
  std::vector<ComplexMatrix> alice, bob;
  for (const auto& m : inputs.at("alice_states"))
    alice.push_back(io::matrix_from_json(m));
  for (const auto& m : inputs.at("bob_states"))
    bob.push_back(io::matrix_from_json(m));
  int d_r = inputs.value("d_r", 1), d_s = inputs.value("d_s", 1);

  BellFunctional gamma = load_functional(functional);
  SeesawOptions opts;
  opts.restarts = restarts;
  opts.seed = seed;
  SeesawResult r = seesaw_gamma_max(ch, gamma, alice, bob, d_r, d_s, opts);

  ReportSink sink("seesaw", seed);
  CertificateReport rep;
  rep.set_tested = "seesaw lower bound";
  rep.bell_value = r.value;
  rep.details["value"] = r.value;
  rep.details["sweeps"] = static_cast<double>(r.sweep_values.size());
  rep.details["converged"] = r.converged ? 1.0 : 0.0;
  rep.verdict = Verdict::inconclusive;
  rep.note = "lower bound on the channel's maximal functional value";
  sink.add(rep);
  sink.emit(output);
  return r.converged ? kExitOk : kExitSolver;
}

int cmd_lose_from_strategy(const std::string& strategy_path,
                           const std::string& output) {
  QuantumStrategy s = io::parse_strategy(io::load_json_file(strategy_path));
  ChoiChannel ch = lose_from_strategy(s);
  write_json_output(output, io::choi_file(ch));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcert: certify nonlocal properties of bipartite quantum channels"};
  app.require_subcommand(1);

  std::string path, output, set, functional = "chsh";
  int resolution = 101, jobs = 0, restarts = 20;
  uint64_t seed = 1;
  std::string inputs_path;

  auto* validate = app.add_subcommand("validate", "run CPTP / QNS / superchannel / format checks");
  validate->add_option("file", path)->required();
  validate->add_option("--output", output);

  auto* decohere = app.add_subcommand("decohere", "emit the decoherent action of a channel");
  decohere->add_option("file", path)->required();
  decohere->add_option("--output", output);

  auto* certify = app.add_subcommand("certify", "membership of a distribution (or channel action)");
  certify->add_option("file", path)->required();
  certify->add_option("--set", set, "local|ns|npa1|npa2")->required();
  certify->add_option("--output", output);

  auto* witness = app.add_subcommand("witness", "evaluate a linear channel witness");
  witness->add_option("file", path)->required();
  witness->add_option("--functional", functional, "chsh or a functional file");
  witness->add_option("--set", set, "L|Q|NS")->required();
  witness->add_option("--output", output);

  auto* sweep = app.add_subcommand("noise-sweep", "negativity grid of the damped |++><++| family");
  sweep->add_option("--resolution", resolution)->required();
  sweep->add_option("--jobs", jobs);
  sweep->add_option("--output", output);

  auto* cross = app.add_subcommand("cross-section", "classify the PR/identity mixture slice");
  cross->add_option("--resolution", resolution)->required();
  cross->add_option("--jobs", jobs);
  cross->add_option("--output", output);

  auto* simulate = app.add_subcommand("simulate", "run a measurement protocol");
  simulate->add_option("spec", path)->required();
  simulate->add_option("--output", output);

  auto* seesaw = app.add_subcommand("seesaw", "see-saw lower bound on a channel's functional value");
  seesaw->add_option("channel", path)->required();
  seesaw->add_option("inputs", inputs_path)->required();
  seesaw->add_option("--functional", functional);
  seesaw->add_option("--restarts", restarts);
  seesaw->add_option("--seed", seed);
  seesaw->add_option("--output", output);

  auto* lose = app.add_subcommand("lose-from-strategy", "dilate a quantum strategy into a channel");
  lose->add_option("strategy", path)->required();
  lose->add_option("--output", output);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(path, output);
    if (decohere->parsed()) return cmd_decohere(path, output);
    if (certify->parsed()) return cmd_certify(path, set, output);
    if (witness->parsed()) return cmd_witness(path, functional, set, output);
    if (sweep->parsed()) return cmd_noise_sweep(resolution, jobs, output);
    if (cross->parsed()) return cmd_cross_section(resolution, jobs, output);
    if (simulate->parsed()) return cmd_simulate(path, output);
    if (seesaw->parsed())
      return cmd_seesaw(path, inputs_path, functional, restarts, seed, output);
    if (lose->parsed()) return cmd_lose_from_strategy(path, output);
  } catch (const io::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitInput;
}
