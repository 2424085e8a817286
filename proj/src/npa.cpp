#include "qcert/npa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcert/sdp.hpp"

namespace qcert {

bool MomentWord::operator<(const MomentWord& o) const {
  if (es != o.es) return es < o.es;
  return fs < o.fs;
}

namespace {

std::vector<int> reduce_seq(std::vector<int> s) {
  std::vector<int> out;
  for (int v : s)
    if (out.empty() || out.back() != v) out.push_back(v);
  return out;
}

MomentWord concat(const MomentWord& u_dag, const MomentWord& v) {
  // u^dag has its sequences reversed
  std::vector<int> es(u_dag.es.rbegin(), u_dag.es.rend());
  es.insert(es.end(), v.es.begin(), v.es.end());
  std::vector<int> fs(u_dag.fs.rbegin(), u_dag.fs.rend());
  fs.insert(fs.end(), v.fs.begin(), v.fs.end());
  return MomentWord{reduce_seq(std::move(es)), reduce_seq(std::move(fs))};
}

MomentWord canonical(MomentWord w) {
  // identify w with its adjoint (moments of Hermitian states are conjugate
  // symmetric; a real feasible moment matrix always exists)
  MomentWord rev{std::vector<int>(w.es.rbegin(), w.es.rend()),
                 std::vector<int>(w.fs.rbegin(), w.fs.rend())};
  return std::min(w, rev);
}

}  // namespace

MomentMatrixSpec MomentMatrixSpec::build(const Scenario& sc, int level) {
  if (sc.na != 2 || sc.nb != 2)
    throw std::invalid_argument("npa: two-outcome scenarios only");
  if (level != 1 && level != 2)
    throw std::invalid_argument("npa: level must be 1 or 2");

  MomentMatrixSpec spec;
  spec.scenario = sc;
  spec.level = level;

  spec.words.push_back({});  // identity
  for (int x = 0; x < sc.nx; ++x) spec.words.push_back({{x}, {}});
  for (int y = 0; y < sc.ny; ++y) spec.words.push_back({{}, {y}});
  if (level == 2) {
    for (int x = 0; x < sc.nx; ++x)
      for (int x2 = 0; x2 < sc.nx; ++x2)
        if (x != x2) spec.words.push_back({{x, x2}, {}});
    for (int y = 0; y < sc.ny; ++y)
      for (int y2 = 0; y2 < sc.ny; ++y2)
        if (y != y2) spec.words.push_back({{}, {y, y2}});
    for (int x = 0; x < sc.nx; ++x)
      for (int y = 0; y < sc.ny; ++y) spec.words.push_back({{x}, {y}});
  }

  int n = static_cast<int>(spec.words.size());
  spec.entry_moment.assign(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MomentWord w = canonical(concat(spec.words[i], spec.words[j]));
      auto it = spec.moment_index.find(w);
      int idx;
      if (it == spec.moment_index.end()) {
        idx = static_cast<int>(spec.moments.size());
        spec.moment_index[w] = idx;
        spec.moments.push_back(w);
      } else {
        idx = it->second;
      }
      spec.entry_moment[i][j] = idx;
    }
  return spec;
}

namespace {

struct NpaSdp {
  MomentMatrixSpec spec;
  // moment index -> SDP variable index (-1 for identity / pinned)
  std::vector<int> var_of_moment;
  std::vector<int> moment_of_var;
  SdpProblem prob;
  int n = 0;

  // indicator matrix of a moment across the moment matrix
  SdpMatrix indicator(int moment_idx) const {
    SdpMatrix m;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (spec.entry_moment[i][j] == moment_idx) m.add(0, i, j, 1.0);
    return m;
  }
};

int moment_id(const MomentMatrixSpec& spec, const MomentWord& w) {
  auto it = spec.moment_index.find(w);
  if (it == spec.moment_index.end())
    throw std::logic_error("npa: moment not present in matrix");
  return it->second;
}

// Objective of a Bell functional in moment coordinates:
// value = const + sum_w coeff_w <w> over {E_x, F_y, E_x F_y}.
struct MomentObjective {
  double constant = 0;
  std::map<int, double> coeff;  // moment index -> coefficient
};

MomentObjective functional_in_moments(const MomentMatrixSpec& spec,
                                      const BellFunctional& gamma) {
  const Scenario& sc = gamma.scenario();
  MomentObjective obj;
  auto add = [&](const MomentWord& w, double v) {
    if (v == 0) return;
    obj.coeff[moment_id(spec, canonical(w))] += v;
  };
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y) {
      double g00 = gamma.at(0, 0, x, y), g01 = gamma.at(0, 1, x, y);
      double g10 = gamma.at(1, 0, x, y), g11 = gamma.at(1, 1, x, y);
      // p00 = <EF>, p01 = <E> - <EF>, p10 = <F> - <EF>,
      // p11 = 1 - <E> - <F> + <EF>
      add({{x}, {y}}, g00 - g01 - g10 + g11);
      add({{x}, {}}, g01 - g11);
      add({{}, {y}}, g10 - g11);
      obj.constant += g11;
    }
  return obj;
}

}  // namespace

NpaValue npa_max(const BellFunctional& gamma, int level) {
  const Scenario& sc = gamma.scenario();
  MomentMatrixSpec spec = MomentMatrixSpec::build(sc, level);
  int n = static_cast<int>(spec.words.size());
  int nm = static_cast<int>(spec.moments.size());

  NpaSdp sdp;
  sdp.spec = spec;
  sdp.n = n;
  sdp.prob.block_dims = {n};

  MomentObjective obj = functional_in_moments(spec, gamma);

  // dual form: S = C - sum_w y_w (-B_w) with C = B_identity
  sdp.prob.cost = sdp.indicator(0);
  for (int w = 1; w < nm; ++w) {
    SdpMatrix b = sdp.indicator(w);
    for (auto& e : b.entries) e.value = -e.value;
    sdp.prob.constraints.push_back(std::move(b));
    auto it = obj.coeff.find(w);
    sdp.prob.b.push_back(it == obj.coeff.end() ? 0.0 : it->second);
  }

  // probability positivity: the moment-matrix PSD condition alone does not
  // force p(ab|xy) >= 0, so each entry becomes a 1x1 slack block
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y) {
      int ec = moment_id(spec, canonical(MomentWord{{x}, {y}}));
      int ee = moment_id(spec, MomentWord{{x}, {}});
      int ff = moment_id(spec, MomentWord{{}, {y}});
      // coefficient of each moment in (p00, p01, p10, p11) plus constants
      const double coef[4][3] = {
          {1, 0, 0}, {-1, 1, 0}, {-1, 0, 1}, {1, -1, -1}};
      const double consts[4] = {0, 0, 0, 1};
      for (int k = 0; k < 4; ++k) {
        int blk = static_cast<int>(sdp.prob.block_dims.size());
        sdp.prob.block_dims.push_back(1);
        if (consts[k] != 0) sdp.prob.cost.add(blk, 0, 0, consts[k]);
        int ids[3] = {ec, ee, ff};
        for (int t = 0; t < 3; ++t) {
          if (coef[k][t] == 0) continue;
          // constraint index of moment w is w - 1
          sdp.prob.constraints[ids[t] - 1].add(blk, 0, 0, -coef[k][t]);
        }
      }
    }

  SdpSolution s = solve_sdp(sdp.prob);
  NpaValue out;
  // the dual iterate is an exactly feasible moment matrix, so its value is
  // attained; the primal side brackets the optimum from above
  out.value = s.dual_objective + obj.constant;
  out.upper = s.primal_objective + obj.constant;
  out.uncertainty = std::abs(s.primal_objective - s.dual_objective) +
                    s.primal_residual + s.dual_residual;
  out.converged =
      s.converged() || (s.status == SdpStatus::iteration_limit &&
                        s.primal_residual < 1e-7 && s.dual_residual < 1e-7 &&
                        out.uncertainty < 1e-6 * (1.0 + std::abs(out.value)));
  out.iterations = s.iterations;
  return out;
}

CertificateReport npa_membership(const ConditionalDistribution& p, int level) {
  const Scenario& sc = p.scenario();
  MomentMatrixSpec spec = MomentMatrixSpec::build(sc, level);
  int n = static_cast<int>(spec.words.size());
  int nm = static_cast<int>(spec.moments.size());

  CertificateReport rep;
  rep.set_tested = level == 1 ? "npa1" : "npa2";
  rep.tolerance = 1e-9;

  auto [norm_res, min_entry] = p.validation_residuals();
  rep.details["normalization_residual"] = norm_res;
  rep.details["min_entry"] = min_entry;

  // behavior pins with setting-averaged marginals; record the spread
  const double pin_slack = 1e-7;
  std::vector<double> pin(nm, 0.0);
  std::vector<bool> pinned(nm, false);
  double spread = 0;
  for (int x = 0; x < sc.nx; ++x) {
    double lo = 1, hi = 0, mean = 0;
    for (int y = 0; y < sc.ny; ++y) {
      double v = p.marginal_a(0, x, y);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    spread = std::max(spread, hi - lo);
    int idx = moment_id(spec, MomentWord{{x}, {}});
    pin[idx] = mean / sc.ny;
    pinned[idx] = true;
  }
  for (int y = 0; y < sc.ny; ++y) {
    double lo = 1, hi = 0, mean = 0;
    for (int x = 0; x < sc.nx; ++x) {
      double v = p.marginal_b(0, x, y);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    spread = std::max(spread, hi - lo);
    int idx = moment_id(spec, MomentWord{{}, {y}});
    pin[idx] = mean / sc.nx;
    pinned[idx] = true;
  }
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y) {
      int idx = moment_id(spec, canonical(MomentWord{{x}, {y}}));
      pin[idx] = p.at(0, 0, x, y);
      pinned[idx] = true;
    }
  rep.details["marginal_pin_spread"] = spread;

  if (norm_res > 1e-8 || spread > 2 * pin_slack) {
    // no moment matrix can reproduce the behavior: signaling or unnormalized
    rep.verdict = Verdict::outside;
    rep.residual = std::max(norm_res, spread);
    rep.note = "behavior has no consistent moment assignment";
    return rep;
  }

  NpaSdp sdp;
  sdp.spec = spec;
  sdp.n = n;
  sdp.prob.block_dims = {n};

  // C = B_1 + sum pinned pin_w B_w ; vars: free moments and the margin t,
  // maximize t s.t. M(pins, free) - t I >= 0.
  sdp.prob.cost = sdp.indicator(0);
  for (int w = 1; w < nm; ++w)
    if (pinned[w] && pin[w] != 0.0) {
      SdpMatrix b = sdp.indicator(w);
      for (auto& e : b.entries) e.value *= pin[w];
      for (auto& e : b.entries) sdp.prob.cost.entries.push_back(e);
    }
  for (int w = 1; w < nm; ++w) {
    if (pinned[w]) continue;
    SdpMatrix b = sdp.indicator(w);
    for (auto& e : b.entries) e.value = -e.value;
    sdp.prob.constraints.push_back(std::move(b));
    sdp.prob.b.push_back(0.0);
  }
  SdpMatrix tmat;
  for (int i = 0; i < n; ++i) tmat.add(0, i, i, 1.0);
  sdp.prob.constraints.push_back(std::move(tmat));
  sdp.prob.b.push_back(1.0);

  SdpOptions opts;
  opts.decide_threshold = -1e-9;
  SdpSolution s = solve_sdp(sdp.prob, opts);
  // certified margin: smallest eigenvalue of the moment matrix rebuilt from
  // the returned free moments (at least the path-following t); the primal
  // objective bounds every feasible margin from above (certifies outside)
  Eigen::MatrixXcd mm = Eigen::MatrixXcd::Zero(n, n);
  auto accumulate = [&](const SdpMatrix& mat, double scale) {
    for (const auto& e : mat.entries) {
      mm(e.row, e.col) += scale * e.value;
      if (e.row != e.col) mm(e.col, e.row) += scale * std::conj(e.value);
    }
  };
  accumulate(sdp.prob.cost, 1.0);
  for (size_t i = 0; i + 1 < sdp.prob.constraints.size(); ++i)
    accumulate(sdp.prob.constraints[i], -s.y[i]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((mm + mm.adjoint()) / 2.0);
  double margin_achieved = std::max(s.dual_objective, es.eigenvalues().minCoeff());
  double margin_upper = s.primal_objective;
  rep.details["margin"] = margin_achieved;
  rep.details["margin_upper_bound"] = margin_upper;
  rep.details["sdp_gap"] = s.gap;
  rep.residual = margin_achieved < 0 ? -margin_achieved : 0.0;
  bool usable = s.converged() || s.decided_early ||
                (s.status == SdpStatus::iteration_limit &&
                 s.primal_residual < 1e-7 && s.dual_residual < 1e-7);
  if (!usable) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "sdp did not converge";
    return rep;
  }
  if (margin_achieved >= -1e-9) {
    rep.verdict = Verdict::inside;
  } else if (margin_upper < -1e-9) {
    rep.verdict = Verdict::outside;
  } else if (margin_achieved >= -pin_slack) {
    // boundary resolution: feasible for a behavior within the pin slack
    rep.verdict = Verdict::inside;
    rep.note = "feasible within behavior slack";
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

}  // namespace qcert
