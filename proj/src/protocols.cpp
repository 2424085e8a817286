#include "qcert/protocols.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcert/catalog.hpp"
#include "qcert/rng.hpp"
#include "qcert/sdp.hpp"
#include "qcert/tensor.hpp"

namespace qcert {

double MeasurementFamily::validation_residual() const {
  double res = 0;
  for (const auto& setting : effects) {
    ComplexMatrix sum(dim(), dim());
    for (const auto& e : setting) {
      res = std::max(res, -min_eigenvalue(e));
      sum += e;
    }
    res = std::max(res, sum.max_abs_diff(ComplexMatrix::identity(dim())));
  }
  return res;
}

namespace {

// Trace over the second factor of (1 x N) tau for tau on (d1, d2).
ComplexMatrix contract_second(const ComplexMatrix& tau, const ComplexMatrix& n,
                              int d1, int d2) {
  ComplexMatrix out(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) {
      cplx s(0, 0);
      for (int k = 0; k < d2; ++k)
        for (int l = 0; l < d2; ++l) s += tau(i * d2 + k, j * d2 + l) * n(l, k);
      out(i, j) = s;
    }
  return out;
}

double effect_pair_probability(const ComplexMatrix& tau, const ComplexMatrix& m,
                               const ComplexMatrix& n, int d1, int d2) {
  cplx s(0, 0);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int k = 0; k < d2; ++k)
        for (int l = 0; l < d2; ++l)
          s += tau(i * d2 + k, j * d2 + l) * m(j, i) * n(l, k);
  return s.real();
}

// Output states of the protocol on (R A1) x (S B1), one per (x, y).
std::vector<std::vector<ComplexMatrix>> protocol_output_states(
    const ProtocolSpec& spec, const ChoiChannel& ch) {
  if (!ch.is_bipartite())
    throw std::invalid_argument("run_protocol: bipartite channel required");
  int nx = 0, ny = 0;
  if (spec.variant == ProtocolVariant::shared_entangled) {
    nx = static_cast<int>(spec.alice_input_channels.size());
    ny = static_cast<int>(spec.bob_input_channels.size());
  } else {
    nx = static_cast<int>(spec.alice_input_states.size());
    ny = static_cast<int>(spec.bob_input_states.size());
  }
  if (nx == 0 || ny == 0)
    throw std::invalid_argument("run_protocol: empty input families");

  std::vector<std::vector<ComplexMatrix>> taus(nx);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      ComplexMatrix state(0, 0);  // on (A0, R, B0, S)
      if (spec.variant == ProtocolVariant::shared_entangled) {
        if (!spec.shared_state)
          throw std::invalid_argument("run_protocol: shared state missing");
        state = *spec.shared_state;
        state.set_dims({ch.d_a0(), spec.d_r, ch.d_b0(), spec.d_s},
                       {ch.d_a0(), spec.d_r, ch.d_b0(), spec.d_s});
        state = apply_to_subsystems(spec.alice_input_channels[x], state, {0, 1},
                                    {ch.d_a0(), spec.d_r});
        state = apply_to_subsystems(spec.bob_input_channels[y], state, {2, 3},
                                    {ch.d_b0(), spec.d_s});
      } else {
        ComplexMatrix rx = spec.alice_input_states[x];
        rx.set_dims({ch.d_a0(), spec.d_r}, {ch.d_a0(), spec.d_r});
        ComplexMatrix sy = spec.bob_input_states[y];
        sy.set_dims({ch.d_b0(), spec.d_s}, {ch.d_b0(), spec.d_s});
        state = kron(rx, sy);
      }
      // channel on (A0, B0): positions 0 and 2 -> outputs (A1, B1)
      ComplexMatrix out = apply_to_subsystems(ch, state, {0, 2});
      // (A1, R, B1, S) -> (R, A1, S, B1)
      out = permute_subsystems(out, {1, 0, 3, 2});
      out.set_dims({spec.d_r * ch.d_a1(), spec.d_s * ch.d_b1()},
                   {spec.d_r * ch.d_a1(), spec.d_s * ch.d_b1()});
      taus[x].push_back(out);
    }
  }
  return taus;
}

}  // namespace

ConditionalDistribution run_protocol(const ProtocolSpec& spec,
                                     const ChoiChannel& ch) {
  if (!ch.is_bipartite())
    throw std::invalid_argument("run_protocol: bipartite channel required");

  if (spec.variant == ProtocolVariant::computational) {
    Scenario sc{ch.d_a1(), ch.d_b1(), ch.d_a0(), ch.d_b0()};
    ConditionalDistribution p(sc);
    const ComplexMatrix& j = ch.choi();
    const std::vector<int> dims = {ch.d_a0(), ch.d_b0(), ch.d_a1(), ch.d_b1()};
    for (int x = 0; x < sc.nx; ++x)
      for (int y = 0; y < sc.ny; ++y)
        for (int a = 0; a < sc.na; ++a)
          for (int b = 0; b < sc.nb; ++b) {
            long long idx = flatten_index({x, y, a, b}, dims);
            p.at(a, b, x, y) = j(static_cast<int>(idx), static_cast<int>(idx)).real();
          }
    return p;
  }

  const MeasurementFamily& ma = spec.alice_measurements;
  const MeasurementFamily& mb = spec.bob_measurements;
  if (ma.dim() != spec.d_r * ch.d_a1() || mb.dim() != spec.d_s * ch.d_b1())
    throw std::invalid_argument("run_protocol: measurement dimensions mismatch");
  if (ma.validation_residual() > 1e-9 || mb.validation_residual() > 1e-9)
    throw std::invalid_argument("run_protocol: invalid measurement family");

  auto taus = protocol_output_states(spec, ch);
  int nx = static_cast<int>(taus.size());
  int ny = static_cast<int>(taus[0].size());
  Scenario sc{ma.outcomes(), mb.outcomes(), nx, ny};
  if (ma.settings() != nx || mb.settings() != ny)
    throw std::invalid_argument("run_protocol: measurement settings mismatch");

  int d1 = ma.dim(), d2 = mb.dim();
  ConditionalDistribution p(sc);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (int a = 0; a < sc.na; ++a)
        for (int b = 0; b < sc.nb; ++b)
          p.at(a, b, x, y) = effect_pair_probability(
              taus[x][y], ma.effects[x][a], mb.effects[y][b], d1, d2);
  return p;
}

std::vector<ComplexMatrix> generalized_bell_basis(int d) {
  if (d < 2) throw std::invalid_argument("generalized_bell_basis: d >= 2 required");
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<size_t>(d) * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      ComplexMatrix v(d * d, 1);
      for (int k = 0; k < d; ++k) {
        double phase = 2.0 * std::numbers::pi * b * k / d;
        v(k * d + (k + a) % d, 0) = cplx(std::cos(phase), std::sin(phase)) / std::sqrt(d);
      }
      v.set_dims({d, d}, {1});
      basis.push_back(std::move(v));
    }
  return basis;
}

//=========================================================================
// See-saw
//=========================================================================

std::vector<ComplexMatrix> optimal_povm(const std::vector<ComplexMatrix>& h) {
  int k = static_cast<int>(h.size());
  if (k < 2) throw std::invalid_argument("optimal_povm: need at least 2 effects");
  int d = h[0].rows();

  if (k == 2) {
    // maximize Tr(M (H0 - H1)) + Tr H1 with 0 <= M <= 1
    ComplexMatrix diff = h[0] - h[1];
    HermEig eig = herm_eig(diff);
    ComplexMatrix m(d, d);
    for (int i = 0; i < d; ++i) {
      if (eig.eigenvalues[i] <= 0) continue;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          m(r, c) += eig.eigenvectors(r, i) * std::conj(eig.eigenvectors(c, i));
    }
    return {m, ComplexMatrix::identity(d) - m};
  }

  // small SDP: max sum_a Tr(M^a H_a), M^a >= 0, sum M^a = 1
  SdpProblem prob;
  prob.block_dims.assign(k, d);
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        cplx v = -h[a](i, j);
        if (v != cplx(0, 0)) prob.cost.add(a, i, j, v);
      }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      SdpMatrix re;
      for (int a = 0; a < k; ++a) re.add(a, i, j, 1.0);
      prob.constraints.push_back(std::move(re));
      prob.b.push_back(i == j ? 1.0 : 0.0);
      if (i != j) {
        SdpMatrix im;
        for (int a = 0; a < k; ++a) im.add(a, i, j, cplx(0, 1));
        prob.constraints.push_back(std::move(im));
        prob.b.push_back(0.0);
      }
    }
  SdpSolution sol = solve_sdp(prob);
  if (!sol.converged()) throw std::runtime_error("optimal_povm: SDP failed");
  std::vector<ComplexMatrix> out;
  for (int a = 0; a < k; ++a) {
    ComplexMatrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = sol.x_blocks[a](i, j);
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

MeasurementFamily random_rank_partition_povm(Rng& rng, int settings, int dim,
                                             int outcomes) {
  MeasurementFamily fam;
  for (int s = 0; s < settings; ++s) {
    ComplexMatrix u = random_unitary(rng, dim);
    std::vector<ComplexMatrix> setting;
    // split columns into `outcomes` groups as evenly as possible
    int base = dim / outcomes, extra = dim % outcomes;
    int col = 0;
    for (int a = 0; a < outcomes; ++a) {
      int rank = base + (a < extra ? 1 : 0);
      ComplexMatrix m(dim, dim);
      for (int r = 0; r < rank; ++r, ++col)
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            m(i, j) += u(i, col) * std::conj(u(j, col));
      setting.push_back(std::move(m));
    }
    fam.effects.push_back(std::move(setting));
  }
  return fam;
}

double seesaw_objective(const BellFunctional& gamma,
                        const std::vector<std::vector<ComplexMatrix>>& taus,
                        const MeasurementFamily& ma, const MeasurementFamily& mb,
                        int d1, int d2) {
  const Scenario& sc = gamma.scenario();
  double v = 0;
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y)
      for (int a = 0; a < sc.na; ++a)
        for (int b = 0; b < sc.nb; ++b) {
          double g = gamma.at(a, b, x, y);
          if (g == 0) continue;
          v += g * effect_pair_probability(taus[x][y], ma.effects[x][a],
                                           mb.effects[y][b], d1, d2);
        }
  return v;
}

}  // namespace

SeesawResult seesaw_gamma_max(const ChoiChannel& ch, const BellFunctional& gamma,
                              const std::vector<ComplexMatrix>& alice_inputs,
                              const std::vector<ComplexMatrix>& bob_inputs,
                              int d_r, int d_s, const SeesawOptions& opts) {
  const Scenario& sc = gamma.scenario();
  if (static_cast<int>(alice_inputs.size()) != sc.nx ||
      static_cast<int>(bob_inputs.size()) != sc.ny)
    throw std::invalid_argument("seesaw_gamma_max: input family sizes mismatch");

  ProtocolSpec spec;
  spec.variant = ProtocolVariant::product_inputs;
  spec.d_r = d_r;
  spec.d_s = d_s;
  spec.alice_input_states = alice_inputs;
  spec.bob_input_states = bob_inputs;
  auto taus = protocol_output_states(spec, ch);

  int d1 = d_r * ch.d_a1(), d2 = d_s * ch.d_b1();
  // (S B1) x (R A1) view for the Bob half-steps
  std::vector<std::vector<ComplexMatrix>> swapped(taus.size());
  for (size_t x = 0; x < taus.size(); ++x)
    for (const auto& tau : taus[x]) {
      ComplexMatrix t = tau;
      t.set_dims({d1, d2}, {d1, d2});
      swapped[x].push_back(permute_subsystems(t, {1, 0}));
    }

  SeesawResult best;
  best.value = -std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng rng(opts.seed + 0x51ab5eed * static_cast<uint64_t>(restart + 1));
    MeasurementFamily ma = random_rank_partition_povm(rng, sc.nx, d1, sc.na);
    MeasurementFamily mb = random_rank_partition_povm(rng, sc.ny, d2, sc.nb);

    std::vector<double> values;
    double prev = seesaw_objective(gamma, taus, ma, mb, d1, d2);
    values.push_back(prev);
    bool converged = false;

    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      // Alice half-step: per setting x, maximize sum_a Tr(M^{a|x} K_{a|x})
      for (int x = 0; x < sc.nx; ++x) {
        std::vector<ComplexMatrix> k(sc.na, ComplexMatrix(d1, d1));
        for (int a = 0; a < sc.na; ++a)
          for (int y = 0; y < sc.ny; ++y)
            for (int b = 0; b < sc.nb; ++b) {
              double g = gamma.at(a, b, x, y);
              if (g == 0) continue;
              // Tr_{SB1}[(1 x N^{b|y}) tau^{xy}] is the linear weight of M
              ComplexMatrix w = contract_second(taus[x][y], mb.effects[y][b], d1, d2);
              k[a] += w * g;
            }
        ma.effects[x] = optimal_povm(k);
      }
      // Bob half-step
      for (int y = 0; y < sc.ny; ++y) {
        std::vector<ComplexMatrix> k(sc.nb, ComplexMatrix(d2, d2));
        for (int b = 0; b < sc.nb; ++b)
          for (int x = 0; x < sc.nx; ++x)
            for (int a = 0; a < sc.na; ++a) {
              double g = gamma.at(a, b, x, y);
              if (g == 0) continue;
              ComplexMatrix w = contract_second(swapped[x][y], ma.effects[x][a], d2, d1);
              k[b] += w * g;
            }
        mb.effects[y] = optimal_povm(k);
      }
      double cur = seesaw_objective(gamma, taus, ma, mb, d1, d2);
      values.push_back(cur);
      if (cur - prev < opts.improvement_tol) {
        converged = true;
        prev = cur;
        break;
      }
      prev = cur;
    }
    if (prev > best.value) {
      best.value = prev;
      best.alice = ma;
      best.bob = mb;
      best.sweep_values = values;
      best.converged = converged;
    }
  }
  return best;
}

//=========================================================================
// MDI LOSR test
//=========================================================================

PptBound ppt_product_effect_bound(const std::vector<ComplexMatrix>& f,
                                  int d_left, int d_right) {
  int d = d_left * d_right;
  int npairs = static_cast<int>(f.size());
  for (const auto& m : f)
    if (m.rows() != d || m.cols() != d)
      throw std::invalid_argument("ppt_product_effect_bound: shape mismatch");

  // pairs with nonzero objective keep their own variable; the rest are
  // aggregated into the eliminated completeness slack (exact reduction)
  std::vector<int> active;
  int eliminated = -1;
  for (int i = 0; i < npairs; ++i)
    if (f[i].max_abs() > 1e-14) active.push_back(i);
  if (active.size() == static_cast<size_t>(npairs)) {
    eliminated = active.back();
    active.pop_back();
  }

  auto ppt_pos = [&](int r, int c) {
    // (rl, rr),(cl, cr) -> (rl, cr),(cl, rr)
    int rl = r / d_right, rr = r % d_right, cl = c / d_right, cr = c % d_right;
    return std::pair<int, int>(rl * d_right + cr, cl * d_right + rr);
  };

  int na = static_cast<int>(active.size());
  // blocks: per active pair (Z, Z^PPT), then the slack pair
  SdpProblem prob;
  prob.block_dims.assign(2 * (na + 1), d);
  int slack_z = 2 * na, slack_w = 2 * na + 1;
  for (int i = 0; i < d; ++i) {
    prob.cost.add(slack_z, i, i, 1.0);
    prob.cost.add(slack_w, i, i, 1.0);
  }
  const ComplexMatrix* felim = eliminated >= 0 ? &f[eliminated] : nullptr;
  double constant = 0;
  if (felim) constant = felim->trace().real();

  // Hermitian coordinate basis per active pair
  for (int ai = 0; ai < na; ++ai) {
    const ComplexMatrix& fa = f[active[ai]];
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        for (int part = 0; part < (i == j ? 1 : 2); ++part) {
          cplx v = part == 0 ? cplx(1, 0) : cplx(0, 1);
          SdpMatrix a;
          a.add(2 * ai, i, j, -v);
          auto [pr, pc] = ppt_pos(i, j);
          a.add(2 * ai + 1, pr, pc, -v);
          a.add(slack_z, i, j, v);
          a.add(slack_w, pr, pc, v);
          prob.constraints.push_back(std::move(a));
          // objective coefficient Tr((F_a - F_elim) H)
          cplx fv = fa(j, i) - (felim ? (*felim)(j, i) : cplx(0, 0));
          cplx fv2 = fa(i, j) - (felim ? (*felim)(i, j) : cplx(0, 0));
          double bcoef = i == j ? std::real(v * fv)
                                : std::real(v * fv) + std::real(std::conj(v) * fv2);
          prob.b.push_back(bcoef);
        }
      }
  }

  SdpSolution sol = solve_sdp(prob);
  PptBound out;
  out.value = sol.dual_objective + constant;
  out.converged = sol.converged();
  return out;
}

MdiSetup prepare_mdi_setup(const BellFunctional& gamma,
                           const std::vector<ComplexMatrix>& alice_inputs,
                           const std::vector<ComplexMatrix>& bob_inputs,
                           int d_a, int d_b, const MdiOptions& opts) {
  const Scenario& sc = gamma.scenario();
  if (sc.na != d_a * d_a || sc.nb != d_b * d_b)
    throw std::invalid_argument("mdi: outcome counts must match Bell bases");
  if (static_cast<int>(alice_inputs.size()) != sc.nx ||
      static_cast<int>(bob_inputs.size()) != sc.ny)
    throw std::invalid_argument("mdi: input family sizes mismatch");

  // spanning check: Gram rank of the input operator family
  auto spans = [](const std::vector<ComplexMatrix>& states, int need) {
    int n = static_cast<int>(states.size());
    ComplexMatrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        g(i, j) = (states[i].adjoint() * states[j]).trace();
    HermEig eig = herm_eig(g);
    double top = std::max(eig.eigenvalues.back(), 1e-30);
    int rank = 0;
    for (double v : eig.eigenvalues)
      if (v > 1e-10 * top) ++rank;
    return rank >= need;
  };
  if (!spans(alice_inputs, d_a * d_a * d_a * d_a) ||
      !spans(bob_inputs, d_b * d_b * d_b * d_b))
    throw std::invalid_argument("mdi: input families do not span the operator space");

  MdiSetup setup;
  setup.gamma = gamma;
  setup.alice_inputs = alice_inputs;
  setup.bob_inputs = bob_inputs;

  // upper bound over PPT global effects:
  // F_ab = sum_xy gamma_{ab,xy} rho^x (x) sigma^y
  int dea = d_a * d_a, deb = d_b * d_b;
  std::vector<ComplexMatrix> fmats;
  fmats.reserve(static_cast<size_t>(sc.na) * sc.nb);
  for (int a = 0; a < sc.na; ++a)
    for (int b = 0; b < sc.nb; ++b) {
      ComplexMatrix fab(dea * deb, dea * deb);
      for (int x = 0; x < sc.nx; ++x)
        for (int y = 0; y < sc.ny; ++y) {
          double g = gamma.at(a, b, x, y);
          if (g == 0) continue;
          fab += kron(alice_inputs[x], bob_inputs[y]) * g;
        }
      fmats.push_back(std::move(fab));
    }
  PptBound upper = ppt_product_effect_bound(fmats, dea, deb);
  setup.product_upper_bound = upper.value;
  setup.upper_converged = upper.converged;

  // see-saw lower bound over product effect pairs
  double lower = -std::numeric_limits<double>::infinity();
  if (opts.seesaw.restarts == 0) lower = 0;
  for (int restart = 0; restart < opts.seesaw.restarts; ++restart) {
    Rng rng(opts.seesaw.seed + 0x9d1ull * static_cast<uint64_t>(restart + 1));
    MeasurementFamily mb = random_rank_partition_povm(rng, 1, deb, sc.nb);
    std::vector<ComplexMatrix> nb_eff = mb.effects[0];
    std::vector<ComplexMatrix> ma_eff;
    double prev = -std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < opts.seesaw.max_sweeps; ++sweep) {
      std::vector<double> vb(static_cast<size_t>(sc.nb) * sc.ny);
      for (int b = 0; b < sc.nb; ++b)
        for (int y = 0; y < sc.ny; ++y)
          vb[b * sc.ny + y] = (nb_eff[b] * bob_inputs[y]).trace().real();
      std::vector<ComplexMatrix> h(sc.na, ComplexMatrix(dea, dea));
      for (int a = 0; a < sc.na; ++a)
        for (int x = 0; x < sc.nx; ++x) {
          double coef = 0;
          for (int b = 0; b < sc.nb; ++b)
            for (int y = 0; y < sc.ny; ++y)
              coef += gamma.at(a, b, x, y) * vb[b * sc.ny + y];
          if (coef != 0) h[a] += alice_inputs[x] * coef;
        }
      ma_eff = optimal_povm(h);

      std::vector<double> va(static_cast<size_t>(sc.na) * sc.nx);
      for (int a = 0; a < sc.na; ++a)
        for (int x = 0; x < sc.nx; ++x)
          va[a * sc.nx + x] = (ma_eff[a] * alice_inputs[x]).trace().real();
      std::vector<ComplexMatrix> hb(sc.nb, ComplexMatrix(deb, deb));
      for (int b = 0; b < sc.nb; ++b)
        for (int y = 0; y < sc.ny; ++y) {
          double coef = 0;
          for (int a = 0; a < sc.na; ++a)
            for (int x = 0; x < sc.nx; ++x)
              coef += gamma.at(a, b, x, y) * va[a * sc.nx + x];
          if (coef != 0) hb[b] += bob_inputs[y] * coef;
        }
      nb_eff = optimal_povm(hb);

      double cur = 0;
      for (int a = 0; a < sc.na; ++a)
        for (int b = 0; b < sc.nb; ++b)
          for (int x = 0; x < sc.nx; ++x)
            for (int y = 0; y < sc.ny; ++y) {
              double g = gamma.at(a, b, x, y);
              if (g == 0) continue;
              cur += g * (ma_eff[a] * alice_inputs[x]).trace().real() *
                     (nb_eff[b] * bob_inputs[y]).trace().real();
            }
      if (cur - prev < opts.seesaw.improvement_tol && sweep > 0) {
        prev = cur;
        break;
      }
      prev = cur;
    }
    lower = std::max(lower, prev);
  }
  setup.product_lower_bound = lower;
  return setup;
}

CertificateReport mdi_losr_test(const ChoiChannel& ch, const MdiSetup& setup,
                                const MdiOptions& opts) {
  if (!ch.is_bipartite())
    throw std::invalid_argument("mdi_losr_test: bipartite channel required");
  if (ch.d_a0() != ch.d_a1() || ch.d_b0() != ch.d_b1())
    throw std::invalid_argument(
        "mdi_losr_test: unequal input/output dimensions are not supported");
  int da = ch.d_a0(), db = ch.d_b0();
  const Scenario& sc = setup.gamma.scenario();
  if (sc.na != da * da || sc.nb != db * db)
    throw std::invalid_argument("mdi_losr_test: setup does not match the channel dims");

  // fixed generalized-Bell-basis measurements on (R, A1) and (S, B1)
  auto bell_family = [](int d, int settings) {
    MeasurementFamily fam;
    auto basis = generalized_bell_basis(d);
    std::vector<ComplexMatrix> effects;
    for (const auto& v : basis) {
      ComplexMatrix p(d * d, d * d);
      for (int i = 0; i < d * d; ++i)
        for (int j = 0; j < d * d; ++j) p(i, j) = v(i, 0) * std::conj(v(j, 0));
      effects.push_back(std::move(p));
    }
    fam.effects.assign(settings, effects);
    return fam;
  };

  ProtocolSpec spec;
  spec.variant = ProtocolVariant::product_inputs;
  spec.d_r = da;
  spec.d_s = db;
  spec.alice_input_states = setup.alice_inputs;
  spec.bob_input_states = setup.bob_inputs;
  spec.alice_measurements = bell_family(da, sc.nx);
  spec.bob_measurements = bell_family(db, sc.ny);

  ConditionalDistribution p_e = run_protocol(spec, ch);
  double lhs = bell_value(setup.gamma, p_e);

  CertificateReport rep;
  rep.set_tested = "losr (mdi)";
  rep.tolerance = opts.margin_tol;
  rep.bell_value = lhs;
  rep.details["achieved_value"] = lhs;
  rep.details["product_effect_upper_bound"] = setup.product_upper_bound;
  rep.details["product_effect_lower_bound"] = setup.product_lower_bound;
  rep.details["upper_bound_converged"] = setup.upper_converged ? 1.0 : 0.0;
  rep.residual = lhs - setup.product_upper_bound;
  if (!setup.upper_converged) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "upper-bound SDP did not converge";
  } else if (lhs > setup.product_upper_bound + opts.margin_tol) {
    rep.verdict = Verdict::outside;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

CertificateReport mdi_losr_test(const ChoiChannel& ch,
                                const BellFunctional& gamma,
                                const std::vector<ComplexMatrix>& alice_inputs,
                                const std::vector<ComplexMatrix>& bob_inputs,
                                const MdiOptions& opts) {
  if (!ch.is_bipartite())
    throw std::invalid_argument("mdi_losr_test: bipartite channel required");
  if (ch.d_a0() != ch.d_a1() || ch.d_b0() != ch.d_b1())
    throw std::invalid_argument(
        "mdi_losr_test: unequal input/output dimensions are not supported");
  MdiSetup setup = prepare_mdi_setup(gamma, alice_inputs, bob_inputs,
                                     ch.d_a0(), ch.d_b0(), opts);
  return mdi_losr_test(ch, setup, opts);
}

//=========================================================================
// Strategies and constructions
//=========================================================================

double QuantumStrategy::validation_residual() const {
  double res = sigma.hermiticity_residual();
  res = std::max(res, std::abs(sigma.trace().real() - 1.0));
  res = std::max(res, -min_eigenvalue(sigma));
  auto check_family = [&](const std::vector<std::vector<ComplexMatrix>>& fam,
                          int d) {
    double r = 0;
    for (const auto& setting : fam) {
      ComplexMatrix sum(d, d);
      for (const auto& p : setting) {
        r = std::max(r, p.max_abs_diff(p * p));  // idempotence
        r = std::max(r, p.hermiticity_residual());
        sum += p;
      }
      r = std::max(r, sum.max_abs_diff(ComplexMatrix::identity(d)));
    }
    return r;
  };
  int dr = alice_projectors[0][0].rows(), ds = bob_projectors[0][0].rows();
  res = std::max(res, check_family(alice_projectors, dr));
  res = std::max(res, check_family(bob_projectors, ds));
  return res;
}

ConditionalDistribution QuantumStrategy::born_distribution() const {
  int nx = static_cast<int>(alice_projectors.size());
  int ny = static_cast<int>(bob_projectors.size());
  int na = static_cast<int>(alice_projectors[0].size());
  int nb = static_cast<int>(bob_projectors[0].size());
  Scenario sc{na, nb, nx, ny};
  ConditionalDistribution p(sc);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
          p.at(a, b, x, y) =
              (kron(alice_projectors[x][a], bob_projectors[y][b]) * sigma)
                  .trace()
                  .real();
  return p;
}

ChoiChannel lose_from_strategy(const QuantumStrategy& s) {
  if (s.validation_residual() > 1e-9)
    throw std::invalid_argument("lose_from_strategy: invalid strategy");
  int nx = static_cast<int>(s.alice_projectors.size());
  int ny = static_cast<int>(s.bob_projectors.size());
  int na = static_cast<int>(s.alice_projectors[0].size());
  int nb = static_cast<int>(s.bob_projectors[0].size());
  int dr = s.alice_projectors[0][0].rows();
  int ds = s.bob_projectors[0][0].rows();

  // controlled Stinespring dilations U = sum_x |x><x| (x) U_x on (C, A, R)
  auto controlled = [](const std::vector<std::vector<ComplexMatrix>>& fam,
                       int nsettings, int nout, int denv) {
    ComplexMatrix u(nsettings * nout * denv, nsettings * nout * denv);
    for (int x = 0; x < nsettings; ++x) {
      ComplexMatrix iso(nout * denv, denv);
      for (int a = 0; a < nout; ++a)
        for (int i = 0; i < denv; ++i)
          for (int j = 0; j < denv; ++j) iso(a * denv + i, j) = fam[x][a](i, j);
      ComplexMatrix ux = unitary_completion(iso);
      for (int i = 0; i < nout * denv; ++i)
        for (int j = 0; j < nout * denv; ++j)
          u(x * nout * denv + i, x * nout * denv + j) = ux(i, j);
    }
    return u;
  };
  ComplexMatrix u = controlled(s.alice_projectors, nx, na, dr);
  ComplexMatrix v = controlled(s.bob_projectors, ny, nb, ds);
  ComplexMatrix w = kron(u, v);  // factors (C, A, R, D, B, S)
  w.set_dims({nx, na, dr, ny, nb, ds}, {nx, na, dr, ny, nb, ds});

  ComplexMatrix anc_a(na, na);
  anc_a(0, 0) = 1;
  ComplexMatrix anc_b(nb, nb);
  anc_b(0, 0) = 1;

  int dout = na * nb;
  ComplexMatrix j(nx * ny * dout, nx * ny * dout, {nx, ny, na, nb},
                  {nx, ny, na, nb});
  for (int c = 0; c < nx; ++c)
    for (int cp = 0; cp < nx; ++cp)
      for (int d = 0; d < ny; ++d)
        for (int dp = 0; dp < ny; ++dp) {
          ComplexMatrix rho_cd(nx * ny, nx * ny, {nx, ny}, {nx, ny});
          rho_cd(c * ny + d, cp * ny + dp) = 1.0;
          // assemble on (C, D, A, B, R, S), then permute to (C, A, R, D, B, S)
          ComplexMatrix full =
              kron(kron(kron(rho_cd, anc_a), anc_b), s.sigma);
          full.set_dims({nx, ny, na, nb, dr, ds}, {nx, ny, na, nb, dr, ds});
          full = permute_subsystems(full, {0, 2, 4, 1, 3, 5});
          ComplexMatrix evolved = w * full * w.adjoint();
          evolved.set_dims({nx, na, dr, ny, nb, ds}, {nx, na, dr, ny, nb, ds});
          ComplexMatrix out = partial_trace(evolved, {1, 4});  // keep (A, B)
          for (int k = 0; k < na; ++k)
            for (int kp = 0; kp < na; ++kp)
              for (int l = 0; l < nb; ++l)
                for (int lp = 0; lp < nb; ++lp)
                  j(static_cast<int>(flatten_index({c, d, k, l}, {nx, ny, na, nb})),
                    static_cast<int>(flatten_index({cp, dp, kp, lp}, {nx, ny, na, nb}))) =
                      out(k * nb + l, kp * nb + lp);
        }
  return ChoiChannel::bipartite(std::move(j), nx, ny, na, nb);
}

ChoiChannel sample_losr(int d_a0, int d_b0, int d_a1, int d_b1, int terms,
                        uint64_t seed) {
  if (terms < 1) throw std::invalid_argument("sample_losr: terms >= 1");
  Rng rng(seed);
  std::vector<double> weights = rng.simplex_weights(terms);
  ComplexMatrix j(d_a0 * d_b0 * d_a1 * d_b1, d_a0 * d_b0 * d_a1 * d_b1,
                  {d_a0, d_b0, d_a1, d_b1}, {d_a0, d_b0, d_a1, d_b1});
  for (int t = 0; t < terms; ++t) {
    KrausChannel ka{random_kraus_set(rng, d_a0, d_a1, 2)};
    KrausChannel kb{random_kraus_set(rng, d_b0, d_b1, 2)};
    ComplexMatrix prod = kron(choi_from_kraus(ka).choi(), choi_from_kraus(kb).choi());
    // (A0, A1, B0, B1) -> (A0, B0, A1, B1)
    prod = permute_subsystems(prod, {0, 2, 1, 3});
    j += prod * weights[t];
  }
  return ChoiChannel::bipartite(std::move(j), d_a0, d_b0, d_a1, d_b1);
}

ChoiChannel sample_product_channel(int d_a0, int d_b0, int d_a1, int d_b1,
                                   uint64_t seed) {
  return sample_losr(d_a0, d_b0, d_a1, d_b1, 1, seed);
}

QuantumStrategy tsirelson_strategy() {
  QuantumStrategy s;
  s.sigma = catalog::max_entangled_state(2);
  auto projectors_of = [](const ComplexMatrix& obs) {
    HermEig eig = herm_eig(obs);
    // outcome 0 = positive eigenvector, outcome 1 = negative
    std::vector<ComplexMatrix> ps(2, ComplexMatrix(2, 2));
    for (int i = 0; i < 2; ++i) {
      int outcome = eig.eigenvalues[i] > 0 ? 0 : 1;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          ps[outcome](r, c) += eig.eigenvectors(r, i) * std::conj(eig.eigenvectors(c, i));
    }
    return ps;
  };
  ComplexMatrix z = catalog::pauli_z(), x = catalog::pauli_x();
  double inv = 1.0 / std::sqrt(2.0);
  s.alice_projectors = {projectors_of(z), projectors_of(x)};
  s.bob_projectors = {projectors_of((z + x) * inv), projectors_of((z - x) * inv)};
  return s;
}

QuantumStrategy random_local_strategy(int nx, int ny, int d, uint64_t seed) {
  Rng rng(seed);
  QuantumStrategy s;
  s.sigma = kron(random_density(rng, d), random_density(rng, d));
  s.sigma.set_dims({d, d}, {d, d});
  for (int x = 0; x < nx; ++x)
    s.alice_projectors.push_back(random_projective_measurement(rng, d, d));
  for (int y = 0; y < ny; ++y)
    s.bob_projectors.push_back(random_projective_measurement(rng, d, d));
  return s;
}

}  // namespace qcert
