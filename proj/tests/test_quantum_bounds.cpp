#include <doctest.h>

#include <cmath>

#include "qcert/catalog.hpp"
#include "qcert/negativity.hpp"
#include "qcert/npa.hpp"
#include "qcert/rng.hpp"
#include "qcert/sdp.hpp"
#include "qcert/tensor.hpp"
#include "qcert/dephasing.hpp"
#include "qcert/witness.hpp"

using namespace qcert;

namespace {

const Scenario kChsh{2, 2, 2, 2};

ConditionalDistribution box_distribution(const std::vector<std::vector<double>>& s) {
  return ConditionalDistribution::from_stochastic(s, kChsh);
}

}  // namespace

TEST_CASE("sdp solver on eigenvalue problems") {
  Rng rng(43);

  SUBCASE("largest y with A - yI psd is the smallest eigenvalue") {
    for (int trial = 0; trial < 10; ++trial) {
      int d = 2 + rng.uniform_int(5);
      ComplexMatrix a = random_ginibre(rng, d, d);
      a = (a + a.adjoint()) * 0.5;
      SdpProblem prob;
      prob.block_dims = {d};
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
          if (a(i, j) != cplx(0, 0)) prob.cost.add(0, i, j, a(i, j));
      SdpMatrix eye;
      for (int i = 0; i < d; ++i) eye.add(0, i, i, 1.0);
      prob.constraints.push_back(eye);
      prob.b.push_back(1.0);
      SdpSolution sol = solve_sdp(prob);
      REQUIRE(sol.converged());
      CHECK(sol.dual_objective ==
            doctest::Approx(min_eigenvalue(a)).epsilon(1e-6));
      // primal side: min <A, X> with Tr X = 1
      CHECK(sol.primal_objective ==
            doctest::Approx(min_eigenvalue(a)).epsilon(1e-6));
    }
  }

  SUBCASE("two blocks share a trace budget") {
    // min <diag(2), X1> + <diag(3), X2> s.t. Tr X1 + Tr X2 = 1
    SdpProblem prob;
    prob.block_dims = {2, 2};
    prob.cost.add(0, 0, 0, 2.0);
    prob.cost.add(0, 1, 1, 2.0);
    prob.cost.add(1, 0, 0, 3.0);
    prob.cost.add(1, 1, 1, 3.0);
    SdpMatrix tr;
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 2; ++i) tr.add(b, i, i, 1.0);
    prob.constraints.push_back(tr);
    prob.b.push_back(1.0);
    SdpSolution sol = solve_sdp(prob);
    REQUIRE(sol.converged());
    CHECK(sol.primal_objective == doctest::Approx(2.0).epsilon(1e-7));
  }
}

TEST_CASE("npa_max") {
  BellFunctional chsh = BellFunctional::chsh();

  SUBCASE("CHSH level 1 reaches the quantum bound") {
    NpaValue v = npa_max(chsh, 1);
    REQUIRE(v.converged);
    CHECK(v.value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-4 / 2.8));
  }

  SUBCASE("CHSH level 2 stays at the quantum bound") {
    NpaValue v = npa_max(chsh, 2);
    REQUIRE(v.converged);
    CHECK(v.value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-4 / 2.8));
  }

  SUBCASE("zero functional") {
    BellFunctional zero(kChsh);
    NpaValue v = npa_max(zero, 1);
    REQUIRE(v.converged);
    CHECK(std::abs(v.value) < 1e-7);
  }

  SUBCASE("level monotone and sandwiched between local and nonsignaling") {
    Rng rng(47);
    for (int trial = 0; trial < 50; ++trial) {
      BellFunctional g(kChsh);
      for (auto& c : g.coefficients()) c = rng.gaussian();
      NpaValue v1 = npa_max(g, 1);
      NpaValue v2 = npa_max(g, 2);
      REQUIRE(v1.converged);
      REQUIRE(v2.converged);
      CHECK(v2.value <= v1.value + 1e-6);
      CHECK(max_bell_local(g) <= v1.value + 1e-6);
      CHECK(v1.value <= max_bell_ns(g) + 1e-6);
    }
  }
}

TEST_CASE("npa_membership") {
  SUBCASE("local points are inside at both levels") {
    ConditionalDistribution id4 = box_distribution(catalog::identity_box(4));
    for (int level : {1, 2}) {
      CertificateReport rep = npa_membership(id4, level);
      CHECK(rep.verdict == Verdict::inside);
    }
    // a strictly interior local point
    Rng rng(53);
    auto verts = local_vertices(kChsh);
    ConditionalDistribution mix(kChsh);
    auto w = rng.simplex_weights(16);
    for (int v = 0; v < 16; ++v)
      for (int e = 0; e < 16; ++e) mix.table()[e] += w[v] * verts[v].table()[e];
    for (int level : {1, 2})
      CHECK(npa_membership(mix, level).verdict == Verdict::inside);
  }

  SUBCASE("PR box is outside level 1") {
    ConditionalDistribution r = box_distribution(catalog::pr_box());
    CertificateReport rep = npa_membership(r, 1);
    CHECK(rep.verdict == Verdict::outside);
    CHECK(rep.details["margin"] < -1e-3);
  }

  SUBCASE("Tsirelson-point mixture sits on the level-1 boundary") {
    double pstar = (1.0 + 1.0 / std::sqrt(2.0)) / 2.0;
    auto r = catalog::pr_box();
    auto s = catalog::pr_box_flipped();
    std::vector<std::vector<double>> mix(4, std::vector<double>(4, 0));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        mix[i][j] = pstar * r[i][j] + (1 - pstar) * s[i][j];
    CertificateReport rep = npa_membership(box_distribution(mix), 1);
    CHECK(std::abs(rep.details["margin"]) < 1e-5);
  }

  SUBCASE("signaling behavior is rejected by pin consistency") {
    ConditionalDistribution p(kChsh);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) p.at(x ^ y, y, x, y) = 1.0;
    CertificateReport rep = npa_membership(p, 1);
    CHECK(rep.verdict == Verdict::outside);
    CHECK(rep.residual > 0.4);
  }
}

TEST_CASE("chain containment on random local and nonsignaling points") {
  Rng rng(59);
  auto verts = local_vertices(kChsh);
  ConditionalDistribution r = box_distribution(catalog::pr_box());

  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    // random point: local mixture, sometimes pulled toward the PR box
    ConditionalDistribution p(kChsh);
    auto w = rng.simplex_weights(16);
    for (int v = 0; v < 16; ++v)
      for (int e = 0; e < 16; ++e) p.table()[e] += w[v] * verts[v].table()[e];
    double lambda = rng.uniform();
    for (int e = 0; e < 16; ++e)
      p.table()[e] = (1 - lambda) * p.table()[e] + lambda * r.table()[e];

    bool in_l = is_local(p).verdict == Verdict::inside;
    bool in_q1 = npa_membership(p, 1).verdict == Verdict::inside;
    bool in_q2 = npa_membership(p, 2).verdict == Verdict::inside;
    bool in_ns = is_nonsignaling(p).verdict == Verdict::inside;
    if (in_l) CHECK(in_q1);
    if (in_l) CHECK(in_q2);
    if (in_q2) CHECK(in_q1);
    if (in_q1) CHECK(in_ns);
    ++checked;
  }
  CHECK(checked == 500);
}

TEST_CASE("negativity") {
  SUBCASE("product states have zero negativity") {
    CHECK(negativity(catalog::plus_plus_state(), {1}) == doctest::Approx(0.0));
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
      ComplexMatrix rho = kron(random_density(rng, 2), random_density(rng, 3));
      CHECK(negativity(rho, {1}) < 1e-10);
    }
  }

  SUBCASE("separable mixtures have zero negativity") {
    Rng rng(67);
    for (int trial = 0; trial < 10; ++trial) {
      ComplexMatrix rho(6, 6, {2, 3}, {2, 3});
      auto w = rng.simplex_weights(4);
      for (int k = 0; k < 4; ++k)
        rho += kron(random_density(rng, 2), random_density(rng, 3)) * w[k];
      CHECK(negativity(rho, {1}) < 1e-10);
    }
  }

  SUBCASE("damped plus state anchors") {
    CHECK(negativity(catalog::damped_plus_state(0, 0), {1}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(negativity(catalog::damped_plus_state(1, 0), {1}) ==
          doctest::Approx(0.5).epsilon(1e-9));
    for (double p : {0.0, 0.5, 1.0})
      CHECK(negativity(catalog::damped_plus_state(p, 1), {1}) ==
            doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("interior value matches an independent partial-transpose eigensolve") {
    ComplexMatrix rho = catalog::damped_plus_state(0.5, 0.5);
    // hand-rolled partial transpose over the second qubit
    ComplexMatrix pt(4, 4, {2, 2}, {2, 2});
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            pt(2 * i + l, 2 * j + k) = rho(2 * i + k, 2 * j + l);
    double direct = 0;
    for (double v : herm_eig(pt).eigenvalues)
      if (v < 0) direct -= v;
    CHECK(negativity(rho, {1}) == doctest::Approx(direct).epsilon(1e-12));
  }

  SUBCASE("matches the trace-norm formula") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
      ComplexMatrix rho = random_density(rng, 4);
      rho.set_dims({2, 2}, {2, 2});
      ComplexMatrix pt = partial_transpose(rho, {1});
      double tn = 0;
      for (double v : herm_eig(pt).eigenvalues) tn += std::abs(v);
      CHECK(negativity(rho, {1}) == doctest::Approx((tn - 1) / 2).epsilon(1e-10));
    }
  }

  SUBCASE("invariant under local unitaries") {
    Rng rng(73);
    for (int trial = 0; trial < 10; ++trial) {
      ComplexMatrix rho = random_density(rng, 4);
      rho.set_dims({2, 2}, {2, 2});
      ComplexMatrix u = kron(random_unitary(rng, 2), random_unitary(rng, 2));
      ComplexMatrix rotated = u * rho * u.adjoint();
      CHECK(negativity(rotated, {1}) ==
            doctest::Approx(negativity(rho, {1})).epsilon(1e-10));
    }
  }
}

TEST_CASE("negativity_grid") {
  auto grid = negativity_grid(5);
  CHECK(grid[0][0] == doctest::Approx(0.0).epsilon(1e-12));   // (p,q) = (0,0)
  CHECK(grid[4][0] == doctest::Approx(0.5).epsilon(1e-9));    // (1,0)
  for (int i = 0; i < 5; ++i)
    CHECK(grid[i][4] == doctest::Approx(0.0).epsilon(1e-12));  // q = 1

  SUBCASE("monotone non-increasing in q along each p row") {
    auto g = negativity_grid(21);
    for (int i = 0; i < 21; ++i)
      for (int j = 0; j + 1 < 21; ++j) CHECK(g[i][j + 1] <= g[i][j] + 1e-12);
    // symmetry about p = 1/2 at q = 0 is not asserted, only measured
    double asym = 0;
    for (int i = 0; i < 21; ++i)
      asym = std::max(asym, std::abs(g[i][0] - g[20 - i][0]));
    MESSAGE("empirical q=0 symmetry deviation about p=1/2: ", asym);
  }

  CHECK_THROWS(negativity_grid(1));
}

TEST_CASE("channel witnesses") {
  BellFunctional chsh = BellFunctional::chsh();

  SUBCASE("bounds per target set") {
    ChannelWitness wl = build_witness(chsh, WitnessSet::local);
    CHECK(wl.bound == 2.0);
    CHECK(wl.bound / (wl.d_a0 * wl.d_b0) == doctest::Approx(0.5));
    ChannelWitness wq = build_witness(chsh, WitnessSet::quantum);
    CHECK(wq.bound == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-6));
    ChannelWitness wns = build_witness(chsh, WitnessSet::nonsignaling);
    CHECK(wns.bound == doctest::Approx(4.0).epsilon(1e-7));
  }

  SUBCASE("the functional operator is diagonal in the setting-outcome basis") {
    ComplexMatrix omega = witness_omega(chsh);
    for (int i = 0; i < omega.rows(); ++i)
      for (int j = 0; j < omega.cols(); ++j)
        if (i != j) CHECK(omega(i, j) == cplx(0, 0));
    // zero functional gives a zero witness only with a zero bound
    BellFunctional zero(kChsh);
    ChannelWitness wz = build_witness(zero, WitnessSet::local);
    CHECK(wz.bound == 0.0);
    CHECK(wz.w.max_abs() == 0.0);
  }

  SUBCASE("witness value equals the bound minus the action's functional value") {
    ChannelWitness wl = build_witness(chsh, WitnessSet::local);
    Rng rng(79);
    KrausChannel k{random_kraus_set(rng, 4, 4, 2)};
    ComplexMatrix j = choi_from_kraus(k).choi();
    j.set_dims({2, 2, 2, 2}, {2, 2, 2, 2});
    ChoiChannel ch = ChoiChannel::bipartite(std::move(j), 2, 2, 2, 2);
    auto s = decoherent_action(ch);
    ConditionalDistribution p =
        ConditionalDistribution::from_stochastic(s, Scenario{2, 2, 2, 2});
    CHECK(witness_value(wl, ch) ==
          doctest::Approx(wl.bound - bell_value(chsh, p)).epsilon(1e-10));
  }
}
