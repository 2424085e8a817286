#include <doctest.h>

#include <cmath>

#include "qcert/catalog.hpp"
#include "qcert/correlations.hpp"
#include "qcert/dephasing.hpp"
#include "qcert/protocols.hpp"
#include "qcert/rng.hpp"
#include "qcert/tensor.hpp"

using namespace qcert;

namespace {

ChoiChannel random_channel(Rng& rng, int din, int dout, int rank = 2) {
  return choi_from_kraus(KrausChannel{random_kraus_set(rng, din, dout, rank)});
}

}  // namespace

TEST_CASE("dephase_state") {
  Rng rng(3);
  ComplexMatrix rho = random_density(rng, 4);

  CHECK(dephase_state(rho, GramMatrix::all_ones(4)).max_abs_diff(rho) == 0.0);

  ComplexMatrix diag = dephase_state(rho, GramMatrix(ComplexMatrix::identity(4)));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(diag(i, j) == (i == j ? rho(i, j) : cplx(0, 0)));

  SUBCASE("sign Gram maps |++><++| to the Bell state") {
    GramMatrix g(catalog::bell_sign_gram());
    ComplexMatrix out = dephase_state(catalog::plus_plus_state(), g);
    // |psi> = (|0+> + |1->)/sqrt 2
    double h = 0.5 / std::sqrt(2.0);
    ComplexMatrix psi = catalog::pure_state({h * 2, h * 2, h * 2, -h * 2});
    CHECK(out.max_abs_diff(psi) < 1e-15);
    CHECK(out.max_abs_diff(catalog::bell_sign_gram() * 0.25) < 1e-15);
  }

  SUBCASE("valid Gram preserves trace and positivity") {
    for (int trial = 0; trial < 40; ++trial) {
      ComplexMatrix g = random_ginibre(rng, 4, 4);
      g = g * g.adjoint();
      for (int i = 0; i < 4; ++i) {
        double s = std::sqrt(g(i, i).real());
        for (int j = 0; j < 4; ++j) {
          g(i, j) /= s;
          g(j, i) /= s;
        }
      }
      for (int i = 0; i < 4; ++i) g(i, i) = 1.0;
      ComplexMatrix out = dephase_state(rho, GramMatrix(g));
      CHECK(std::abs(out.trace() - rho.trace()) < 1e-13);
      CHECK(min_eigenvalue(out) > -1e-9);
      for (int i = 0; i < 4; ++i) CHECK(std::abs(out(i, i) - rho(i, i)) == 0.0);
    }
  }

  SUBCASE("invalid Gram rejected") {
    ComplexMatrix notgram = ComplexMatrix::identity(4) * 2.0;
    CHECK_THROWS(GramMatrix{notgram});
  }
}

TEST_CASE("dephase_channel_memoryless") {
  Rng rng(5);
  ChoiChannel ch = random_channel(rng, 3, 3);

  SUBCASE("all-ones Grams leave the channel unchanged") {
    ChoiChannel out = dephase_channel_memoryless(ch, GramMatrix::all_ones(3),
                                                 GramMatrix::all_ones(3));
    CHECK(out.choi().max_abs_diff(ch.choi()) == 0.0);
  }

  SUBCASE("identity Grams produce the classical (diagonal-Choi) channel") {
    ChoiChannel out = dephase_channel_memoryless(
        ch, GramMatrix(ComplexMatrix::identity(3)),
        GramMatrix(ComplexMatrix::identity(3)));
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        if (i != j) CHECK(out.choi()(i, j) == cplx(0, 0));
    CHECK(out.cptp_report().ok());
    // both pipelines agree: the stochastic view reproduces the diagonal
    auto s = decoherent_action(out);
    ChoiChannel back = classical_channel(s);
    CHECK(back.choi().max_abs_diff(out.choi()) < 1e-12);
  }

  SUBCASE("output remains CPTP for random Grams") {
    for (int trial = 0; trial < 20; ++trial) {
      ComplexMatrix g = random_ginibre(rng, 3, 3);
      g = g * g.adjoint();
      for (int i = 0; i < 3; ++i) {
        double s = std::sqrt(g(i, i).real());
        for (int j = 0; j < 3; ++j) {
          g(i, j) /= s;
          g(j, i) /= s;
        }
      }
      for (int i = 0; i < 3; ++i) g(i, i) = 1.0;
      ChoiChannel out =
          dephase_channel_memoryless(ch, GramMatrix(g), GramMatrix::all_ones(3));
      CHECK(out.cptp_report().ok());
    }
  }
}

TEST_CASE("dephase_local keeps LOSR channels classically local") {
  // local dephasing cannot generate nonlocality: the decoherent action of a
  // dephased product-mixture channel stays inside the local polytope
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ChoiChannel ch = sample_losr(2, 2, 2, 2, 1 + rng.uniform_int(3), 400 + trial);

    ComplexMatrix g = random_ginibre(rng, 2, 2);
    g = g * g.adjoint();
    double s01 = std::abs(g(0, 1)) / std::sqrt(g(0, 0).real() * g(1, 1).real());
    ComplexMatrix gram = ComplexMatrix::identity(2);
    gram(0, 1) = s01;
    gram(1, 0) = s01;
    GramMatrix gq(gram), gones = GramMatrix::all_ones(2);

    ChoiChannel noisy = dephase_local(ch, gq, gq, gq, gones);
    CHECK(noisy.cptp_report().ok());
    auto sm = decoherent_action(noisy);
    ConditionalDistribution p = ConditionalDistribution::from_stochastic(
        sm, Scenario{2, 2, 2, 2});
    CHECK(is_local(p).verdict == Verdict::inside);
  }
}

TEST_CASE("uniform damping noise") {
  Rng rng(11);
  ComplexMatrix rho = random_density(rng, 4);

  CHECK(noise_uniform_damping(rho, 0.0).max_abs_diff(rho) == 0.0);

  ComplexMatrix full = noise_uniform_damping(rho, 1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(full(i, j) == (i == j ? rho(i, j) : cplx(0, 0)));

  SUBCASE("half damping of |+><+|") {
    ComplexMatrix plus = catalog::pure_state({1, 1});
    ComplexMatrix out = noise_uniform_damping(plus, 0.5);
    CHECK(out(0, 0) == cplx(0.5, 0));
    CHECK(out(0, 1) == cplx(0.25, 0));
    CHECK(out(1, 0) == cplx(0.25, 0));
    CHECK(out(1, 1) == cplx(0.5, 0));
  }

  SUBCASE("damping semigroup") {
    for (int trial = 0; trial < 20; ++trial) {
      double q1 = rng.uniform(), q2 = rng.uniform();
      ComplexMatrix twice =
          noise_uniform_damping(noise_uniform_damping(rho, q1), q2);
      ComplexMatrix once = noise_uniform_damping(rho, q1 + q2 - q1 * q2);
      CHECK(twice.max_abs_diff(once) < 1e-15);
    }
  }

  CHECK_THROWS(noise_uniform_damping(rho, 1.5));
}

TEST_CASE("fourth-level coherence damping") {
  Rng rng(13);
  ComplexMatrix rho = random_density(rng, 4);

  CHECK(noise_fourth_level_damping(rho, 0.0).max_abs_diff(rho) == 0.0);

  ComplexMatrix half = noise_fourth_level_damping(rho, 0.5);
  for (int i = 0; i < 3; ++i) {
    CHECK(half(i, 3) == cplx(0, 0));
    CHECK(half(3, i) == cplx(0, 0));
  }
  CHECK(half(3, 3) == rho(3, 3));
  CHECK(half(0, 1) == rho(0, 1));

  SUBCASE("composition on |++><++| gives the damped-plus family") {
    for (double p : {0.0, 0.3, 1.0})
      for (double q : {0.0, 0.5, 1.0}) {
        ComplexMatrix out =
            apply_damping(catalog::plus_plus_state(), NoiseParams{q, p});
        CHECK(out.max_abs_diff(catalog::damped_plus_state(p, q)) < 1e-15);
      }
  }

  CHECK_THROWS(noise_fourth_level_damping(ComplexMatrix::identity(2), 0.1));
}

TEST_CASE("decoherent_action") {
  SUBCASE("identity channel gives the identity stochastic matrix") {
    ChoiChannel id = catalog::unitary_channel(ComplexMatrix::identity(4));
    auto s = decoherent_action(id);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(s[i][j] == (i == j ? 1.0 : 0.0));
  }

  SUBCASE("Bell-basis unitary decoheres to the two-way flip mixture") {
    for (auto order : {catalog::BitOrder::first_major, catalog::BitOrder::second_major}) {
      ComplexMatrix u = catalog::bell_basis_unitary(order);
      auto s = decoherent_action(KrausChannel{{u}});
      // 1/2 (1 x 1 + X x X)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double expected = (i == j || i + j == 3) ? 0.5 : 0.0;
          CHECK(s[i][j] == doctest::Approx(expected).epsilon(1e-14));
        }
    }
  }

  SUBCASE("rotated Bell-basis unitary: both bit-order readings") {
    // reading the two-qubit formulas with the second slot as the most
    // significant flat digit reproduces the printed permutation exactly
    ComplexMatrix ut = catalog::rotated_bell_basis_unitary(catalog::BitOrder::second_major);
    auto s = decoherent_action(KrausChannel{{ut}});
    std::vector<std::vector<double>> expected = {
        {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 1, 0, 0}};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(s[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-14));

    // the first-major reading instead spreads every column uniformly
    ComplexMatrix ut2 = catalog::rotated_bell_basis_unitary(catalog::BitOrder::first_major);
    auto s2 = decoherent_action(KrausChannel{{ut2}});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(s2[i][j] == doctest::Approx(0.25).epsilon(1e-14));

    // the permutation is signaling under either bit-order reading of its
    // indices, despite being an extremal stochastic matrix
    ConditionalDistribution p_direct = ConditionalDistribution::from_stochastic(
        expected, Scenario{2, 2, 2, 2});
    CertificateReport direct = is_nonsignaling(p_direct);
    CHECK(direct.verdict == Verdict::outside);
    // swap the bit roles on both sides: (a,b)->(b,a), (x,y)->(y,x)
    ConditionalDistribution p_swapped(Scenario{2, 2, 2, 2});
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y)
            p_swapped.at(a, b, x, y) = p_direct.at(b, a, y, x);
    CertificateReport swapped = is_nonsignaling(p_swapped);
    CHECK(swapped.verdict == Verdict::outside);
    MESSAGE("flagged: permutation decoherent action is signaling under both "
            "bit orderings (residuals ",
            direct.residual, " and ", swapped.residual, ")");
  }

  SUBCASE("Kraus route equals diagonal-of-Choi route") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      KrausChannel k{random_kraus_set(rng, 3, 4, 2)};
      auto s1 = decoherent_action(k);
      auto s2 = decoherent_action(choi_from_kraus(k));
      CHECK(column_sum_residual(s1) < 1e-10);
      for (size_t i = 0; i < s1.size(); ++i)
        for (size_t j = 0; j < s1[0].size(); ++j)
          CHECK(std::abs(s1[i][j] - s2[i][j]) < 1e-10);
    }
  }

  SUBCASE("complete dephasing sandwich reproduces the decoherent action") {
    Rng rng(19);
    ChoiChannel ch = random_channel(rng, 3, 3);
    GramMatrix id3(ComplexMatrix::identity(3));
    ChoiChannel sandwiched = dephase_channel_memoryless(ch, id3, id3);
    auto s = decoherent_action(ch);
    CHECK(classical_channel(s).choi().max_abs_diff(sandwiched.choi()) < 1e-13);
  }
}
