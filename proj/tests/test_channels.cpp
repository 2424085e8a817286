#include <doctest.h>

#include <cmath>

#include "qcert/catalog.hpp"
#include "qcert/channels.hpp"
#include "qcert/rng.hpp"
#include "qcert/tensor.hpp"

using namespace qcert;

namespace {

ChoiChannel random_channel(Rng& rng, int din, int dout, int rank = 2) {
  return choi_from_kraus(KrausChannel{random_kraus_set(rng, din, dout, rank)});
}

ComplexMatrix kraus_apply(const KrausChannel& k, const ComplexMatrix& rho) {
  ComplexMatrix out(k.d_out(), k.d_out());
  for (const auto& op : k.kraus) out += op * rho * op.adjoint();
  return out;
}

}  // namespace

TEST_CASE("choi_from_kraus") {
  SUBCASE("identity channel gives the unnormalized entangled projector") {
    KrausChannel id{{ComplexMatrix::identity(3)}};
    ComplexMatrix j = choi_from_kraus(id).choi();
    CHECK(j.max_abs_diff(catalog::max_entangled_state(3) * 3.0) < 1e-14);
    CHECK(std::abs(j.trace() - cplx(3, 0)) < 1e-14);
  }

  SUBCASE("completely depolarizing qubit channel") {
    KrausChannel dep{{catalog::pauli_x() * 0.5, catalog::pauli_y() * 0.5,
                      catalog::pauli_z() * 0.5, ComplexMatrix::identity(2) * 0.5}};
    ComplexMatrix j = choi_from_kraus(dep).choi();
    CHECK(j.max_abs_diff(ComplexMatrix::identity(4) * 0.5) < 1e-14);
    CHECK(j.max_abs_diff(catalog::depolarizing_channel(2).choi()) < 1e-14);
  }

  SUBCASE("unitary Kraus gives rank one with trace d") {
    Rng rng(5);
    ComplexMatrix u = random_unitary(rng, 3);
    ComplexMatrix j = choi_from_kraus(KrausChannel{{u}}).choi();
    HermEig eig = herm_eig(j);
    CHECK(std::abs(j.trace() - cplx(3, 0)) < 1e-12);
    CHECK(eig.eigenvalues.back() == doctest::Approx(3.0));
    CHECK(eig.eigenvalues[eig.eigenvalues.size() - 2] ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("incomplete Kraus set rejected") {
    CHECK_THROWS(choi_from_kraus(KrausChannel{{catalog::pauli_x() * 0.5}}));
  }
}

TEST_CASE("apply") {
  Rng rng(7);

  SUBCASE("identity and depolarizing") {
    ComplexMatrix rho = random_density(rng, 2);
    ChoiChannel id = catalog::unitary_channel(ComplexMatrix::identity(2));
    CHECK(apply(id, rho).max_abs_diff(rho) < 1e-13);
    ChoiChannel dep = catalog::depolarizing_channel(2);
    CHECK(apply(dep, rho).max_abs_diff(ComplexMatrix::identity(2) * 0.5) < 1e-13);
  }

  SUBCASE("controlled unitary acts by conjugation") {
    ComplexMatrix u = catalog::controlled_xy_unitary();
    ChoiChannel ch = catalog::unitary_channel(u);
    ComplexMatrix in(4, 4);
    in(2, 2) = 1.0;  // |10><10|
    ComplexMatrix expected = u * in * u.adjoint();
    CHECK(apply(ch, in).max_abs_diff(expected) < 1e-13);
  }

  SUBCASE("matches direct Kraus application on random inputs") {
    for (int trial = 0; trial < 25; ++trial) {
      KrausChannel k{random_kraus_set(rng, 3, 2, 2)};
      ChoiChannel ch = choi_from_kraus(k);
      ComplexMatrix rho = random_density(rng, 3);
      CHECK(apply(ch, rho).max_abs_diff(kraus_apply(k, rho)) < 1e-10);
    }
  }

  SUBCASE("preserves trace and positivity") {
    for (int trial = 0; trial < 100; ++trial) {
      ChoiChannel ch = random_channel(rng, 3, 3);
      ComplexMatrix rho = random_density(rng, 3);
      ComplexMatrix out = apply(ch, rho);
      CHECK(std::abs(out.trace().real() - 1.0) < 1e-11);
      CHECK(min_eigenvalue(out) >= -1e-9);
    }
  }
}

TEST_CASE("compose") {
  Rng rng(11);

  SUBCASE("identity is neutral") {
    ChoiChannel e = random_channel(rng, 2, 2);
    ChoiChannel id = catalog::unitary_channel(ComplexMatrix::identity(2));
    CHECK(compose(id, e).choi().max_abs_diff(e.choi()) < 1e-12);
    CHECK(compose(e, id).choi().max_abs_diff(e.choi()) < 1e-12);
  }

  SUBCASE("unitary composed with its inverse is the identity channel") {
    ComplexMatrix u = random_unitary(rng, 3);
    ChoiChannel uc = catalog::unitary_channel(u);
    ChoiChannel uinv = catalog::unitary_channel(u.adjoint());
    ChoiChannel id = catalog::unitary_channel(ComplexMatrix::identity(3));
    CHECK(compose(uinv, uc).choi().max_abs_diff(id.choi()) < 1e-11);
  }

  SUBCASE("agrees with apply . apply on random states") {
    ChoiChannel e1 = random_channel(rng, 2, 3);
    ChoiChannel e2 = random_channel(rng, 3, 2);
    ChoiChannel chain = compose(e2, e1);
    for (int trial = 0; trial < 50; ++trial) {
      ComplexMatrix rho = random_density(rng, 2);
      CHECK(apply(chain, rho).max_abs_diff(apply(e2, apply(e1, rho))) < 1e-10);
    }
  }

  SUBCASE("dimension chain enforced") {
    CHECK_THROWS(compose(random_channel(rng, 3, 3), random_channel(rng, 2, 2)));
  }
}

TEST_CASE("adjoint") {
  Rng rng(13);

  SUBCASE("unitary adjoint reverses conjugation") {
    ComplexMatrix u = random_unitary(rng, 2);
    ChoiChannel ch = catalog::unitary_channel(u);
    ComplexMatrix y = random_density(rng, 2);
    CHECK(apply_adjoint(ch, y).max_abs_diff(u.adjoint() * y * u) < 1e-12);
  }

  SUBCASE("unital") {
    for (int trial = 0; trial < 10; ++trial) {
      ChoiChannel ch = random_channel(rng, 3, 2);
      ComplexMatrix out = apply_adjoint(ch, ComplexMatrix::identity(2));
      CHECK(out.max_abs_diff(ComplexMatrix::identity(3)) < 1e-11);
    }
  }

  SUBCASE("trace duality on random Hermitian pairs") {
    ChoiChannel ch = random_channel(rng, 3, 2);
    for (int trial = 0; trial < 50; ++trial) {
      ComplexMatrix x = random_ginibre(rng, 3, 3);
      x = (x + x.adjoint()) * 0.5;
      ComplexMatrix y = random_ginibre(rng, 2, 2);
      y = (y + y.adjoint()) * 0.5;
      cplx lhs = (apply(ch, x) * y).trace();
      cplx rhs = (apply_adjoint(ch, y) * x).trace();
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("is_qns") {
  Rng rng(17);

  SUBCASE("product channels are nonsignaling") {
    for (int trial = 0; trial < 50; ++trial) {
      ChoiChannel ea = random_channel(rng, 2, 2);
      ChoiChannel eb = random_channel(rng, 2, 2);
      ComplexMatrix j = permute_subsystems(kron(ea.choi(), eb.choi()), {0, 2, 1, 3});
      ChoiChannel ch = ChoiChannel::bipartite(std::move(j), 2, 2, 2, 2);
      CertificateReport rep = is_qns(ch);
      CHECK(rep.verdict == Verdict::inside);
      CHECK(rep.residual < 1e-10);
    }
  }

  SUBCASE("C-NOT signals through both marginal conditions") {
    CertificateReport rep = is_qns(catalog::cnot_channel());
    CHECK(rep.verdict == Verdict::outside);
    // from the explicit 16x16 Choi: the target marginal averages the
    // control (deviation 1/2) and phase kickback leaves a full-weight
    // coherence on the control side (deviation 1)
    CHECK(rep.details["marginal_residual_on_bob"] == doctest::Approx(0.5));
    CHECK(rep.details["marginal_residual_on_alice"] == doctest::Approx(1.0));
  }

  SUBCASE("wrong arity rejected") {
    CHECK_THROWS(is_qns(random_channel(rng, 2, 2)));
  }
}

TEST_CASE("is_superchannel") {
  Rng rng(19);

  SUBCASE("identity superchannel passes") {
    // pre and post identity channels on a qubit
    ComplexMatrix phi = catalog::max_entangled_state(2) * 2.0;
    ComplexMatrix j = permute_subsystems(kron(phi, phi), {0, 2, 1, 3});
    SuperchannelChoi sc{j, 2, 2, 2, 2};
    CertificateReport rep = is_superchannel(sc);
    CHECK(rep.verdict == Verdict::inside);
  }

  SUBCASE("random bipartite channel Choi is generically not a superchannel") {
    int fails = 0;
    for (int trial = 0; trial < 10; ++trial) {
      ChoiChannel ch = random_channel(rng, 4, 4);
      ComplexMatrix j = ch.choi();
      j.set_dims({2, 2, 2, 2}, {2, 2, 2, 2});
      SuperchannelChoi sc{j, 2, 2, 2, 2};
      if (is_superchannel(sc).verdict == Verdict::outside) ++fails;
    }
    CHECK(fails == 10);
  }

  SUBCASE("Schur dephasing superchannel applies as a Schur product") {
    Rng rng2(23);
    ComplexMatrix g = random_ginibre(rng2, 4, 4);
    g = g * g.adjoint();
    for (int i = 0; i < 4; ++i) {
      double d = std::sqrt(g(i, i).real());
      for (int j = 0; j < 4; ++j) {
        g(i, j) = g(i, j) / d;
        g(j, i) = g(j, i) / d;
      }
    }
    for (int i = 0; i < 4; ++i) g(i, i) = 1.0;
    SuperchannelChoi sc = schur_superchannel(g, 2, 2);
    ChoiChannel ch = random_channel(rng2, 2, 2);
    ComplexMatrix direct = schur(ch.choi(), g);
    ComplexMatrix via = apply_superchannel(sc, ch.choi());
    CHECK(via.max_abs_diff(direct) < 1e-11);
  }
}

TEST_CASE("controlled-unitary lift Gram readings") {
  ChoiChannel local = catalog::bipartite_unitary_channel(
      kron(ComplexMatrix::identity(2), catalog::pauli_x()));
  ComplexMatrix target =
      catalog::bipartite_unitary_channel(catalog::controlled_xy_unitary()).choi();

  SUBCASE("sign-corrected Gram reproduces the controlled unitary exactly") {
    ComplexMatrix g = catalog::controlled_unitary_lift_gram(
        catalog::IndexBase::one_based, true);
    CHECK(min_eigenvalue(g) > -1e-12);
    ComplexMatrix lifted = schur(local.choi(), g);
    CHECK(lifted.max_abs_diff(target) < 1e-14);
    // and the Schur map itself is a valid superchannel
    SuperchannelChoi sc = schur_superchannel(g, 4, 4);
    CHECK(is_superchannel(sc).verdict == Verdict::inside);
  }

  SUBCASE("printed coefficients, one-based: support matches, not PSD") {
    ComplexMatrix g = catalog::controlled_unitary_lift_gram(
        catalog::IndexBase::one_based, false);
    double min_eig = min_eigenvalue(g);
    CHECK(min_eig < -1.0);  // far from a Gram matrix
    ComplexMatrix lifted = schur(local.choi(), g);
    CHECK(min_eigenvalue(lifted) < -1.0);  // not CP either
    SuperchannelChoi sc = schur_superchannel(g, 4, 4);
    CHECK(is_superchannel(sc).verdict == Verdict::outside);
  }

  SUBCASE("printed coefficients, zero-based: misses the Choi support entirely") {
    ComplexMatrix g = catalog::controlled_unitary_lift_gram(
        catalog::IndexBase::zero_based, false);
    ComplexMatrix lifted = schur(local.choi(), g);
    // only the diagonal survives: the completely dephased classical channel
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        if (i != j) CHECK(lifted(i, j) == cplx(0, 0));
    CHECK(ChoiChannel::bipartite(lifted, 2, 2, 2, 2).cptp_report().ok());
  }
}

TEST_CASE("controlled X/Y map is locally equivalent to the controlled flip") {
  // (P x H X) U (1 x H) with the control phase P = diag(1, -i) is exactly
  // the controlled flip
  ComplexMatrix u = catalog::controlled_xy_unitary();
  ComplexMatrix h = catalog::hadamard(), x = catalog::pauli_x();
  ComplexMatrix id = ComplexMatrix::identity(2);
  ComplexMatrix phase(2, 2);
  phase(0, 0) = 1;
  phase(1, 1) = cplx(0, -1);
  ComplexMatrix rotated = kron(phase, h * x) * u * kron(id, h).adjoint();
  ComplexMatrix cnot(4, 4);
  cnot(0, 0) = 1;
  cnot(1, 1) = 1;
  cnot(2, 3) = 1;
  cnot(3, 2) = 1;
  CHECK(rotated.max_abs_diff(cnot) < 1e-14);
}

TEST_CASE("cptp validation") {
  ComplexMatrix bad = ComplexMatrix::identity(4);
  bad(0, 0) = -1.0;
  CHECK_THROWS(ChoiChannel::monopartite(bad, 2, 2));
  ChoiChannel unchecked = ChoiChannel::monopartite(bad, 2, 2, false);
  CptpReport rep = unchecked.cptp_report();
  CHECK_FALSE(rep.ok());
  CHECK(rep.min_eigenvalue == doctest::Approx(-1.0));
}
