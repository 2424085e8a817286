#include "qcert/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcert/tensor.hpp"

namespace qcert {

uint64_t Rng::next_u64() {
  // splitmix64
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

cplx Rng::complex_gaussian() {
  double re = gaussian(), im = gaussian();
  return cplx(re, im) / std::sqrt(2.0);
}

int Rng::uniform_int(int n) {
  return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
}

std::vector<double> Rng::simplex_weights(int n) {
  std::vector<double> w(n);
  double s = 0;
  for (int i = 0; i < n; ++i) {
    double u = uniform();
    while (u <= 1e-300) u = uniform();
    w[i] = -std::log(u);
    s += w[i];
  }
  for (auto& v : w) v /= s;
  return w;
}

ComplexMatrix random_ginibre(Rng& rng, int rows, int cols) {
  ComplexMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  return g;
}

ComplexMatrix random_unitary(Rng& rng, int d) {
  // Gram-Schmidt on a Ginibre matrix; re-orthogonalize for stability.
  ComplexMatrix g = random_ginibre(rng, d, d);
  ComplexMatrix q(d, d);
  for (int c = 0; c < d; ++c) {
    std::vector<cplx> v(d);
    for (int i = 0; i < d; ++i) v[i] = g(i, c);
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < c; ++p) {
        cplx dot(0, 0);
        for (int i = 0; i < d; ++i) dot += std::conj(q(i, p)) * v[i];
        for (int i = 0; i < d; ++i) v[i] -= dot * q(i, p);
      }
    }
    double n = 0;
    for (int i = 0; i < d; ++i) n += std::norm(v[i]);
    n = std::sqrt(n);
    if (n < 1e-12) throw std::runtime_error("random_unitary: degenerate sample");
    for (int i = 0; i < d; ++i) q(i, c) = v[i] / n;
  }
  return q;
}

ComplexMatrix random_pure_state(Rng& rng, int d) {
  ComplexMatrix v = random_ginibre(rng, d, 1);
  double n = v.frobenius_norm();
  ComplexMatrix rho(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rho(i, j) = v(i, 0) * std::conj(v(j, 0)) / (n * n);
  return rho;
}

ComplexMatrix random_density(Rng& rng, int d) {
  ComplexMatrix g = random_ginibre(rng, d, d);
  ComplexMatrix rho = g * g.adjoint();
  cplx t = rho.trace();
  return rho * (1.0 / t.real());
}

ComplexMatrix random_isometry(Rng& rng, int rows, int cols) {
  if (cols > rows) throw std::invalid_argument("random_isometry: cols > rows");
  ComplexMatrix u = random_unitary(rng, rows);
  ComplexMatrix v(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) v(i, j) = u(i, j);
  return v;
}

std::vector<ComplexMatrix> random_kraus_set(Rng& rng, int d_in, int d_out,
                                            int rank) {
  // Stinespring: isometry V : d_in -> d_out * rank, K_e = (<e| x 1) V.
  ComplexMatrix v = random_isometry(rng, d_out * rank, d_in);
  std::vector<ComplexMatrix> ks;
  ks.reserve(rank);
  for (int e = 0; e < rank; ++e) {
    ComplexMatrix k(d_out, d_in);
    for (int i = 0; i < d_out; ++i)
      for (int j = 0; j < d_in; ++j) k(i, j) = v(i * rank + e, j);
    ks.push_back(k);
  }
  return ks;
}

std::vector<ComplexMatrix> random_projective_measurement(Rng& rng, int d,
                                                         int outcomes) {
  if (d % outcomes != 0)
    throw std::invalid_argument("random_projective_measurement: outcomes must divide dim");
  int rank = d / outcomes;
  ComplexMatrix u = random_unitary(rng, d);
  std::vector<ComplexMatrix> effects;
  for (int a = 0; a < outcomes; ++a) {
    ComplexMatrix p(d, d);
    for (int r = 0; r < rank; ++r) {
      int c = a * rank + r;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) p(i, j) += u(i, c) * std::conj(u(j, c));
    }
    effects.push_back(p);
  }
  return effects;
}

}  // namespace qcert
