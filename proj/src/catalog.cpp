#include "qcert/catalog.hpp"

#include <cmath>
#include <stdexcept>

#include "qcert/tensor.hpp"

namespace qcert::catalog {

static const cplx kI(0, 1);

ComplexMatrix pauli_x() { return ComplexMatrix::from_rows({{0, 1}, {1, 0}}); }
ComplexMatrix pauli_y() { return ComplexMatrix::from_rows({{0, -kI}, {kI, 0}}); }
ComplexMatrix pauli_z() { return ComplexMatrix::from_rows({{1, 0}, {0, -1}}); }

ComplexMatrix hadamard() {
  double s = 1.0 / std::sqrt(2.0);
  return ComplexMatrix::from_rows({{s, s}, {s, -s}});
}

ComplexMatrix pure_state(const std::vector<cplx>& amplitudes) {
  double n2 = 0;
  for (const auto& a : amplitudes) n2 += std::norm(a);
  int d = static_cast<int>(amplitudes.size());
  ComplexMatrix rho(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      rho(i, j) = amplitudes[i] * std::conj(amplitudes[j]) / n2;
  return rho;
}

ComplexMatrix max_entangled_state(int d) {
  std::vector<cplx> amp(static_cast<size_t>(d) * d, cplx(0, 0));
  for (int i = 0; i < d; ++i) amp[static_cast<size_t>(i) * d + i] = 1.0;
  ComplexMatrix rho = pure_state(amp);
  rho.set_dims({d, d}, {d, d});
  return rho;
}

ComplexMatrix plus_plus_state() {
  ComplexMatrix rho(4, 4, {2, 2}, {2, 2});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho(i, j) = 0.25;
  return rho;
}

ComplexMatrix bell_sign_gram() {
  ComplexMatrix g(4, 4, {2, 2}, {2, 2});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double sign = ((i == 3) != (j == 3)) ? -1.0 : 1.0;
      g(i, j) = sign;
    }
  return g;
}

ComplexMatrix damped_plus_state(double p, double q) {
  double x = (1.0 - q) * (1.0 - 2.0 * p);
  ComplexMatrix rho(4, 4, {2, 2}, {2, 2});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double v;
      if (i == j)
        v = 1.0;
      else if (i == 3 || j == 3)
        v = x;
      else
        v = 1.0 - q;
      rho(i, j) = 0.25 * v;
    }
  return rho;
}

static ComplexMatrix unitary_choi_matrix(const ComplexMatrix& u) {
  int d = u.rows();
  if (u.cols() != d) throw std::invalid_argument("unitary_channel: non-square");
  ComplexMatrix j(d * d, d * d, {d, d}, {d, d});
  // J = v v^dag with v[(i,k)] = U_{k,i}
  std::vector<cplx> v(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) v[static_cast<size_t>(i) * d + k] = u(k, i);
  for (size_t r = 0; r < v.size(); ++r)
    for (size_t c = 0; c < v.size(); ++c)
      j(static_cast<int>(r), static_cast<int>(c)) = v[r] * std::conj(v[c]);
  return j;
}

ChoiChannel unitary_channel(const ComplexMatrix& u) {
  return ChoiChannel::monopartite(unitary_choi_matrix(u), u.rows(), u.rows());
}

ChoiChannel bipartite_unitary_channel(const ComplexMatrix& u) {
  if (u.rows() != 4) throw std::invalid_argument("bipartite_unitary_channel: 4x4 required");
  ComplexMatrix j = unitary_choi_matrix(u);
  // reshape (in, out) -> (A0, B0, A1, B1)
  j.set_dims({2, 2, 2, 2}, {2, 2, 2, 2});
  return ChoiChannel::bipartite(std::move(j), 2, 2, 2, 2);
}

ChoiChannel cnot_channel() {
  ComplexMatrix u(4, 4);
  u(0, 0) = 1;
  u(1, 1) = 1;
  u(2, 3) = 1;
  u(3, 2) = 1;
  return bipartite_unitary_channel(u);
}

ChoiChannel depolarizing_channel(int d) {
  ComplexMatrix j(d * d, d * d, {d, d}, {d, d});
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) j(i * d + k, i * d + k) = 1.0 / d;
  return ChoiChannel::monopartite(std::move(j), d, d);
}

static int flat2(BitOrder order, int m, int n) {
  return order == BitOrder::first_major ? 2 * m + n : m + 2 * n;
}

ComplexMatrix bell_basis_unitary(BitOrder order) {
  ComplexMatrix u(4, 4, {2, 2}, {2, 2});
  // column |i+j, j> receives (X^i Z^j on the first slot) |phi+>
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      int col = flat2(order, (i + j) % 2, j);
      // amplitudes of (X^i Z^j x 1)(|00> + |11>)/sqrt 2 at |m,n>:
      // nonzero for m = k xor i, n = k with phase Z^j on k
      for (int k = 0; k < 2; ++k) {
        double phase = (j == 1 && k == 1) ? -1.0 : 1.0;
        int m = k ^ i, n = k;
        u(flat2(order, m, n), col) = phase / std::sqrt(2.0);
      }
    }
  return u;
}

ComplexMatrix rotated_bell_basis_unitary(BitOrder order) {
  ComplexMatrix h = hadamard(), id = ComplexMatrix::identity(2);
  ComplexMatrix hh = kron(h, h);
  // The bit order controls how the Bell-basis map's kets are flattened; the
  // lone Hadamard always multiplies the least significant flat digit. Only
  // the second_major reading turns the decoherent action into a permutation.
  return hh * bell_basis_unitary(order) * kron(id, h);
}

ComplexMatrix controlled_xy_unitary() {
  ComplexMatrix u(4, 4, {2, 2}, {2, 2});
  ComplexMatrix x = pauli_x(), y = pauli_y();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      u(0 * 2 + i, 0 * 2 + j) = x(i, j);
      u(1 * 2 + i, 1 * 2 + j) = y(i, j);
    }
  return u;
}

ComplexMatrix controlled_unitary_lift_gram(IndexBase base, bool sign_corrected) {
  ComplexMatrix g = ComplexMatrix::identity(16);
  auto set = [&](int r1, int c1, cplx v) {
    int off = base == IndexBase::one_based ? 1 : 0;
    int r = r1 - off, c = c1 - off;
    if (r < 0 || c < 0 || r >= 16 || c >= 16)
      throw std::invalid_argument("controlled_unitary_lift_gram: index out of range");
    g(r, c) = v;
    g(c, r) = std::conj(v);
  };
  if (sign_corrected) {
    // Phase-consistent values: the unique unit-modulus completion that is a
    // rank-structured Gram and maps the Choi of 1 x X to that of the
    // controlled X/Y unitary under the (in, out) Choi flattening.
    set(2, 5, 1);
    set(2, 12, -kI);
    set(2, 15, kI);
    set(5, 12, -kI);
    set(5, 15, kI);
    set(12, 15, -1);
  } else {
    set(12, 15, 1);
    set(2, 5, -1);
    set(2, 12, kI);
    set(5, 12, kI);
    set(2, 15, -kI);
    set(5, 15, kI);
  }
  g.set_dims({2, 2, 2, 2}, {2, 2, 2, 2});
  return g;
}

std::vector<ComplexMatrix> tetrahedral_states() {
  const double s = 1.0 / std::sqrt(3.0);
  const double bloch[4][3] = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<ComplexMatrix> states;
  ComplexMatrix x = pauli_x(), y = pauli_y(), z = pauli_z();
  for (const auto& v : bloch) {
    ComplexMatrix rho = ComplexMatrix::identity(2) * 0.5;
    rho += (x * v[0] + y * v[1] + z * v[2]) * 0.5;
    states.push_back(std::move(rho));
  }
  return states;
}

std::vector<ComplexMatrix> tetrahedral_pair_states() {
  auto tetra = tetrahedral_states();
  std::vector<ComplexMatrix> out;
  out.reserve(16);
  for (const auto& a : tetra)
    for (const auto& b : tetra) out.push_back(kron(a, b));
  return out;
}

std::vector<std::vector<double>> pr_box() {
  std::vector<std::vector<double>> s(4, std::vector<double>(4, 0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) s[2 * a + b][2 * x + y] = 0.5;
  return s;
}

std::vector<std::vector<double>> pr_box_flipped() {
  std::vector<std::vector<double>> s(4, std::vector<double>(4, 0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == ((x & y) ^ 1)) s[2 * a + b][2 * x + y] = 0.5;
  return s;
}

std::vector<std::vector<double>> identity_box(int n) {
  std::vector<std::vector<double>> s(n, std::vector<double>(n, 0));
  for (int i = 0; i < n; ++i) s[i][i] = 1.0;
  return s;
}

std::vector<std::vector<double>> box_mixture(double s, double t) {
  auto r = pr_box(), flipped = pr_box_flipped(), id = identity_box(4);
  std::vector<std::vector<double>> out(4, std::vector<double>(4, 0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out[i][j] = s * r[i][j] + t * flipped[i][j] + (1 - s - t) * id[i][j];
  return out;
}

}  // namespace qcert::catalog
