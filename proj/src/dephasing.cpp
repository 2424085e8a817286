#include "qcert/dephasing.hpp"

#include <cmath>
#include <stdexcept>

#include "qcert/tensor.hpp"

namespace qcert {

GramMatrix::GramMatrix(ComplexMatrix g, bool validate) : g_(std::move(g)) {
  if (!g_.is_square()) throw std::invalid_argument("GramMatrix: non-square");
  if (validate) {
    auto [min_eig, diag_res] = residuals();
    if (min_eig < -1e-9 || diag_res > 1e-10)
      throw std::invalid_argument(
          "GramMatrix: invalid (min eig " + std::to_string(min_eig) +
          ", diag residual " + std::to_string(diag_res) + ")");
  }
}

GramMatrix GramMatrix::all_ones(int d) {
  ComplexMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = 1.0;
  return GramMatrix(std::move(g), false);
}

std::pair<double, double> GramMatrix::residuals() const {
  double diag_res = 0;
  for (int i = 0; i < g_.rows(); ++i)
    diag_res = std::max(diag_res, std::abs(g_(i, i) - cplx(1, 0)));
  double min_eig = g_.hermiticity_residual() > 1e-10
                       ? -std::numeric_limits<double>::infinity()
                       : min_eigenvalue(g_);
  return {min_eig, diag_res};
}

ComplexMatrix dephase_state(const ComplexMatrix& rho, const GramMatrix& g) {
  if (rho.rows() != g.dim() || rho.cols() != g.dim())
    throw std::invalid_argument("dephase_state: shape mismatch");
  return schur(rho, g.matrix());
}

ChoiChannel dephase_channel_memoryless(const ChoiChannel& ch,
                                       const GramMatrix& g_in,
                                       const GramMatrix& g_out) {
  if (g_in.dim() != ch.d_in() || g_out.dim() != ch.d_out())
    throw std::invalid_argument("dephase_channel_memoryless: Gram dims mismatch");
  ComplexMatrix mask = kron(g_in.matrix(), g_out.matrix());
  if (ch.is_bipartite()) {
    // mask order is ((A0,B0),(A1,B1)), same flattening as the Choi labels
    return ChoiChannel::bipartite(schur(ch.choi(), mask), ch.d_a0(), ch.d_b0(),
                                  ch.d_a1(), ch.d_b1());
  }
  return ChoiChannel::monopartite(schur(ch.choi(), mask), ch.d_in(), ch.d_out());
}

ChoiChannel dephase_local(const ChoiChannel& ch, const GramMatrix& g_a0,
                          const GramMatrix& g_b0, const GramMatrix& g_a1,
                          const GramMatrix& g_b1) {
  if (!ch.is_bipartite())
    throw std::invalid_argument("dephase_local: bipartite channel required");
  if (g_a0.dim() != ch.d_a0() || g_b0.dim() != ch.d_b0() ||
      g_a1.dim() != ch.d_a1() || g_b1.dim() != ch.d_b1())
    throw std::invalid_argument("dephase_local: Gram dims mismatch");
  ComplexMatrix mask =
      kron(kron(kron(g_a0.matrix(), g_b0.matrix()), g_a1.matrix()), g_b1.matrix());
  return ChoiChannel::bipartite(schur(ch.choi(), mask), ch.d_a0(), ch.d_b0(),
                                ch.d_a1(), ch.d_b1());
}

ComplexMatrix noise_uniform_damping(const ComplexMatrix& rho, double q) {
  if (q < 0 || q > 1) throw std::invalid_argument("noise_uniform_damping: q out of [0,1]");
  if (!rho.is_square()) throw std::invalid_argument("noise_uniform_damping: non-square");
  ComplexMatrix out = rho * (1.0 - q);
  for (int i = 0; i < rho.rows(); ++i) out(i, i) += q * rho(i, i);
  return out;
}

ComplexMatrix noise_fourth_level_damping(const ComplexMatrix& rho, double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("noise_fourth_level_damping: p out of [0,1]");
  if (rho.rows() != 4 || rho.cols() != 4)
    throw std::invalid_argument("noise_fourth_level_damping: 4x4 input required");
  ComplexMatrix out = rho;
  for (int i = 0; i < 3; ++i) {
    out(i, 3) *= (1.0 - 2.0 * p);
    out(3, i) *= (1.0 - 2.0 * p);
  }
  return out;
}

ComplexMatrix apply_damping(const ComplexMatrix& rho, const NoiseParams& params) {
  return noise_uniform_damping(noise_fourth_level_damping(rho, params.p), params.q);
}

std::vector<std::vector<double>> decoherent_action(const ChoiChannel& ch) {
  int din = ch.d_in(), dout = ch.d_out();
  const ComplexMatrix& j = ch.choi();
  std::vector<std::vector<double>> s(dout, std::vector<double>(din, 0));
  for (int in = 0; in < din; ++in)
    for (int out = 0; out < dout; ++out)
      s[out][in] = j(in * dout + out, in * dout + out).real();
  return s;
}

std::vector<std::vector<double>> decoherent_action(const KrausChannel& k) {
  int din = k.d_in(), dout = k.d_out();
  std::vector<std::vector<double>> s(dout, std::vector<double>(din, 0));
  for (const auto& op : k.kraus)
    for (int out = 0; out < dout; ++out)
      for (int in = 0; in < din; ++in)
        s[out][in] += (op(out, in) * std::conj(op(out, in))).real();
  return s;
}

ChoiChannel classical_channel(const std::vector<std::vector<double>>& s) {
  int dout = static_cast<int>(s.size());
  if (dout == 0) throw std::invalid_argument("classical_channel: empty matrix");
  int din = static_cast<int>(s[0].size());
  ComplexMatrix j(din * dout, din * dout, {din, dout}, {din, dout});
  for (int in = 0; in < din; ++in)
    for (int out = 0; out < dout; ++out)
      j(in * dout + out, in * dout + out) = s[out][in];
  return ChoiChannel::monopartite(std::move(j), din, dout);
}

double column_sum_residual(const std::vector<std::vector<double>>& s) {
  if (s.empty()) return 0;
  double res = 0;
  for (size_t c = 0; c < s[0].size(); ++c) {
    double sum = 0;
    for (const auto& row : s) sum += row[c];
    res = std::max(res, std::abs(sum - 1.0));
  }
  return res;
}

}  // namespace qcert
