#include "qcert/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcert/tensor.hpp"

namespace qcert {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::inside: return "inside";
    case Verdict::outside: return "outside";
    default: return "inconclusive";
  }
}

//=========================================================================
// ChoiChannel
//=========================================================================

static void validate_cptp(const ChoiChannel& ch) {
  CptpReport r = ch.cptp_report();
  if (!r.ok())
    throw std::invalid_argument(
        "ChoiChannel: CPTP violation (min eig " + std::to_string(r.min_eigenvalue) +
        ", TP residual " + std::to_string(r.tp_residual) + ")");
}

ChoiChannel ChoiChannel::monopartite(ComplexMatrix j, int d_in, int d_out,
                                     bool validate) {
  if (j.rows() != d_in * d_out || !j.is_square())
    throw std::invalid_argument("ChoiChannel: shape does not match d_in*d_out");
  j.set_dims({d_in, d_out}, {d_in, d_out});
  ChoiChannel ch(std::move(j), false, d_in, d_out, {d_in, d_out});
  if (validate) validate_cptp(ch);
  return ch;
}

ChoiChannel ChoiChannel::bipartite(ComplexMatrix j, int d_a0, int d_b0,
                                   int d_a1, int d_b1, bool validate) {
  if (j.rows() != d_a0 * d_b0 * d_a1 * d_b1 || !j.is_square())
    throw std::invalid_argument("ChoiChannel: shape does not match label dims");
  j.set_dims({d_a0, d_b0, d_a1, d_b1}, {d_a0, d_b0, d_a1, d_b1});
  ChoiChannel ch(std::move(j), true, d_a0 * d_b0, d_a1 * d_b1,
                 {d_a0, d_b0, d_a1, d_b1});
  if (validate) validate_cptp(ch);
  return ch;
}

CptpReport ChoiChannel::cptp_report(double cp_tol, double tp_tol) const {
  CptpReport r;
  r.min_eigenvalue = min_eigenvalue(j_);
  // Tr_out J = 1 on the inputs. For bipartite order (A0,B0,A1,B1) the
  // outputs are positions 2,3; monopartite (A0,A1) output is position 1.
  std::vector<int> keep = bipartite_ ? std::vector<int>{0, 1} : std::vector<int>{0};
  ComplexMatrix marg = partial_trace(j_, keep);
  r.tp_residual = marg.max_abs_diff(ComplexMatrix::identity(d_in_));
  r.cp_ok = r.min_eigenvalue >= -cp_tol;
  r.tp_ok = r.tp_residual <= tp_tol;
  return r;
}

double KrausChannel::completeness_residual() const {
  if (kraus.empty()) return std::numeric_limits<double>::infinity();
  ComplexMatrix s(d_in(), d_in());
  for (const auto& k : kraus) s += k.adjoint() * k;
  return s.max_abs_diff(ComplexMatrix::identity(d_in()));
}

//=========================================================================
// Operations
//=========================================================================

ChoiChannel choi_from_kraus(const KrausChannel& k) {
  if (k.kraus.empty()) throw std::invalid_argument("choi_from_kraus: no Kraus operators");
  int din = k.d_in(), dout = k.d_out();
  for (const auto& op : k.kraus)
    if (op.rows() != dout || op.cols() != din)
      throw std::invalid_argument("choi_from_kraus: Kraus shape mismatch");
  if (k.completeness_residual() > 1e-9)
    throw std::invalid_argument("choi_from_kraus: Kraus set not trace preserving");

  // J = sum_m v_m v_m^dag with v_m[(i,k)] = (K_m)_{k,i}
  ComplexMatrix j(din * dout, din * dout, {din, dout}, {din, dout});
  for (const auto& op : k.kraus) {
    std::vector<cplx> v(static_cast<size_t>(din) * dout);
    for (int i = 0; i < din; ++i)
      for (int kk = 0; kk < dout; ++kk) v[i * dout + kk] = op(kk, i);
    for (size_t r = 0; r < v.size(); ++r)
      for (size_t c = 0; c < v.size(); ++c)
        j(static_cast<int>(r), static_cast<int>(c)) += v[r] * std::conj(v[c]);
  }
  return ChoiChannel::monopartite(std::move(j), din, dout);
}

ComplexMatrix apply(const ChoiChannel& ch, const ComplexMatrix& rho) {
  int din = ch.d_in(), dout = ch.d_out();
  if (rho.rows() != din || rho.cols() != din)
    throw std::invalid_argument("apply: state dimension mismatch");
  const ComplexMatrix& j = ch.choi();
  ComplexMatrix out(dout, dout);
  if (ch.is_bipartite())
    out.set_dims({ch.d_a1(), ch.d_b1()}, {ch.d_a1(), ch.d_b1()});
  for (int k = 0; k < dout; ++k)
    for (int l = 0; l < dout; ++l) {
      cplx s(0, 0);
      for (int i = 0; i < din; ++i)
        for (int jj = 0; jj < din; ++jj)
          s += j(i * dout + k, jj * dout + l) * rho(i, jj);
      out(k, l) = s;
    }
  return out;
}

ComplexMatrix apply_adjoint(const ChoiChannel& ch, const ComplexMatrix& y) {
  int din = ch.d_in(), dout = ch.d_out();
  if (y.rows() != dout || y.cols() != dout)
    throw std::invalid_argument("apply_adjoint: operator dimension mismatch");
  const ComplexMatrix& j = ch.choi();
  ComplexMatrix out(din, din);
  for (int i = 0; i < din; ++i)
    for (int jj = 0; jj < din; ++jj) {
      cplx s(0, 0);
      for (int k = 0; k < dout; ++k)
        for (int l = 0; l < dout; ++l)
          s += j(jj * dout + k, i * dout + l) * y(l, k);
      out(i, jj) = s;
    }
  return out;
}

ChoiChannel compose(const ChoiChannel& after, const ChoiChannel& before) {
  if (before.d_out() != after.d_in())
    throw std::invalid_argument("compose: dimension chain mismatch");
  int d0 = before.d_in(), d1 = before.d_out(), d2 = after.d_out();
  const ComplexMatrix& j1 = before.choi();
  const ComplexMatrix& j2 = after.choi();
  ComplexMatrix j(d0 * d2, d0 * d2, {d0, d2}, {d0, d2});
  for (int i = 0; i < d0; ++i)
    for (int jj = 0; jj < d0; ++jj)
      for (int m = 0; m < d2; ++m)
        for (int n = 0; n < d2; ++n) {
          cplx s(0, 0);
          for (int k = 0; k < d1; ++k)
            for (int l = 0; l < d1; ++l)
              s += j1(i * d1 + k, jj * d1 + l) * j2(k * d2 + m, l * d2 + n);
          j(i * d2 + m, jj * d2 + n) = s;
        }
  return ChoiChannel::monopartite(std::move(j), d0, d2);
}

CertificateReport is_qns(const ChoiChannel& ch, double tol) {
  if (!ch.is_bipartite())
    throw std::invalid_argument("is_qns: bipartite channel required");
  const ComplexMatrix& j = ch.choi();

  // Bob's side must not see Alice's input: J_{A0B0B1} = 1_{A0} x J_{B0B1}/d_A0
  ComplexMatrix lhs_a = partial_trace(j, {0, 1, 3});
  ComplexMatrix j_b = partial_trace(j, {1, 3});
  ComplexMatrix rhs_a =
      kron(ComplexMatrix::identity(ch.d_a0()), j_b) * (1.0 / ch.d_a0());
  double res_a = lhs_a.max_abs_diff(rhs_a);

  // Alice's side must not see Bob's input: J_{A0A1B0} = J_{A0A1} x 1_{B0}/d_B0
  ComplexMatrix lhs_b = partial_trace(j, {0, 1, 2});  // order (A0,B0,A1)
  ComplexMatrix j_a = partial_trace(j, {0, 2});
  ComplexMatrix rhs_b = permute_subsystems(
      kron(j_a, ComplexMatrix::identity(ch.d_b0())) * (1.0 / ch.d_b0()),
      {0, 2, 1});
  double res_b = lhs_b.max_abs_diff(rhs_b);

  CertificateReport rep;
  rep.set_tested = "qns";
  rep.tolerance = tol;
  rep.residual = std::max(res_a, res_b);
  rep.details["marginal_residual_on_bob"] = res_a;
  rep.details["marginal_residual_on_alice"] = res_b;
  rep.verdict = rep.residual <= tol ? Verdict::inside : Verdict::outside;
  return rep;
}

CertificateReport is_superchannel(const SuperchannelChoi& sc, double tol) {
  if (sc.j.rows() != sc.d_a0 * sc.d_b0 * sc.d_a1 * sc.d_b1)
    throw std::invalid_argument("is_superchannel: shape does not match dims");
  ComplexMatrix j = sc.j;
  j.set_dims({sc.d_a0, sc.d_b0, sc.d_a1, sc.d_b1},
             {sc.d_a0, sc.d_b0, sc.d_a1, sc.d_b1});

  double min_eig = min_eigenvalue(j);

  ComplexMatrix marg_in = partial_trace(j, {0, 1});
  double res_tp = marg_in.max_abs_diff(ComplexMatrix::identity(sc.d_a0 * sc.d_b0));

  ComplexMatrix lhs = partial_trace(j, {0, 1, 2});  // order (A0,B0,A1)
  ComplexMatrix j_a = partial_trace(j, {0, 2});
  ComplexMatrix rhs = permute_subsystems(
      kron(j_a, ComplexMatrix::identity(sc.d_b0)) * (1.0 / sc.d_b0), {0, 2, 1});
  double res_marg = lhs.max_abs_diff(rhs);

  CertificateReport rep;
  rep.set_tested = "superchannel";
  rep.tolerance = tol;
  rep.details["min_eigenvalue"] = min_eig;
  rep.details["input_marginal_residual"] = res_tp;
  rep.details["oneway_marginal_residual"] = res_marg;
  rep.residual = std::max({-min_eig, res_tp, res_marg});
  rep.verdict = (min_eig >= -tol && res_tp <= tol && res_marg <= tol)
                    ? Verdict::inside
                    : Verdict::outside;
  return rep;
}

SuperchannelChoi schur_superchannel(const ComplexMatrix& gram, int d_a1,
                                    int d_b0) {
  int d = d_a1 * d_b0;
  if (gram.rows() != d || gram.cols() != d)
    throw std::invalid_argument("schur_superchannel: Gram shape mismatch");
  SuperchannelChoi sc;
  sc.d_a0 = d_a1;
  sc.d_b0 = d_b0;
  sc.d_a1 = d_a1;
  sc.d_b1 = d_b0;
  int n = d_a1 * d_b0 * d_a1 * d_b0;
  sc.j = ComplexMatrix(n, n, {d_a1, d_b0, d_a1, d_b0}, {d_a1, d_b0, d_a1, d_b0});
  std::vector<int> dims = {sc.d_a0, sc.d_b0, sc.d_a1, sc.d_b1};
  for (int mi = 0; mi < d_a1; ++mi)
    for (int mo = 0; mo < d_b0; ++mo)
      for (int ni = 0; ni < d_a1; ++ni)
        for (int no = 0; no < d_b0; ++no) {
          cplx g = gram(mi * d_b0 + mo, ni * d_b0 + no);
          if (g == cplx(0, 0)) continue;
          long long r = flatten_index({mi, mo, mi, mo}, dims);
          long long c = flatten_index({ni, no, ni, no}, dims);
          sc.j(static_cast<int>(r), static_cast<int>(c)) = g;
        }
  return sc;
}

ComplexMatrix apply_superchannel(const SuperchannelChoi& sc,
                                 const ComplexMatrix& j_plugged) {
  if (j_plugged.rows() != sc.d_a1 * sc.d_b0)
    throw std::invalid_argument("apply_superchannel: plugged Choi shape mismatch");
  ComplexMatrix j = sc.j;
  j.set_dims({sc.d_a0, sc.d_b0, sc.d_a1, sc.d_b1},
             {sc.d_a0, sc.d_b0, sc.d_a1, sc.d_b1});
  ComplexMatrix jt = j_plugged.transpose();
  jt.set_dims({sc.d_a1, sc.d_b0}, {sc.d_a1, sc.d_b0});
  // 1_{A0} x (J^T on A1B0) x 1_{B1}, assembled on (A0,A1,B0,B1) then
  // permuted to the (A0,B0,A1,B1) convention.
  ComplexMatrix w =
      kron(kron(ComplexMatrix::identity(sc.d_a0), jt),
           ComplexMatrix::identity(sc.d_b1));
  w = permute_subsystems(w, {0, 2, 1, 3});
  ComplexMatrix prod = j * w;
  prod.set_dims({sc.d_a0, sc.d_b0, sc.d_a1, sc.d_b1},
                {sc.d_a0, sc.d_b0, sc.d_a1, sc.d_b1});
  ComplexMatrix out = partial_trace(prod, {0, 3});
  out.set_dims({sc.d_a0, sc.d_b1}, {sc.d_a0, sc.d_b1});
  return out;
}

ComplexMatrix apply_to_subsystems(const ChoiChannel& ch,
                                  const ComplexMatrix& rho,
                                  const std::vector<int>& targets,
                                  const std::vector<int>& out_dims) {
  const std::vector<int>& dims = rho.dims();
  int n = static_cast<int>(dims.size());
  std::vector<bool> is_target(n, false);
  for (int t : targets) {
    if (t < 0 || t >= n) throw std::invalid_argument("apply_to_subsystems: bad target");
    is_target[t] = true;
  }
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (!is_target[i]) rest.push_back(i);

  std::vector<int> front = targets;
  front.insert(front.end(), rest.begin(), rest.end());
  ComplexMatrix perm = permute_subsystems(rho, front);

  int dt = 1;
  for (int t : targets) dt *= dims[t];
  if (dt != ch.d_in())
    throw std::invalid_argument("apply_to_subsystems: target dims do not match channel input");
  int dr = perm.rows() / dt;
  int dout = ch.d_out();
  const ComplexMatrix& j = ch.choi();

  ComplexMatrix out(dout * dr, dout * dr);
  for (int k = 0; k < dout; ++k)
    for (int l = 0; l < dout; ++l)
      for (int r = 0; r < dr; ++r)
        for (int s = 0; s < dr; ++s) {
          cplx acc(0, 0);
          for (int i = 0; i < dt; ++i)
            for (int jj = 0; jj < dt; ++jj)
              acc += j(i * dout + k, jj * dout + l) * perm(i * dr + r, jj * dr + s);
          out(k * dr + r, l * dr + s) = acc;
        }

  // Restore factor order: channel outputs take the target positions.
  std::vector<int> out_dims_ch = out_dims;
  if (out_dims_ch.empty())
    out_dims_ch = ch.is_bipartite() ? std::vector<int>{ch.d_a1(), ch.d_b1()}
                                    : std::vector<int>{ch.d_out()};
  {
    long long p = 1;
    for (int d : out_dims_ch) p *= d;
    if (p != dout)
      throw std::invalid_argument("apply_to_subsystems: output dims do not factor the channel output");
  }

  if (out_dims_ch.size() == targets.size()) {
    std::vector<int> new_dims = out_dims_ch;
    for (int r : rest) new_dims.push_back(dims[r]);
    out.set_dims(new_dims, new_dims);
    std::vector<int> back(n);
    for (size_t i = 0; i < targets.size(); ++i) back[targets[i]] = static_cast<int>(i);
    for (size_t i = 0; i < rest.size(); ++i)
      back[rest[i]] = static_cast<int>(targets.size() + i);
    return permute_subsystems(out, back);
  }

  // different factor count: the output block slots in at contiguous targets
  std::vector<int> sorted_targets = targets;
  std::sort(sorted_targets.begin(), sorted_targets.end());
  for (size_t i = 0; i + 1 < sorted_targets.size(); ++i)
    if (sorted_targets[i + 1] != sorted_targets[i] + 1)
      throw std::invalid_argument(
          "apply_to_subsystems: non-contiguous targets need a matching factor count");
  int t0 = sorted_targets.front();
  std::vector<int> new_dims = out_dims_ch;
  for (int r : rest) new_dims.push_back(dims[r]);
  out.set_dims(new_dims, new_dims);

  std::vector<int> order;
  size_t rest_cursor = 0;
  for (int p = 0; p < n; ++p) {
    if (p == t0) {
      for (size_t i = 0; i < out_dims_ch.size(); ++i)
        order.push_back(static_cast<int>(i));
    } else if (p > t0 && p < t0 + static_cast<int>(targets.size())) {
      continue;
    } else {
      order.push_back(static_cast<int>(out_dims_ch.size() + rest_cursor++));
    }
  }
  return permute_subsystems(out, order);
}

}  // namespace qcert
