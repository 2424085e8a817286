#ifndef QCERT_CHANNELS_HPP
#define QCERT_CHANNELS_HPP

#include <string>
#include <vector>

#include "qcert/matrix.hpp"
#include "qcert/report.hpp"

namespace qcert {

//=========================================================================
// Channel representations
//=========================================================================
//
// Choi matrices follow the unnormalized convention Tr J = d_in, with the
// channel recovered via E(rho) = Tr_in(J (rho^T x 1)). Bipartite channels
// order their subsystems (A0, B0, A1, B1).

struct CptpReport {
  double min_eigenvalue = 0;   // of the Choi matrix
  double tp_residual = 0;      // || Tr_out J - 1 ||_max
  bool cp_ok = false;
  bool tp_ok = false;
  bool ok() const { return cp_ok && tp_ok; }
};

class ChoiChannel {
 public:
  // Monopartite channel d_in -> d_out, labels (A0, A1).
  static ChoiChannel monopartite(ComplexMatrix j, int d_in, int d_out,
                                 bool validate = true);
  // Bipartite channel with labels (A0, B0, A1, B1).
  static ChoiChannel bipartite(ComplexMatrix j, int d_a0, int d_b0, int d_a1,
                               int d_b1, bool validate = true);

  const ComplexMatrix& choi() const { return j_; }
  bool is_bipartite() const { return bipartite_; }
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  // Bipartite label dims in order A0, B0, A1, B1.
  int d_a0() const { return label_dims_[0]; }
  int d_b0() const { return label_dims_[1]; }
  int d_a1() const { return label_dims_[2]; }
  int d_b1() const { return label_dims_[3]; }

  CptpReport cptp_report(double cp_tol = 1e-9, double tp_tol = 1e-9) const;

 private:
  ChoiChannel(ComplexMatrix j, bool bip, int din, int dout,
              std::vector<int> label_dims)
      : j_(std::move(j)), bipartite_(bip), d_in_(din), d_out_(dout),
        label_dims_(std::move(label_dims)) {}
  ComplexMatrix j_;
  bool bipartite_;
  int d_in_, d_out_;
  std::vector<int> label_dims_;
};

struct KrausChannel {
  std::vector<ComplexMatrix> kraus;  // each d_out x d_in
  int d_in() const { return kraus.empty() ? 0 : kraus[0].cols(); }
  int d_out() const { return kraus.empty() ? 0 : kraus[0].rows(); }
  // || sum K^dag K - 1 ||_max
  double completeness_residual() const;
};

// Choi matrix of a superchannel over labels (A0, B0, A1, B1); the plugged
// channel maps A1 -> B0, the transformed channel maps A0 -> B1.
struct SuperchannelChoi {
  ComplexMatrix j;
  int d_a0 = 0, d_b0 = 0, d_a1 = 0, d_b1 = 0;
};

//=========================================================================
// Operations
//=========================================================================

ChoiChannel choi_from_kraus(const KrausChannel& k);

// E(rho) = Tr_in(J (rho^T x 1)).
ComplexMatrix apply(const ChoiChannel& ch, const ComplexMatrix& rho);

// Adjoint map: E^dag(Y) = [Tr_out(J (1 x Y))]^T. CP and unital.
ComplexMatrix apply_adjoint(const ChoiChannel& ch, const ComplexMatrix& y);

// Choi of after . before.
ChoiChannel compose(const ChoiChannel& after, const ChoiChannel& before);

// Quantum nonsignaling marginal conditions on a bipartite channel.
CertificateReport is_qns(const ChoiChannel& ch, double tol = 1e-8);

// Superchannel conditions: PSD, full input marginal = 1, and the
// one-way marginal factorization on (A0A1B0).
CertificateReport is_superchannel(const SuperchannelChoi& sc, double tol = 1e-8);

// Choi of the superchannel that Schur-multiplies plugged Choi matrices by
// `gram` (d_a1*d_b0 square). Pure dephasing of channels.
SuperchannelChoi schur_superchannel(const ComplexMatrix& gram, int d_a1,
                                    int d_b0);

// Transform a plugged channel (A1 -> B0) by a superchannel; returns the
// Choi of the resulting channel A0 -> B1.
ComplexMatrix apply_superchannel(const SuperchannelChoi& sc,
                                 const ComplexMatrix& j_plugged);

// Apply a channel to selected subsystems of a larger state. The channel
// output replaces the target factors; `out_dims` overrides its factor
// split (targets must then be contiguous).
ComplexMatrix apply_to_subsystems(const ChoiChannel& ch,
                                  const ComplexMatrix& rho,
                                  const std::vector<int>& targets,
                                  const std::vector<int>& out_dims = {});

}  // namespace qcert

#endif
