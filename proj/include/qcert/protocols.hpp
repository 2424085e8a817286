#ifndef QCERT_PROTOCOLS_HPP
#define QCERT_PROTOCOLS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "qcert/channels.hpp"
#include "qcert/correlations.hpp"
#include "qcert/matrix.hpp"
#include "qcert/report.hpp"

namespace qcert {

//=========================================================================
// Measurement protocols on bipartite channels
//=========================================================================

struct MeasurementFamily {
  // effects[setting][outcome], all on one declared space
  std::vector<std::vector<ComplexMatrix>> effects;
  int settings() const { return static_cast<int>(effects.size()); }
  int outcomes() const { return effects.empty() ? 0 : static_cast<int>(effects[0].size()); }
  int dim() const {
    return effects.empty() || effects[0].empty() ? 0 : effects[0][0].rows();
  }
  // max(PSD violation, completeness residual)
  double validation_residual() const;
};

enum class ProtocolVariant {
  shared_entangled,  // shared state + per-setting input channels
  product_inputs,    // per-setting product input states
  computational      // preferred-basis inputs and measurements
};

struct ProtocolSpec {
  ProtocolVariant variant = ProtocolVariant::computational;
  int d_r = 1, d_s = 1;  // ancilla dimensions

  // shared_entangled: state on (A0, R, B0, S) and channel families on
  // (A0 R) and (B0 S)
  std::optional<ComplexMatrix> shared_state;
  std::vector<ChoiChannel> alice_input_channels;
  std::vector<ChoiChannel> bob_input_channels;

  // product_inputs: states on (A0, R) per x and (B0, S) per y
  std::vector<ComplexMatrix> alice_input_states;
  std::vector<ComplexMatrix> bob_input_states;

  // measurements on (R, A1) and (S, B1); unused for computational
  MeasurementFamily alice_measurements;
  MeasurementFamily bob_measurements;
};

// Exact Born-rule evaluation of the selected variant.
ConditionalDistribution run_protocol(const ProtocolSpec& spec,
                                     const ChoiChannel& ch);

// d^2 maximally entangled orthonormal vectors on d x d,
// |phi^{ab}> = sum_k exp(2 pi i b k / d)|k, k+a mod d>/sqrt d, index a*d+b.
std::vector<ComplexMatrix> generalized_bell_basis(int d);

//=========================================================================
// See-saw maximization of a Bell functional over measurements
//=========================================================================

struct SeesawOptions {
  int restarts = 20;
  int max_sweeps = 200;
  double improvement_tol = 1e-9;
  uint64_t seed = 1;
};

struct SeesawResult {
  double value = 0;
  MeasurementFamily alice, bob;
  std::vector<double> sweep_values;  // best restart, per sweep
  bool converged = false;
};

// Lower bound on gamma_max of a channel for fixed product input states
// (variant b). Each half-step solves the one-sided POVM problem exactly.
SeesawResult seesaw_gamma_max(const ChoiChannel& ch, const BellFunctional& gamma,
                              const std::vector<ComplexMatrix>& alice_inputs,
                              const std::vector<ComplexMatrix>& bob_inputs,
                              int d_r, int d_s, const SeesawOptions& opts = {});

// Exact maximizer of sum_a Tr(M^a H_a) over POVMs {M^a}. Two-outcome
// problems use the positive-eigenspace projector; larger ones a small SDP.
std::vector<ComplexMatrix> optimal_povm(const std::vector<ComplexMatrix>& h);

//=========================================================================
// Measurement-device-independent LOSR test
//=========================================================================

struct MdiOptions {
  SeesawOptions seesaw;
  double margin_tol = 1e-7;
};

// Fixed generalized-Bell-basis measurements with trusted spanning inputs on
// (A0, R) / (B0, S). Computes gamma(p_E), a see-saw lower bound and a
// PPT-relaxation upper bound on the product-effect value. Certifies
// outside-LOSR only when gamma(p_E) exceeds the upper bound.
CertificateReport mdi_losr_test(const ChoiChannel& ch,
                                const BellFunctional& gamma,
                                const std::vector<ComplexMatrix>& alice_inputs,
                                const std::vector<ComplexMatrix>& bob_inputs,
                                const MdiOptions& opts = {});

// The channel-independent part of the test (input spanning check, product
// bounds), reusable across many channels with the same trusted devices.
struct MdiSetup {
  BellFunctional gamma{Scenario{}};
  std::vector<ComplexMatrix> alice_inputs, bob_inputs;
  double product_upper_bound = 0;
  double product_lower_bound = 0;
  bool upper_converged = false;
};
MdiSetup prepare_mdi_setup(const BellFunctional& gamma,
                           const std::vector<ComplexMatrix>& alice_inputs,
                           const std::vector<ComplexMatrix>& bob_inputs,
                           int d_a, int d_b, const MdiOptions& opts = {});
CertificateReport mdi_losr_test(const ChoiChannel& ch, const MdiSetup& setup,
                                const MdiOptions& opts = {});

// Upper bound on max sum_ab Tr(Z_ab F_ab) over PPT effects summing to 1
// (relaxation of product POVM pairs). d_left x d_right bipartition.
struct PptBound {
  double value = 0;
  bool converged = false;
};
PptBound ppt_product_effect_bound(const std::vector<ComplexMatrix>& f,
                                  int d_left, int d_right);

//=========================================================================
// Strategies and channel constructions
//=========================================================================

struct QuantumStrategy {
  ComplexMatrix sigma;  // shared state on R x S
  std::vector<std::vector<ComplexMatrix>> alice_projectors;  // [x][a] on R
  std::vector<std::vector<ComplexMatrix>> bob_projectors;    // [y][b] on S
  double validation_residual() const;  // idempotence + completeness
  ConditionalDistribution born_distribution() const;
};

// Stinespring dilation of a strategy into a bipartite channel whose
// decoherent action reproduces the strategy's distribution.
ChoiChannel lose_from_strategy(const QuantumStrategy& s);

// Convex combination of product channels, deterministic under seed.
ChoiChannel sample_losr(int d_a0, int d_b0, int d_a1, int d_b1, int terms,
                        uint64_t seed);

// Single product channel E_A x E_B (hence quantum nonsignaling).
ChoiChannel sample_product_channel(int d_a0, int d_b0, int d_a1, int d_b1,
                                   uint64_t seed);

// CHSH-optimal strategy: shared maximally entangled pair, Z/X on one side
// and the diagonal bases on the other.
QuantumStrategy tsirelson_strategy();

// Product shared state with random projective families (Bell-local).
QuantumStrategy random_local_strategy(int nx, int ny, int d, uint64_t seed);

}  // namespace qcert

#endif
