#ifndef QCERT_IO_HPP
#define QCERT_IO_HPP

#include <string>

#include <json.hpp>

#include "qcert/channels.hpp"
#include "qcert/correlations.hpp"
#include "qcert/dephasing.hpp"
#include "qcert/matrix.hpp"
#include "qcert/protocols.hpp"
#include "qcert/report.hpp"

namespace qcert::io {

using nlohmann::json;

// One JSON container for every matrix-like object, discriminated by `kind`:
// state, choi, gram, stochastic, povm-family, strategy, distribution,
// functional, superchannel, protocol-spec. Complex entries are [re, im]
// pairs; decimal values round-trip exactly.

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

std::string kind_of(const json& file);

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json state_file(const ComplexMatrix& rho);
json gram_file(const ComplexMatrix& g);
json choi_file(const ChoiChannel& ch);
json superchannel_file(const SuperchannelChoi& sc);
json stochastic_file(const std::vector<std::vector<double>>& s);
json distribution_file(const ConditionalDistribution& p);
json functional_file(const BellFunctional& g);
json strategy_file(const QuantumStrategy& s);

ComplexMatrix parse_state(const json& file);
ComplexMatrix parse_gram_matrix(const json& file);
ChoiChannel parse_choi(const json& file, bool validate = true);
SuperchannelChoi parse_superchannel(const json& file);
std::vector<std::vector<double>> parse_stochastic(const json& file);
ConditionalDistribution parse_distribution(const json& file);
BellFunctional parse_functional(const json& file);
QuantumStrategy parse_strategy(const json& file);
MeasurementFamily parse_povm_family(const json& file);
ProtocolSpec parse_protocol_spec(const json& file);

// Distribution view of whatever the file holds: distribution and stochastic
// files directly, channel files through their decoherent action.
ConditionalDistribution distribution_from_file(const json& file);

json report_to_json(const CertificateReport& rep);

}  // namespace qcert::io

#endif
