#include "qcert/io.hpp"

#include <cmath>
#include <fstream>

namespace qcert::io {

namespace {
constexpr const char* kFormatTag = "qcert-matrix/1";

void require(bool cond, const std::string& msg) {
  if (!cond) throw ParseError(msg);
}

json complex_entries(const ComplexMatrix& m) {
  json entries = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const cplx& v = m(i, j);
      entries.push_back(json::array({v.real(), v.imag()}));
    }
  return entries;
}

Scenario parse_scenario(const json& j) {
  require(j.contains("na") && j.contains("nb") && j.contains("nx") && j.contains("ny"),
          "scenario requires na, nb, nx, ny");
  return Scenario{j.at("na").get<int>(), j.at("nb").get<int>(),
                  j.at("nx").get<int>(), j.at("ny").get<int>()};
}

json scenario_json(const Scenario& sc) {
  return json{{"na", sc.na}, {"nb", sc.nb}, {"nx", sc.nx}, {"ny", sc.ny}};
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

std::string kind_of(const json& file) {
  require(file.is_object(), "matrix file must be a JSON object");
  require(file.contains("kind"), "matrix file missing 'kind'");
  return file.at("kind").get<std::string>();
}

json matrix_to_json(const ComplexMatrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  if (m.row_dims().size() > 1) j["row_dims"] = m.row_dims();
  if (m.col_dims().size() > 1) j["col_dims"] = m.col_dims();
  j["entries"] = complex_entries(m);
  return j;
}

ComplexMatrix matrix_from_json(const json& j) {
  require(j.contains("rows") && j.contains("cols") && j.contains("entries"),
          "matrix requires rows, cols, entries");
  int rows = j.at("rows").get<int>(), cols = j.at("cols").get<int>();
  require(rows > 0 && cols > 0, "matrix shape must be positive");
  const json& entries = j.at("entries");
  require(entries.is_array() &&
              entries.size() == static_cast<size_t>(rows) * cols,
          "entry count does not match shape");
  ComplexMatrix m(rows, cols);
  size_t idx = 0;
  for (int i = 0; i < rows; ++i)
    for (int jj = 0; jj < cols; ++jj, ++idx) {
      const json& e = entries[idx];
      require(e.is_array() && e.size() == 2, "entries must be [re, im] pairs");
      m(i, jj) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  if (j.contains("row_dims"))
    m.set_dims(j.at("row_dims").get<std::vector<int>>(),
               j.contains("col_dims") ? j.at("col_dims").get<std::vector<int>>()
                                      : j.at("row_dims").get<std::vector<int>>());
  return m;
}

json state_file(const ComplexMatrix& rho) {
  json j = matrix_to_json(rho);
  j["format"] = kFormatTag;
  j["kind"] = "state";
  return j;
}

json gram_file(const ComplexMatrix& g) {
  json j = matrix_to_json(g);
  j["format"] = kFormatTag;
  j["kind"] = "gram";
  return j;
}

json choi_file(const ChoiChannel& ch) {
  json j = matrix_to_json(ch.choi());
  j["format"] = kFormatTag;
  j["kind"] = "choi";
  if (ch.is_bipartite()) {
    j["labels"] = json::array({json{{"name", "A0"}, {"dim", ch.d_a0()}},
                               json{{"name", "B0"}, {"dim", ch.d_b0()}},
                               json{{"name", "A1"}, {"dim", ch.d_a1()}},
                               json{{"name", "B1"}, {"dim", ch.d_b1()}}});
  } else {
    j["labels"] = json::array({json{{"name", "A0"}, {"dim", ch.d_in()}},
                               json{{"name", "A1"}, {"dim", ch.d_out()}}});
  }
  return j;
}

json superchannel_file(const SuperchannelChoi& sc) {
  json j = matrix_to_json(sc.j);
  j["format"] = kFormatTag;
  j["kind"] = "superchannel";
  j["labels"] = json::array({json{{"name", "A0"}, {"dim", sc.d_a0}},
                             json{{"name", "B0"}, {"dim", sc.d_b0}},
                             json{{"name", "A1"}, {"dim", sc.d_a1}},
                             json{{"name", "B1"}, {"dim", sc.d_b1}}});
  return j;
}

json stochastic_file(const std::vector<std::vector<double>>& s) {
  json j;
  j["format"] = kFormatTag;
  j["kind"] = "stochastic";
  j["rows"] = s.size();
  j["cols"] = s.empty() ? 0 : s[0].size();
  json vals = json::array();
  for (const auto& row : s)
    for (double v : row) vals.push_back(v);
  j["values"] = vals;
  return j;
}

json distribution_file(const ConditionalDistribution& p) {
  json j;
  j["format"] = kFormatTag;
  j["kind"] = "distribution";
  j["scenario"] = scenario_json(p.scenario());
  j["table"] = p.table();
  return j;
}

json functional_file(const BellFunctional& g) {
  json j;
  j["format"] = kFormatTag;
  j["kind"] = "functional";
  j["scenario"] = scenario_json(g.scenario());
  j["coefficients"] = g.coefficients();
  return j;
}

json strategy_file(const QuantumStrategy& s) {
  json j;
  j["format"] = kFormatTag;
  j["kind"] = "strategy";
  j["state"] = matrix_to_json(s.sigma);
  auto family = [](const std::vector<std::vector<ComplexMatrix>>& f) {
    json out = json::array();
    for (const auto& setting : f) {
      json js = json::array();
      for (const auto& p : setting) js.push_back(matrix_to_json(p));
      out.push_back(js);
    }
    return out;
  };
  j["alice"] = family(s.alice_projectors);
  j["bob"] = family(s.bob_projectors);
  return j;
}

ComplexMatrix parse_state(const json& file) {
  ComplexMatrix m = matrix_from_json(file);
  require(m.is_square(), "state must be square");
  return m;
}

ComplexMatrix parse_gram_matrix(const json& file) {
  ComplexMatrix m = matrix_from_json(file);
  require(m.is_square(), "gram matrix must be square");
  return m;
}

namespace {
std::vector<std::pair<std::string, int>> parse_labels(const json& file) {
  require(file.contains("labels"), "choi file requires labels");
  std::vector<std::pair<std::string, int>> labels;
  for (const auto& l : file.at("labels"))
    labels.emplace_back(l.at("name").get<std::string>(), l.at("dim").get<int>());
  return labels;
}
}  // namespace

ChoiChannel parse_choi(const json& file, bool validate) {
  ComplexMatrix m = matrix_from_json(file);
  auto labels = parse_labels(file);
  if (labels.size() == 2)
    return ChoiChannel::monopartite(std::move(m), labels[0].second,
                                    labels[1].second, validate);
  require(labels.size() == 4, "choi file requires 2 or 4 labels");
  return ChoiChannel::bipartite(std::move(m), labels[0].second, labels[1].second,
                                labels[2].second, labels[3].second, validate);
}

SuperchannelChoi parse_superchannel(const json& file) {
  SuperchannelChoi sc;
  sc.j = matrix_from_json(file);
  auto labels = parse_labels(file);
  require(labels.size() == 4, "superchannel file requires 4 labels");
  sc.d_a0 = labels[0].second;
  sc.d_b0 = labels[1].second;
  sc.d_a1 = labels[2].second;
  sc.d_b1 = labels[3].second;
  return sc;
}

std::vector<std::vector<double>> parse_stochastic(const json& file) {
  require(file.contains("rows") && file.contains("cols") && file.contains("values"),
          "stochastic file requires rows, cols, values");
  int rows = file.at("rows").get<int>(), cols = file.at("cols").get<int>();
  const json& vals = file.at("values");
  require(vals.size() == static_cast<size_t>(rows) * cols,
          "value count does not match shape");
  std::vector<std::vector<double>> s(rows, std::vector<double>(cols));
  size_t idx = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j, ++idx) s[i][j] = vals[idx].get<double>();
  return s;
}

ConditionalDistribution parse_distribution(const json& file) {
  require(file.contains("scenario") && file.contains("table"),
          "distribution file requires scenario and table");
  Scenario sc = parse_scenario(file.at("scenario"));
  ConditionalDistribution p(sc);
  const json& table = file.at("table");
  require(table.size() == static_cast<size_t>(sc.entries()),
          "table size does not match scenario");
  for (size_t i = 0; i < table.size(); ++i) p.table()[i] = table[i].get<double>();
  return p;
}

BellFunctional parse_functional(const json& file) {
  require(file.contains("scenario") && file.contains("coefficients"),
          "functional file requires scenario and coefficients");
  Scenario sc = parse_scenario(file.at("scenario"));
  BellFunctional g(sc);
  const json& coef = file.at("coefficients");
  require(coef.size() == static_cast<size_t>(sc.entries()),
          "coefficient count does not match scenario");
  for (size_t i = 0; i < coef.size(); ++i) g.coefficients()[i] = coef[i].get<double>();
  return g;
}

QuantumStrategy parse_strategy(const json& file) {
  require(file.contains("state") && file.contains("alice") && file.contains("bob"),
          "strategy file requires state, alice, bob");
  QuantumStrategy s;
  s.sigma = matrix_from_json(file.at("state"));
  auto family = [](const json& f) {
    std::vector<std::vector<ComplexMatrix>> out;
    for (const auto& setting : f) {
      std::vector<ComplexMatrix> ps;
      for (const auto& p : setting) ps.push_back(matrix_from_json(p));
      out.push_back(std::move(ps));
    }
    return out;
  };
  s.alice_projectors = family(file.at("alice"));
  s.bob_projectors = family(file.at("bob"));
  require(!s.alice_projectors.empty() && !s.bob_projectors.empty(),
          "strategy requires measurement families");
  int dr = s.alice_projectors[0][0].rows(), ds = s.bob_projectors[0][0].rows();
  s.sigma.set_dims({dr, ds}, {dr, ds});
  return s;
}

MeasurementFamily parse_povm_family(const json& file) {
  require(file.contains("settings"), "povm-family file requires settings");
  MeasurementFamily fam;
  for (const auto& setting : file.at("settings")) {
    std::vector<ComplexMatrix> effects;
    for (const auto& e : setting) effects.push_back(matrix_from_json(e));
    fam.effects.push_back(std::move(effects));
  }
  return fam;
}

ProtocolSpec parse_protocol_spec(const json& file) {
  require(file.contains("variant"), "protocol-spec requires variant");
  ProtocolSpec spec;
  std::string variant = file.at("variant").get<std::string>();
  if (variant == "general")
    spec.variant = ProtocolVariant::shared_entangled;
  else if (variant == "product-input")
    spec.variant = ProtocolVariant::product_inputs;
  else if (variant == "computational")
    spec.variant = ProtocolVariant::computational;
  else
    throw ParseError("unknown protocol variant: " + variant);

  spec.d_r = file.value("d_r", 1);
  spec.d_s = file.value("d_s", 1);
  if (spec.variant == ProtocolVariant::shared_entangled) {
    require(file.contains("shared_state") && file.contains("alice_channels") &&
                file.contains("bob_channels"),
            "general protocol requires shared_state and channel families");
    spec.shared_state = matrix_from_json(file.at("shared_state"));
    for (const auto& c : file.at("alice_channels"))
      spec.alice_input_channels.push_back(parse_choi(c));
    for (const auto& c : file.at("bob_channels"))
      spec.bob_input_channels.push_back(parse_choi(c));
  } else if (spec.variant == ProtocolVariant::product_inputs) {
    require(file.contains("alice_states") && file.contains("bob_states"),
            "product-input protocol requires input state families");
    for (const auto& m : file.at("alice_states"))
      spec.alice_input_states.push_back(matrix_from_json(m));
    for (const auto& m : file.at("bob_states"))
      spec.bob_input_states.push_back(matrix_from_json(m));
  }
  if (spec.variant != ProtocolVariant::computational) {
    require(file.contains("alice_measurements") && file.contains("bob_measurements"),
            "protocol requires measurement families");
    spec.alice_measurements = parse_povm_family(file.at("alice_measurements"));
    spec.bob_measurements = parse_povm_family(file.at("bob_measurements"));
  }
  return spec;
}

ConditionalDistribution distribution_from_file(const json& file) {
  std::string kind = kind_of(file);
  if (kind == "distribution") return parse_distribution(file);
  if (kind == "stochastic") {
    auto s = parse_stochastic(file);
    int rows = static_cast<int>(s.size());
    int cols = rows == 0 ? 0 : static_cast<int>(s[0].size());
    Scenario sc;
    if (file.contains("scenario")) {
      sc = parse_scenario(file.at("scenario"));
    } else {
      // square factorizations by default: (a,b) and (x,y) as equal splits
      auto split = [](int n) {
        for (int k = static_cast<int>(std::sqrt(static_cast<double>(n))); k >= 1; --k)
          if (n % k == 0) return std::pair<int, int>(k, n / k);
        return std::pair<int, int>(1, n);
      };
      auto [na, nb] = split(rows);
      auto [nx, ny] = split(cols);
      sc = Scenario{na, nb, nx, ny};
    }
    return ConditionalDistribution::from_stochastic(s, sc);
  }
  if (kind == "choi") {
    ChoiChannel ch = parse_choi(file);
    require(ch.is_bipartite(), "decoherent action requires a bipartite channel");
    auto s = decoherent_action(ch);
    return ConditionalDistribution::from_stochastic(
        s, Scenario{ch.d_a1(), ch.d_b1(), ch.d_a0(), ch.d_b0()});
  }
  throw ParseError("no distribution view for kind: " + kind);
}

json report_to_json(const CertificateReport& rep) {
  json j;
  j["test"] = rep.set_tested;
  j["verdict"] = to_string(rep.verdict);
  j["residual"] = rep.residual;
  j["tolerance"] = rep.tolerance;
  if (rep.bell_value != 0) j["bell_value"] = rep.bell_value;
  if (!rep.details.empty()) j["details"] = rep.details;
  if (!rep.dual.empty()) j["separating_functional"] = rep.dual;
  if (!rep.weights.empty()) j["weights"] = rep.weights;
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

}  // namespace qcert::io
