#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "qcert/catalog.hpp"
#include "qcert/io.hpp"
#include "qcert/protocols.hpp"

using namespace qcert;
using nlohmann::json;

namespace {

std::string binary() {
  const char* env = std::getenv("QCERT_BIN");
  REQUIRE(env != nullptr);
  return env;
}

int run(const std::string& args) {
  std::string cmd = binary() + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const std::string& path) { return io::load_json_file(path); }

}  // namespace

TEST_CASE("cli validate") {
  SUBCASE("identity channel passes all checks") {
    io::save_json_file("cli_id.json",
                       io::choi_file(catalog::bipartite_unitary_channel(
                           ComplexMatrix::identity(4))));
    CHECK(run("validate cli_id.json --output cli_rep.json") == 0);
    json rep = load("cli_rep.json");
    for (const auto& r : rep.at("results"))
      CHECK(r.at("verdict").get<std::string>() == "inside");
  }

  SUBCASE("C-NOT fails the nonsignaling check with a residual") {
    io::save_json_file("cli_cnot.json", io::choi_file(catalog::cnot_channel()));
    CHECK(run("validate cli_cnot.json --output cli_rep.json") == 1);
    json rep = load("cli_rep.json");
    bool saw_qns = false;
    for (const auto& r : rep.at("results"))
      if (r.at("test") == "qns") {
        saw_qns = true;
        CHECK(r.at("verdict") == "outside");
        CHECK(r.at("residual").get<double>() > 0.4);
      }
    CHECK(saw_qns);
  }

  SUBCASE("the sign Gram validates as a Gram matrix") {
    io::save_json_file("cli_gram.json", io::gram_file(catalog::bell_sign_gram()));
    CHECK(run("validate cli_gram.json --output cli_rep.json") == 0);
  }

  SUBCASE("parse failures exit with code 2") {
    std::ofstream("cli_bad.json") << "{ not json";
    CHECK(run("validate cli_bad.json") == 2);
    std::ofstream("cli_bad2.json") << "{\"kind\": \"nonsense\"}";
    CHECK(run("validate cli_bad2.json") == 2);
  }
}

TEST_CASE("cli decohere") {
  SUBCASE("identity channel") {
    io::save_json_file("cli_id.json",
                       io::choi_file(catalog::bipartite_unitary_channel(
                           ComplexMatrix::identity(4))));
    CHECK(run("decohere cli_id.json --output cli_s.json") == 0);
    auto s = io::parse_stochastic(load("cli_s.json"));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(s[i][j] == (i == j ? 1.0 : 0.0));
  }

  SUBCASE("Bell-basis unitary gives the two-way flip mixture") {
    io::save_json_file(
        "cli_bell.json",
        io::choi_file(catalog::bipartite_unitary_channel(
            catalog::bell_basis_unitary(catalog::BitOrder::first_major))));
    CHECK(run("decohere cli_bell.json --output cli_s.json") == 0);
    auto s = io::parse_stochastic(load("cli_s.json"));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(s[i][j] == doctest::Approx((i == j || i + j == 3) ? 0.5 : 0.0));
    double col = column_sum_residual(s);
    CHECK(col < 1e-12);
  }
}

TEST_CASE("cli certify") {
  io::save_json_file("cli_pr.json", io::stochastic_file(catalog::pr_box()));

  SUBCASE("PR box: outside local, inside ns") {
    CHECK(run("certify cli_pr.json --set local --output cli_rep.json") == 1);
    json rep = load("cli_rep.json");
    CHECK(rep.at("results")[0].at("verdict") == "outside");
    CHECK(run("certify cli_pr.json --set ns") == 0);
    CHECK(run("certify cli_pr.json --set npa1") == 1);
  }

  SUBCASE("Tsirelson-point mixture is npa1-feasible") {
    double pstar = (1.0 + 1.0 / std::sqrt(2.0)) / 2.0;
    auto r = catalog::pr_box();
    auto sfl = catalog::pr_box_flipped();
    std::vector<std::vector<double>> mix(4, std::vector<double>(4, 0));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        mix[i][j] = pstar * r[i][j] + (1 - pstar) * sfl[i][j];
    io::save_json_file("cli_mix.json", io::stochastic_file(mix));
    CHECK(run("certify cli_mix.json --set npa1 --output cli_rep.json") == 0);
    json rep = load("cli_rep.json");
    double margin = rep.at("results")[0].at("details").at("margin").get<double>();
    CHECK(std::abs(margin) < 1e-5);
  }

  SUBCASE("channels are decohered before certification") {
    io::save_json_file("cli_id.json",
                       io::choi_file(catalog::bipartite_unitary_channel(
                           ComplexMatrix::identity(4))));
    CHECK(run("certify cli_id.json --set local") == 0);
  }
}

TEST_CASE("cli witness") {
  io::save_json_file("cli_id.json",
                     io::choi_file(catalog::bipartite_unitary_channel(
                         ComplexMatrix::identity(4))));
  // identity channel: decoherent action is the identity box, CHSH value -2,
  // witness value 2 - (-2) = 4 > 0
  CHECK(run("witness cli_id.json --functional chsh --set L --output cli_rep.json") == 0);
  json rep = load("cli_rep.json");
  const auto& res = rep.at("results")[0];
  CHECK(res.at("details").at("trace_value").get<double>() == doctest::Approx(4.0));
  CHECK(res.at("details").at("route_consistency").get<double>() < 1e-9);

  // a channel whose decoherent action is the PR box violates the L witness
  QuantumStrategy tsirelson = tsirelson_strategy();
  ChoiChannel lose = lose_from_strategy(tsirelson);
  io::save_json_file("cli_lose.json", io::choi_file(lose));
  CHECK(run("witness cli_lose.json --functional chsh --set L --output cli_rep.json") == 1);
  json rep2 = load("cli_rep.json");
  CHECK(rep2.at("results")[0].at("details").at("trace_value").get<double>() ==
        doctest::Approx(2.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-7));
  CHECK(run("witness cli_lose.json --functional chsh --set Q") == 0);
}

TEST_CASE("cli noise-sweep") {
  CHECK(run("noise-sweep --resolution 2 --output cli_sweep.csv") == 0);
  std::string csv = slurp("cli_sweep.csv");
  CHECK(csv.substr(0, 17) == "p,q,negativity\n0,");
  // corners: (0,0) 0, (0,1) 0, (1,0) 0.5, (1,1) 0
  CHECK(csv == "p,q,negativity\n0,0,0\n0,1,0\n1,0,0.5\n1,1,0\n");

  SUBCASE("byte-stable under re-run") {
    CHECK(run("noise-sweep --resolution 7 --output cli_a.csv") == 0);
    CHECK(run("noise-sweep --resolution 7 --output cli_b.csv") == 0);
    CHECK(slurp("cli_a.csv") == slurp("cli_b.csv"));
  }

  SUBCASE("resolution below 2 rejected") {
    CHECK(run("noise-sweep --resolution 1") == 2);
  }
}

TEST_CASE("cli cross-section") {
  CHECK(run("cross-section --resolution 5 --output cli_cross.csv") == 0);
  std::string csv = slurp("cli_cross.csv");
  CHECK(csv.substr(0, 11) == "s,t,region\n");
  // corners of the triangle
  CHECK(csv.find("0,0,local\n") != std::string::npos);
  CHECK(csv.find("1,0,ns\n") != std::string::npos);
  CHECK(csv.find("0,1,ns\n") != std::string::npos);
  // only triangle points are emitted
  CHECK(csv.find("1,1,") == std::string::npos);
}

TEST_CASE("cli simulate") {
  json spec;
  spec["format"] = "qcert-matrix/1";
  spec["kind"] = "protocol-spec";
  spec["variant"] = "computational";
  spec["channel"] = io::choi_file(
      catalog::bipartite_unitary_channel(ComplexMatrix::identity(4)));
  io::save_json_file("cli_spec.json", spec);
  CHECK(run("simulate cli_spec.json --output cli_dist.json") == 0);
  ConditionalDistribution p = io::parse_distribution(load("cli_dist.json"));
  CHECK(p.at(0, 0, 0, 0) == 1.0);
  CHECK(p.at(1, 1, 1, 1) == 1.0);
}

TEST_CASE("cli seesaw deterministic under seed") {
  GramMatrix g(catalog::bell_sign_gram());
  ChoiChannel ch = dephase_channel_memoryless(
      catalog::bipartite_unitary_channel(ComplexMatrix::identity(4)), g,
      GramMatrix::all_ones(4));
  io::save_json_file("cli_ch.json", io::choi_file(ch));

  json inputs;
  inputs["format"] = "qcert-matrix/1";
  inputs["kind"] = "input-family";
  inputs["d_r"] = 1;
  inputs["d_s"] = 1;
  json plus = io::matrix_to_json(catalog::pure_state({1, 1}));
  inputs["alice_states"] = json::array({plus, plus});
  inputs["bob_states"] = json::array({plus, plus});
  io::save_json_file("cli_inputs.json", inputs);

  CHECK(run("seesaw cli_ch.json cli_inputs.json --functional chsh --restarts 4 "
            "--seed 5 --output cli_rep1.json") == 0);
  CHECK(run("seesaw cli_ch.json cli_inputs.json --functional chsh --restarts 4 "
            "--seed 5 --output cli_rep2.json") == 0);
  json r1 = load("cli_rep1.json"), r2 = load("cli_rep2.json");
  double v1 = r1.at("results")[0].at("details").at("value").get<double>();
  double v2 = r2.at("results")[0].at("details").at("value").get<double>();
  CHECK(v1 == v2);
  CHECK(v1 > 2.0 * std::sqrt(2.0) - 1e-3);
  CHECK(r1.at("seed").get<uint64_t>() == 5);
}

TEST_CASE("cli lose-from-strategy") {
  io::save_json_file("cli_strategy.json", io::strategy_file(tsirelson_strategy()));
  CHECK(run("lose-from-strategy cli_strategy.json --output cli_lose2.json") == 0);
  CHECK(run("validate cli_lose2.json") == 0);
  CHECK(run("decohere cli_lose2.json --output cli_ls.json") == 0);
  auto s = io::parse_stochastic(load("cli_ls.json"));
  ConditionalDistribution p =
      ConditionalDistribution::from_stochastic(s, Scenario{2, 2, 2, 2});
  CHECK(bell_value(BellFunctional::chsh(), p) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("cli file round-trip is exact for decimal entries") {
  ComplexMatrix m(2, 2);
  m(0, 0) = cplx(0.1234567890123456, -7.25);
  m(0, 1) = cplx(1.0 / 3.0, 2e-17);
  m(1, 0) = cplx(-0.875, 0.3333333333333333);
  m(1, 1) = cplx(17, 0);
  io::save_json_file("cli_round.json", io::state_file(m));
  ComplexMatrix back = io::matrix_from_json(load("cli_round.json"));
  CHECK(back.max_abs_diff(m) == 0.0);
}
