#ifndef QCERT_CORRELATIONS_HPP
#define QCERT_CORRELATIONS_HPP

#include <cstdint>
#include <vector>

#include "qcert/report.hpp"

namespace qcert {

//=========================================================================
// Conditional distributions p(a,b|x,y) and Bell functionals
//=========================================================================

struct Scenario {
  int na = 2, nb = 2, nx = 2, ny = 2;
  int entries() const { return na * nb * nx * ny; }
  long long vertex_count() const;
  bool operator==(const Scenario&) const = default;
};

class ConditionalDistribution {
 public:
  ConditionalDistribution() = default;
  explicit ConditionalDistribution(Scenario sc)
      : sc_(sc), p_(static_cast<size_t>(sc.entries()), 0.0) {}

  const Scenario& scenario() const { return sc_; }
  double& at(int a, int b, int x, int y) { return p_[index(a, b, x, y)]; }
  double at(int a, int b, int x, int y) const { return p_[index(a, b, x, y)]; }
  const std::vector<double>& table() const { return p_; }
  std::vector<double>& table() { return p_; }
  size_t index(int a, int b, int x, int y) const {
    return static_cast<size_t>(((a * sc_.nb + b) * sc_.nx + x)) * sc_.ny + y;
  }

  // Stochastic-matrix view: rows (a,b), columns (x,y).
  static ConditionalDistribution from_stochastic(
      const std::vector<std::vector<double>>& s, Scenario sc);
  std::vector<std::vector<double>> to_stochastic() const;

  // (max |column sum - 1|, most negative entry)
  std::pair<double, double> validation_residuals() const;

  // Alice marginal p(a|x,y) and Bob marginal p(b|x,y).
  double marginal_a(int a, int x, int y) const;
  double marginal_b(int b, int x, int y) const;

 private:
  Scenario sc_;
  std::vector<double> p_;
};

class BellFunctional {
 public:
  explicit BellFunctional(Scenario sc)
      : sc_(sc), g_(static_cast<size_t>(sc.entries()), 0.0) {}

  const Scenario& scenario() const { return sc_; }
  double& at(int a, int b, int x, int y) { return g_[index(a, b, x, y)]; }
  double at(int a, int b, int x, int y) const { return g_[index(a, b, x, y)]; }
  const std::vector<double>& coefficients() const { return g_; }
  std::vector<double>& coefficients() { return g_; }
  size_t index(int a, int b, int x, int y) const {
    return static_cast<size_t>(((a * sc_.nb + b) * sc_.nx + x)) * sc_.ny + y;
  }

  // gamma_{ab,xy} = (-1)^{a+b} (-1)^{xy} on the 2222 scenario.
  static BellFunctional chsh();

 private:
  Scenario sc_;
  std::vector<double> g_;
};

//=========================================================================
// Membership tests and optimization over the classical polytopes
//=========================================================================

// Marginal consistency across settings (deviation from the
// setting-averaged marginal).
CertificateReport is_nonsignaling(const ConditionalDistribution& p,
                                  double tol = 1e-8);

// All deterministic product strategies a = f(x), b = g(y), lexicographic.
std::vector<ConditionalDistribution> local_vertices(
    const Scenario& sc, long long cap = 1000000);

// LP membership in the local polytope (vertex-weight formulation).
// Inside verdicts carry the convex weights; outside verdicts carry a
// separating Bell functional recovered from LP duality.
CertificateReport is_local(const ConditionalDistribution& p,
                           long long cap = 1000000);

double bell_value(const BellFunctional& gamma, const ConditionalDistribution& p);

// Exact maximum over the local vertices.
double max_bell_local(const BellFunctional& gamma, long long cap = 1000000);

// LP maximum over the nonsignaling polytope.
double max_bell_ns(const BellFunctional& gamma);

}  // namespace qcert

#endif
