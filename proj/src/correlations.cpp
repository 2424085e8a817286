#include "qcert/correlations.hpp"

#include <cmath>
#include <stdexcept>

#include "qcert/lp.hpp"

namespace qcert {

long long Scenario::vertex_count() const {
  long long v = 1;
  for (int i = 0; i < nx; ++i) {
    v *= na;
    if (v > (1ll << 62) / (nb + 1)) return -1;  // overflow guard
  }
  for (int i = 0; i < ny; ++i) {
    v *= nb;
    if (v < 0) return -1;
  }
  return v;
}

ConditionalDistribution ConditionalDistribution::from_stochastic(
    const std::vector<std::vector<double>>& s, Scenario sc) {
  if (static_cast<int>(s.size()) != sc.na * sc.nb)
    throw std::invalid_argument("from_stochastic: row count mismatch");
  ConditionalDistribution p(sc);
  for (int a = 0; a < sc.na; ++a)
    for (int b = 0; b < sc.nb; ++b) {
      const auto& row = s[a * sc.nb + b];
      if (static_cast<int>(row.size()) != sc.nx * sc.ny)
        throw std::invalid_argument("from_stochastic: column count mismatch");
      for (int x = 0; x < sc.nx; ++x)
        for (int y = 0; y < sc.ny; ++y) p.at(a, b, x, y) = row[x * sc.ny + y];
    }
  return p;
}

std::vector<std::vector<double>> ConditionalDistribution::to_stochastic() const {
  std::vector<std::vector<double>> s(
      sc_.na * sc_.nb, std::vector<double>(sc_.nx * sc_.ny, 0.0));
  for (int a = 0; a < sc_.na; ++a)
    for (int b = 0; b < sc_.nb; ++b)
      for (int x = 0; x < sc_.nx; ++x)
        for (int y = 0; y < sc_.ny; ++y)
          s[a * sc_.nb + b][x * sc_.ny + y] = at(a, b, x, y);
  return s;
}

std::pair<double, double> ConditionalDistribution::validation_residuals() const {
  double norm_res = 0, min_entry = 0;
  for (int x = 0; x < sc_.nx; ++x)
    for (int y = 0; y < sc_.ny; ++y) {
      double sum = 0;
      for (int a = 0; a < sc_.na; ++a)
        for (int b = 0; b < sc_.nb; ++b) {
          double v = at(a, b, x, y);
          sum += v;
          min_entry = std::min(min_entry, v);
        }
      norm_res = std::max(norm_res, std::abs(sum - 1.0));
    }
  return {norm_res, min_entry};
}

double ConditionalDistribution::marginal_a(int a, int x, int y) const {
  double s = 0;
  for (int b = 0; b < sc_.nb; ++b) s += at(a, b, x, y);
  return s;
}

double ConditionalDistribution::marginal_b(int b, int x, int y) const {
  double s = 0;
  for (int a = 0; a < sc_.na; ++a) s += at(a, b, x, y);
  return s;
}

BellFunctional BellFunctional::chsh() {
  BellFunctional g(Scenario{2, 2, 2, 2});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          g.at(a, b, x, y) = ((a + b) % 2 ? -1.0 : 1.0) * ((x & y) != 0 ? -1.0 : 1.0);
  return g;
}

CertificateReport is_nonsignaling(const ConditionalDistribution& p, double tol) {
  const Scenario& sc = p.scenario();
  double res_a = 0, res_b = 0;
  for (int a = 0; a < sc.na; ++a)
    for (int x = 0; x < sc.nx; ++x) {
      double mean = 0;
      for (int y = 0; y < sc.ny; ++y) mean += p.marginal_a(a, x, y);
      mean /= sc.ny;
      for (int y = 0; y < sc.ny; ++y)
        res_a = std::max(res_a, std::abs(p.marginal_a(a, x, y) - mean));
    }
  for (int b = 0; b < sc.nb; ++b)
    for (int y = 0; y < sc.ny; ++y) {
      double mean = 0;
      for (int x = 0; x < sc.nx; ++x) mean += p.marginal_b(b, x, y);
      mean /= sc.nx;
      for (int x = 0; x < sc.nx; ++x)
        res_b = std::max(res_b, std::abs(p.marginal_b(b, x, y) - mean));
    }
  CertificateReport rep;
  rep.set_tested = "ns";
  rep.tolerance = tol;
  rep.residual = std::max(res_a, res_b);
  rep.details["alice_marginal_residual"] = res_a;
  rep.details["bob_marginal_residual"] = res_b;
  rep.verdict = rep.residual <= tol ? Verdict::inside : Verdict::outside;
  return rep;
}

namespace {

// Deterministic strategies enumerated as mixed-radix counters. Vertex index
// v = f-index * nb^ny + g-index, with f the Alice assignment (x -> a).
void vertex_assignments(const Scenario& sc, long long v, std::vector<int>& f,
                        std::vector<int>& g) {
  long long gcount = 1;
  for (int i = 0; i < sc.ny; ++i) gcount *= sc.nb;
  long long fi = v / gcount, gi = v % gcount;
  f.resize(sc.nx);
  g.resize(sc.ny);
  for (int x = sc.nx - 1; x >= 0; --x) {
    f[x] = static_cast<int>(fi % sc.na);
    fi /= sc.na;
  }
  for (int y = sc.ny - 1; y >= 0; --y) {
    g[y] = static_cast<int>(gi % sc.nb);
    gi /= sc.nb;
  }
}

}  // namespace

std::vector<ConditionalDistribution> local_vertices(const Scenario& sc,
                                                    long long cap) {
  long long count = sc.vertex_count();
  if (count < 0 || count > cap)
    throw std::invalid_argument("local_vertices: vertex cap exceeded");
  std::vector<ConditionalDistribution> verts;
  verts.reserve(static_cast<size_t>(count));
  std::vector<int> f, g;
  for (long long v = 0; v < count; ++v) {
    vertex_assignments(sc, v, f, g);
    ConditionalDistribution p(sc);
    for (int x = 0; x < sc.nx; ++x)
      for (int y = 0; y < sc.ny; ++y) p.at(f[x], g[y], x, y) = 1.0;
    verts.push_back(std::move(p));
  }
  return verts;
}

CertificateReport is_local(const ConditionalDistribution& p, long long cap) {
  const Scenario& sc = p.scenario();
  long long vcount = sc.vertex_count();
  if (vcount < 0 || vcount > cap)
    throw std::invalid_argument("is_local: vertex cap exceeded");
  int ne = sc.entries();
  int nv = static_cast<int>(vcount);

  LpProblem lp;
  lp.m = ne + 1;
  lp.n = nv;
  lp.a.assign(static_cast<size_t>(lp.m) * lp.n, 0.0);
  lp.b.assign(lp.m, 0.0);
  lp.c.assign(lp.n, 0.0);

  std::vector<int> f, g;
  for (int v = 0; v < nv; ++v) {
    vertex_assignments(sc, v, f, g);
    for (int x = 0; x < sc.nx; ++x)
      for (int y = 0; y < sc.ny; ++y) {
        size_t e = p.index(f[x], g[y], x, y);
        lp.at(static_cast<int>(e), v) = 1.0;
      }
    lp.at(ne, v) = 1.0;
  }
  for (int e = 0; e < ne; ++e) lp.b[e] = p.table()[e];
  lp.b[ne] = 1.0;

  LpResult r = solve_lp(lp);
  CertificateReport rep;
  rep.set_tested = "local";
  rep.tolerance = 1e-8;

  if (r.status == LpStatus::optimal) {
    rep.weights = r.x;
    // reconstruction residual
    double res = 0;
    for (int e = 0; e < ne; ++e) {
      double s = 0;
      for (int v = 0; v < nv; ++v) s += lp.at(e, v) * r.x[v];
      res = std::max(res, std::abs(s - p.table()[e]));
    }
    rep.residual = res;
    rep.verdict = res <= 1e-8 ? Verdict::inside : Verdict::inconclusive;
    return rep;
  }
  if (r.status == LpStatus::infeasible) {
    // Farkas dual -> separating Bell functional.
    BellFunctional gamma(sc);
    for (int e = 0; e < ne; ++e) gamma.coefficients()[e] = r.y[e];
    double val = bell_value(gamma, p);
    double bound = max_bell_local(gamma, cap);
    rep.dual = gamma.coefficients();
    rep.bell_value = val;
    rep.details["local_bound_of_dual"] = bound;
    rep.residual = r.infeasibility;
    rep.verdict = (val > bound + 1e-9) ? Verdict::outside : Verdict::inconclusive;
    return rep;
  }
  rep.verdict = Verdict::inconclusive;
  rep.note = "LP did not converge";
  return rep;
}

double bell_value(const BellFunctional& gamma, const ConditionalDistribution& p) {
  if (!(gamma.scenario() == p.scenario()))
    throw std::invalid_argument("bell_value: scenario mismatch");
  double s = 0;
  const auto& g = gamma.coefficients();
  const auto& t = p.table();
  for (size_t i = 0; i < t.size(); ++i) s += g[i] * t[i];
  return s;
}

double max_bell_local(const BellFunctional& gamma, long long cap) {
  const Scenario& sc = gamma.scenario();
  long long fcount = 1;
  for (int i = 0; i < sc.nx; ++i) fcount *= sc.na;
  if (sc.vertex_count() < 0 || sc.vertex_count() > cap)
    throw std::invalid_argument("max_bell_local: vertex cap exceeded");
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> f(sc.nx);
  for (long long fi = 0; fi < fcount; ++fi) {
    long long rem = fi;
    for (int x = sc.nx - 1; x >= 0; --x) {
      f[x] = static_cast<int>(rem % sc.na);
      rem /= sc.na;
    }
    // best Bob reply per y independently
    double total = 0;
    for (int y = 0; y < sc.ny; ++y) {
      double besty = -std::numeric_limits<double>::infinity();
      for (int b = 0; b < sc.nb; ++b) {
        double s = 0;
        for (int x = 0; x < sc.nx; ++x) s += gamma.at(f[x], b, x, y);
        besty = std::max(besty, s);
      }
      total += besty;
    }
    best = std::max(best, total);
  }
  return best;
}

double max_bell_ns(const BellFunctional& gamma) {
  const Scenario& sc = gamma.scenario();
  int ne = sc.entries();
  auto eidx = [&](int a, int b, int x, int y) {
    return ((a * sc.nb + b) * sc.nx + x) * sc.ny + y;
  };

  int m_norm = sc.nx * sc.ny;
  int m_nsa = sc.na * sc.nx * (sc.ny - 1);
  int m_nsb = sc.nb * sc.ny * (sc.nx - 1);
  LpProblem lp;
  lp.m = m_norm + m_nsa + m_nsb;
  lp.n = ne;
  lp.a.assign(static_cast<size_t>(lp.m) * lp.n, 0.0);
  lp.b.assign(lp.m, 0.0);
  lp.c.assign(lp.n, 0.0);
  for (int e = 0; e < ne; ++e) lp.c[e] = -gamma.coefficients()[e];

  int row = 0;
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y, ++row) {
      for (int a = 0; a < sc.na; ++a)
        for (int b = 0; b < sc.nb; ++b) lp.at(row, eidx(a, b, x, y)) = 1.0;
      lp.b[row] = 1.0;
    }
  for (int a = 0; a < sc.na; ++a)
    for (int x = 0; x < sc.nx; ++x)
      for (int y = 0; y + 1 < sc.ny; ++y, ++row)
        for (int b = 0; b < sc.nb; ++b) {
          lp.at(row, eidx(a, b, x, y)) += 1.0;
          lp.at(row, eidx(a, b, x, y + 1)) -= 1.0;
        }
  for (int b = 0; b < sc.nb; ++b)
    for (int y = 0; y < sc.ny; ++y)
      for (int x = 0; x + 1 < sc.nx; ++x, ++row)
        for (int a = 0; a < sc.na; ++a) {
          lp.at(row, eidx(a, b, x, y)) += 1.0;
          lp.at(row, eidx(a, b, x + 1, y)) -= 1.0;
        }

  LpResult r = solve_lp(lp);
  if (r.status != LpStatus::optimal)
    throw std::runtime_error("max_bell_ns: LP solve failed");
  return -r.objective;
}

}  // namespace qcert
