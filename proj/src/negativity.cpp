#include "qcert/negativity.hpp"

#include <stdexcept>
#include <thread>

#include "qcert/catalog.hpp"
#include "qcert/tensor.hpp"

namespace qcert {

double negativity(const ComplexMatrix& rho,
                  const std::vector<int>& transposed_positions) {
  if (!rho.is_square()) throw std::invalid_argument("negativity: non-square state");
  if (rho.hermiticity_residual() > 1e-9 ||
      std::abs(rho.trace().real() - 1.0) > 1e-9)
    throw std::invalid_argument("negativity: input is not a unit-trace Hermitian state");
  ComplexMatrix pt = partial_transpose(rho, transposed_positions);
  HermEig eig = herm_eig(pt);
  double neg = 0;
  for (double v : eig.eigenvalues)
    if (v < -1e-12) neg -= v;  // below the eigensolver noise floor
  return neg;
}

std::vector<std::vector<double>> negativity_grid(int resolution, int jobs) {
  if (resolution < 2) throw std::invalid_argument("negativity_grid: resolution must be >= 2");
  int n = resolution;
  std::vector<std::vector<double>> grid(n, std::vector<double>(n, 0.0));
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  auto work = [&](int start, int stride) {
    for (int i = start; i < n; i += stride) {
      double p = static_cast<double>(i) / (n - 1);
      for (int j = 0; j < n; ++j) {
        double q = static_cast<double>(j) / (n - 1);
        grid[i][j] = negativity(catalog::damped_plus_state(p, q), {1});
      }
    }
  };
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(work, t, jobs);
    for (auto& th : threads) th.join();
  }
  return grid;
}

}  // namespace qcert
