#ifndef QCERT_REPORT_HPP
#define QCERT_REPORT_HPP

#include <map>
#include <string>
#include <vector>

namespace qcert {

enum class Verdict { inside, outside, inconclusive };

const char* to_string(Verdict v);

// Outcome of a membership test. Every verdict carries the numbers it was
// decided on; booleans alone are never reported.
struct CertificateReport {
  std::string set_tested;
  Verdict verdict = Verdict::inconclusive;
  // residual for equality-style checks, margin for separations
  double residual = 0;
  double tolerance = 0;
  // achieved Bell value where applicable (separating functional, see-saw)
  double bell_value = 0;
  // named auxiliary numbers (min eigenvalue, per-condition residuals, ...)
  std::map<std::string, double> details;
  // separating functional / decomposition weights when produced
  std::vector<double> dual;
  std::vector<double> weights;
  std::string note;

  bool inside() const { return verdict == Verdict::inside; }
};

}  // namespace qcert

#endif
