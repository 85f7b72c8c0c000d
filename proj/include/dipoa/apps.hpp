#ifndef DIPOA_APPS_HPP_
#define DIPOA_APPS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dipoa/driver.hpp"
#include "dipoa/problem.hpp"

namespace dipoa {

// Distributed sparse logistic regression. Gaussian rows with columns
// standardized to zero mean and unit l2 norm, planted coefficients with
// kappa_true nonzeros drawn from U[-10, 10], labels round(sigmoid(theta'x))
// (half rounds up) mapped to {-1, +1}. Rows are split evenly over N nodes and
// every node carries the ridge lambda/2 ||theta||^2, so m_i = lambda. The
// feasible box is |theta_c| <= sqrt(2 p_total log 2 / (N lambda)), which
// contains every point whose objective does not exceed the value at zero.
// kappa is set to kappa_true.
ScpInstance GenDslr(int N, int p_total, int n, int kappa_true, double lambda, std::uint64_t seed,
                    Vector* theta_true = nullptr);

// Label rule used by GenDslr.
double DslrLabel(double score);

// Sparse QCQP. Q_i = L L' + 0.1 I with L entries kept with probability
// density, m_i = smallest eigenvalue of Q_i. Each of the m constraints is
// 0.5 x'Px + c'x + r with P PSD and r < 0, so x = 0 is strictly feasible.
// Omega is the box [-5, 5]^n and kappa is ceil(n / 2).
ScpInstance GenSqcqp(int N, int n, int m, double density, std::uint64_t seed);

// ceil(pct * n / 100), at least 1.
int KappaFromPercent(double pct, int n);

struct BenchRow {
  std::string app;
  int N = 0;
  int K = 0;
  int n = 0;
  int kappa = 0;
  int samples = 0;  // p_total for dslr, 0 otherwise
  std::uint64_t seed = 0;
  std::string status;  // solver status or "error"
  double objective = kInf;
  double rel_gap = kInf;
  int total_cuts = 0;
  int iters = 0;
  double time_primal_s = 0.0;
  double time_master_s = 0.0;
  double time_total_s = 0.0;
  std::string error;
};

// Scenario JSON {"app": "dslr"|"sqcqp", "grid": {param: [values], ...},
// "config": {...}}. Every combination of grid values is one cell. Grid keys:
//   dslr:  N, K, p_total, n, kappa_true, kappa, kappa_pct, lambda, seed
//   sqcqp: N, K, n, m, density, kappa, kappa_pct, seed
// Missing keys take the generator defaults. A failing cell is recorded with
// status "error" and the sweep continues.
std::vector<BenchRow> RunBenchmark(const std::string& scenario_json);

std::string BenchmarkCsv(const std::vector<BenchRow>& rows, bool include_timing = true);
std::string BenchmarkJson(const std::vector<BenchRow>& rows, bool include_timing = true);

}  // namespace dipoa

#endif  // DIPOA_APPS_HPP_
