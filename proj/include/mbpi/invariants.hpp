#pragma once

#include <string>
#include <vector>

#include "mbpi/kernel.hpp"
#include "mbpi/laws.hpp"

namespace mbpi {

// Limit generating functions. All of them need a closed-form law pair: a
// truncated law has finite variance and the defining integrals diverge.

// ln U(s) = int_s^1 g/f du, gamma > 0, |s| < 1 or s = 1.
cplx log_U(const ModelSpec& model, cplx s, double rel_tol = 1e-12);
cplx compute_U(const ModelSpec& model, cplx s, double rel_tol = 1e-12);

// ln B(s) = int_s^1 [g/f + |gamma| (1-u)^{-(1+|gamma|)}] du; gamma < 0, mu > 0, C_L = |gamma|.
cplx log_B(const ModelSpec& model, cplx s, double rel_tol = 1e-12);
double compute_B(const ModelSpec& model, double s, double rel_tol = 1e-12);
// ln pi(s) = (1-s)^{-|gamma|} + ln B(s)
cplx log_pi(const ModelSpec& model, cplx s, double rel_tol = 1e-12);
double compute_pi(const ModelSpec& model, double s, double rel_tol = 1e-12);

enum class MeasureKind { kDistributionU, kMeasurePi };
const char* to_string(MeasureKind kind);

struct InvariantMeasure {
  MeasureKind kind = MeasureKind::kDistributionU;
  std::vector<double> coefficients;
  double radius = 0.0;
  int samples = 0;
  double aliasing_bound = 0.0;
  double roundoff_bound = 0.0;
  double max_modulus = 0.0;
  double sample_accuracy = 0.0;

  double sum() const;
  // aliasing + roundoff bound for entry j
  double entry_bound(int j) const;
};

InvariantMeasure extract_measure(const ModelSpec& model, MeasureKind kind, const InversionSettings& settings = {},
                                 int threads = 1);

struct InvarianceReport {
  double tau = 0.0;
  int i_max = 0;  // rows used
  int j_max = 0;  // residuals reported for j <= j_max
  std::vector<double> residuals;
  double max_residual = 0.0;
  int argmax = 0;
  // sum_{i > i_max} m_i p_{i,j}(tau): rows beyond i_max are bounded through the
  // surviving original lineages, X(tau) >= Bin(i, R(tau;0)).
  double tail_bound = 0.0;
  double row_aliasing_bound = 0.0;
  double row_roundoff_bound = 0.0;
  double measure_bound = 0.0;  // largest entry bound of m_j, j <= j_max
};

// residual_j = |sum_{i <= i_max} m_i p_ij(tau) - m_j|, j <= j_max. The measure
// must carry coefficients up to i_max; any further coefficients enter the tail
// bound. j_max defaults to i_max / 2.
InvarianceReport check_invariance(const InvariantMeasure& measure, const ModelSpec& model, double tau, int i_max,
                                  int j_max = -1, const InversionSettings& rows = {.j_out = 256, .radius = 0.9, .samples = 1024},
                                  const KernelOptions& opts = {}, int threads = 1);

struct RatioTable {
  std::vector<double> t_grid;
  int j_max = 0;
  std::vector<std::vector<double>> ratios;  // ratios[k][j] = p_0j(t_k) / p_00(t_k)
  std::vector<double> p00;
  std::vector<double> limits;               // u_j/u_0 or pi_j/pi_0
  // |ratio - limit| non-increasing along the grid for every j
  bool monotone = false;
};

RatioTable ratio_limits(const ModelSpec& model, int j_max, const std::vector<double>& t_grid,
                        const InversionSettings& settings = {.j_out = 64, .radius = 0.5, .samples = 256},
                        const KernelOptions& opts = {}, int threads = 1);

}  // namespace mbpi
