#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlcs/linear_operator.hpp"
#include "mlcs/wavelet.hpp"

namespace mlcs {

struct SolverConfig {
  double eta = 0.0;               ///< radius of the residual ball ||y - A z||_2 <= eta
  int max_iters = 5000;
  double tol_feasibility = 1e-6;  ///< relative to max(||y||, eta)
  double tol_objective = 1e-6;    ///< relative fixed-point residual
  double step = 0.0;              ///< soft-threshold step; 0 uses step_scale * max|P(0)|
  double step_scale = 1.0;        ///< relative auto step, P the projection onto the feasible set
  double relaxation = 1.0;        ///< Douglas-Rachford relaxation in (0, 2)
  std::uint64_t seed = 0;
  int trace_every = 1;            ///< 0 disables the trace

  /// Throws ParameterError for negative eta or nonpositive tolerances.
  void validate() const;
  nlohmann::json to_json() const;
  static SolverConfig from_json(const nlohmann::json& j);
};

struct TracePoint {
  int iteration = 0;
  double objective = 0.0;       ///< ||z_k||_1 of the current feasible iterate
  double best_objective = 0.0;  ///< best so far; nonincreasing
  double feasibility_gap = 0.0;
  double residual = 0.0;        ///< relative fixed-point residual
};

struct SolveResult {
  Signal coefficients;
  int iterations = 0;
  /// ||y - A c||_2 - eta, recomputed from the returned coefficients
  double final_feasibility_gap = 0.0;
  double objective = 0.0;
  bool converged = false;
  double step = 0.0;
  std::vector<TracePoint> trace;

  nlohmann::json diagnostics() const;
  /// Columns: iteration, objective, best_objective, feasibility_gap, residual.
  std::string trace_csv() const;
};

/// min ||z||_1 subject to ||y - A z||_2 <= eta.
///
/// Douglas-Rachford splitting between the l1 prox (complex soft threshold)
/// and the exact Euclidean projection onto the constraint set. The
/// projection is closed form when A A^* = nu I and goes through an
/// eigendecomposition of A A^* otherwise, which limits general operators to
/// m <= 4096 rows. Every iterate is feasible; the best one is returned.
/// Non-convergence is reported through the result, never thrown.
SolveResult bpdn_solve(const LinearOperator& op, const Signal& y, const SolverConfig& cfg = {});

/// Same, with A A^* supplied for operators without a tight row frame.
SolveResult bpdn_solve(const LinearOperator& op, const Signal& y, const SolverConfig& cfg,
                       const DenseMatrix& gram);

struct Recovery {
  SolveResult solve;
  Signal samples;   ///< Phi c_hat, unclamped
  Image2D display;  ///< real part clamped to [0, 1]
};

/// Solves in the coefficient domain and synthesizes the image x_hat = Phi c_hat.
/// `op` must act on wavelet coefficients of a side x side image.
Recovery recover_image(const LinearOperator& op, const Signal& y, const SolverConfig& cfg,
                       const WaveletKind& wavelet, Index side);

/// 100 ||x - x_hat||_2 / ||x||_2. Throws ParameterError when x = 0 and
/// DimensionError on a size mismatch.
double relative_error(const Signal& x, const Signal& xhat);
double relative_error(const Image2D& x, const Image2D& xhat);

}  // namespace mlcs
