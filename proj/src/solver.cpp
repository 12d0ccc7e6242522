#include "mlcs/solver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mlcs/sensing.hpp"

namespace mlcs {
namespace {

double l1_norm(const Signal& z) { return z.cwiseAbs().sum(); }

void soft_threshold(Signal& v, double t) {
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    v[i] = a > t ? v[i] * ((a - t) / a) : Complex{0.0};
  }
}

// Euclidean projection onto {z : ||A z - y|| <= eta}.
class BallProjector {
 public:
  BallProjector(const LinearOperator& op, const Signal& y, double eta, std::optional<double> nu,
                const DenseMatrix* gram)
      : op_(op), y_(y), eta_(eta) {
    if (nu) {
      nu_ = *nu;
      return;
    }
    DenseMatrix g;
    if (gram) {
      g = *gram;
    } else {
      if (op.rows() > 4096) throw SizeError("solver needs a tight frame or m <= 4096 rows");
      g.resize(op.rows(), op.rows());
      Signal e = Signal::Zero(op.rows());
      for (Index i = 0; i < op.rows(); ++i) {
        e[i] = 1.0;
        g.col(i) = op.apply(op.adjoint(e));
        e[i] = 0.0;
      }
    }
    if (g.rows() != op.rows() || g.cols() != op.rows()) throw DimensionError("Gram matrix has the wrong size");
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(0.5 * (g + g.adjoint()));
    basis_ = eig.eigenvectors();
    lambda_ = eig.eigenvalues();
    const double floor = 1e-12 * std::max(lambda_.maxCoeff(), 1e-300);
    for (Index i = 0; i < lambda_.size(); ++i)
      if (lambda_[i] < floor) lambda_[i] = 0.0;
  }

  Signal operator()(const Signal& z) const {
    const Signal r = op_.apply(z) - y_;
    const double rn = r.norm();
    if (rn <= eta_) return z;
    if (nu_ > 0.0) return z - op_.adjoint(r * ((1.0 - eta_ / rn) / nu_));

    const Signal rt = basis_.adjoint() * r;
    Signal tt(rt.size());
    if (eta_ == 0.0) {
      for (Index i = 0; i < rt.size(); ++i) tt[i] = lambda_[i] > 0.0 ? rt[i] / lambda_[i] : Complex{0.0};
    } else {
      // shrink factor 1/(1 + mu lambda_i) on each residual component
      auto residual_norm = [&](double mu) {
        double s = 0.0;
        for (Index i = 0; i < rt.size(); ++i) s += std::norm(rt[i]) / std::pow(1.0 + mu * lambda_[i], 2);
        return std::sqrt(s);
      };
      double lo = 0.0, hi = 1.0;
      while (residual_norm(hi) > eta_ && hi < 1e300) hi *= 4.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual_norm(mid) > eta_ ? lo : hi) = mid;
      }
      const double mu = hi;
      for (Index i = 0; i < rt.size(); ++i) tt[i] = mu * rt[i] / (1.0 + mu * lambda_[i]);
    }
    return z - op_.adjoint(basis_ * tt);
  }

 private:
  const LinearOperator& op_;
  const Signal& y_;
  double eta_;
  double nu_ = 0.0;
  DenseMatrix basis_;
  RealVector lambda_;
};

SolveResult solve_with(const LinearOperator& op, const Signal& y, const SolverConfig& cfg,
                       const BallProjector& project) {
  SolveResult out;
  const double y_norm = y.norm();
  const double feas_scale = std::max({y_norm, cfg.eta, 1e-300});
  auto gap_of = [&](const Signal& z) { return (y - op.apply(z)).norm() - cfg.eta; };

  if (cfg.eta >= y_norm) {
    out.coefficients = Signal::Zero(op.cols());
    out.final_feasibility_gap = gap_of(out.coefficients);
    out.converged = true;
    return out;
  }

  Signal u = project(Signal::Zero(op.cols()));
  const double scale = u.cwiseAbs().maxCoeff();
  out.step = cfg.step > 0.0 ? cfg.step : cfg.step_scale * scale;

  Signal best = u;
  double best_obj = l1_norm(u);
  Signal z, w;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    z = project(u);
    w = 2.0 * z - u;
    soft_threshold(w, out.step);
    const Signal diff = w - z;
    u += cfg.relaxation * diff;

    const double obj = l1_norm(z);
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
    const double residual = diff.norm() / std::max(z.norm(), 1e-300);
    out.iterations = it;
    const bool done = residual <= cfg.tol_objective;
    if (cfg.trace_every > 0 && (it % cfg.trace_every == 0 || done || it == cfg.max_iters)) {
      out.trace.push_back({it, obj, best_obj, std::nan(""), residual});
    }
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.coefficients = std::move(best);
  out.objective = l1_norm(out.coefficients);
  out.final_feasibility_gap = gap_of(out.coefficients);
  out.converged = out.converged && out.final_feasibility_gap <= cfg.tol_feasibility * feas_scale;
  if (!out.trace.empty()) out.trace.back().feasibility_gap = out.final_feasibility_gap;
  return out;
}

void check_inputs(const LinearOperator& op, const Signal& y, const SolverConfig& cfg) {
  cfg.validate();
  if (y.size() != op.rows()) throw DimensionError("measurement vector length does not match operator rows");
}

}  // namespace

void SolverConfig::validate() const {
  if (!(eta >= 0.0)) throw ParameterError("eta must be nonnegative");
  if (!(tol_feasibility > 0.0) || !(tol_objective > 0.0)) throw ParameterError("tolerances must be positive");
  if (max_iters < 1) throw ParameterError("max_iters must be positive");
  if (!(relaxation > 0.0 && relaxation < 2.0)) throw ParameterError("relaxation must lie in (0, 2)");
  if (step < 0.0) throw ParameterError("step must be nonnegative");
  if (!(step_scale > 0.0)) throw ParameterError("step_scale must be positive");
}

nlohmann::json SolverConfig::to_json() const {
  return {{"eta", eta},
          {"max_iters", max_iters},
          {"tol_feasibility", tol_feasibility},
          {"tol_objective", tol_objective},
          {"step", step},
          {"step_scale", step_scale},
          {"relaxation", relaxation},
          {"seed", seed},
          {"trace_every", trace_every}};
}

SolverConfig SolverConfig::from_json(const nlohmann::json& j) {
  SolverConfig c;
  c.eta = j.value("eta", c.eta);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.tol_feasibility = j.value("tol_feasibility", c.tol_feasibility);
  c.tol_objective = j.value("tol_objective", c.tol_objective);
  c.step = j.value("step", c.step);
  c.step_scale = j.value("step_scale", c.step_scale);
  c.relaxation = j.value("relaxation", c.relaxation);
  c.seed = j.value("seed", c.seed);
  c.trace_every = j.value("trace_every", c.trace_every);
  c.validate();
  return c;
}

nlohmann::json SolveResult::diagnostics() const {
  return {{"iterations", iterations},
          {"final_feasibility_gap", final_feasibility_gap},
          {"objective", objective},
          {"converged", converged},
          {"step", step}};
}

std::string SolveResult::trace_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,objective,best_objective,feasibility_gap,residual\n";
  for (const auto& t : trace) {
    out << t.iteration << ',' << t.objective << ',' << t.best_objective << ',' << t.feasibility_gap << ','
        << t.residual << '\n';
  }
  return out.str();
}

SolveResult bpdn_solve(const LinearOperator& op, const Signal& y, const SolverConfig& cfg) {
  check_inputs(op, y, cfg);
  if (cfg.eta >= y.norm()) return solve_with(op, y, cfg, BallProjector(op, y, cfg.eta, 1.0, nullptr));
  if (auto nu = op.row_frame_bound()) return solve_with(op, y, cfg, BallProjector(op, y, cfg.eta, nu, nullptr));
  if (const auto* s = dynamic_cast<const SensingOperator*>(&op)) {
    if (auto g = s->gram()) return bpdn_solve(op, y, cfg, *g);
  }
  return solve_with(op, y, cfg, BallProjector(op, y, cfg.eta, std::nullopt, nullptr));
}

SolveResult bpdn_solve(const LinearOperator& op, const Signal& y, const SolverConfig& cfg, const DenseMatrix& gram) {
  check_inputs(op, y, cfg);
  return solve_with(op, y, cfg, BallProjector(op, y, cfg.eta, std::nullopt, &gram));
}

Recovery recover_image(const LinearOperator& op, const Signal& y, const SolverConfig& cfg,
                       const WaveletKind& wavelet, Index side) {
  if (op.cols() != side * side) throw DimensionError("operator does not act on a side x side image");
  Recovery rec;
  rec.solve = bpdn_solve(op, y, cfg);
  rec.samples = Wavelet2D(side, wavelet).inverse(rec.solve.coefficients);
  rec.display = Image2D::from_signal(rec.samples, side, side);
  rec.display.pixels = rec.display.pixels.cwiseMax(0.0).cwiseMin(1.0);
  return rec;
}

double relative_error(const Signal& x, const Signal& xhat) {
  if (x.size() != xhat.size()) throw DimensionError("relative error needs equal lengths");
  const double nx = x.norm();
  if (nx == 0.0) throw ParameterError("relative error undefined for a zero reference");
  return 100.0 * (x - xhat).norm() / nx;
}

double relative_error(const Image2D& x, const Image2D& xhat) {
  if (x.height() != xhat.height() || x.width() != xhat.width()) {
    throw DimensionError("relative error needs equal image shapes");
  }
  return relative_error(x.flatten(), xhat.flatten());
}

}  // namespace mlcs
