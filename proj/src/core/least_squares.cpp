#include "least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace hfcqed::fit {

void Trace::validate() const {
  require(!x.empty() && x.size() == y.size(), ErrorCode::invalid_argument,
          "trace: x and y must be non-empty and equal length");
  for (std::size_t k = 1; k < x.size(); ++k)
    require(x[k] > x[k - 1], ErrorCode::invalid_argument,
            "trace: x must be strictly increasing");
  if (!sigma.empty()) {
    require(sigma.size() == x.size(), ErrorCode::invalid_argument,
            "trace: sigma length mismatch");
    for (double s : sigma)
      require(s > 0.0, ErrorCode::invalid_argument, "trace: sigma must be > 0");
  }
}

double FitResult::value(std::string_view name) const {
  for (std::size_t k = 0; k < param_names.size(); ++k)
    if (param_names[k] == name) return params[static_cast<Eigen::Index>(k)];
  fail(ErrorCode::invalid_argument, "unknown fit parameter: " + std::string(name));
}

double FitResult::uncertainty(std::string_view name) const {
  for (std::size_t k = 0; k < param_names.size(); ++k)
    if (param_names[k] == name) {
      const auto i = static_cast<Eigen::Index>(k);
      return std::sqrt(std::max(0.0, covariance(i, i)));
    }
  fail(ErrorCode::invalid_argument, "unknown fit parameter: " + std::string(name));
}

bool FitResult::has_note(std::string_view needle) const {
  for (const auto& n : notes)
    if (n.find(needle) != std::string::npos) return true;
  return false;
}

Bounds Bounds::unbounded(int n) {
  Bounds b;
  b.lower = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  b.upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  return b;
}

bool Bounds::contains(const Eigen::VectorXd& p) const {
  for (Eigen::Index j = 0; j < p.size(); ++j)
    if (p[j] < lower[j] || p[j] > upper[j]) return false;
  return true;
}

namespace {

Eigen::VectorXd clamp_to(const Eigen::VectorXd& p, const Bounds& b) {
  Eigen::VectorXd q = p;
  for (Eigen::Index j = 0; j < q.size(); ++j)
    q[j] = std::clamp(q[j], b.lower[j], b.upper[j]);
  return q;
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& scale, Eigen::Index m) {
  const Eigen::Index n = p.size();
  Eigen::MatrixXd jac(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 6e-6 * std::max(std::abs(p[j]), scale[j]);
    Eigen::VectorXd pp = p, pm = p;
    pp[j] += h;
    pm[j] -= h;
    jac.col(j) = (f(pp) - f(pm)) / (2.0 * h);
  }
  return jac;
}

// MINPACK-style orthogonality measure: largest cosine between the residual
// vector and any Jacobian column.
double gradient_cosine(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r) {
  const double rn = r.norm();
  if (rn == 0.0) return 0.0;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < jac.cols(); ++j) {
    const double cn = jac.col(j).norm();
    if (cn == 0.0) continue;
    worst = std::max(worst, std::abs(jac.col(j).dot(r)) / (cn * rn));
  }
  return worst;
}

}  // namespace

FitResult least_squares(const ResidualFn& residual, const Eigen::VectorXd& init,
                        const Bounds& bounds, std::vector<std::string> names,
                        const LsqOptions& opts) {
  const Eigen::Index n = init.size();
  require(bounds.lower.size() == n && bounds.upper.size() == n,
          ErrorCode::invalid_argument, "least_squares: bounds size mismatch");
  require(bounds.contains(init), ErrorCode::invalid_argument,
          "least_squares: initial guess outside bounds");
  require(names.empty() || static_cast<Eigen::Index>(names.size()) == n,
          ErrorCode::invalid_argument, "least_squares: name count mismatch");

  FitResult res;
  res.param_names = std::move(names);

  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j)
    scale[j] = std::abs(init[j]) > 0.0 ? std::abs(init[j]) : 1.0;

  Eigen::VectorXd p = init;
  Eigen::VectorXd r = residual(p);
  require(r.allFinite(), ErrorCode::invalid_argument,
          "least_squares: residual not finite at initial guess");
  const Eigen::Index m = r.size();
  double cost = r.squaredNorm();

  double lambda = opts.initial_lambda;
  bool reported_singular = false;
  int accepted_steps = 0;
  int it = 0;

  Eigen::MatrixXd jac;
  for (; it < opts.max_iterations; ++it) {
    if (cost == 0.0) {
      res.converged = true;
      break;
    }
    jac = numeric_jacobian(residual, p, scale, m);
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (gradient_cosine(jac, r) <= opts.gradient_tol) {
      res.converged = true;
      break;
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const double diag_floor = 1e-12 * std::max(jtj.trace() / static_cast<double>(n), 1e-300);

    // undamped probe: when the (box-projected) Gauss-Newton correction falls
    // below the step tolerance, or predicts a negligible cost reduction, the
    // minimum is resolved to working precision
    {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index j = 0; j < n; ++j) a(j, j) += diag_floor;
      Eigen::LDLT<Eigen::MatrixXd> probe(a);
      if (probe.info() == Eigen::Success) {
        const Eigen::VectorXd gn = probe.solve(-grad);
        if (gn.allFinite()) {
          const Eigen::VectorXd projected = clamp_to(p + gn, bounds) - p;
          double rel = 0.0;
          for (Eigen::Index j = 0; j < n; ++j)
            rel = std::max(rel,
                           std::abs(projected[j]) / std::max(std::abs(p[j]), scale[j]));
          const double predicted_rel = std::abs(projected.dot(grad)) / cost;
          if (rel <= opts.step_tol || predicted_rel <= opts.cost_tol) {
            // polish with the probe step when it still helps
            const Eigen::VectorXd trial = clamp_to(p + gn, bounds);
            const Eigen::VectorXd r_trial = residual(trial);
            if (r_trial.allFinite() && r_trial.squaredNorm() < cost) {
              p = trial;
              r = r_trial;
              cost = r.squaredNorm();
            }
            res.converged = true;
            break;
          }
        }
      }
    }

    bool accepted = false;
    bool abort = false;
    while (!accepted && !abort) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index j = 0; j < n; ++j)
        a(j, j) += lambda * std::max(jtj(j, j), diag_floor);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
      Eigen::VectorXd step;
      bool ok = ldlt.info() == Eigen::Success;
      if (ok) {
        step = ldlt.solve(-grad);
        ok = step.allFinite();
      }
      if (!ok) {
        if (!reported_singular) {
          res.notes.push_back("singular normal equations; retrying with larger damping");
          reported_singular = true;
        }
        lambda *= 10.0;
        if (lambda > 1e14) {
          res.notes.push_back("damping saturated; aborting");
          abort = true;
        }
        continue;
      }

      const Eigen::VectorXd trial = clamp_to(p + step, bounds);
      const Eigen::VectorXd taken = trial - p;
      double rel = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        rel = std::max(rel, std::abs(taken[j]) / std::max(std::abs(p[j]), scale[j]));

      const Eigen::VectorXd r_trial = residual(trial);
      const double cost_trial = r_trial.allFinite()
                                    ? r_trial.squaredNorm()
                                    : std::numeric_limits<double>::infinity();
      if (cost_trial < cost) {
        p = trial;
        r = r_trial;
        cost = cost_trial;
        lambda = std::max(lambda / 3.0, 1e-14);
        accepted = true;
        ++accepted_steps;
        // an undamped step below the step tolerance: the minimum is resolved
        // (large lambda is excluded so damping cannot fake a small step)
        if (rel <= opts.step_tol && lambda <= 1e-2) res.converged = true;
      } else {
        lambda *= 4.0;
        if (lambda > 1e14) {
          res.notes.push_back("damping saturated; no further progress");
          abort = true;
        }
      }
    }
    if (res.converged || abort || !accepted) break;
  }

  if (it == opts.max_iterations)
    res.notes.push_back("maximum iterations reached");

  res.params = p;
  res.residual_norm = std::sqrt(cost);
  res.iterations = accepted_steps;

  // covariance = s^2 (J^T J)^-1; s^2 = cost / dof
  jac = numeric_jacobian(residual, p, scale, m);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::MatrixXd cov(n, n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(jtj);
  if (ldlt.info() == Eigen::Success) {
    cov = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  } else {
    // pseudo-inverse fallback for degenerate directions
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jtj);
    Eigen::VectorXd inv = es.eigenvalues();
    const double thresh = 1e-14 * std::max(inv.maxCoeff(), 1e-300);
    for (Eigen::Index j = 0; j < n; ++j)
      inv[j] = inv[j] > thresh ? 1.0 / inv[j] : 0.0;
    cov = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    res.notes.push_back("covariance from pseudo-inverse (degenerate fit)");
  }
  const double dof = static_cast<double>(std::max<Eigen::Index>(m - n, 1));
  cov *= cost / dof;
  res.covariance = 0.5 * (cov + cov.transpose());
  if (!res.covariance.allFinite()) {
    res.covariance = Eigen::MatrixXd::Zero(n, n);
    res.notes.push_back("covariance not finite; zeroed");
  }
  return res;
}

FitResult fit_trace(const ModelFn& model, const Trace& trace,
                    const Eigen::VectorXd& init, const Bounds& bounds,
                    std::vector<std::string> names, const LsqOptions& opts) {
  trace.validate();
  const auto m = trace.size();
  ResidualFn fn = [&model, &trace, m](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
      const double w = trace.sigma.empty() ? 1.0 : trace.sigma[k];
      r[static_cast<Eigen::Index>(k)] = (model(trace.x[k], p) - trace.y[k]) / w;
    }
    return r;
  };
  return least_squares(fn, init, bounds, std::move(names), opts);
}

}  // namespace hfcqed::fit
