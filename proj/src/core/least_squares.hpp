#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hfcqed::fit {

// One measured curve: strictly increasing x, matching y, optional 1-sigma
// uncertainties (used to whiten residuals).
struct Trace {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;  // empty or same length as x

  void validate() const;
  std::size_t size() const { return x.size(); }
};

struct FitResult {
  std::vector<std::string> param_names;
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;  // ||r||_2 of the (whitened) residual vector
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> notes;

  double value(std::string_view name) const;
  double uncertainty(std::string_view name) const;
  bool has_note(std::string_view needle) const;
};

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Bounds unbounded(int n);
  bool contains(const Eigen::VectorXd& p) const;
};

struct LsqOptions {
  int max_iterations = 200;
  double step_tol = 1e-8;      // relative step size
  double gradient_tol = 1e-8;  // cosine of angle between residual and Jacobian columns
  double cost_tol = 1e-10;     // predicted relative cost reduction considered zero
  double initial_lambda = 1e-10;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ModelFn = std::function<double(double, const Eigen::VectorXd&)>;

// Damped (Levenberg-Marquardt) least squares with a numeric central-difference
// Jacobian and box bounds enforced by step clamping. Deterministic: identical
// inputs give identical iterates.
FitResult least_squares(const ResidualFn& residual, const Eigen::VectorXd& init,
                        const Bounds& bounds, std::vector<std::string> names,
                        const LsqOptions& opts = {});

// Convenience wrapper fitting a scalar model to one trace.
FitResult fit_trace(const ModelFn& model, const Trace& trace,
                    const Eigen::VectorXd& init, const Bounds& bounds,
                    std::vector<std::string> names, const LsqOptions& opts = {});

}  // namespace hfcqed::fit
