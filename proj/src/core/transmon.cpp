#include "transmon.hpp"

#include <cmath>
#include <utility>

#include "eigh.hpp"
#include "errors.hpp"
#include "least_squares.hpp"

namespace hfcqed {

namespace {

constexpr int kReturnedLevels = 16;
constexpr double kConvergenceRel = 1e-9;  // vs f01, under n_cut doubling
constexpr int kMaxNcut = 320;

struct EigSystem {
  Eigen::VectorXd energies;  // ground-referenced
  Eigen::MatrixXd vectors;   // charge-basis columns
  int ncut;
};

EigSystem solve_charge_basis(double ej, double ec, double ng, int ncut) {
  const int dim = 2 * ncut + 1;
  Eigen::VectorXd diag(dim);
  for (int k = 0; k < dim; ++k) {
    const double n = static_cast<double>(k - ncut);
    diag[k] = 4.0 * ec * (n - ng) * (n - ng);
  }
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(dim - 1, -ej / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  eigh_tridiagonal(diag, sub, solver);
  EigSystem sys;
  sys.energies = solver.eigenvalues().array() - solver.eigenvalues()[0];
  sys.vectors = solver.eigenvectors();
  sys.ncut = ncut;
  return sys;
}

bool levels_converged(const EigSystem& a, const EigSystem& b, int nlev) {
  const double f01 = b.energies[1];
  for (int k = 0; k < nlev; ++k)
    if (std::abs(a.energies[k] - b.energies[k]) > kConvergenceRel * f01) return false;
  return true;
}

}  // namespace

void TransmonParams::validate() const {
  require(std::isfinite(ej_hz) && ej_hz > 0.0, ErrorCode::invalid_argument,
          "transmon: e_j must be > 0");
  require(std::isfinite(ec_hz) && ec_hz > 0.0, ErrorCode::invalid_argument,
          "transmon: e_c must be > 0");
  require(std::isfinite(ng), ErrorCode::invalid_argument, "transmon: n_g must be finite");
  require(ncut >= 5, ErrorCode::invalid_argument, "transmon: n_cut must be >= 5");
}

double Spectrum::energy(int level) const {
  require(level >= 0 && level < num_levels(), ErrorCode::invalid_argument,
          "spectrum: level index out of range");
  return energies_[static_cast<std::size_t>(level)];
}

double Spectrum::charge_element(int i, int j) const {
  require(i >= 0 && i < num_levels() && j >= 0 && j < num_levels(),
          ErrorCode::invalid_argument, "spectrum: charge element index out of range");
  return charge_elements_(i, j);
}

void TransitionSet::validate() const {
  require(f01_hz > 0.0 && f12_hz > 0.0 && f23_hz > 0.0, ErrorCode::invalid_argument,
          "transitions must be positive");
  require(f12_hz < f01_hz && f23_hz < f12_hz, ErrorCode::invalid_argument,
          "transitions must satisfy transmon ordering f23 < f12 < f01");
}

Spectrum diagonalize(const TransmonParams& params) {
  params.validate();
  std::vector<std::string> warnings;
  if (params.ej_hz / params.ec_hz < 1.0)
    warnings.push_back("e_j/e_c < 1: outside the transmon regime; convergence "
                       "guarantees do not apply");

  int ncut = params.ncut;
  EigSystem coarse = solve_charge_basis(params.ej_hz, params.ec_hz, params.ng, ncut);
  EigSystem fine = solve_charge_basis(params.ej_hz, params.ec_hz, params.ng, 2 * ncut);
  while (!levels_converged(coarse, fine, kReturnedLevels)) {
    ncut *= 2;
    require(ncut <= kMaxNcut, ErrorCode::not_converged,
            "diagonalize: eigenvalues not converged at n_cut cap (pathological parameters)");
    coarse = std::move(fine);
    fine = solve_charge_basis(params.ej_hz, params.ec_hz, params.ng, 2 * ncut);
  }

  const int dim = 2 * fine.ncut + 1;
  const int nlev = std::min(kReturnedLevels, dim);
  std::vector<double> energies(fine.energies.data(), fine.energies.data() + nlev);

  // |<i| n |j>| from the converged eigenvectors
  Eigen::VectorXd charge(dim);
  for (int k = 0; k < dim; ++k) charge[k] = static_cast<double>(k - fine.ncut);
  const Eigen::MatrixXd v = fine.vectors.leftCols(nlev);
  Eigen::MatrixXd nmat = v.transpose() * charge.asDiagonal() * v;
  Eigen::MatrixXd abs_n = nmat.cwiseAbs();

  TransmonParams used = params;
  used.ncut = fine.ncut;
  return Spectrum(used, std::move(energies), std::move(abs_n), std::move(warnings));
}

TransitionSet transitions(const Spectrum& spectrum) {
  require(spectrum.num_levels() >= 4, ErrorCode::invalid_argument,
          "transitions: spectrum must have at least 4 levels");
  TransitionSet t;
  t.f01_hz = spectrum.energy(1) - spectrum.energy(0);
  t.f12_hz = spectrum.energy(2) - spectrum.energy(1);
  t.f23_hz = spectrum.energy(3) - spectrum.energy(2);
  return t;
}

EjEcFit fit_ej_ec(const TransitionSet& measured, double ng) {
  measured.validate();

  // asymptotic seed: anharmonicity ~ -E_C, f01 ~ sqrt(8 E_J E_C) - E_C
  const double ec0 = std::max(measured.f01_hz - measured.f12_hz, 1e-4 * measured.f01_hz);
  const double ej0 = (measured.f01_hz + ec0) * (measured.f01_hz + ec0) / (8.0 * ec0);

  fit::ResidualFn residual = [&measured, ng](const Eigen::VectorXd& p) {
    TransmonParams tp;
    tp.ej_hz = p[0];
    tp.ec_hz = p[1];
    tp.ng = ng;
    const TransitionSet model = transitions(diagonalize(tp));
    Eigen::VectorXd r(3);
    r[0] = model.f01_hz - measured.f01_hz;
    r[1] = model.f12_hz - measured.f12_hz;
    r[2] = model.f23_hz - measured.f23_hz;
    return r;
  };

  Eigen::VectorXd init(2);
  init << ej0, ec0;
  fit::Bounds bounds = fit::Bounds::unbounded(2);
  bounds.lower << 1e-6 * measured.f01_hz, 1e-6 * measured.f01_hz;

  fit::LsqOptions opts;
  opts.max_iterations = 100;
  const fit::FitResult r = fit::least_squares(residual, init, bounds, {"e_j", "e_c"}, opts);
  require(r.converged, ErrorCode::not_converged, "fit_ej_ec: optimizer did not converge");
  // residuals far above numerical noise signal a non-transmon input
  require(r.residual_norm < 1e-3 * measured.f01_hz, ErrorCode::domain,
          "fit_ej_ec: residual too large; transitions are not transmon-like");

  EjEcFit out;
  out.params.ej_hz = r.params[0];
  out.params.ec_hz = r.params[1];
  out.params.ng = ng;
  out.residual_norm = r.residual_norm;
  out.converged = r.converged;
  out.iterations = r.iterations;
  return out;
}

}  // namespace hfcqed
