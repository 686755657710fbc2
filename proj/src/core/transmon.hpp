#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hfcqed {

// Transmon circuit parameters. Energies are stored as ordinary frequencies
// (Hz, i.e. E/h); angular factors enter only inside formulas that need them.
struct TransmonParams {
  double ej_hz = 0.0;  // Josephson energy / h
  double ec_hz = 0.0;  // charging energy / h
  double ng = 0.0;     // offset charge (period 1)
  int ncut = 20;       // charge basis spans -ncut..+ncut

  void validate() const;
};

// Exact eigensystem of 4 E_C (n - n_g)^2 - E_J cos(phi) in the charge basis.
// Energies are ground-referenced and ascending; charge_elements holds
// |<i| n |j>| for the returned levels.
class Spectrum {
 public:
  Spectrum(TransmonParams params, std::vector<double> energies,
           Eigen::MatrixXd abs_charge_elements, std::vector<std::string> warnings)
      : params_(params),
        energies_(std::move(energies)),
        charge_elements_(std::move(abs_charge_elements)),
        warnings_(std::move(warnings)) {}

  const TransmonParams& params() const { return params_; }
  const std::vector<double>& energies() const { return energies_; }
  double energy(int level) const;
  int num_levels() const { return static_cast<int>(energies_.size()); }
  double charge_element(int i, int j) const;  // |<i| n |j>|
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  TransmonParams params_;
  std::vector<double> energies_;
  Eigen::MatrixXd charge_elements_;
  std::vector<std::string> warnings_;
};

struct TransitionSet {
  double f01_hz = 0.0;
  double f12_hz = 0.0;
  double f23_hz = 0.0;

  void validate() const;  // transmon ordering: 0 < f23 < f12 < f01
};

struct EjEcFit {
  TransmonParams params;
  double residual_norm = 0.0;  // Hz
  bool converged = false;
  int iterations = 0;
};

// Diagonalizes with automatic n_cut doubling until the lowest `min_levels`
// eigenvalues are stable to 1e-9 relative to f01. Returns at least 16 levels.
Spectrum diagonalize(const TransmonParams& params);

TransitionSet transitions(const Spectrum& spectrum);

// Least-squares inversion of (f01, f12, f23) -> (E_J, E_C) at fixed offset
// charge. Round-trips transitions(diagonalize(.)) to optimizer tolerance.
EjEcFit fit_ej_ec(const TransitionSet& measured, double ng);

}  // namespace hfcqed
