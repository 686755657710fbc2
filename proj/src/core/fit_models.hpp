#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "least_squares.hpp"

namespace hfcqed::fit {

// Single Lorentzian peak (FWHM width convention):
//   y = offset + amplitude (w/2)^2 / ((x - center)^2 + (w/2)^2)
// Parameters: center, width, amplitude, offset.
double lorentzian(double x, double center, double fwhm, double amplitude, double offset);
FitResult lorentzian_peak(const Trace& trace);

// Stark-shifted qubit frequency vs cavity-drive frequency, for the qubit
// prepared in g or e. The drive-induced photon number is
//   nbar(w_d) = kappa amp2 / ((kappa/2)^2 + (w_d - (w_r -/+ chi))^2)
// (g-trace uses w_r - chi, e-trace uses w_r + chi) and
//   y = omega01 + 2 chi nbar(w_d).
// amp2 carries Hz units so that nbar is dimensionless.
struct CkpModel {
  double omega01_hz = 0.0;
  double chi_hz = 0.0;
  double kappa_hz = 0.0;
  double omega_r_hz = 0.0;
  double amp2_hz = 0.0;

  void validate() const;
};

double ckp_stark_curve(double omega_d_hz, const CkpModel& m, bool excited);

// Joint fit of the g- and e-prepared traces to a single parameter set.
// Parameters: omega01, chi, kappa, omega_r, amp2.
FitResult ckp_joint_fit(const Trace& trace_g, const Trace& trace_e, const CkpModel& init);

// Measurement-induced dephasing vs photon number,
//   Gamma_m(nbar) = 2 nbar kappa chi^2 / (chi^2 + (kappa/2)^2).
// The slope determines only the bracketed combination; with kappa fixed
// externally chi becomes identifiable (default mode). The joint (chi, kappa)
// mode is provided but is a sloppy fit; prefer the fixed-kappa mode.
FitResult gamma_m_fit(std::span<const std::pair<double, double>> nbar_gamma,
                      double kappa_fixed_hz);
FitResult gamma_m_fit_joint(std::span<const std::pair<double, double>> nbar_gamma,
                            double chi_init_hz, double kappa_init_hz);

enum class DecayKind { t1, echo, spin_lock };

// Single exponential a exp(-t/tau) + c. Parameters: time_constant, amplitude,
// offset. Flags the result when tau lies outside the sampled time range.
FitResult decay_fit(const Trace& trace, DecayKind kind);

// Damped cosine(s): exp(-t/t2_star) sum_k a_k cos(2 pi f_k t + phi_k) + c.
// Parameters: t2_star, f1, a1, phi1[, f2, a2, phi2], offset. Two-beat fits use
// seeded multi-start (deterministic; lowest residual wins, ties by start
// index).
FitResult ramsey_fit(const Trace& trace, int n_beats, std::uint64_t seed = 0);

struct BlobComponent {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  double sigma = 0.0;        // isotropic standard deviation
  double circularity = 1.0;  // sqrt(largest/smallest principal variance), >= 1
  std::size_t count = 0;     // points used after trimming
};

struct BlobFitResult {
  std::vector<BlobComponent> components;  // ordered by count, descending
  double sigma_common = 0.0;              // count-weighted isotropic sigma
};

// Robust 2D Gaussian component fit: deterministic two-means split (for two
// components) followed by a two-pass 4-sigma trim that excludes leakage tails.
BlobFitResult blob_fit(std::span<const Eigen::Vector2d> points, int n_components);

}  // namespace hfcqed::fit
