#pragma once

#include <vector>

#include "transmon.hpp"

namespace hfcqed {

struct RectangularCavity {
  double a_m = 0.0;  // larger in-plane dimension
  double b_m = 0.0;  // larger in-plane dimension
  double z_m = 0.0;  // smaller dimension

  void validate() const;
};

// g^2(omega_r) = g0^2 (omega_r / omega0)^3
struct CouplingModel {
  double g0_hz = 0.0;
  double omega0_hz = 0.0;

  void validate() const;
};

// Parameter bundle shared by the rate and fit formulas. All entries are
// ordinary frequencies (/2pi units); chi is signed, 2*chi is the full
// state-dependent cavity splitting.
struct DispersiveSystem {
  double chi_hz = 0.0;
  double kappa_hz = 0.0;
  double omega_r_hz = 0.0;
  double g_hz = 0.0;
  double omega01_hz = 0.0;

  void validate() const;
};

// Bare TE110 mode of a rectangular cavity (z << a, b): (c/2) sqrt(1/a^2 + 1/b^2).
double te110_frequency(const RectangularCavity& cavity);

double scaled_coupling(const CouplingModel& model, double omega_r_hz);

inline constexpr double kDefaultPoleGuardHz = 50e6;
inline constexpr int kDefaultChiLevels = 12;

// Second-order dispersive shift:
//   chi_j = 2 g^2 sum_{i != j} (w_j - w_i) |n_ij|^2 / ((w_j - w_i)^2 - w_r^2)
//   chi   = (chi_1 - chi_0) / 2
// Homogeneous of degree 1 in frequency, so /2pi inputs give a /2pi result.
// Throws when omega_r falls within guard_hz of any |w_ij| in the sum.
double chi_perturbative(const Spectrum& spectrum, double g_hz, double omega_r_hz,
                        int n_levels = kDefaultChiLevels,
                        double guard_hz = kDefaultPoleGuardHz);

// Positive g with chi_perturbative(spectrum, g, omega_r) == chi_target
// (exact inverse of the quadratic g dependence).
double solve_g_from_chi(const Spectrum& spectrum, double chi_target_hz,
                        double omega_r_hz, int n_levels = kDefaultChiLevels,
                        double guard_hz = kDefaultPoleGuardHz);

struct ChiScanPoint {
  double omega_r_hz = 0.0;
  double chi_hz = 0.0;     // meaningful only when !pole_flag
  bool pole_flag = false;
};

// Per-point chi with g^2 scaled per the coupling model; points inside pole
// guard bands are flagged instead of evaluated.
std::vector<ChiScanPoint> chi_scan(const Spectrum& spectrum, const CouplingModel& model,
                                   const std::vector<double>& omega_grid_hz,
                                   int n_levels = kDefaultChiLevels,
                                   double guard_hz = kDefaultPoleGuardHz);

}  // namespace hfcqed
