#pragma once

#include <Eigen/Dense>
#include <vector>

#include "transmon.hpp"

namespace hfcqed {

// Classical monochromatic charge drive: amplitude * cos(2 pi omega_d t) * n.
// The amplitude plays the role of 2 g sqrt(nbar), as an ordinary frequency.
struct DriveConfig {
  double amplitude_hz = 0.0;
  double omega_d_hz = 0.0;

  void validate() const;
};

inline constexpr int kDefaultFloquetSteps = 512;

// One-period time-ordered propagator from piecewise-constant midpoint sampling
// of the drive, with the static ground energy subtracted so quasienergies are
// referenced like the static spectrum. Fixed step count; no convergence check.
Eigen::MatrixXcd period_propagator_fixed(const TransmonParams& params,
                                         const DriveConfig& drive, int n_steps);

struct FloquetModes {
  std::vector<double> quasienergies;  // Hz, canonical window [-omega_d/2, omega_d/2)
  Eigen::MatrixXcd vectors;           // orthonormal eigenbasis, column k <-> quasienergies[k]
  Eigen::MatrixXcd propagator;
  double unitarity_defect = 0.0;
  int n_steps_used = 0;
  bool degenerate_pair = false;  // eigenphase spacing below 1e-12 omega_d somewhere
};

// Propagator with automatic step doubling until no eigenphase moves by more
// than 1e-8 omega_d, then Schur-based quasienergies and modes.
FloquetModes floquet_modes(const TransmonParams& params, const DriveConfig& drive,
                           int n_steps = kDefaultFloquetSteps);

// Eigenphases of a one-period unitary mapped to quasienergies (sorted
// ascending, canonical window).
std::vector<double> quasienergies(const Eigen::MatrixXcd& propagator, double omega_d_hz);

// Drive amplitude whose quasienergy 0-1 shift magnitude equals target_stark
// (monotone bracketing + bisection; 1% tolerance).
double calibrate_drive_amplitude(const TransmonParams& params, double omega_d_hz,
                                 double target_stark_hz);

// The paper's map between cavity photon number and classical drive amplitude.
double amplitude_from_nbar(double g_hz, double nbar);

// Quasienergy branches tracked over an offset-charge grid by adiabatic
// continuation (maximal overlap with the previous grid point's vectors).
// Branch b follows the static level b of the first grid point. Confidence is
// the winning squared overlap; values below 0.5 mark ambiguous assignments
// (anticrossing regions).
struct QuasienergySweep {
  TransmonParams params;  // ng field is overwritten per grid point
  DriveConfig drive;
  std::vector<double> ng_grid;
  Eigen::MatrixXd branches;    // (n_branches, n_grid), Hz
  Eigen::MatrixXd confidence;  // (n_branches, n_grid)
  int n_branches = 0;
};

QuasienergySweep sweep_ng(const TransmonParams& params_template, const DriveConfig& drive,
                          const std::vector<double>& ng_grid, int n_branches = 13);

struct AnticrossingGap {
  double gap_hz = 0.0;
  double ng_at_min = 0.0;
  bool interior_minimum = false;   // minimum away from the grid boundary
  double confidence_at_min = 1.0;  // branch hybridization marker (~0.5 at a crossing)
};

// Minimal circular |eps_i - eps_j| over the sweep grid, locally refined by a
// factor of 10 around the coarse minimum.
AnticrossingGap anticrossing_gap(const QuasienergySweep& sweep, int branch_i, int branch_j);

// Circular distance between two quasienergies in the modular window.
double quasienergy_distance(double a_hz, double b_hz, double omega_d_hz);

}  // namespace hfcqed
