#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fit_models.hpp"

namespace hfcqed {

struct IqShot {
  double i = 0.0;
  double q = 0.0;
};

enum class StateLabel { g, e, f, h, equilibrium };

std::string to_string(StateLabel label);
StateLabel state_label_from_string(const std::string& s);

struct ShotSet {
  std::vector<IqShot> shots;
  StateLabel label = StateLabel::equilibrium;

  void validate() const;
};

// Two-Gaussian pointer-state description: centers mu_g / mu_e with a common
// isotropic sigma. theta_eg is the angle between the vectors mu_e and mu_g
// as seen from the IQ origin.
struct BlobModel {
  Eigen::Vector2d mu_g = Eigen::Vector2d::Zero();
  Eigen::Vector2d mu_e = Eigen::Vector2d::Zero();
  double sigma = 0.0;

  void validate() const;
  double theta_eg() const;  // radians, in [0, pi]
};

// SNR = |mu_e - mu_g|^2 / (2 sigma^2)
double snr_empirical(const BlobModel& blob);

// SNR = 8 eta kappa nbar tau sin^2(theta_eg / 2); kappa enters in angular
// units, so the /2pi input is converted internally (2 pi kappa tau).
double snr_theory(double eta, double kappa_hz, double nbar, double tau_s, double theta_eg_rad);

struct EfficiencyResult {
  double eta = 0.0;
  double t_sys_k = 0.0;
  bool unphysical = false;  // eta above the 0.5 quantum limit
};

// Equates empirical and theoretical SNR and solves for eta; converts to the
// system noise temperature T_sys = h omega_r / (k_B eta).
EfficiencyResult efficiency(const BlobModel& blob, double kappa_hz, double nbar,
                            double tau_s, double omega_r_hz);

// Counts vs angle measured counterclockwise from the negative x-axis about
// `origin`; bin k spans [k, k+1) * 2pi/bins.
struct AngularHistogram {
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  std::vector<std::uint64_t> counts;

  int bins() const { return static_cast<int>(counts.size()); }
  double bin_width() const;
  double bin_center(int k) const;
  std::uint64_t total() const;
};

double angle_from_neg_x(const Eigen::Vector2d& point, const Eigen::Vector2d& origin);

AngularHistogram angular_histogram(const ShotSet& shots, const Eigen::Vector2d& origin,
                                   int bins);

struct AssignmentErrors {
  double p_notg_given_g = 0.0;
  double p_g_given_notg = 0.0;
  double epsilon_assignment = 0.0;
};

// Bins with center above the threshold angle count as "not g".
AssignmentErrors assignment_errors(const AngularHistogram& hist_g,
                                   const AngularHistogram& hist_notg,
                                   double threshold_rad);

// Threshold (a bin edge) minimizing epsilon_assignment on calibration data.
double optimal_threshold(const AngularHistogram& hist_g, const AngularHistogram& hist_notg);

// Monte Carlo single-shot generator. Each shot: sample the prepared state
// from `populations` (remainder is g); excited-state shots decay with
// probability 1 - exp(-tau/T1) to a uniform point on the mu_e -> mu_g
// segment (pointer average over a uniform decay time); any shot relocates to
// leakage_center with probability leakage_fraction; isotropic Gaussian noise
// of width sigma is added last. Deterministic per (seed, shot index).
struct ReadoutScenario {
  BlobModel blob;
  double t1_s = 0.0;                 // <= 0 disables decay
  double tau_s = 0.0;
  double leakage_fraction = 0.0;
  Eigen::Vector2d leakage_center = Eigen::Vector2d::Zero();
  std::map<StateLabel, double> populations;  // only g and e are simulated
  std::uint64_t seed = 0;

  void validate() const;
};

ShotSet simulate_shots(const ReadoutScenario& scenario, std::size_t n);

// First-readout acceptance gate: shot passes when it lands within
// radius_sigmas * sigma of mu_g.
std::vector<bool> postselect_ground(const ShotSet& first_readout, const BlobModel& blob,
                                    double radius_sigmas = 1.0);

ShotSet filter_shots(const ShotSet& shots, const std::vector<bool>& keep);

// Builds the common-sigma blob model from separately prepared g and e shot
// sets (robust single-component fit on each; leakage tails are trimmed).
struct BlobBuildResult {
  BlobModel blob;
  double sigma_g = 0.0;
  double sigma_e = 0.0;
  double circularity_g = 1.0;
  double circularity_e = 1.0;
};

BlobBuildResult blob_from_labeled(const ShotSet& g_shots, const ShotSet& e_shots);

}  // namespace hfcqed
