#include "cavity.hpp"

#include <cmath>
#include <string>

#include "constants.hpp"
#include "errors.hpp"

namespace hfcqed {

void RectangularCavity::validate() const {
  require(a_m > 0.0 && b_m > 0.0 && z_m > 0.0, ErrorCode::invalid_argument,
          "cavity: dimensions must be > 0");
  require(z_m <= a_m && z_m <= b_m, ErrorCode::invalid_argument,
          "cavity: z must be the smallest dimension");
}

void CouplingModel::validate() const {
  require(g0_hz > 0.0 && omega0_hz > 0.0, ErrorCode::invalid_argument,
          "coupling model: g0 and omega0 must be > 0");
}

void DispersiveSystem::validate() const {
  require(kappa_hz > 0.0, ErrorCode::invalid_argument, "dispersive system: kappa must be > 0");
  require(omega_r_hz > 0.0, ErrorCode::invalid_argument,
          "dispersive system: omega_r must be > 0");
  require(std::abs(chi_hz) < 1e3 * kappa_hz, ErrorCode::invalid_argument,
          "dispersive system: |chi| implausibly large vs kappa");
}

double te110_frequency(const RectangularCavity& cavity) {
  cavity.validate();
  const double inv2 = 1.0 / (cavity.a_m * cavity.a_m) + 1.0 / (cavity.b_m * cavity.b_m);
  return 0.5 * constants::speed_of_light * std::sqrt(inv2);
}

double scaled_coupling(const CouplingModel& model, double omega_r_hz) {
  model.validate();
  require(omega_r_hz > 0.0, ErrorCode::invalid_argument, "scaled_coupling: omega_r must be > 0");
  return model.g0_hz * std::pow(omega_r_hz / model.omega0_hz, 1.5);
}

namespace {

struct PoleHit {
  bool hit = false;
  int i = 0, j = 0;
  double transition_hz = 0.0;
};

PoleHit nearest_pole(const Spectrum& s, double omega_r, int n_levels, double guard) {
  PoleHit best;
  double best_dist = guard;
  for (int j = 0; j <= 1; ++j) {
    for (int i = 0; i < n_levels; ++i) {
      if (i == j) continue;
      const double wij = std::abs(s.energy(i) - s.energy(j));
      const double d = std::abs(wij - omega_r);
      if (d < best_dist) {
        best_dist = d;
        best = {true, i, j, wij};
      }
    }
  }
  return best;
}

double chi_sum(const Spectrum& s, double g, double omega_r, int n_levels) {
  double chi_j[2] = {0.0, 0.0};
  for (int j = 0; j <= 1; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n_levels; ++i) {
      if (i == j) continue;
      const double wji = s.energy(j) - s.energy(i);
      const double nij = s.charge_element(i, j);
      acc += wji * nij * nij / (wji * wji - omega_r * omega_r);
    }
    chi_j[j] = 2.0 * g * g * acc;
  }
  return 0.5 * (chi_j[1] - chi_j[0]);
}

}  // namespace

double chi_perturbative(const Spectrum& spectrum, double g_hz, double omega_r_hz,
                        int n_levels, double guard_hz) {
  require(omega_r_hz > 0.0, ErrorCode::invalid_argument, "chi: omega_r must be > 0");
  require(n_levels >= 2, ErrorCode::invalid_argument, "chi: need at least 2 levels");
  require(n_levels + 3 <= spectrum.num_levels(), ErrorCode::invalid_argument,
          "chi: spectrum has too few levels for the requested sum (+3 convergence check)");

  const PoleHit pole = nearest_pole(spectrum, omega_r_hz, n_levels, guard_hz);
  if (pole.hit)
    fail(ErrorCode::pole_proximity,
         "chi: omega_r within guard band of transition " + std::to_string(pole.j) + "->" +
             std::to_string(pole.i) + " at " + std::to_string(pole.transition_hz) +
             " Hz (accidental resonance)");

  const double chi = chi_sum(spectrum, g_hz, omega_r_hz, n_levels);
  const double chi_more = chi_sum(spectrum, g_hz, omega_r_hz, n_levels + 3);
  if (std::abs(chi_more - chi) > 0.01 * std::abs(chi_more))
    fail(ErrorCode::not_converged,
         "chi: level sum not converged at n_levels=" + std::to_string(n_levels));
  return chi;
}

double solve_g_from_chi(const Spectrum& spectrum, double chi_target_hz,
                        double omega_r_hz, int n_levels, double guard_hz) {
  // chi is exactly quadratic in g; evaluate at a reference coupling and scale
  const double g_ref = 1e6;
  const double chi_ref = chi_perturbative(spectrum, g_ref, omega_r_hz, n_levels, guard_hz);
  require(chi_ref != 0.0, ErrorCode::singular, "solve_g_from_chi: chi vanishes at this omega_r");
  const double ratio = chi_target_hz / chi_ref;
  require(ratio > 0.0, ErrorCode::invalid_argument,
          "solve_g_from_chi: chi_target sign inconsistent with the dispersive sum "
          "at this detuning");
  return g_ref * std::sqrt(ratio);
}

std::vector<ChiScanPoint> chi_scan(const Spectrum& spectrum, const CouplingModel& model,
                                   const std::vector<double>& omega_grid_hz,
                                   int n_levels, double guard_hz) {
  model.validate();
  require(!omega_grid_hz.empty(), ErrorCode::invalid_argument, "chi_scan: empty grid");
  for (std::size_t k = 1; k < omega_grid_hz.size(); ++k)
    require(omega_grid_hz[k] > omega_grid_hz[k - 1], ErrorCode::invalid_argument,
            "chi_scan: grid must be strictly increasing");

  std::vector<ChiScanPoint> out;
  out.reserve(omega_grid_hz.size());
  for (const double omega : omega_grid_hz) {
    ChiScanPoint pt;
    pt.omega_r_hz = omega;
    if (nearest_pole(spectrum, omega, n_levels, guard_hz).hit) {
      pt.pole_flag = true;
    } else {
      const double g = scaled_coupling(model, omega);
      pt.chi_hz = chi_perturbative(spectrum, g, omega, n_levels, guard_hz);
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace hfcqed
