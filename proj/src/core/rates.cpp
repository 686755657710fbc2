#include "rates.hpp"

#include <cmath>

#include "constants.hpp"
#include "errors.hpp"

namespace hfcqed {

double bose_einstein(double f_hz, double temperature_k, bool* underflow) {
  require(f_hz > 0.0, ErrorCode::invalid_argument, "bose_einstein: f must be > 0");
  require(temperature_k > 0.0, ErrorCode::invalid_argument, "bose_einstein: T must be > 0");
  if (underflow) *underflow = false;
  const double x = constants::planck * f_hz / (constants::boltzmann * temperature_k);
  if (x > 700.0) {
    if (underflow) *underflow = true;
    return 0.0;
  }
  return 1.0 / std::expm1(x);
}

double stark_shift(double chi_hz, double nbar) { return 2.0 * chi_hz * nbar; }

double meas_dephasing_rate(double chi_hz, double kappa_hz, double nbar) {
  require(kappa_hz > 0.0, ErrorCode::invalid_argument, "meas_dephasing_rate: kappa must be > 0");
  const double c2 = chi_hz * chi_hz;
  const double k2 = 0.25 * kappa_hz * kappa_hz;
  return 2.0 * nbar * kappa_hz * c2 / (c2 + k2);
}

double thermal_dephasing_rate(double chi_hz, double kappa_hz, double nbar) {
  require(kappa_hz > 0.0, ErrorCode::invalid_argument,
          "thermal_dephasing_rate: kappa must be > 0");
  const double c2 = chi_hz * chi_hz;
  return 4.0 * nbar * kappa_hz * c2 / (4.0 * c2 + kappa_hz * kappa_hz);
}

double spin_locking_psd(double chi_hz, double kappa_hz, double nbar, double omega_hz) {
  require(kappa_hz > 0.0, ErrorCode::invalid_argument, "spin_locking_psd: kappa must be > 0");
  require(omega_hz >= 0.0, ErrorCode::invalid_argument, "spin_locking_psd: omega must be >= 0");
  const double c2 = chi_hz * chi_hz;
  const double k2 = kappa_hz * kappa_hz;
  const double prefactor = 8.0 * nbar * c2 * k2 / (k2 + 4.0 * c2);
  return prefactor * kappa_hz / (omega_hz * omega_hz + k2);
}

double nbar_from_spin_locking(double t_rho_s, double t1_s, double chi_hz,
                              double kappa_hz, double omega_hz) {
  require(t_rho_s > 0.0 && t1_s > 0.0, ErrorCode::invalid_argument,
          "nbar_from_spin_locking: times must be > 0");
  const double s_per_s = 2.0 * (1.0 / t_rho_s - 0.5 / t1_s);  // 1/s units
  require(s_per_s >= 0.0, ErrorCode::domain,
          "nbar_from_spin_locking: 1/T_rho < 1/(2 T_1) gives a negative noise estimate");
  const double s_hz = s_per_s / constants::two_pi;  // to /2pi units
  const double per_photon = spin_locking_psd(chi_hz, kappa_hz, 1.0, omega_hz);
  require(per_photon > 0.0, ErrorCode::singular,
          "nbar_from_spin_locking: PSD vanishes for these parameters");
  return s_hz / per_photon;
}

double purcell_rate(double kappa_hz, double g_hz, double omega_r_hz, double omega_hz) {
  require(kappa_hz > 0.0 && g_hz > 0.0 && omega_r_hz > 0.0 && omega_hz > 0.0,
          ErrorCode::invalid_argument, "purcell_rate: all arguments must be > 0");
  const double a = g_hz / omega_r_hz;
  const double b = omega_hz / omega_r_hz;
  return kappa_hz * a * a * b * b * b * b * b;
}

double pure_dephasing_time(double t1_s, double t2e_s, double tolerance) {
  require(t1_s > 0.0 && t2e_s > 0.0, ErrorCode::invalid_argument,
          "pure_dephasing_time: times must be > 0");
  const double bound = 2.0 * t1_s;
  require(t2e_s <= bound * (1.0 + tolerance), ErrorCode::domain,
          "pure_dephasing_time: T_2E > 2 T_1 beyond tolerance (unphysical input)");
  if (t2e_s >= bound) return kInfiniteTime;
  return 1.0 / (1.0 / t2e_s - 0.5 / t1_s);
}

double lifetime_from_rate_hz(double rate_hz) {
  require(rate_hz > 0.0, ErrorCode::invalid_argument, "lifetime_from_rate_hz: rate must be > 0");
  return 1.0 / (constants::two_pi * rate_hz);
}

double rate_hz_from_lifetime(double lifetime_s) {
  require(lifetime_s > 0.0, ErrorCode::invalid_argument,
          "rate_hz_from_lifetime: lifetime must be > 0");
  return 1.0 / (constants::two_pi * lifetime_s);
}

}  // namespace hfcqed
