#pragma once

#include <limits>

namespace hfcqed {

// Closed-form rate formulas downstream of (chi, kappa). Every formula is
// homogeneous of degree 1 in its frequency arguments and is evaluated in
// ordinary-frequency (/2pi) units end to end; converting a /2pi rate to a
// 1/s exponential rate multiplies by 2pi (see lifetime_from_rate_hz).

// Bose-Einstein occupation 1/(exp(h f / k_B T) - 1). For h f / k_B T > 700 the
// result underflows; 0 is returned and *underflow (when given) is set.
double bose_einstein(double f_hz, double temperature_k, bool* underflow = nullptr);

// ac Stark shift delta_omega01 = 2 chi nbar.
double stark_shift(double chi_hz, double nbar);

// Measurement-induced dephasing Gamma_m = 2 nbar kappa chi^2 / (chi^2 + (kappa/2)^2).
double meas_dephasing_rate(double chi_hz, double kappa_hz, double nbar);

// Thermal-photon dephasing Gamma_phi = 4 nbar kappa chi^2 / (4 chi^2 + kappa^2).
double thermal_dephasing_rate(double chi_hz, double kappa_hz, double nbar);

// Residual-photon frequency-noise PSD sampled at (angular-equivalent) omega:
//   S_z(omega) = (8 nbar chi^2 kappa^2 / (kappa^2 + 4 chi^2)) * kappa / (omega^2 + kappa^2)
// Evaluated in /2pi units (all arguments Hz); multiply by 2pi for a 1/s value.
double spin_locking_psd(double chi_hz, double kappa_hz, double nbar, double omega_hz);

// Inverts the spin-locking relation S_z = 2 (1/T_rho - 1/(2 T_1)) for nbar.
// t_rho and t1 are in seconds (1/s rates); the 2pi conversion to the /2pi-unit
// PSD is handled internally.
double nbar_from_spin_locking(double t_rho_s, double t1_s, double chi_hz,
                              double kappa_hz, double omega_hz);

// Purcell scaling estimate kappa (g/omega_r)^2 (omega/omega_r)^5 with unit
// proportionality constant; use for ratios and order-of-magnitude exclusions.
double purcell_rate(double kappa_hz, double g_hz, double omega_r_hz, double omega_hz);

// 1/T_phi = 1/T_2E - 1/(2 T_1). Returns +infinity when t2e >= 2 t1 within the
// tolerance; throws for grossly unphysical t2e > 2 t1 (1 + tol).
double pure_dephasing_time(double t1_s, double t2e_s, double tolerance = 0.10);

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// Boundary conversions between /2pi rates and 1/s lifetimes.
double lifetime_from_rate_hz(double rate_hz);
double rate_hz_from_lifetime(double lifetime_s);

}  // namespace hfcqed
