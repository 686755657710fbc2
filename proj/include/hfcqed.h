/* hfcqed - dispersive cQED modeling toolkit, C API.
 *
 * Conventions:
 *  - all frequencies and rates are ordinary frequencies in Hz (/2pi units);
 *  - energies are expressed as frequencies (E/h);
 *  - times in seconds, temperatures in kelvin, lengths in meters;
 *  - functions return HFQ_OK on success; on failure they return a status code
 *    and leave outputs untouched. hfq_last_error() gives a thread-local
 *    human-readable message for the most recent failure on this thread.
 *  - objects created by *_create / *_fit / *_simulate calls are owned by the
 *    caller and released with the matching *_free function.
 */

#ifndef HFCQED_H
#define HFCQED_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HFQ_API __declspec(dllexport)
#else
#define HFQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hfq_status {
  HFQ_OK = 0,
  HFQ_ERR_INVALID_ARGUMENT = 1,
  HFQ_ERR_NOT_CONVERGED = 2,
  HFQ_ERR_POLE_PROXIMITY = 3,
  HFQ_ERR_DOMAIN = 4,
  HFQ_ERR_SINGULAR = 5,
  HFQ_ERR_IO = 6,
  HFQ_ERR_UNSUPPORTED = 7,
  HFQ_ERR_INTERNAL = 99
} hfq_status;

HFQ_API const char* hfq_version(void);
HFQ_API const char* hfq_status_name(hfq_status status);
HFQ_API const char* hfq_last_error(void);

/* ---------------- transmon spectrum ---------------- */

typedef struct hfq_spectrum hfq_spectrum;

/* Exact charge-basis diagonalization of 4 E_C (n - n_g)^2 - E_J cos(phi).
 * ncut <= 0 selects the default (20); the basis is doubled automatically
 * until the lowest levels are converged to 1e-9 relative to f01. */
HFQ_API hfq_status hfq_spectrum_create(double ej_hz, double ec_hz, double ng, int ncut,
                                       hfq_spectrum** out);
HFQ_API void hfq_spectrum_free(hfq_spectrum* spectrum);
HFQ_API int hfq_spectrum_num_levels(const hfq_spectrum* spectrum);
/* Ground-referenced eigenenergies, ascending; fills min(capacity, num_levels). */
HFQ_API hfq_status hfq_spectrum_energies(const hfq_spectrum* spectrum, double* out,
                                         int capacity);
/* |<i| n |j>| */
HFQ_API hfq_status hfq_spectrum_charge_element(const hfq_spectrum* spectrum, int i, int j,
                                               double* out);
HFQ_API hfq_status hfq_spectrum_transitions(const hfq_spectrum* spectrum, double* f01_hz,
                                            double* f12_hz, double* f23_hz);
HFQ_API int hfq_spectrum_num_warnings(const hfq_spectrum* spectrum);
HFQ_API const char* hfq_spectrum_warning(const hfq_spectrum* spectrum, int index);

/* (f01, f12, f23) -> (E_J, E_C) least-squares inversion at fixed offset charge. */
HFQ_API hfq_status hfq_fit_ej_ec(double f01_hz, double f12_hz, double f23_hz, double ng,
                                 double* ej_hz, double* ec_hz, double* residual_hz);

/* ---------------- cavity coupling ---------------- */

/* Bare TE110 mode frequency (c/2) sqrt(1/a^2 + 1/b^2) of an a x b x z box. */
HFQ_API hfq_status hfq_te110_frequency(double a_m, double b_m, double z_m, double* f_hz);
/* g(omega_r) = g0 (omega_r/omega0)^(3/2)  */
HFQ_API hfq_status hfq_scaled_coupling(double g0_hz, double omega0_hz, double omega_r_hz,
                                       double* g_hz);
/* Second-order dispersive shift chi = (chi_1 - chi_0)/2 over n_levels
 * transmon levels. n_levels <= 0 and guard_hz <= 0 select the defaults
 * (12 levels, 50 MHz pole guard). */
HFQ_API hfq_status hfq_chi_perturbative(const hfq_spectrum* spectrum, double g_hz,
                                        double omega_r_hz, int n_levels, double guard_hz,
                                        double* chi_hz);
HFQ_API hfq_status hfq_solve_g_from_chi(const hfq_spectrum* spectrum, double chi_target_hz,
                                        double omega_r_hz, double* g_hz);
/* Per-point chi with g^2 scaled as (omega/omega0)^3; grid points inside the
 * pole guard band set pole_flags[k]=1 and chi_out[k]=0. */
HFQ_API hfq_status hfq_chi_scan(const hfq_spectrum* spectrum, double g0_hz, double omega0_hz,
                                const double* omega_grid_hz, int n, int n_levels,
                                double guard_hz, double* chi_out, int* pole_flags);

/* ---------------- dispersive rates ---------------- */

HFQ_API hfq_status hfq_bose_einstein(double f_hz, double temperature_k, double* nbar,
                                     int* underflow);
HFQ_API hfq_status hfq_stark_shift(double chi_hz, double nbar, double* shift_hz);
HFQ_API hfq_status hfq_meas_dephasing_rate(double chi_hz, double kappa_hz, double nbar,
                                           double* rate_hz);
HFQ_API hfq_status hfq_thermal_dephasing_rate(double chi_hz, double kappa_hz, double nbar,
                                              double* rate_hz);
HFQ_API hfq_status hfq_spin_locking_psd(double chi_hz, double kappa_hz, double nbar,
                                        double omega_hz, double* psd);
HFQ_API hfq_status hfq_nbar_from_spin_locking(double t_rho_s, double t1_s, double chi_hz,
                                              double kappa_hz, double omega_hz, double* nbar);
HFQ_API hfq_status hfq_purcell_rate(double kappa_hz, double g_hz, double omega_r_hz,
                                    double omega_hz, double* rate_hz);
/* Returns +inf when T_2E >= 2 T_1 within a 10% tolerance. */
HFQ_API hfq_status hfq_pure_dephasing_time(double t1_s, double t2e_s, double* t_phi_s);
/* 1/(2 pi rate): converts a /2pi-unit rate to a 1/e lifetime. */
HFQ_API hfq_status hfq_lifetime_from_rate_hz(double rate_hz, double* lifetime_s);

/* ---------------- thermal attenuation chain ---------------- */

typedef struct hfq_chain hfq_chain;

HFQ_API hfq_status hfq_chain_create(double source_temperature_k, hfq_chain** out);
HFQ_API void hfq_chain_free(hfq_chain* chain);
HFQ_API hfq_status hfq_chain_add_stage(hfq_chain* chain, double temperature_k,
                                       double attenuation_db);
/* Tabulated frequency-dependent attenuation; lookups interpolate linearly and
 * out-of-range frequencies are an error. */
HFQ_API hfq_status hfq_chain_add_profile_stage(hfq_chain* chain, double temperature_k,
                                               const double* freq_hz, const double* db,
                                               int n);
HFQ_API int hfq_chain_num_stages(const hfq_chain* chain);
/* Copy with one stage edited; pass NaN to keep a field. */
HFQ_API hfq_status hfq_chain_clone_with_edit(const hfq_chain* chain, int stage_index,
                                             double new_temperature_k, double new_db,
                                             hfq_chain** out);
/* n_out = L n_in + (1-L) n_th(f,T), L = 10^(-A/10), folded from the source. */
HFQ_API hfq_status hfq_chain_cascade(const hfq_chain* chain, double f_hz, double* nbar);
HFQ_API hfq_status hfq_stage_step(double n_in, double temperature_k, double attenuation_db,
                                  double f_hz, double* n_out);

/* ---------------- fitting ---------------- */

typedef struct hfq_fit hfq_fit;

HFQ_API void hfq_fit_free(hfq_fit* fit);
HFQ_API int hfq_fit_num_params(const hfq_fit* fit);
HFQ_API const char* hfq_fit_param_name(const hfq_fit* fit, int index);
/* sigma may be NULL. */
HFQ_API hfq_status hfq_fit_param(const hfq_fit* fit, const char* name, double* value,
                                 double* sigma);
HFQ_API int hfq_fit_converged(const hfq_fit* fit);
HFQ_API double hfq_fit_residual_norm(const hfq_fit* fit);
HFQ_API int hfq_fit_iterations(const hfq_fit* fit);
HFQ_API int hfq_fit_num_notes(const hfq_fit* fit);
HFQ_API const char* hfq_fit_note(const hfq_fit* fit, int index);

/* Lorentzian peak (FWHM width): center, width, amplitude, offset.
 * sigma may be NULL. */
HFQ_API hfq_status hfq_lorentzian_fit(const double* x, const double* y, const double* sigma,
                                      int n, hfq_fit** out);

typedef struct hfq_ckp_params {
  double omega01_hz;
  double chi_hz;
  double kappa_hz;
  double omega_r_hz;
  double amp2_hz;
} hfq_ckp_params;

/* Stark-shifted qubit frequency vs cavity-drive frequency; excited selects
 * the omega_r + chi (e) vs omega_r - chi (g) resonator pull. */
HFQ_API hfq_status hfq_ckp_curve(const hfq_ckp_params* params, int excited,
                                 double omega_d_hz, double* omega01_star_hz);
/* Joint fit of g- and e-prepared traces: omega01, chi, kappa, omega_r, amp2. */
HFQ_API hfq_status hfq_ckp_joint_fit(const double* xg, const double* yg, int ng,
                                     const double* xe, const double* ye, int ne,
                                     const hfq_ckp_params* init, hfq_fit** out);

/* Gamma_m vs nbar slope fit with kappa fixed: params chi, kappa. */
HFQ_API hfq_status hfq_gamma_m_fit(const double* nbar, const double* gamma_hz, int n,
                                   double kappa_fixed_hz, hfq_fit** out);

/* kind: "t1" | "echo" | "spin_lock". Params: time_constant, amplitude, offset. */
HFQ_API hfq_status hfq_decay_fit(const double* x_s, const double* y, int n, const char* kind,
                                 hfq_fit** out);

/* Params: t2_star, f1, a1, phi1[, f2, a2, phi2], offset. */
HFQ_API hfq_status hfq_ramsey_fit(const double* x_s, const double* y, int n, int n_beats,
                                  uint64_t seed, hfq_fit** out);

/* ---------------- readout analysis ---------------- */

typedef struct hfq_shots hfq_shots;

typedef struct hfq_blob {
  double mu_g_i, mu_g_q;
  double mu_e_i, mu_e_q;
  double sigma;
} hfq_blob;

/* label: "g" | "e" | "f" | "h" | "equilibrium" */
HFQ_API hfq_status hfq_shots_create(const double* i, const double* q, uint64_t n,
                                    const char* label, hfq_shots** out);
HFQ_API void hfq_shots_free(hfq_shots* shots);
HFQ_API uint64_t hfq_shots_count(const hfq_shots* shots);
HFQ_API hfq_status hfq_shots_get(const hfq_shots* shots, uint64_t index, double* i,
                                 double* q);
HFQ_API const char* hfq_shots_label(const hfq_shots* shots);

/* Robust single-Gaussian fit per prepared set; blob sigma is the mean of the
 * per-set sigmas. Any output pointer may be NULL. */
HFQ_API hfq_status hfq_blob_from_labeled(const hfq_shots* g_shots, const hfq_shots* e_shots,
                                         hfq_blob* blob, double* sigma_g, double* sigma_e,
                                         double* circularity_g, double* circularity_e);

/* Angle between the mu_e and mu_g vectors about the IQ origin, in [0, pi]. */
HFQ_API hfq_status hfq_blob_theta_eg(const hfq_blob* blob, double* theta_rad);
/* SNR = |mu_e - mu_g|^2 / (2 sigma^2) */
HFQ_API hfq_status hfq_snr_empirical(const hfq_blob* blob, double* snr);
/* SNR = 8 eta (2 pi kappa) nbar tau sin^2(theta/2) */
HFQ_API hfq_status hfq_snr_theory(double eta, double kappa_hz, double nbar, double tau_s,
                                  double theta_eg_rad, double* snr);
/* eta from equating the empirical and theoretical SNR, plus
 * T_sys = h omega_r / (k_B eta); unphysical flags eta > 0.5. */
HFQ_API hfq_status hfq_efficiency(const hfq_blob* blob, double kappa_hz, double nbar,
                                  double tau_s, double omega_r_hz, double* eta,
                                  double* t_sys_k, int* unphysical);

/* Counts vs angle from the negative x-axis about (origin_i, origin_q);
 * counts must hold `bins` entries; bins >= 16. */
HFQ_API hfq_status hfq_angular_histogram(const hfq_shots* shots, double origin_i,
                                         double origin_q, int bins, uint64_t* counts);
/* Bins with center above threshold count as "not g". */
HFQ_API hfq_status hfq_assignment_errors(const uint64_t* hist_g, const uint64_t* hist_notg,
                                         int bins, double threshold_rad,
                                         double* p_notg_given_g, double* p_g_given_notg,
                                         double* epsilon_assignment);
HFQ_API hfq_status hfq_optimal_threshold(const uint64_t* hist_g, const uint64_t* hist_notg,
                                         int bins, double* threshold_rad);

typedef struct hfq_scenario {
  hfq_blob blob;
  double t1_s;              /* <= 0 disables decay during readout */
  double tau_s;             /* integration time */
  double leakage_fraction;  /* probability of relocation to the leakage center */
  double leakage_i, leakage_q;
  double p_e;               /* excited-state preparation probability; rest is g */
  uint64_t seed;
} hfq_scenario;

/* Deterministic per (seed, shot index); see the project README for the shot
 * composition rules (decay pointer averaging, leakage relocation). */
HFQ_API hfq_status hfq_simulate_shots(const hfq_scenario* scenario, uint64_t n,
                                      hfq_shots** out);

/* keep[k]=1 when first-readout shot k lands within radius_sigmas * sigma of
 * mu_g. keep must hold hfq_shots_count entries. */
HFQ_API hfq_status hfq_postselect_ground(const hfq_shots* first_readout,
                                         const hfq_blob* blob, double radius_sigmas,
                                         int* keep);
HFQ_API hfq_status hfq_filter_shots(const hfq_shots* shots, const int* keep,
                                    hfq_shots** out);

/* ---------------- Floquet quasienergies ---------------- */

typedef struct hfq_sweep hfq_sweep;

/* Quasienergies of the driven transmon (classical charge drive
 * amplitude cos(2 pi omega_d t) n), sorted ascending in the canonical window
 * [-omega_d/2, omega_d/2). ncut <= 0 selects the default (20). Returns the
 * number of quasienergies through n_out and the converged step count through
 * n_steps_used (either may be NULL). */
HFQ_API hfq_status hfq_floquet_quasienergies(double ej_hz, double ec_hz, double ng, int ncut,
                                             double amplitude_hz, double omega_d_hz,
                                             double* eps_out, int capacity, int* n_out,
                                             int* n_steps_used);
/* Drive amplitude giving the requested 0-1 ac Stark shift magnitude. */
HFQ_API hfq_status hfq_calibrate_drive_amplitude(double ej_hz, double ec_hz, double ng,
                                                 int ncut, double omega_d_hz,
                                                 double target_stark_hz,
                                                 double* amplitude_hz);
/* amplitude = 2 g sqrt(nbar) */
HFQ_API hfq_status hfq_amplitude_from_nbar(double g_hz, double nbar, double* amplitude_hz);

/* Branch-tracked quasienergy sweep over an offset-charge grid. */
HFQ_API hfq_status hfq_floquet_sweep(double ej_hz, double ec_hz, int ncut,
                                     double amplitude_hz, double omega_d_hz,
                                     const double* ng_grid, int n_grid, int n_branches,
                                     hfq_sweep** out);
HFQ_API void hfq_sweep_free(hfq_sweep* sweep);
HFQ_API int hfq_sweep_num_branches(const hfq_sweep* sweep);
HFQ_API int hfq_sweep_num_points(const hfq_sweep* sweep);
HFQ_API hfq_status hfq_sweep_point(const hfq_sweep* sweep, int branch, int point,
                                   double* ng, double* quasienergy_hz, double* confidence);
/* Minimal circular branch distance over the grid, refined 10x around the
 * minimum. interior=1 when the minimum is away from the grid boundary;
 * confidence ~0.5 marks full hybridization (a resolved anticrossing). */
HFQ_API hfq_status hfq_anticrossing_gap(const hfq_sweep* sweep, int branch_i, int branch_j,
                                        double* gap_hz, double* ng_at_min, int* interior,
                                        double* confidence);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HFCQED_H */
