#include "hfcqed.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "../core/cavity.hpp"
#include "../core/errors.hpp"
#include "../core/fit_models.hpp"
#include "../core/floquet.hpp"
#include "../core/rates.hpp"
#include "../core/readout.hpp"
#include "../core/thermal.hpp"
#include "../core/transmon.hpp"

using namespace hfcqed;

namespace {

thread_local std::string g_last_error;

hfq_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return HFQ_ERR_INVALID_ARGUMENT;
    case ErrorCode::not_converged: return HFQ_ERR_NOT_CONVERGED;
    case ErrorCode::pole_proximity: return HFQ_ERR_POLE_PROXIMITY;
    case ErrorCode::domain: return HFQ_ERR_DOMAIN;
    case ErrorCode::singular: return HFQ_ERR_SINGULAR;
    case ErrorCode::io: return HFQ_ERR_IO;
    case ErrorCode::unsupported: return HFQ_ERR_UNSUPPORTED;
  }
  return HFQ_ERR_INTERNAL;
}

template <typename Fn>
hfq_status guarded(Fn&& fn) {
  try {
    fn();
    return HFQ_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HFQ_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HFQ_ERR_INTERNAL;
  }
}

hfq_status invalid(const char* what) {
  g_last_error = what;
  return HFQ_ERR_INVALID_ARGUMENT;
}

BlobModel to_blob(const hfq_blob& b) {
  BlobModel m;
  m.mu_g = {b.mu_g_i, b.mu_g_q};
  m.mu_e = {b.mu_e_i, b.mu_e_q};
  m.sigma = b.sigma;
  return m;
}

}  // namespace

struct hfq_spectrum {
  Spectrum value;
};
struct hfq_chain {
  AttenuationChain value;
};
struct hfq_fit {
  fit::FitResult value;
};
struct hfq_shots {
  ShotSet value;
  std::string label_str;
};
struct hfq_sweep {
  QuasienergySweep value;
};

extern "C" {

const char* hfq_version(void) { return "0.1.0"; }

const char* hfq_status_name(hfq_status status) {
  switch (status) {
    case HFQ_OK: return "ok";
    case HFQ_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case HFQ_ERR_NOT_CONVERGED: return "not_converged";
    case HFQ_ERR_POLE_PROXIMITY: return "pole_proximity";
    case HFQ_ERR_DOMAIN: return "domain";
    case HFQ_ERR_SINGULAR: return "singular";
    case HFQ_ERR_IO: return "io";
    case HFQ_ERR_UNSUPPORTED: return "unsupported";
    case HFQ_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hfq_last_error(void) { return g_last_error.c_str(); }

/* ---------------- transmon ---------------- */

hfq_status hfq_spectrum_create(double ej_hz, double ec_hz, double ng, int ncut,
                               hfq_spectrum** out) {
  if (!out) return invalid("out must not be null");
  return guarded([&] {
    TransmonParams p;
    p.ej_hz = ej_hz;
    p.ec_hz = ec_hz;
    p.ng = ng;
    if (ncut > 0) p.ncut = ncut;
    *out = new hfq_spectrum{diagonalize(p)};
  });
}

void hfq_spectrum_free(hfq_spectrum* spectrum) { delete spectrum; }

int hfq_spectrum_num_levels(const hfq_spectrum* spectrum) {
  return spectrum ? spectrum->value.num_levels() : 0;
}

hfq_status hfq_spectrum_energies(const hfq_spectrum* spectrum, double* out, int capacity) {
  if (!spectrum || !out || capacity <= 0) return invalid("bad spectrum/out/capacity");
  return guarded([&] {
    const auto& e = spectrum->value.energies();
    const int n = std::min<int>(capacity, static_cast<int>(e.size()));
    for (int k = 0; k < n; ++k) out[k] = e[static_cast<std::size_t>(k)];
  });
}

hfq_status hfq_spectrum_charge_element(const hfq_spectrum* spectrum, int i, int j,
                                       double* out) {
  if (!spectrum || !out) return invalid("bad spectrum/out");
  return guarded([&] { *out = spectrum->value.charge_element(i, j); });
}

hfq_status hfq_spectrum_transitions(const hfq_spectrum* spectrum, double* f01_hz,
                                    double* f12_hz, double* f23_hz) {
  if (!spectrum || !f01_hz || !f12_hz || !f23_hz) return invalid("bad spectrum/outputs");
  return guarded([&] {
    const TransitionSet t = transitions(spectrum->value);
    *f01_hz = t.f01_hz;
    *f12_hz = t.f12_hz;
    *f23_hz = t.f23_hz;
  });
}

int hfq_spectrum_num_warnings(const hfq_spectrum* spectrum) {
  return spectrum ? static_cast<int>(spectrum->value.warnings().size()) : 0;
}

const char* hfq_spectrum_warning(const hfq_spectrum* spectrum, int index) {
  if (!spectrum || index < 0 ||
      index >= static_cast<int>(spectrum->value.warnings().size()))
    return "";
  return spectrum->value.warnings()[static_cast<std::size_t>(index)].c_str();
}

hfq_status hfq_fit_ej_ec(double f01_hz, double f12_hz, double f23_hz, double ng,
                         double* ej_hz, double* ec_hz, double* residual_hz) {
  if (!ej_hz || !ec_hz) return invalid("bad outputs");
  return guarded([&] {
    TransitionSet t;
    t.f01_hz = f01_hz;
    t.f12_hz = f12_hz;
    t.f23_hz = f23_hz;
    const EjEcFit r = fit_ej_ec(t, ng);
    *ej_hz = r.params.ej_hz;
    *ec_hz = r.params.ec_hz;
    if (residual_hz) *residual_hz = r.residual_norm;
  });
}

/* ---------------- cavity ---------------- */

hfq_status hfq_te110_frequency(double a_m, double b_m, double z_m, double* f_hz) {
  if (!f_hz) return invalid("bad output");
  return guarded([&] { *f_hz = te110_frequency({a_m, b_m, z_m}); });
}

hfq_status hfq_scaled_coupling(double g0_hz, double omega0_hz, double omega_r_hz,
                               double* g_hz) {
  if (!g_hz) return invalid("bad output");
  return guarded([&] { *g_hz = scaled_coupling({g0_hz, omega0_hz}, omega_r_hz); });
}

hfq_status hfq_chi_perturbative(const hfq_spectrum* spectrum, double g_hz, double omega_r_hz,
                                int n_levels, double guard_hz, double* chi_hz) {
  if (!spectrum || !chi_hz) return invalid("bad spectrum/output");
  return guarded([&] {
    const int nl = n_levels > 0 ? n_levels : kDefaultChiLevels;
    const double guard = guard_hz > 0.0 ? guard_hz : kDefaultPoleGuardHz;
    *chi_hz = chi_perturbative(spectrum->value, g_hz, omega_r_hz, nl, guard);
  });
}

hfq_status hfq_solve_g_from_chi(const hfq_spectrum* spectrum, double chi_target_hz,
                                double omega_r_hz, double* g_hz) {
  if (!spectrum || !g_hz) return invalid("bad spectrum/output");
  return guarded([&] {
    *g_hz = solve_g_from_chi(spectrum->value, chi_target_hz, omega_r_hz);
  });
}

hfq_status hfq_chi_scan(const hfq_spectrum* spectrum, double g0_hz, double omega0_hz,
                        const double* omega_grid_hz, int n, int n_levels, double guard_hz,
                        double* chi_out, int* pole_flags) {
  if (!spectrum || !omega_grid_hz || n <= 0 || !chi_out || !pole_flags)
    return invalid("bad scan arguments");
  return guarded([&] {
    const int nl = n_levels > 0 ? n_levels : kDefaultChiLevels;
    const double guard = guard_hz > 0.0 ? guard_hz : kDefaultPoleGuardHz;
    std::vector<double> grid(omega_grid_hz, omega_grid_hz + n);
    const auto pts = chi_scan(spectrum->value, {g0_hz, omega0_hz}, grid, nl, guard);
    for (int k = 0; k < n; ++k) {
      chi_out[k] = pts[static_cast<std::size_t>(k)].chi_hz;
      pole_flags[k] = pts[static_cast<std::size_t>(k)].pole_flag ? 1 : 0;
    }
  });
}

/* ---------------- rates ---------------- */

hfq_status hfq_bose_einstein(double f_hz, double temperature_k, double* nbar,
                             int* underflow) {
  if (!nbar) return invalid("bad output");
  return guarded([&] {
    bool uf = false;
    *nbar = bose_einstein(f_hz, temperature_k, &uf);
    if (underflow) *underflow = uf ? 1 : 0;
  });
}

hfq_status hfq_stark_shift(double chi_hz, double nbar, double* shift_hz) {
  if (!shift_hz) return invalid("bad output");
  return guarded([&] { *shift_hz = stark_shift(chi_hz, nbar); });
}

hfq_status hfq_meas_dephasing_rate(double chi_hz, double kappa_hz, double nbar,
                                   double* rate_hz) {
  if (!rate_hz) return invalid("bad output");
  return guarded([&] { *rate_hz = meas_dephasing_rate(chi_hz, kappa_hz, nbar); });
}

hfq_status hfq_thermal_dephasing_rate(double chi_hz, double kappa_hz, double nbar,
                                      double* rate_hz) {
  if (!rate_hz) return invalid("bad output");
  return guarded([&] { *rate_hz = thermal_dephasing_rate(chi_hz, kappa_hz, nbar); });
}

hfq_status hfq_spin_locking_psd(double chi_hz, double kappa_hz, double nbar, double omega_hz,
                                double* psd) {
  if (!psd) return invalid("bad output");
  return guarded([&] { *psd = spin_locking_psd(chi_hz, kappa_hz, nbar, omega_hz); });
}

hfq_status hfq_nbar_from_spin_locking(double t_rho_s, double t1_s, double chi_hz,
                                      double kappa_hz, double omega_hz, double* nbar) {
  if (!nbar) return invalid("bad output");
  return guarded([&] {
    *nbar = nbar_from_spin_locking(t_rho_s, t1_s, chi_hz, kappa_hz, omega_hz);
  });
}

hfq_status hfq_purcell_rate(double kappa_hz, double g_hz, double omega_r_hz, double omega_hz,
                            double* rate_hz) {
  if (!rate_hz) return invalid("bad output");
  return guarded([&] { *rate_hz = purcell_rate(kappa_hz, g_hz, omega_r_hz, omega_hz); });
}

hfq_status hfq_pure_dephasing_time(double t1_s, double t2e_s, double* t_phi_s) {
  if (!t_phi_s) return invalid("bad output");
  return guarded([&] { *t_phi_s = pure_dephasing_time(t1_s, t2e_s); });
}

hfq_status hfq_lifetime_from_rate_hz(double rate_hz, double* lifetime_s) {
  if (!lifetime_s) return invalid("bad output");
  return guarded([&] { *lifetime_s = lifetime_from_rate_hz(rate_hz); });
}

/* ---------------- thermal chain ---------------- */

hfq_status hfq_chain_create(double source_temperature_k, hfq_chain** out) {
  if (!out) return invalid("bad output");
  return guarded([&] {
    AttenuationChain c;
    c.source_temperature_k = source_temperature_k;
    *out = new hfq_chain{std::move(c)};
  });
}

void hfq_chain_free(hfq_chain* chain) { delete chain; }

hfq_status hfq_chain_add_stage(hfq_chain* chain, double temperature_k,
                               double attenuation_db) {
  if (!chain) return invalid("bad chain");
  return guarded([&] {
    Stage s;
    s.temperature_k = temperature_k;
    s.attenuation = attenuation_db;
    s.validate();
    chain->value.stages.push_back(std::move(s));
  });
}

hfq_status hfq_chain_add_profile_stage(hfq_chain* chain, double temperature_k,
                                       const double* freq_hz, const double* db, int n) {
  if (!chain || !freq_hz || !db || n <= 0) return invalid("bad profile stage arguments");
  return guarded([&] {
    Stage s;
    s.temperature_k = temperature_k;
    s.attenuation = AttenuationProfile(std::vector<double>(freq_hz, freq_hz + n),
                                       std::vector<double>(db, db + n));
    s.validate();
    chain->value.stages.push_back(std::move(s));
  });
}

int hfq_chain_num_stages(const hfq_chain* chain) {
  return chain ? static_cast<int>(chain->value.stages.size()) : 0;
}

hfq_status hfq_chain_clone_with_edit(const hfq_chain* chain, int stage_index,
                                     double new_temperature_k, double new_db,
                                     hfq_chain** out) {
  if (!chain || !out) return invalid("bad chain/output");
  return guarded([&] {
    ChainEdit e;
    e.stage_index = static_cast<std::size_t>(stage_index);
    if (!std::isnan(new_temperature_k)) e.temperature_k = new_temperature_k;
    if (!std::isnan(new_db)) e.attenuation_db = new_db;
    *out = new hfq_chain{apply_edits(chain->value, {e})};
  });
}

hfq_status hfq_chain_cascade(const hfq_chain* chain, double f_hz, double* nbar) {
  if (!chain || !nbar) return invalid("bad chain/output");
  return guarded([&] { *nbar = cascade(chain->value, f_hz); });
}

hfq_status hfq_stage_step(double n_in, double temperature_k, double attenuation_db,
                          double f_hz, double* n_out) {
  if (!n_out) return invalid("bad output");
  return guarded([&] {
    Stage s;
    s.temperature_k = temperature_k;
    s.attenuation = attenuation_db;
    *n_out = stage_step(n_in, s, f_hz);
  });
}

/* ---------------- fitting ---------------- */

void hfq_fit_free(hfq_fit* fit) { delete fit; }

int hfq_fit_num_params(const hfq_fit* fit) {
  return fit ? static_cast<int>(fit->value.param_names.size()) : 0;
}

const char* hfq_fit_param_name(const hfq_fit* fit, int index) {
  if (!fit || index < 0 || index >= static_cast<int>(fit->value.param_names.size()))
    return "";
  return fit->value.param_names[static_cast<std::size_t>(index)].c_str();
}

hfq_status hfq_fit_param(const hfq_fit* fit, const char* name, double* value,
                         double* sigma) {
  if (!fit || !name || !value) return invalid("bad fit/name/value");
  return guarded([&] {
    *value = fit->value.value(name);
    if (sigma) *sigma = fit->value.uncertainty(name);
  });
}

int hfq_fit_converged(const hfq_fit* fit) { return fit && fit->value.converged ? 1 : 0; }

double hfq_fit_residual_norm(const hfq_fit* fit) {
  return fit ? fit->value.residual_norm : 0.0;
}

int hfq_fit_iterations(const hfq_fit* fit) { return fit ? fit->value.iterations : 0; }

int hfq_fit_num_notes(const hfq_fit* fit) {
  return fit ? static_cast<int>(fit->value.notes.size()) : 0;
}

const char* hfq_fit_note(const hfq_fit* fit, int index) {
  if (!fit || index < 0 || index >= static_cast<int>(fit->value.notes.size())) return "";
  return fit->value.notes[static_cast<std::size_t>(index)].c_str();
}

namespace {

fit::Trace make_trace(const double* x, const double* y, const double* sigma, int n) {
  fit::Trace t;
  t.x.assign(x, x + n);
  t.y.assign(y, y + n);
  if (sigma) t.sigma.assign(sigma, sigma + n);
  return t;
}

}  // namespace

hfq_status hfq_lorentzian_fit(const double* x, const double* y, const double* sigma, int n,
                              hfq_fit** out) {
  if (!x || !y || n <= 0 || !out) return invalid("bad fit arguments");
  return guarded([&] {
    *out = new hfq_fit{fit::lorentzian_peak(make_trace(x, y, sigma, n))};
  });
}

hfq_status hfq_ckp_curve(const hfq_ckp_params* params, int excited, double omega_d_hz,
                         double* omega01_star_hz) {
  if (!params || !omega01_star_hz) return invalid("bad ckp arguments");
  return guarded([&] {
    fit::CkpModel m{params->omega01_hz, params->chi_hz, params->kappa_hz,
                    params->omega_r_hz, params->amp2_hz};
    m.validate();
    *omega01_star_hz = fit::ckp_stark_curve(omega_d_hz, m, excited != 0);
  });
}

hfq_status hfq_ckp_joint_fit(const double* xg, const double* yg, int ng, const double* xe,
                             const double* ye, int ne, const hfq_ckp_params* init,
                             hfq_fit** out) {
  if (!xg || !yg || ng <= 0 || !xe || !ye || ne <= 0 || !init || !out)
    return invalid("bad ckp fit arguments");
  return guarded([&] {
    fit::CkpModel m{init->omega01_hz, init->chi_hz, init->kappa_hz, init->omega_r_hz,
                    init->amp2_hz};
    *out = new hfq_fit{fit::ckp_joint_fit(make_trace(xg, yg, nullptr, ng),
                                          make_trace(xe, ye, nullptr, ne), m)};
  });
}

hfq_status hfq_gamma_m_fit(const double* nbar, const double* gamma_hz, int n,
                           double kappa_fixed_hz, hfq_fit** out) {
  if (!nbar || !gamma_hz || n <= 0 || !out) return invalid("bad gamma_m arguments");
  return guarded([&] {
    std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pts[static_cast<std::size_t>(k)] = {nbar[k], gamma_hz[k]};
    *out = new hfq_fit{fit::gamma_m_fit(pts, kappa_fixed_hz)};
  });
}

hfq_status hfq_decay_fit(const double* x_s, const double* y, int n, const char* kind,
                         hfq_fit** out) {
  if (!x_s || !y || n <= 0 || !kind || !out) return invalid("bad decay fit arguments");
  return guarded([&] {
    fit::DecayKind k;
    const std::string s = kind;
    if (s == "t1")
      k = fit::DecayKind::t1;
    else if (s == "echo")
      k = fit::DecayKind::echo;
    else if (s == "spin_lock")
      k = fit::DecayKind::spin_lock;
    else
      fail(ErrorCode::invalid_argument, "decay kind must be t1|echo|spin_lock");
    *out = new hfq_fit{fit::decay_fit(make_trace(x_s, y, nullptr, n), k)};
  });
}

hfq_status hfq_ramsey_fit(const double* x_s, const double* y, int n, int n_beats,
                          uint64_t seed, hfq_fit** out) {
  if (!x_s || !y || n <= 0 || !out) return invalid("bad ramsey fit arguments");
  return guarded([&] {
    *out = new hfq_fit{fit::ramsey_fit(make_trace(x_s, y, nullptr, n), n_beats, seed)};
  });
}

/* ---------------- readout ---------------- */

hfq_status hfq_shots_create(const double* i, const double* q, uint64_t n, const char* label,
                            hfq_shots** out) {
  if (!i || !q || n == 0 || !label || !out) return invalid("bad shots arguments");
  return guarded([&] {
    auto h = std::make_unique<hfq_shots>();
    h->value.label = state_label_from_string(label);
    h->value.shots.resize(n);
    for (uint64_t k = 0; k < n; ++k) h->value.shots[k] = {i[k], q[k]};
    h->value.validate();
    h->label_str = label;
    *out = h.release();
  });
}

void hfq_shots_free(hfq_shots* shots) { delete shots; }

uint64_t hfq_shots_count(const hfq_shots* shots) {
  return shots ? shots->value.shots.size() : 0;
}

hfq_status hfq_shots_get(const hfq_shots* shots, uint64_t index, double* i, double* q) {
  if (!shots || !i || !q) return invalid("bad shots/outputs");
  if (index >= shots->value.shots.size()) return invalid("shot index out of range");
  *i = shots->value.shots[index].i;
  *q = shots->value.shots[index].q;
  return HFQ_OK;
}

const char* hfq_shots_label(const hfq_shots* shots) {
  if (!shots) return "";
  return shots->label_str.c_str();
}

hfq_status hfq_blob_from_labeled(const hfq_shots* g_shots, const hfq_shots* e_shots,
                                 hfq_blob* blob, double* sigma_g, double* sigma_e,
                                 double* circularity_g, double* circularity_e) {
  if (!g_shots || !e_shots) return invalid("bad shot sets");
  return guarded([&] {
    const BlobBuildResult r = blob_from_labeled(g_shots->value, e_shots->value);
    if (blob) {
      blob->mu_g_i = r.blob.mu_g.x();
      blob->mu_g_q = r.blob.mu_g.y();
      blob->mu_e_i = r.blob.mu_e.x();
      blob->mu_e_q = r.blob.mu_e.y();
      blob->sigma = r.blob.sigma;
    }
    if (sigma_g) *sigma_g = r.sigma_g;
    if (sigma_e) *sigma_e = r.sigma_e;
    if (circularity_g) *circularity_g = r.circularity_g;
    if (circularity_e) *circularity_e = r.circularity_e;
  });
}

hfq_status hfq_blob_theta_eg(const hfq_blob* blob, double* theta_rad) {
  if (!blob || !theta_rad) return invalid("bad blob/output");
  return guarded([&] { *theta_rad = to_blob(*blob).theta_eg(); });
}

hfq_status hfq_snr_empirical(const hfq_blob* blob, double* snr) {
  if (!blob || !snr) return invalid("bad blob/output");
  return guarded([&] { *snr = snr_empirical(to_blob(*blob)); });
}

hfq_status hfq_snr_theory(double eta, double kappa_hz, double nbar, double tau_s,
                          double theta_eg_rad, double* snr) {
  if (!snr) return invalid("bad output");
  return guarded([&] { *snr = snr_theory(eta, kappa_hz, nbar, tau_s, theta_eg_rad); });
}

hfq_status hfq_efficiency(const hfq_blob* blob, double kappa_hz, double nbar, double tau_s,
                          double omega_r_hz, double* eta, double* t_sys_k, int* unphysical) {
  if (!blob || !eta) return invalid("bad blob/outputs");
  return guarded([&] {
    const EfficiencyResult r = efficiency(to_blob(*blob), kappa_hz, nbar, tau_s, omega_r_hz);
    *eta = r.eta;
    if (t_sys_k) *t_sys_k = r.t_sys_k;
    if (unphysical) *unphysical = r.unphysical ? 1 : 0;
  });
}

hfq_status hfq_angular_histogram(const hfq_shots* shots, double origin_i, double origin_q,
                                 int bins, uint64_t* counts) {
  if (!shots || !counts) return invalid("bad shots/counts");
  return guarded([&] {
    const AngularHistogram h =
        angular_histogram(shots->value, {origin_i, origin_q}, bins);
    for (int k = 0; k < bins; ++k) counts[k] = h.counts[static_cast<std::size_t>(k)];
  });
}

namespace {

AngularHistogram histogram_from_counts(const uint64_t* counts, int bins) {
  AngularHistogram h;
  h.counts.assign(counts, counts + bins);
  return h;
}

}  // namespace

hfq_status hfq_assignment_errors(const uint64_t* hist_g, const uint64_t* hist_notg, int bins,
                                 double threshold_rad, double* p_notg_given_g,
                                 double* p_g_given_notg, double* epsilon_assignment) {
  if (!hist_g || !hist_notg || bins < 16) return invalid("bad histogram arguments");
  return guarded([&] {
    const AssignmentErrors e =
        assignment_errors(histogram_from_counts(hist_g, bins),
                          histogram_from_counts(hist_notg, bins), threshold_rad);
    if (p_notg_given_g) *p_notg_given_g = e.p_notg_given_g;
    if (p_g_given_notg) *p_g_given_notg = e.p_g_given_notg;
    if (epsilon_assignment) *epsilon_assignment = e.epsilon_assignment;
  });
}

hfq_status hfq_optimal_threshold(const uint64_t* hist_g, const uint64_t* hist_notg, int bins,
                                 double* threshold_rad) {
  if (!hist_g || !hist_notg || bins < 16 || !threshold_rad)
    return invalid("bad histogram arguments");
  return guarded([&] {
    *threshold_rad = optimal_threshold(histogram_from_counts(hist_g, bins),
                                       histogram_from_counts(hist_notg, bins));
  });
}

hfq_status hfq_simulate_shots(const hfq_scenario* scenario, uint64_t n, hfq_shots** out) {
  if (!scenario || !out) return invalid("bad scenario/output");
  return guarded([&] {
    ReadoutScenario s;
    s.blob = to_blob(scenario->blob);
    s.t1_s = scenario->t1_s;
    s.tau_s = scenario->tau_s;
    s.leakage_fraction = scenario->leakage_fraction;
    s.leakage_center = {scenario->leakage_i, scenario->leakage_q};
    if (scenario->p_e > 0.0) s.populations[StateLabel::e] = scenario->p_e;
    s.populations[StateLabel::g] = 1.0 - scenario->p_e;
    s.seed = scenario->seed;
    auto h = std::make_unique<hfq_shots>();
    h->value = simulate_shots(s, n);
    h->label_str = to_string(h->value.label);
    *out = h.release();
  });
}

hfq_status hfq_postselect_ground(const hfq_shots* first_readout, const hfq_blob* blob,
                                 double radius_sigmas, int* keep) {
  if (!first_readout || !blob || !keep) return invalid("bad postselect arguments");
  return guarded([&] {
    const std::vector<bool> mask =
        postselect_ground(first_readout->value, to_blob(*blob), radius_sigmas);
    for (std::size_t k = 0; k < mask.size(); ++k) keep[k] = mask[k] ? 1 : 0;
  });
}

hfq_status hfq_filter_shots(const hfq_shots* shots, const int* keep, hfq_shots** out) {
  if (!shots || !keep || !out) return invalid("bad filter arguments");
  return guarded([&] {
    std::vector<bool> mask(shots->value.shots.size());
    for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = keep[k] != 0;
    auto h = std::make_unique<hfq_shots>();
    h->value = filter_shots(shots->value, mask);
    h->label_str = to_string(h->value.label);
    *out = h.release();
  });
}

/* ---------------- floquet ---------------- */

hfq_status hfq_floquet_quasienergies(double ej_hz, double ec_hz, double ng, int ncut,
                                     double amplitude_hz, double omega_d_hz, double* eps_out,
                                     int capacity, int* n_out, int* n_steps_used) {
  if (!eps_out || capacity <= 0) return invalid("bad quasienergy output");
  return guarded([&] {
    TransmonParams p;
    p.ej_hz = ej_hz;
    p.ec_hz = ec_hz;
    p.ng = ng;
    if (ncut > 0) p.ncut = ncut;
    const FloquetModes m = floquet_modes(p, {amplitude_hz, omega_d_hz});
    std::vector<double> eps = m.quasienergies;
    std::sort(eps.begin(), eps.end());
    const int n = std::min<int>(capacity, static_cast<int>(eps.size()));
    for (int k = 0; k < n; ++k) eps_out[k] = eps[static_cast<std::size_t>(k)];
    if (n_out) *n_out = static_cast<int>(eps.size());
    if (n_steps_used) *n_steps_used = m.n_steps_used;
  });
}

hfq_status hfq_calibrate_drive_amplitude(double ej_hz, double ec_hz, double ng, int ncut,
                                         double omega_d_hz, double target_stark_hz,
                                         double* amplitude_hz) {
  if (!amplitude_hz) return invalid("bad output");
  return guarded([&] {
    TransmonParams p;
    p.ej_hz = ej_hz;
    p.ec_hz = ec_hz;
    p.ng = ng;
    if (ncut > 0) p.ncut = ncut;
    *amplitude_hz = calibrate_drive_amplitude(p, omega_d_hz, target_stark_hz);
  });
}

hfq_status hfq_amplitude_from_nbar(double g_hz, double nbar, double* amplitude_hz) {
  if (!amplitude_hz) return invalid("bad output");
  return guarded([&] { *amplitude_hz = amplitude_from_nbar(g_hz, nbar); });
}

hfq_status hfq_floquet_sweep(double ej_hz, double ec_hz, int ncut, double amplitude_hz,
                             double omega_d_hz, const double* ng_grid, int n_grid,
                             int n_branches, hfq_sweep** out) {
  if (!ng_grid || n_grid <= 0 || !out) return invalid("bad sweep arguments");
  return guarded([&] {
    TransmonParams p;
    p.ej_hz = ej_hz;
    p.ec_hz = ec_hz;
    p.ng = ng_grid[0];
    if (ncut > 0) p.ncut = ncut;
    std::vector<double> grid(ng_grid, ng_grid + n_grid);
    *out = new hfq_sweep{
        sweep_ng(p, {amplitude_hz, omega_d_hz}, grid, n_branches > 0 ? n_branches : 13)};
  });
}

void hfq_sweep_free(hfq_sweep* sweep) { delete sweep; }

int hfq_sweep_num_branches(const hfq_sweep* sweep) {
  return sweep ? sweep->value.n_branches : 0;
}

int hfq_sweep_num_points(const hfq_sweep* sweep) {
  return sweep ? static_cast<int>(sweep->value.ng_grid.size()) : 0;
}

hfq_status hfq_sweep_point(const hfq_sweep* sweep, int branch, int point, double* ng,
                           double* quasienergy_hz, double* confidence) {
  if (!sweep) return invalid("bad sweep");
  if (branch < 0 || branch >= sweep->value.n_branches) return invalid("branch out of range");
  if (point < 0 || point >= static_cast<int>(sweep->value.ng_grid.size()))
    return invalid("point out of range");
  if (ng) *ng = sweep->value.ng_grid[static_cast<std::size_t>(point)];
  if (quasienergy_hz) *quasienergy_hz = sweep->value.branches(branch, point);
  if (confidence) *confidence = sweep->value.confidence(branch, point);
  return HFQ_OK;
}

hfq_status hfq_anticrossing_gap(const hfq_sweep* sweep, int branch_i, int branch_j,
                                double* gap_hz, double* ng_at_min, int* interior,
                                double* confidence) {
  if (!sweep || !gap_hz) return invalid("bad sweep/outputs");
  return guarded([&] {
    const AnticrossingGap g = anticrossing_gap(sweep->value, branch_i, branch_j);
    *gap_hz = g.gap_hz;
    if (ng_at_min) *ng_at_min = g.ng_at_min;
    if (interior) *interior = g.interior_minimum ? 1 : 0;
    if (confidence) *confidence = g.confidence_at_min;
  });
}

} /* extern "C" */
