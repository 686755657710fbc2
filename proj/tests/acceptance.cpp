// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in code next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "core/cavity.hpp"
#include "core/constants.hpp"
#include "core/fit_models.hpp"
#include "core/floquet.hpp"
#include "core/rates.hpp"
#include "core/readout.hpp"
#include "core/rng.hpp"
#include "core/thermal.hpp"
#include "core/transmon.hpp"
#include "device_cards.hpp"

using namespace hfcqed;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int index, bool pass, const std::string& what, const std::string& detail,
            double seconds, double budget_s) {
  const bool in_budget = budget_s <= 0.0 || seconds <= budget_s;
  const bool ok = pass && in_budget;
  if (!ok) ++g_failures;
  std::printf("%s  [%2d] %s  (%s; %.2f s%s)\n", ok ? "PASS" : "FAIL", index, what.c_str(),
              detail.c_str(), seconds,
              budget_s > 0 ? (in_budget ? "" : " OVER BUDGET") : "");
  std::fflush(stdout);
}

Spectrum device_spectrum(const DeviceCard& d) {
  TransmonParams p;
  p.ej_hz = d.ej;
  p.ec_hz = d.ec;
  p.ng = kFittingOffsetCharge;
  return diagonalize(p);
}

// 1. Card spectrum reproduction: f01 within 2% at n_g = 0.25 for all devices.
void criterion_1() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (const DeviceCard& d : kDevices) {
    const double f01 = transitions(device_spectrum(d)).f01_hz;
    const double rel = std::abs(f01 - d.f01) / d.f01;
    if (rel >= 0.02) pass = false;
    detail += std::string(d.name) + ": " + std::to_string(f01 / 1e9) + " GHz (" +
              std::to_string(rel * 100.0) + "%) ";
  }
  report(1, pass, "device cards A-D reproduce f01 within 2%", detail, t.seconds(), 1.0);
}

// 2. Coupling closure: g solved from the card chi within 5% for all devices.
void criterion_2() {
  Timer t;
  bool pass = true;
  std::string detail;
  for (const DeviceCard& d : kDevices) {
    const Spectrum s = device_spectrum(d);
    const double g = solve_g_from_chi(s, -d.chi_abs, d.f_cav);
    const double rel = std::abs(g - d.g) / d.g;
    if (rel >= 0.05) pass = false;
    detail += std::string(d.name) + ": " + std::to_string(g / 1e6) + " MHz (" +
              std::to_string(rel * 100.0) + "%) ";
  }
  report(2, pass, "g from card chi within 5% for A-D", detail, t.seconds(), 5.0);
}

// 3. Dispersive-shift scan character over 10-25 GHz for device C.
void criterion_3() {
  Timer t;
  const Spectrum s = device_spectrum(kDeviceC);
  const CouplingModel model{kDeviceC.g, kDeviceC.f_cav};

  std::vector<double> grid;
  for (int k = 0; k < 301; ++k) grid.push_back(10e9 + 15e9 * k / 300.0);

  // (a) magnitude anchor at the operating point
  const double chi_op = chi_perturbative(s, kDeviceC.g, kDeviceC.f_cav);
  const bool anchor_ok = std::abs(2.0 * chi_op) >= 1e6;

  // (b) flags at the default 50 MHz guard match an independently derived
  // within-guard predicate, exactly
  const auto scan50 = chi_scan(s, model, grid, 12, 50e6);
  bool flags_ok = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    bool expected = false;
    for (int j = 0; j <= 1 && !expected; ++j)
      for (int i = 0; i < 12; ++i) {
        if (i == j) continue;
        if (std::abs(std::abs(s.energy(i) - s.energy(j)) - grid[k]) < 50e6) {
          expected = true;
          break;
        }
      }
    if (scan50[k].pole_flag != expected) flags_ok = false;
  }

  // (c) away from resonances the magnitude stays within one decade; the
  // pole-influence radius for this qualitative band check is 500 MHz (the
  // strongest in-window residues perturb roughly that far)
  const auto scan = chi_scan(s, model, grid, 12, 500e6);
  double lo = 1e18, hi = 0.0;
  int used = 0;
  for (const ChiScanPoint& pt : scan) {
    if (pt.pole_flag) continue;
    const double a = std::abs(2.0 * pt.chi_hz);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    ++used;
  }
  const bool decade_ok = used > 100 && hi / lo < 10.0;

  report(3, anchor_ok && flags_ok && decade_ok,
         "scan: |2chi|>=1 MHz at 20.92 GHz, exact pole flags, one-decade band",
         "|2chi|=" + std::to_string(std::abs(2 * chi_op) / 1e6) + " MHz, band [" +
             std::to_string(lo / 1e6) + ", " + std::to_string(hi / 1e6) + "] MHz over " +
             std::to_string(used) + " pts",
         t.seconds(), 0.0);
}

// 4. CKP joint-fit round trip at 5%-of-peak noise: chi and kappa within 10%
// in at least 95 of 100 seeded trials.
void criterion_4() {
  Timer t;
  fit::CkpModel truth;
  truth.omega01_hz = kDeviceC.f01;
  truth.chi_hz = -0.94e6;
  truth.kappa_hz = kDeviceC.kappa;
  truth.omega_r_hz = kDeviceC.f_cav;
  truth.amp2_hz = 1.25 * truth.kappa_hz;  // peak nbar = 4 amp2 / kappa = 5
  const double peak_shift = std::abs(2.0 * truth.chi_hz * 4.0 * truth.amp2_hz / truth.kappa_hz);

  int ok = 0;
  const int n_pts = 401;
  for (int seed = 0; seed < 100; ++seed) {
    RandomStream rs(9000 + seed, 0);
    fit::Trace g, e;
    for (int k = 0; k < n_pts; ++k) {
      const double x = truth.omega_r_hz - 20e6 + 40e6 * k / (n_pts - 1.0);
      g.x.push_back(x);
      e.x.push_back(x);
      g.y.push_back(fit::ckp_stark_curve(x, truth, false) +
                    0.05 * peak_shift * rs.next_normal());
      e.y.push_back(fit::ckp_stark_curve(x, truth, true) +
                    0.05 * peak_shift * rs.next_normal());
    }
    fit::CkpModel init = truth;
    init.chi_hz *= 1.3;
    init.kappa_hz *= 0.85;
    init.omega_r_hz += 2e6;
    init.amp2_hz *= 1.4;
    try {
      const fit::FitResult r = fit::ckp_joint_fit(g, e, init);
      if (r.converged &&
          std::abs(r.value("chi") - truth.chi_hz) < 0.10 * std::abs(truth.chi_hz) &&
          std::abs(r.value("kappa") - truth.kappa_hz) < 0.10 * truth.kappa_hz)
        ++ok;
    } catch (const std::exception&) {
    }
  }
  report(4, ok >= 95, "CKP joint fit: chi, kappa within 10% at 5%-of-peak noise",
         std::to_string(ok) + "/100 trials", t.seconds(), 30.0);
}

struct EtaScenario {
  ReadoutScenario scenario;
  double nbar;
  double tau;
};

// scenario whose empirical SNR matches the theoretical one at eta: a fixed
// pointer-state angle, with the blob separation realizing the SNR
EtaScenario make_eta_scenario(double eta, double kappa, double nbar, double tau,
                              std::uint64_t seed, double t1 = 200e-6) {
  EtaScenario out;
  const double theta = 0.1880906;
  const double target_snr = snr_theory(eta, kappa, nbar, tau, theta);
  const double sep = std::sqrt(2.0 * target_snr);  // sigma = 1
  const double radius = sep / (2.0 * std::sin(0.5 * theta));
  const double base = 2.8;
  out.scenario.blob.mu_g = {radius * std::cos(base), radius * std::sin(base)};
  out.scenario.blob.mu_e = {radius * std::cos(base + theta), radius * std::sin(base + theta)};
  out.scenario.blob.sigma = 1.0;
  out.scenario.t1_s = t1;
  out.scenario.tau_s = tau;
  out.scenario.seed = seed;
  out.nbar = nbar;
  out.tau = tau;
  return out;
}

double measured_snr(const EtaScenario& sc, std::size_t n_per_set, BlobModel* blob_out) {
  ReadoutScenario g = sc.scenario;
  g.populations[StateLabel::g] = 1.0;
  ReadoutScenario e = sc.scenario;
  e.populations[StateLabel::e] = 1.0;
  e.seed = sc.scenario.seed + 1;
  const ShotSet gs = simulate_shots(g, n_per_set);
  const ShotSet es = simulate_shots(e, n_per_set);
  const BlobBuildResult blob = blob_from_labeled(gs, es);
  if (blob_out) *blob_out = blob.blob;
  return snr_empirical(blob.blob);
}

// 5. Efficiency pipeline: eta = 0.08 scenario, 1e5 shots, blob fit, eta within
// 5% and T_sys consistent with ~12 K within 10%.
void criterion_5() {
  Timer t;
  const double kappa = kDeviceC.kappa, nbar = 14.0, tau = 2.5e-6;
  const EtaScenario sc = make_eta_scenario(0.08, kappa, nbar, tau, 20260801);
  BlobModel blob;
  measured_snr(sc, 50000, &blob);  // 1e5 shots total
  const EfficiencyResult eff = efficiency(blob, kappa, nbar, tau, kDeviceC.f_cav);
  const bool eta_ok = std::abs(eff.eta - 0.08) / 0.08 < 0.05;
  const bool tsys_ok = std::abs(eff.t_sys_k - 12.0) / 12.0 < 0.10;
  report(5, eta_ok && tsys_ok, "efficiency pipeline: eta within 5%, T_sys ~ 12 K within 10%",
         "eta=" + std::to_string(eff.eta) + ", T_sys=" + std::to_string(eff.t_sys_k) + " K",
         t.seconds(), 60.0);
}

// 6. SNR linearity in nbar and tau (R^2 > 0.999 over a 10x range) and eta
// independence (< 5% variation across nbar).
void criterion_6() {
  Timer t;
  const double kappa = kDeviceC.kappa;

  auto r_squared = [](const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
      sx += x[k];
      sy += y[k];
      sxx += x[k] * x[k];
      sxy += x[k] * y[k];
    }
    const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double b = (sy - a * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (std::size_t k = 0; k < n; ++k) {
      ss_res += std::pow(y[k] - (a * x[k] + b), 2.0);
      ss_tot += std::pow(y[k] - mean, 2.0);
    }
    return 1.0 - ss_res / ss_tot;
  };

  std::vector<double> nbars = {2.0, 4.0, 8.0, 14.0, 20.0};
  std::vector<double> snr_vs_n, eta_vs_n;
  for (std::size_t k = 0; k < nbars.size(); ++k) {
    const EtaScenario sc =
        make_eta_scenario(0.08, kappa, nbars[k], 2.5e-6, 555000 + 10 * k);
    BlobModel blob;
    const double snr = measured_snr(sc, 50000, &blob);
    snr_vs_n.push_back(snr);
    eta_vs_n.push_back(efficiency(blob, kappa, nbars[k], 2.5e-6, kDeviceC.f_cav).eta);
  }
  const double r2_n = r_squared(nbars, snr_vs_n);

  std::vector<double> taus = {0.5e-6, 1.0e-6, 2.5e-6, 5.0e-6};
  std::vector<double> snr_vs_tau;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const EtaScenario sc = make_eta_scenario(0.08, kappa, 14.0, taus[k], 777000 + 10 * k);
    snr_vs_tau.push_back(measured_snr(sc, 50000, nullptr));
  }
  const double r2_tau = r_squared(taus, snr_vs_tau);

  double eta_lo = 1e18, eta_hi = 0.0;
  for (double e : eta_vs_n) {
    eta_lo = std::min(eta_lo, e);
    eta_hi = std::max(eta_hi, e);
  }
  const double eta_spread = (eta_hi - eta_lo) / (0.5 * (eta_hi + eta_lo));

  report(6, r2_n > 0.999 && r2_tau > 0.999 && eta_spread < 0.05,
         "SNR linear in nbar and tau (R^2 > 0.999); eta spread < 5%",
         "R2(nbar)=" + std::to_string(r2_n) + ", R2(tau)=" + std::to_string(r2_tau) +
             ", eta spread=" + std::to_string(eta_spread * 100) + "%",
         t.seconds(), 0.0);
}

// 7. Repeated-measurement error pipeline at the published mechanism scales.
void criterion_7() {
  Timer t;
  const double sigma = 1.0;
  const double radius = 8.34;  // blob radius over sigma: well-separated zones
  // keep all zones far from the 0/2pi wrap of the angle coordinate
  const double base = 1.0 - constants::pi;  // angle-from-neg-x of the g blob = 1.0 rad
  const double sep_angle = 1.0;             // non-g zone one radian away
  const double leak_angle = 3.2 - constants::pi;

  BlobModel blob;
  blob.mu_g = {radius * std::cos(base), radius * std::sin(base)};
  blob.mu_e = {radius * std::cos(base + sep_angle), radius * std::sin(base + sep_angle)};
  blob.sigma = sigma;

  ReadoutScenario g_proto;  // repeated ground-state readout with a small leak
  g_proto.blob = blob;
  g_proto.t1_s = 0.0;  // the ground state does not decay
  g_proto.tau_s = 2.5e-6;
  g_proto.leakage_fraction = 2e-3;
  g_proto.leakage_center = {radius * std::cos(leak_angle), radius * std::sin(leak_angle)};
  g_proto.populations[StateLabel::g] = 1.0;
  g_proto.seed = 424242;

  ReadoutScenario f_proto = g_proto;  // non-g state with decay during readout
  f_proto.populations.clear();
  f_proto.populations[StateLabel::e] = 1.0;  // the e slot carries the non-g blob
  f_proto.t1_s = 2.5e-6 / 0.0125;            // tau/T1 = 0.0125
  f_proto.leakage_fraction = 2e-3;
  f_proto.seed = 434343;

  // first readouts for the post-selection gate (ground-state test at 1 sigma)
  ReadoutScenario first = g_proto;
  first.seed = 515151;

  const std::size_t n_pairs = 110000;
  const std::size_t n_keep = 40000;

  auto conditioned = [&](const ReadoutScenario& second_proto,
                         std::uint64_t first_seed) -> ShotSet {
    ReadoutScenario f1 = first;
    f1.seed = first_seed;
    const ShotSet firsts = simulate_shots(f1, n_pairs);
    const ShotSet seconds = simulate_shots(second_proto, n_pairs);
    const std::vector<bool> gate = postselect_ground(firsts, blob, 1.0);
    ShotSet out;
    out.label = seconds.label;
    for (std::size_t k = 0; k < gate.size() && out.shots.size() < n_keep; ++k)
      if (gate[k]) out.shots.push_back(seconds.shots[k]);
    return out;
  };

  const ShotSet g_cond = conditioned(g_proto, 616161);
  const ShotSet f_cond = conditioned(f_proto, 717171);
  const bool counts_ok = g_cond.shots.size() == n_keep && f_cond.shots.size() == n_keep;

  const int bins = 720;
  const AngularHistogram hg = angular_histogram(g_cond, {0, 0}, bins);
  const AngularHistogram hf = angular_histogram(f_cond, {0, 0}, bins);
  const double threshold = 1.0 + 0.5 * sep_angle;  // angular midpoint of the two zones
  const AssignmentErrors err = assignment_errors(hg, hf, threshold);

  const bool p1 = err.p_notg_given_g > 1e-3 && err.p_notg_given_g < 3e-3;
  const bool p2 = err.p_g_given_notg > 3e-3 && err.p_g_given_notg < 9e-3;
  const bool p3 = err.epsilon_assignment > 2e-3 && err.epsilon_assignment < 6e-3;
  report(7, counts_ok && p1 && p2 && p3,
         "assignment pipeline: P(notg|g)~2e-3, P(g|notg)~6e-3, eps~4e-3 within 50%",
         "P(notg|g)=" + std::to_string(err.p_notg_given_g) +
             ", P(g|notg)=" + std::to_string(err.p_g_given_notg) +
             ", eps=" + std::to_string(err.epsilon_assignment) + " at 40k conditioned shots",
         t.seconds(), 60.0);
}

// 8. Thermal-chain claims at 50 mK and the warm-last-attenuator comparison.
void criterion_8() {
  Timer t;
  const double n7 = bose_einstein(7e9, 0.050);
  const double n14 = bose_einstein(14e9, 0.050);
  const bool i_ok = n7 >= 1e-3 && n7 <= 2e-3;
  const bool ii_ok = n14 <= 2e-6;

  AttenuationChain chain;
  chain.source_temperature_k = 300.0;
  chain.stages = {Stage{4.0, 20.0}, Stage{0.8, 10.0}, Stage{0.1, 10.0}, Stage{0.01, 20.0}};
  AttenuationChain warm = apply_edits(chain, {ChainEdit{3, 0.1, std::nullopt}});

  const double b21 = cascade(chain, 21e9);
  const double w21 = cascade(warm, 21e9);
  const double b7 = cascade(chain, 7e9);
  const double w7 = cascade(warm, 7e9);
  const double rel21 = std::abs(w21 - b21) / b21;
  const double rel7 = std::abs(w7 - b7) / b7;
  const bool iii_ok = rel21 < 0.10 && rel7 >= 10.0 * rel21;

  report(8, i_ok && ii_ok && iii_ok,
         "thermal chain: n(7 GHz) in [1e-3, 2e-3], n(14 GHz) <= 2e-6, warm-last comparison",
         "n7=" + std::to_string(n7) + ", n14=" + std::to_string(n14) +
             ", rel21=" + std::to_string(rel21 * 100) + "%, rel7=" +
             std::to_string(rel7 * 100) + "%",
         t.seconds(), 1.0);
}

// 9. Thermal dephasing with Bose-Einstein occupation strictly decreases in
// cavity frequency over 5-30 GHz at 50 mK.
void criterion_9() {
  Timer t;
  bool pass = true;
  double prev = thermal_dephasing_rate(kDeviceC.chi_abs, kDeviceC.kappa,
                                       bose_einstein(5e9, 0.050));
  for (int k = 1; k <= 250; ++k) {
    const double f = 5e9 + 25e9 * k / 250.0;
    const double g = thermal_dephasing_rate(kDeviceC.chi_abs, kDeviceC.kappa,
                                            bose_einstein(f, 0.050));
    if (g >= prev) pass = false;
    prev = g;
  }
  report(9, pass, "Gamma_phi(omega_r) with thermal occupation strictly decreasing, 5-30 GHz",
         "251-point finite differences all negative", t.seconds(), 1.0);
}

// 10. Driven-transmon quasienergy map: anticrossing width ordering, quiet
// ground branch, zero-drive folding.
void criterion_10() {
  Timer t;
  TransmonParams params;
  params.ej_hz = kDeviceC.ej;
  params.ec_hz = kDeviceC.ec;
  params.ng = 0.25;
  const double omega_d = kDeviceC.f_cav;

  std::vector<double> grid;
  for (int k = 0; k < 101; ++k) grid.push_back(0.5 * k / 100.0);

  // (c) zero-drive quasienergies = folded static energies to 1e-9 omega_d
  const QuasienergySweep sweep0 = sweep_ng(params, {0.0, omega_d}, grid, 13);
  bool fold_ok = true;
  for (std::size_t k = 0; k < grid.size(); k += 10) {
    TransmonParams p = params;
    p.ng = grid[k];
    const Spectrum s = diagonalize(p);
    for (int b = 0; b < 13; ++b) {
      const double expect = s.energy(b);
      if (quasienergy_distance(sweep0.branches(b, static_cast<Eigen::Index>(k)), expect,
                               omega_d) > 1e-9 * omega_d)
        fold_ok = false;
    }
  }

  // drive calibrations and sweeps at 10/30/90 MHz Stark shift
  double widths[3] = {0, 0, 0};
  double raw_gaps[3] = {0, 0, 0};
  double floors[4] = {0, 0, 0, 0};
  auto branch0_floor = [&](const QuasienergySweep& sweep) {
    // coarse minimum over all branches, refined on the winning pair
    int best_j = 1;
    double best = 1e18;
    for (int j = 1; j < 13; ++j) {
      for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(grid.size()); ++k) {
        const double d =
            quasienergy_distance(sweep.branches(0, k), sweep.branches(j, k), omega_d);
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
    }
    return anticrossing_gap(sweep, 0, best_j).gap_hz;
  };
  floors[0] = branch0_floor(sweep0);

  const double targets[3] = {10e6, 30e6, 90e6};
  for (int p = 0; p < 3; ++p) {
    const double amp = calibrate_drive_amplitude(params, omega_d, targets[p]);
    const QuasienergySweep sweep = sweep_ng(params, {amp, omega_d}, grid, 13);
    const AnticrossingGap gap = anticrossing_gap(sweep, 1, 6);
    raw_gaps[p] = gap.gap_hz;
    // an anticrossing exists when the branches hybridize at an interior
    // minimum; otherwise its width is zero (resonance not reached)
    const bool resolved = gap.interior_minimum && gap.confidence_at_min < 0.8;
    widths[p] = resolved ? gap.gap_hz : 0.0;
    floors[p + 1] = branch0_floor(sweep);
  }

  const bool widths_ok = widths[0] < widths[1] && widths[1] < widths[2];
  const bool quiet_ok = floors[1] <= 10.0 * floors[0] && floors[2] <= 10.0 * floors[0] &&
                        floors[3] <= 10.0 * floors[0];

  char buf[512];
  std::snprintf(buf, sizeof buf,
                "widths(10/30/90)=%.2f/%.2f/%.2f MHz (raw min %.2f/%.2f/%.2f), "
                "branch0 floors zero/10/30/90=%.3f/%.3f/%.3f/%.3f MHz",
                widths[0] / 1e6, widths[1] / 1e6, widths[2] / 1e6, raw_gaps[0] / 1e6,
                raw_gaps[1] / 1e6, raw_gaps[2] / 1e6, floors[0] / 1e6, floors[1] / 1e6,
                floors[2] / 1e6, floors[3] / 1e6);
  report(10, fold_ok && widths_ok && quiet_ok,
         "quasienergy map: (1,6) width increasing 10->30->90, branch 0 quiet, exact folding",
         buf, t.seconds(), 600.0);
}

// 11. Fitter round-trip suite.
void criterion_11() {
  Timer t;
  bool pass = true;
  std::string detail;

  // every model recovers its own noiseless parameters to 1e-6 relative
  {
    fit::Trace trace;
    for (int k = 0; k < 201; ++k) {
      const double x = 3.0 + 4.0 * k / 200.0;
      trace.x.push_back(x);
      trace.y.push_back(fit::lorentzian(x, 5.0, 0.4, 2.0, 0.3));
    }
    const fit::FitResult r = fit::lorentzian_peak(trace);
    if (!(r.converged && std::abs(r.value("center") - 5.0) < 5e-6 &&
          std::abs(r.value("width") - 0.4) < 0.4e-6))
      pass = false, detail += "lorentzian ";
  }
  {
    fit::CkpModel truth;
    truth.omega01_hz = kDeviceC.f01;
    truth.chi_hz = -0.94e6;
    truth.kappa_hz = kDeviceC.kappa;
    truth.omega_r_hz = kDeviceC.f_cav;
    truth.amp2_hz = 1.25 * truth.kappa_hz;
    fit::Trace g, e;
    for (int k = 0; k < 201; ++k) {
      const double x = truth.omega_r_hz - 20e6 + 40e6 * k / 200.0;
      g.x.push_back(x);
      e.x.push_back(x);
      g.y.push_back(fit::ckp_stark_curve(x, truth, false));
      e.y.push_back(fit::ckp_stark_curve(x, truth, true));
    }
    fit::CkpModel init = truth;
    init.chi_hz *= 1.3;
    const fit::FitResult r = fit::ckp_joint_fit(g, e, init);
    if (!(r.converged && std::abs(r.value("chi") - truth.chi_hz) < 1e-6 * std::abs(truth.chi_hz)))
      pass = false, detail += "ckp ";
  }
  {
    std::vector<std::pair<double, double>> pts;
    const double slope = 2.0 * kDeviceC.kappa * 0.94e6 * 0.94e6 /
                         (0.94e6 * 0.94e6 + 0.25 * kDeviceC.kappa * kDeviceC.kappa);
    for (double n = 0.1; n < 0.95; n += 0.1) pts.emplace_back(n, slope * n);
    const fit::FitResult r = fit::gamma_m_fit(pts, kDeviceC.kappa);
    if (!(r.converged && std::abs(r.value("chi") - 0.94e6) < 1e-6 * 0.94e6))
      pass = false, detail += "gamma_m ";
  }
  {
    fit::Trace trace;
    for (int k = 0; k < 101; ++k) {
      const double x = 12.5e-6 * k;
      trace.x.push_back(x);
      trace.y.push_back(0.85 * std::exp(-x / 250e-6) + 0.1);
    }
    const fit::FitResult r = fit::decay_fit(trace, fit::DecayKind::t1);
    if (!(r.converged && std::abs(r.value("time_constant") - 250e-6) < 1e-6 * 250e-6))
      pass = false, detail += "decay ";
  }
  {
    fit::Trace trace;
    for (int k = 0; k < 501; ++k) {
      const double x = 300e-6 * k / 500.0;
      trace.x.push_back(x);
      trace.y.push_back(std::exp(-x / 112e-6) * 0.45 *
                            std::cos(constants::two_pi * 0.5e6 * x + 0.4) +
                        0.5);
    }
    const fit::FitResult r = fit::ramsey_fit(trace, 1);
    if (!(r.converged && std::abs(r.value("f1") - 0.5e6) < 1e-6 * 0.5e6 &&
          std::abs(r.value("t2_star") - 112e-6) < 1e-6 * 112e-6))
      pass = false, detail += "ramsey ";
  }

  // decay at 3% noise: tau within 5% at the 95th percentile of 100 seeds
  {
    std::vector<double> errs;
    for (int seed = 0; seed < 100; ++seed) {
      RandomStream rs(3100 + seed, 0);
      fit::Trace trace;
      for (int k = 0; k < 201; ++k) {
        const double x = 1.25e-3 * k / 200.0;  // 5 tau
        trace.x.push_back(x);
        trace.y.push_back(0.85 * std::exp(-x / 250e-6) + 0.1 +
                          0.03 * 0.85 * rs.next_normal());
      }
      const fit::FitResult r = fit::decay_fit(trace, fit::DecayKind::t1);
      errs.push_back(r.converged
                         ? std::abs(r.value("time_constant") - 250e-6) / 250e-6
                         : 1.0);
    }
    std::sort(errs.begin(), errs.end());
    if (!(errs[94] < 0.05)) pass = false, detail += "decay-noise(" +
                                                    std::to_string(errs[94]) + ") ";
  }

  // two-beat Ramsey resolves a 300 kHz splitting within 10 kHz
  {
    int ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
      RandomStream rs(4100 + seed, 0);
      fit::Trace trace;
      for (int k = 0; k < 501; ++k) {
        const double x = 300e-6 * k / 500.0;
        trace.x.push_back(x);
        const double y = std::exp(-x / 80e-6) *
                             (0.3 * std::cos(constants::two_pi * 0.35e6 * x) +
                              0.3 * std::cos(constants::two_pi * 0.65e6 * x)) +
                         0.5;
        trace.y.push_back(y + 0.02 * 0.6 * rs.next_normal());
      }
      try {
        const fit::FitResult r = fit::ramsey_fit(trace, 2, 99);
        if (r.converged && std::abs(r.value("f1") - 0.35e6) < 10e3 &&
            std::abs(r.value("f2") - 0.65e6) < 10e3)
          ++ok;
      } catch (const std::exception&) {
      }
    }
    if (ok < 95) pass = false, detail += "ramsey-2beat(" + std::to_string(ok) + "/100) ";
  }

  report(11, pass, "fitter round trips, noisy decay 95th pct < 5%, 300 kHz beats to 10 kHz",
         detail.empty() ? "all subtests green" : detail, t.seconds(), 60.0);
}

// 12. Coherence bookkeeping anchors.
void criterion_12() {
  Timer t;
  const double t_phi = pure_dephasing_time(kDeviceD.t1, kDeviceD.t2e);
  const bool tphi_ok =
      std::abs(t_phi - 970e-6) / 970e-6 < 0.01 && std::abs(t_phi - 1e-3) / 1e-3 < 0.10;

  // forward model at the bound nbar = 5e-4, then invert
  const double nbar_true = 5e-4;
  const double t1 = kDeviceC.t1;
  const double omega = 1.5e6;
  const double s_hz =
      spin_locking_psd(kDeviceC.chi_abs, kDeviceC.kappa, nbar_true, omega);
  const double t_rho = 1.0 / (0.5 / t1 + 0.5 * constants::two_pi * s_hz);
  const double nbar =
      nbar_from_spin_locking(t_rho, t1, kDeviceC.chi_abs, kDeviceC.kappa, omega);
  const bool nbar_ok = std::abs(nbar - nbar_true) < 1e-6;

  report(12, tphi_ok && nbar_ok,
         "pure dephasing ~ 970 us (device D) and spin-locking nbar inversion to 1e-6",
         "T_phi=" + std::to_string(t_phi * 1e6) + " us, nbar=" + std::to_string(nbar),
         t.seconds(), 1.0);
}

}  // namespace

int main() {
  std::printf("hfcqed acceptance suite\n");
  Timer total;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  std::printf("%d of 12 criteria failed (total %.1f s)\n", g_failures, total.seconds());
  return g_failures == 0 ? 0 : 1;
}
