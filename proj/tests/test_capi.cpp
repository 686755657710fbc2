// Exercises the shared-library surface exactly as an external client would:
// only hfcqed.h, opaque handles, and status codes.
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "hfcqed.h"

TEST_CASE("version and status names") {
  CHECK(std::string(hfq_version()) == "0.1.0");
  CHECK(std::string(hfq_status_name(HFQ_OK)) == "ok");
  CHECK(std::string(hfq_status_name(HFQ_ERR_POLE_PROXIMITY)) == "pole_proximity");
}

TEST_CASE("spectrum lifecycle and values") {
  hfq_spectrum* s = nullptr;
  REQUIRE(hfq_spectrum_create(15.4e9, 0.26e9, 0.25, 0, &s) == HFQ_OK);
  REQUIRE(s != nullptr);
  CHECK(hfq_spectrum_num_levels(s) >= 12);

  double f01 = 0, f12 = 0, f23 = 0;
  REQUIRE(hfq_spectrum_transitions(s, &f01, &f12, &f23) == HFQ_OK);
  CHECK(std::abs(f01 - 5.36e9) / 5.36e9 < 0.02);
  CHECK(f12 < f01);

  std::vector<double> energies(12);
  REQUIRE(hfq_spectrum_energies(s, energies.data(), 12) == HFQ_OK);
  CHECK(energies[0] == 0.0);
  CHECK(energies[1] == doctest::Approx(f01));

  double n01 = 0;
  REQUIRE(hfq_spectrum_charge_element(s, 0, 1, &n01) == HFQ_OK);
  CHECK(n01 > 1.0);

  double ej = 0, ec = 0, resid = 0;
  REQUIRE(hfq_fit_ej_ec(f01, f12, f23, 0.25, &ej, &ec, &resid) == HFQ_OK);
  CHECK(ej == doctest::Approx(15.4e9).epsilon(1e-3));
  CHECK(ec == doctest::Approx(0.26e9).epsilon(1e-3));

  hfq_spectrum_free(s);
}

TEST_CASE("invalid arguments produce status codes and messages") {
  hfq_spectrum* s = nullptr;
  CHECK(hfq_spectrum_create(-1.0, 0.26e9, 0.25, 0, &s) == HFQ_ERR_INVALID_ARGUMENT);
  CHECK(std::string(hfq_last_error()).find("e_j") != std::string::npos);
  CHECK(s == nullptr);

  double out = 0;
  CHECK(hfq_bose_einstein(-1.0, 0.05, &out, nullptr) == HFQ_ERR_INVALID_ARGUMENT);
  CHECK(hfq_te110_frequency(7e-3, 7.5e-3, 8e-3, &out) == HFQ_ERR_INVALID_ARGUMENT);
}

TEST_CASE("chi and coupling inversion through the C surface") {
  hfq_spectrum* s = nullptr;
  REQUIRE(hfq_spectrum_create(15.4e9, 0.26e9, 0.25, 0, &s) == HFQ_OK);

  double chi = 0;
  REQUIRE(hfq_chi_perturbative(s, 507e6, 20.92e9, 0, 0, &chi) == HFQ_OK);
  CHECK(chi < 0);
  CHECK(std::abs(std::abs(chi) - 0.94e6) / 0.94e6 < 0.10);

  double g = 0;
  REQUIRE(hfq_solve_g_from_chi(s, chi, 20.92e9, &g) == HFQ_OK);
  CHECK(g == doctest::Approx(507e6).epsilon(1e-6));

  // pole proximity surfaces as its dedicated status
  double e2 = 0;
  std::vector<double> en(3);
  REQUIRE(hfq_spectrum_energies(s, en.data(), 3) == HFQ_OK);
  e2 = en[2];
  CHECK(hfq_chi_perturbative(s, 507e6, e2 + 10e6, 0, 0, &chi) == HFQ_ERR_POLE_PROXIMITY);

  std::vector<double> grid = {10e9, 15e9, 20e9, 25e9};
  std::vector<double> chis(4);
  std::vector<int> flags(4);
  REQUIRE(hfq_chi_scan(s, 507e6, 20.92e9, grid.data(), 4, 0, 0, chis.data(), flags.data()) ==
          HFQ_OK);

  hfq_spectrum_free(s);
}

TEST_CASE("rates through the C surface") {
  double v = 0;
  REQUIRE(hfq_bose_einstein(7e9, 0.05, &v, nullptr) == HFQ_OK);
  CHECK(v == doctest::Approx(1.209e-3).epsilon(0.01));
  REQUIRE(hfq_stark_shift(0.94e6, 14.0, &v) == HFQ_OK);
  CHECK(v == doctest::Approx(26.32e6).epsilon(1e-9));
  REQUIRE(hfq_meas_dephasing_rate(0.94e6, 11.28e6, 1.0, &v) == HFQ_OK);
  CHECK(v == doctest::Approx(0.61e6).epsilon(0.01));
  REQUIRE(hfq_pure_dephasing_time(330e-6, 280e-6, &v) == HFQ_OK);
  CHECK(v == doctest::Approx(970e-6).epsilon(0.01));
  REQUIRE(hfq_purcell_rate(11.28e6, 507e6, 20.92e9, 5.36e9, &v) == HFQ_OK);
  double t1 = 0;
  REQUIRE(hfq_lifetime_from_rate_hz(v, &t1) == HFQ_OK);
  CHECK(t1 > 3.5e-3);
}

TEST_CASE("thermal chain handles") {
  hfq_chain* c = nullptr;
  REQUIRE(hfq_chain_create(300.0, &c) == HFQ_OK);
  REQUIRE(hfq_chain_add_stage(c, 4.0, 20.0) == HFQ_OK);
  REQUIRE(hfq_chain_add_stage(c, 0.8, 20.0) == HFQ_OK);
  REQUIRE(hfq_chain_add_stage(c, 0.1, 20.0) == HFQ_OK);
  REQUIRE(hfq_chain_add_stage(c, 0.01, 20.0) == HFQ_OK);
  CHECK(hfq_chain_num_stages(c) == 4);

  double n = 0;
  REQUIRE(hfq_chain_cascade(c, 21e9, &n) == HFQ_OK);
  CHECK(n == doctest::Approx(4.605445149461351e-05).epsilon(1e-12));

  hfq_chain* warm = nullptr;
  REQUIRE(hfq_chain_clone_with_edit(c, 3, 0.1, NAN, &warm) == HFQ_OK);
  double n2 = 0;
  REQUIRE(hfq_chain_cascade(warm, 21e9, &n2) == HFQ_OK);
  CHECK(n2 > n);

  // profile stage with out-of-range frequency -> domain error
  std::vector<double> pf = {10e9, 30e9};
  std::vector<double> pdb = {10.0, 20.0};
  REQUIRE(hfq_chain_add_profile_stage(warm, 0.1, pf.data(), pdb.data(), 2) == HFQ_OK);
  CHECK(hfq_chain_cascade(warm, 5e9, &n2) == HFQ_ERR_DOMAIN);

  hfq_chain_free(warm);
  hfq_chain_free(c);
}

TEST_CASE("fit handles: decay fit end to end") {
  std::vector<double> x, y;
  for (int k = 0; k < 51; ++k) {
    x.push_back(25e-6 * k);
    y.push_back(0.85 * std::exp(-x.back() / 250e-6) + 0.1);
  }
  hfq_fit* f = nullptr;
  REQUIRE(hfq_decay_fit(x.data(), y.data(), 51, "t1", &f) == HFQ_OK);
  CHECK(hfq_fit_converged(f) == 1);
  double tau = 0, sigma = 0;
  REQUIRE(hfq_fit_param(f, "time_constant", &tau, &sigma) == HFQ_OK);
  CHECK(tau == doctest::Approx(250e-6).epsilon(1e-8));
  CHECK(hfq_fit_num_params(f) == 3);
  CHECK(std::string(hfq_fit_param_name(f, 0)) == "time_constant");
  double bogus = 0;
  CHECK(hfq_fit_param(f, "nope", &bogus, nullptr) == HFQ_ERR_INVALID_ARGUMENT);
  hfq_fit_free(f);

  CHECK(hfq_decay_fit(x.data(), y.data(), 51, "banana", &f) == HFQ_ERR_INVALID_ARGUMENT);
}

TEST_CASE("ckp fit through the C surface") {
  hfq_ckp_params truth{5.36e9, -0.94e6, 11.28e6, 20.92e9, 0.04e6};
  std::vector<double> xg, yg, xe, ye;
  for (int k = 0; k < 201; ++k) {
    const double x = 20.92e9 - 20e6 + 40e6 * k / 200.0;
    double v = 0;
    REQUIRE(hfq_ckp_curve(&truth, 0, x, &v) == HFQ_OK);
    xg.push_back(x);
    yg.push_back(v);
    REQUIRE(hfq_ckp_curve(&truth, 1, x, &v) == HFQ_OK);
    xe.push_back(x);
    ye.push_back(v);
  }
  hfq_ckp_params init = truth;
  init.chi_hz *= 1.3;
  init.kappa_hz *= 0.9;
  hfq_fit* f = nullptr;
  REQUIRE(hfq_ckp_joint_fit(xg.data(), yg.data(), 201, xe.data(), ye.data(), 201, &init,
                            &f) == HFQ_OK);
  double chi = 0, kap = 0;
  REQUIRE(hfq_fit_param(f, "chi", &chi, nullptr) == HFQ_OK);
  REQUIRE(hfq_fit_param(f, "kappa", &kap, nullptr) == HFQ_OK);
  CHECK(chi == doctest::Approx(-0.94e6).epsilon(1e-6));
  CHECK(kap == doctest::Approx(11.28e6).epsilon(1e-6));
  hfq_fit_free(f);
}

TEST_CASE("readout pipeline through the C surface") {
  hfq_scenario sc{};
  sc.blob.mu_g_i = 28.0;
  sc.blob.mu_g_q = 0.0;
  sc.blob.mu_e_i = 28.0 * std::cos(0.188);
  sc.blob.mu_e_q = 28.0 * std::sin(0.188);
  sc.blob.sigma = 1.0;
  sc.t1_s = 0.0;
  sc.tau_s = 2.5e-6;
  sc.p_e = 0.0;
  sc.seed = 7;

  hfq_shots* g = nullptr;
  REQUIRE(hfq_simulate_shots(&sc, 20000, &g) == HFQ_OK);
  sc.p_e = 1.0;
  sc.seed = 8;
  hfq_shots* e = nullptr;
  REQUIRE(hfq_simulate_shots(&sc, 20000, &e) == HFQ_OK);
  CHECK(hfq_shots_count(g) == 20000);
  CHECK(std::string(hfq_shots_label(g)) == "g");
  CHECK(std::string(hfq_shots_label(e)) == "e");

  hfq_blob fitted{};
  REQUIRE(hfq_blob_from_labeled(g, e, &fitted, nullptr, nullptr, nullptr, nullptr) ==
          HFQ_OK);
  double snr = 0, theta = 0;
  REQUIRE(hfq_snr_empirical(&fitted, &snr) == HFQ_OK);
  REQUIRE(hfq_blob_theta_eg(&fitted, &theta) == HFQ_OK);
  CHECK(theta == doctest::Approx(0.188).epsilon(0.02));

  double eta = 0, tsys = 0;
  int unphys = 0;
  REQUIRE(hfq_efficiency(&fitted, 11.28e6, 14.0, 2.5e-6, 20.92e9, &eta, &tsys, &unphys) ==
          HFQ_OK);
  CHECK(eta > 0.0);
  CHECK(unphys == 0);

  std::vector<uint64_t> hist_g(360), hist_e(360);
  REQUIRE(hfq_angular_histogram(g, 0, 0, 360, hist_g.data()) == HFQ_OK);
  REQUIRE(hfq_angular_histogram(e, 0, 0, 360, hist_e.data()) == HFQ_OK);
  double thr = 0;
  REQUIRE(hfq_optimal_threshold(hist_g.data(), hist_e.data(), 360, &thr) == HFQ_OK);
  double pgg = 0, pge = 0, eps = 0;
  REQUIRE(hfq_assignment_errors(hist_g.data(), hist_e.data(), 360, thr, &pgg, &pge, &eps) ==
          HFQ_OK);
  CHECK(eps < 0.05);

  std::vector<int> keep(20000);
  REQUIRE(hfq_postselect_ground(g, &fitted, 1.0, keep.data()) == HFQ_OK);
  hfq_shots* kept = nullptr;
  REQUIRE(hfq_filter_shots(g, keep.data(), &kept) == HFQ_OK);
  CHECK(hfq_shots_count(kept) < 20000);
  CHECK(hfq_shots_count(kept) > 5000);

  hfq_shots_free(kept);
  hfq_shots_free(g);
  hfq_shots_free(e);
}

TEST_CASE("floquet through the C surface") {
  std::vector<double> eps(41);
  int n_out = 0, steps = 0;
  REQUIRE(hfq_floquet_quasienergies(15.4e9, 0.26e9, 0.25, 0, 0.0, 20.92e9, eps.data(), 41,
                                    &n_out, &steps) == HFQ_OK);
  CHECK(n_out == 41);
  CHECK(steps >= 128);

  double amp = 0;
  REQUIRE(hfq_amplitude_from_nbar(507e6, 4.0, &amp) == HFQ_OK);
  CHECK(amp == doctest::Approx(4.0 * 507e6));

  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(0.05 * k);
  hfq_sweep* sweep = nullptr;
  REQUIRE(hfq_floquet_sweep(15.4e9, 0.26e9, 0, 2e9, 20.92e9, grid.data(),
                            static_cast<int>(grid.size()), 8, &sweep) == HFQ_OK);
  CHECK(hfq_sweep_num_branches(sweep) == 8);
  CHECK(hfq_sweep_num_points(sweep) == 9);
  double ng = 0, q = 0, conf = 0;
  REQUIRE(hfq_sweep_point(sweep, 1, 3, &ng, &q, &conf) == HFQ_OK);
  CHECK(ng == doctest::Approx(0.15));
  CHECK(conf > 0.0);

  double gap = 0, ng_min = 0, c = 0;
  int interior = 0;
  REQUIRE(hfq_anticrossing_gap(sweep, 1, 6, &gap, &ng_min, &interior, &c) == HFQ_OK);
  CHECK(gap > 0.0);
  hfq_sweep_free(sweep);
}
