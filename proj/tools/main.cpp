// hfcqed command line front end. All numerics go through the C API.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_util.hpp"
#include "hfcqed.h"

namespace fs = std::filesystem;
using cli::CliError;
using cli::json;

namespace {

void check(hfq_status st, const std::string& context) {
  if (st != HFQ_OK)
    throw CliError(hfq_status_name(st), std::string(hfq_last_error()), context);
}

struct Device {
  std::string name;
  double f_cav = 0, f01 = 0, ej = 0, ec = 0, chi = 0, kappa = 0, g = 0;
  double eta = 0, t1 = 0, t2e = 0, t2star = 0, ng = 0.25;
  json raw;
};

struct Context {
  json config;
  std::string config_path;
  fs::path out_dir;
  std::optional<std::uint64_t> seed_override;
  std::string device_name;
  std::string chain_name;
  std::string scenario_name;

  json resolved(const std::string& extra_key = "", const json& extra = {}) const {
    json r;
    r["config_path"] = config_path;
    r["config"] = config;
    r["out_dir"] = out_dir.string();
    if (!device_name.empty()) r["device"] = device_name;
    if (!chain_name.empty()) r["chain"] = chain_name;
    if (!scenario_name.empty()) r["scenario"] = scenario_name;
    if (seed_override) r["seed"] = *seed_override;
    if (!extra_key.empty()) r[extra_key] = extra;
    return r;
  }
};

const json& select_named(const json& config, const std::string& group,
                         std::string& name_in_out) {
  if (!config.contains(group))
    throw CliError("invalid_argument", "config has no '" + group + "' section", group);
  const json& g = config[group];
  if (!g.is_object() || g.empty())
    throw CliError("invalid_argument", "'" + group + "' must be a non-empty object", group);
  if (name_in_out.empty()) {
    if (g.size() == 1) {
      name_in_out = g.begin().key();
    } else {
      throw CliError("invalid_argument",
                     "multiple entries in '" + group + "'; choose one with --" +
                         group.substr(0, group.size() - 1),
                     group);
    }
  }
  if (!g.contains(name_in_out))
    throw CliError("invalid_argument", "unknown " + group + " entry '" + name_in_out + "'",
                   group);
  return g[name_in_out];
}

Device load_device(Context& ctx) {
  const json& d = select_named(ctx.config, "devices", ctx.device_name);
  const std::string path = "devices." + ctx.device_name;
  Device dev;
  dev.name = ctx.device_name;
  dev.raw = d;
  dev.f_cav = cli::tagged_field(d, "f_cav", path);
  dev.f01 = cli::tagged_field(d, "f01", path);
  dev.ej = cli::tagged_field(d, "e_j", path);
  dev.ec = cli::tagged_field(d, "e_c", path);
  dev.chi = cli::tagged_field(d, "chi", path);
  dev.kappa = cli::tagged_field(d, "kappa", path);
  dev.g = cli::tagged_field(d, "g", path);
  dev.eta = cli::plain_number(d, "eta", path);
  dev.t1 = cli::tagged_field(d, "t1", path);
  dev.t2e = cli::tagged_field(d, "t2e", path);
  dev.t2star = cli::tagged_field(d, "t2star", path);
  dev.ng = d.contains("n_g") ? cli::plain_number(d, "n_g", path) : 0.25;
  return dev;
}

struct SpectrumHandle {
  hfq_spectrum* ptr = nullptr;
  ~SpectrumHandle() { hfq_spectrum_free(ptr); }
};
struct ChainHandle {
  hfq_chain* ptr = nullptr;
  ChainHandle() = default;
  ChainHandle(ChainHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  ChainHandle& operator=(ChainHandle&& other) noexcept {
    if (this != &other) {
      hfq_chain_free(ptr);
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  ChainHandle(const ChainHandle&) = delete;
  ChainHandle& operator=(const ChainHandle&) = delete;
  ~ChainHandle() { hfq_chain_free(ptr); }
};
struct FitHandle {
  hfq_fit* ptr = nullptr;
  ~FitHandle() { hfq_fit_free(ptr); }
};
struct ShotsHandle {
  hfq_shots* ptr = nullptr;
  ~ShotsHandle() { hfq_shots_free(ptr); }
};
struct SweepHandle {
  hfq_sweep* ptr = nullptr;
  ~SweepHandle() { hfq_sweep_free(ptr); }
};

json fit_to_json(const hfq_fit* fit) {
  json out;
  out["converged"] = hfq_fit_converged(fit) != 0;
  out["residual_norm"] = hfq_fit_residual_norm(fit);
  out["iterations"] = hfq_fit_iterations(fit);
  json params = json::object();
  for (int k = 0; k < hfq_fit_num_params(fit); ++k) {
    const char* name = hfq_fit_param_name(fit, k);
    double value = 0, sigma = 0;
    check(hfq_fit_param(fit, name, &value, &sigma), name);
    params[name] = {{"value", value}, {"sigma", sigma}};
  }
  out["params"] = params;
  json notes = json::array();
  for (int k = 0; k < hfq_fit_num_notes(fit); ++k) notes.push_back(hfq_fit_note(fit, k));
  out["notes"] = notes;
  return out;
}

ChainHandle build_chain(Context& ctx) {
  const json& c = select_named(ctx.config, "chains", ctx.chain_name);
  const std::string path = "chains." + ctx.chain_name;
  ChainHandle chain;
  check(hfq_chain_create(cli::tagged_field(c, "source_temperature", path), &chain.ptr), path);
  const json& stages = cli::require_field(c, "stages", path);
  int idx = 0;
  for (const json& s : stages) {
    const std::string spath = path + ".stages[" + std::to_string(idx++) + "]";
    const double t = cli::tagged_field(s, "temperature", spath);
    if (s.contains("profile")) {
      const fs::path base = fs::path(ctx.config_path).parent_path();
      const std::string file = s["profile"].get<std::string>();
      const cli::Csv prof = cli::read_csv((base / file).string());
      const int fc = prof.column("frequency_hz");
      const int ac = prof.column("attenuation_db");
      if (fc < 0 || ac < 0)
        throw CliError("io", "profile CSV needs a 'frequency_hz,attenuation_db' header", file);
      std::vector<double> f, db;
      for (const auto& row : prof.rows) {
        f.push_back(row[static_cast<std::size_t>(fc)]);
        db.push_back(row[static_cast<std::size_t>(ac)]);
      }
      check(hfq_chain_add_profile_stage(chain.ptr, t, f.data(), db.data(),
                                        static_cast<int>(f.size())),
            spath);
    } else if (s.contains("attenuation_db")) {
      check(hfq_chain_add_stage(chain.ptr, t, s["attenuation_db"].get<double>()), spath);
    } else {
      throw CliError("invalid_argument", "stage needs attenuation_db or profile", spath);
    }
  }
  return chain;
}

void read_trace_csv(const std::string& path, std::vector<double>& x, std::vector<double>& y) {
  const cli::Csv csv = cli::read_csv(path);
  const int xc = csv.column("x");
  const int yc = csv.column("y");
  if (xc < 0 || yc < 0)
    throw CliError("io", "trace CSV needs an 'x,y[,sigma]' header", path);
  for (const auto& row : csv.rows) {
    x.push_back(row[static_cast<std::size_t>(xc)]);
    y.push_back(row[static_cast<std::size_t>(yc)]);
  }
}

// ---------------- subcommands ----------------

int run_spectrum(Context& ctx, const std::string& fit_csv) {
  const Device dev = load_device(ctx);
  SpectrumHandle s;
  check(hfq_spectrum_create(dev.ej, dev.ec, dev.ng, 0, &s.ptr), "spectrum");

  double f01 = 0, f12 = 0, f23 = 0;
  check(hfq_spectrum_transitions(s.ptr, &f01, &f12, &f23), "transitions");

  const int n = hfq_spectrum_num_levels(s.ptr);
  std::vector<double> energies(static_cast<std::size_t>(n));
  check(hfq_spectrum_energies(s.ptr, energies.data(), n), "energies");

  std::vector<std::vector<double>> rows;
  for (int k = 0; k < n; ++k)
    rows.push_back({static_cast<double>(k), energies[static_cast<std::size_t>(k)]});
  cli::write_csv((ctx.out_dir / "spectrum_levels.csv").string(),
                 {"level_index", "energy_hz"}, rows);

  json results;
  results["f01_hz"] = f01;
  results["f12_hz"] = f12;
  results["f23_hz"] = f23;
  results["num_levels"] = n;
  results["energies_hz"] = energies;
  for (int k = 0; k < hfq_spectrum_num_warnings(s.ptr); ++k)
    results["warnings"].push_back(hfq_spectrum_warning(s.ptr, k));

  if (!fit_csv.empty()) {
    // measured transitions from a 3-row CSV: transition_index,frequency_hz
    const cli::Csv csv = cli::read_csv(fit_csv);
    const int tc = csv.column("transition_index");
    const int fc = csv.column("frequency_hz");
    if (tc < 0 || fc < 0 || csv.rows.size() != 3)
      throw CliError("io", "fit CSV needs 3 rows of 'transition_index,frequency_hz'", fit_csv);
    double f[3] = {0, 0, 0};
    for (const auto& row : csv.rows) {
      const int idx = static_cast<int>(row[static_cast<std::size_t>(tc)]);
      if (idx < 0 || idx > 2)
        throw CliError("invalid_argument", "transition_index must be 0, 1 or 2", fit_csv);
      f[idx] = row[static_cast<std::size_t>(fc)];
    }
    double ej = 0, ec = 0, resid = 0;
    check(hfq_fit_ej_ec(f[0], f[1], f[2], dev.ng, &ej, &ec, &resid), "fit_ej_ec");
    results["fit"] = {{"e_j_hz", ej}, {"e_c_hz", ec}, {"residual_hz", resid}};
  }

  cli::write_report(ctx.out_dir, "spectrum", ctx.resolved(), results);
  return 0;
}

int run_chi_scan(Context& ctx, double min_ghz, double max_ghz, int points, int levels,
                 double guard_mhz) {
  const Device dev = load_device(ctx);
  SpectrumHandle s;
  check(hfq_spectrum_create(dev.ej, dev.ec, dev.ng, 0, &s.ptr), "spectrum");

  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
    grid[static_cast<std::size_t>(k)] =
        (min_ghz + (max_ghz - min_ghz) * k / (points - 1.0)) * 1e9;
  std::vector<double> chi(grid.size());
  std::vector<int> flags(grid.size());
  check(hfq_chi_scan(s.ptr, dev.g, dev.f_cav, grid.data(), points, levels, guard_mhz * 1e6,
                     chi.data(), flags.data()),
        "chi_scan");

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < grid.size(); ++k)
    rows.push_back({grid[k], chi[k], 2.0 * chi[k], static_cast<double>(flags[k])});
  cli::write_csv((ctx.out_dir / "chi_scan.csv").string(),
                 {"omega_r_hz", "chi_hz", "two_chi_hz", "pole_flag"}, rows);

  double chi_at_cav = 0;
  check(hfq_chi_perturbative(s.ptr, dev.g, dev.f_cav, levels, guard_mhz * 1e6, &chi_at_cav),
        "chi at f_cav");
  double g_solved = 0;
  check(hfq_solve_g_from_chi(s.ptr, dev.chi, dev.f_cav, &g_solved), "solve_g_from_chi");

  int flagged = 0;
  for (int f : flags) flagged += f;
  json results;
  results["chi_at_f_cav_hz"] = chi_at_cav;
  results["two_chi_at_f_cav_hz"] = 2.0 * chi_at_cav;
  results["g_from_card_chi_hz"] = g_solved;
  results["points"] = points;
  results["flagged_points"] = flagged;
  cli::write_report(ctx.out_dir, "chi-scan", ctx.resolved(), results);
  return 0;
}

int run_ckp_fit(Context& ctx, const std::string& trace_g_path,
                const std::string& trace_e_path) {
  const Device dev = load_device(ctx);
  std::vector<double> xg, yg, xe, ye;
  read_trace_csv(trace_g_path, xg, yg);
  read_trace_csv(trace_e_path, xe, ye);

  hfq_ckp_params init{dev.f01, dev.chi, dev.kappa, dev.f_cav, 0.01 * dev.kappa};
  FitHandle fit;
  check(hfq_ckp_joint_fit(xg.data(), yg.data(), static_cast<int>(xg.size()), xe.data(),
                          ye.data(), static_cast<int>(xe.size()), &init, &fit.ptr),
        "ckp_joint_fit");

  hfq_ckp_params fitted{};
  double sig = 0;
  check(hfq_fit_param(fit.ptr, "omega01", &fitted.omega01_hz, &sig), "omega01");
  check(hfq_fit_param(fit.ptr, "chi", &fitted.chi_hz, &sig), "chi");
  check(hfq_fit_param(fit.ptr, "kappa", &fitted.kappa_hz, &sig), "kappa");
  check(hfq_fit_param(fit.ptr, "omega_r", &fitted.omega_r_hz, &sig), "omega_r");
  check(hfq_fit_param(fit.ptr, "amp2", &fitted.amp2_hz, &sig), "amp2");

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < xg.size(); ++k) {
    double fg = 0;
    check(hfq_ckp_curve(&fitted, 0, xg[k], &fg), "curve g");
    rows.push_back({xg[k], fg});
  }
  cli::write_csv((ctx.out_dir / "ckp_fit_g.csv").string(), {"x", "y"}, rows);
  rows.clear();
  for (std::size_t k = 0; k < xe.size(); ++k) {
    double fe = 0;
    check(hfq_ckp_curve(&fitted, 1, xe[k], &fe), "curve e");
    rows.push_back({xe[k], fe});
  }
  cli::write_csv((ctx.out_dir / "ckp_fit_e.csv").string(), {"x", "y"}, rows);

  cli::write_report(ctx.out_dir, "ckp-fit", ctx.resolved(), fit_to_json(fit.ptr));
  return 0;
}

int run_rates(Context& ctx, double nbar, double temperature_mk, double rabi_mhz) {
  const Device dev = load_device(ctx);
  const double temp_k = temperature_mk * 1e-3;
  const double rabi = rabi_mhz * 1e6;

  json results;
  double v = 0;
  int underflow = 0;
  check(hfq_bose_einstein(dev.f_cav, temp_k, &v, &underflow), "bose_einstein");
  results["n_thermal_at_f_cav"] = v;
  results["n_thermal_underflow"] = underflow != 0;
  const double n_th = v;

  check(hfq_stark_shift(dev.chi, nbar, &v), "stark_shift");
  results["stark_shift_hz"] = v;
  check(hfq_meas_dephasing_rate(dev.chi, dev.kappa, nbar, &v), "meas_dephasing");
  results["gamma_m_hz"] = v;
  check(hfq_thermal_dephasing_rate(dev.chi, dev.kappa, n_th, &v), "thermal_dephasing");
  results["gamma_phi_thermal_hz"] = v;
  if (v > 0) {
    double t = 0;
    check(hfq_lifetime_from_rate_hz(v, &t), "lifetime");
    results["t_phi_thermal_s"] = t;
  }
  check(hfq_spin_locking_psd(dev.chi, dev.kappa, nbar, rabi, &v), "spin_locking_psd");
  results["s_z_hz"] = v;
  check(hfq_purcell_rate(dev.kappa, dev.g, dev.f_cav, dev.f01, &v), "purcell");
  results["purcell_rate_hz"] = v;
  double t1_purcell = 0;
  check(hfq_lifetime_from_rate_hz(v, &t1_purcell), "purcell lifetime");
  results["purcell_t1_bound_s"] = t1_purcell;
  check(hfq_pure_dephasing_time(dev.t1, dev.t2e, &v), "pure_dephasing_time");
  if (std::isinf(v))
    results["t_phi_from_card_s"] = "infinite";
  else
    results["t_phi_from_card_s"] = v;

  // CSV table: rates vs photon number
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= 100; ++k) {
    const double n = nbar * k / 100.0;
    double stark = 0, gm = 0;
    check(hfq_stark_shift(dev.chi, n, &stark), "stark");
    check(hfq_meas_dephasing_rate(dev.chi, dev.kappa, n, &gm), "gamma_m");
    rows.push_back({n, stark, gm});
  }
  cli::write_csv((ctx.out_dir / "rates_vs_nbar.csv").string(),
                 {"nbar", "stark_shift_hz", "gamma_m_hz"}, rows);

  json flags;
  flags["nbar"] = nbar;
  flags["temperature_mk"] = temperature_mk;
  flags["rabi_mhz"] = rabi_mhz;
  cli::write_report(ctx.out_dir, "rates", ctx.resolved("flags", flags), results);
  return 0;
}

int run_thermal_chain(Context& ctx, double min_ghz, double max_ghz, int points) {
  ChainHandle chain = build_chain(ctx);
  const json& cfg = ctx.config["chains"][ctx.chain_name];

  // variant chains from config edits
  std::vector<std::string> columns = {"baseline"};
  std::vector<ChainHandle> variants;
  if (cfg.contains("variants")) {
    int vidx = 0;
    for (const json& v : cfg["variants"]) {
      const std::string vpath =
          "chains." + ctx.chain_name + ".variants[" + std::to_string(vidx++) + "]";
      columns.push_back(cli::require_field(v, "name", vpath).get<std::string>());
      const hfq_chain* base = chain.ptr;
      hfq_chain* current = nullptr;
      int eidx = 0;
      for (const json& e : v["edits"]) {
        const std::string epath = vpath + ".edits[" + std::to_string(eidx++) + "]";
        const int stage = static_cast<int>(cli::plain_number(e, "stage", epath));
        const double t = e.contains("temperature")
                             ? cli::tagged_value(e["temperature"], epath + ".temperature")
                             : NAN;
        const double db =
            e.contains("attenuation_db") ? e["attenuation_db"].get<double>() : NAN;
        hfq_chain* next = nullptr;
        check(hfq_chain_clone_with_edit(current ? current : base, stage, t, db, &next), epath);
        hfq_chain_free(current);
        current = next;
      }
      if (!current) throw CliError("invalid_argument", "variant has no edits", vpath);
      ChainHandle edited;
      edited.ptr = current;
      variants.push_back(std::move(edited));
    }
  }

  std::vector<std::vector<double>> rows;
  for (int k = 0; k < points; ++k) {
    const double f = (min_ghz + (max_ghz - min_ghz) * k / (points - 1.0)) * 1e9;
    std::vector<double> row = {f};
    double n = 0;
    check(hfq_chain_cascade(chain.ptr, f, &n), "cascade");
    row.push_back(n);
    for (const ChainHandle& v : variants) {
      check(hfq_chain_cascade(v.ptr, f, &n), "cascade variant");
      row.push_back(n);
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::string> header = {"frequency_hz"};
  for (const std::string& c : columns) header.push_back(c);
  cli::write_csv((ctx.out_dir / "thermal_chain.csv").string(), header, rows);

  json results;
  for (double f_ghz : {7.0, 14.0, 21.0}) {
    if (f_ghz >= min_ghz && f_ghz <= max_ghz) {
      double n = 0;
      check(hfq_chain_cascade(chain.ptr, f_ghz * 1e9, &n), "cascade summary");
      results["baseline_nbar_at_" + std::to_string(static_cast<int>(f_ghz)) + "ghz"] = n;
    }
  }
  results["columns"] = columns;
  cli::write_report(ctx.out_dir, "thermal-chain", ctx.resolved(), results);
  return 0;
}

int run_floquet_map(Context& ctx, double stark_mhz, double amplitude_ghz, double nbar_drive,
                    double ng_min, double ng_max, int ng_points, int branches,
                    std::vector<std::string> pairs) {
  const Device dev = load_device(ctx);

  double amplitude = 0;
  std::string calibration;
  if (amplitude_ghz > 0) {
    amplitude = amplitude_ghz * 1e9;
    calibration = "explicit";
  } else if (nbar_drive > 0) {
    check(hfq_amplitude_from_nbar(dev.g, nbar_drive, &amplitude), "amplitude_from_nbar");
    calibration = "nbar";
  } else {
    check(hfq_calibrate_drive_amplitude(dev.ej, dev.ec, dev.ng, 0, dev.f_cav, stark_mhz * 1e6,
                                        &amplitude),
          "calibrate_drive_amplitude");
    calibration = "stark";
  }

  std::vector<double> grid(static_cast<std::size_t>(ng_points));
  for (int k = 0; k < ng_points; ++k)
    grid[static_cast<std::size_t>(k)] = ng_min + (ng_max - ng_min) * k / (ng_points - 1.0);

  SweepHandle sweep;
  check(hfq_floquet_sweep(dev.ej, dev.ec, 0, amplitude, dev.f_cav, grid.data(), ng_points,
                          branches, &sweep.ptr),
        "floquet_sweep");

  std::vector<std::vector<double>> rows;
  for (int b = 0; b < branches; ++b) {
    for (int k = 0; k < ng_points; ++k) {
      double ng = 0, q = 0, conf = 0;
      check(hfq_sweep_point(sweep.ptr, b, k, &ng, &q, &conf), "sweep point");
      rows.push_back({ng, static_cast<double>(b), q, conf});
    }
  }
  cli::write_csv((ctx.out_dir / "floquet_map.csv").string(),
                 {"ng", "branch_index", "quasienergy_hz", "overlap_confidence"}, rows);

  if (pairs.empty()) pairs = {"1:6"};
  json anticrossings = json::array();
  for (const std::string& p : pairs) {
    const auto colon = p.find(':');
    if (colon == std::string::npos)
      throw CliError("invalid_argument", "pair must be 'i:j'", p);
    const int bi = std::stoi(p.substr(0, colon));
    const int bj = std::stoi(p.substr(colon + 1));
    double gap = 0, ng_min_at = 0, conf = 0;
    int interior = 0;
    check(hfq_anticrossing_gap(sweep.ptr, bi, bj, &gap, &ng_min_at, &interior, &conf),
          "anticrossing " + p);
    anticrossings.push_back({{"branch_i", bi},
                             {"branch_j", bj},
                             {"gap_hz", gap},
                             {"ng_at_min", ng_min_at},
                             {"interior_minimum", interior != 0},
                             {"confidence_at_min", conf}});
  }

  json results;
  results["amplitude_hz"] = amplitude;
  results["calibration"] = calibration;
  results["omega_d_hz"] = dev.f_cav;
  results["anticrossings"] = anticrossings;
  cli::write_report(ctx.out_dir, "floquet-map", ctx.resolved(), results);
  return 0;
}

int run_readout_sim(Context& ctx, std::uint64_t n_shots) {
  const Device dev = load_device(ctx);
  const json& sc = select_named(ctx.config, "scenarios", ctx.scenario_name);
  const std::string path = "scenarios." + ctx.scenario_name;

  hfq_scenario scenario{};
  const json& mu_g = cli::require_field(sc, "mu_g", path);
  const json& mu_e = cli::require_field(sc, "mu_e", path);
  scenario.blob.mu_g_i = mu_g[0].get<double>();
  scenario.blob.mu_g_q = mu_g[1].get<double>();
  scenario.blob.mu_e_i = mu_e[0].get<double>();
  scenario.blob.mu_e_q = mu_e[1].get<double>();
  scenario.blob.sigma = cli::plain_number(sc, "sigma", path);
  scenario.t1_s = sc.contains("t1") ? cli::tagged_value(sc["t1"], path + ".t1") : 0.0;
  scenario.tau_s = cli::tagged_field(sc, "tau", path);
  scenario.leakage_fraction =
      sc.contains("leakage_fraction") ? cli::plain_number(sc, "leakage_fraction", path) : 0.0;
  if (sc.contains("leakage_center")) {
    scenario.leakage_i = sc["leakage_center"][0].get<double>();
    scenario.leakage_q = sc["leakage_center"][1].get<double>();
  }
  scenario.seed = ctx.seed_override
                      ? *ctx.seed_override
                      : static_cast<std::uint64_t>(cli::plain_number(sc, "seed", path));
  const double nbar = cli::plain_number(sc, "nbar", path);

  // one g-prepared and one e-prepared set; the e seed is derived
  scenario.p_e = 0.0;
  ShotsHandle g_shots;
  check(hfq_simulate_shots(&scenario, n_shots, &g_shots.ptr), "simulate g");
  hfq_scenario scenario_e = scenario;
  scenario_e.p_e = 1.0;
  scenario_e.seed = scenario.seed + 1;
  ShotsHandle e_shots;
  check(hfq_simulate_shots(&scenario_e, n_shots, &e_shots.ptr), "simulate e");

  // shots CSV: i,q,label
  {
    std::ofstream out(ctx.out_dir / "shots.csv");
    if (!out) throw CliError("io", "cannot write shots.csv");
    out << "i,q,label\n";
    out.precision(17);
    for (const ShotsHandle* h : {&g_shots, &e_shots}) {
      const char* label = hfq_shots_label(h->ptr);
      for (std::uint64_t k = 0; k < hfq_shots_count(h->ptr); ++k) {
        double i = 0, q = 0;
        check(hfq_shots_get(h->ptr, k, &i, &q), "shot");
        out << i << "," << q << "," << label << "\n";
      }
    }
  }

  hfq_blob fitted{};
  double sigma_g = 0, sigma_e = 0, circ_g = 0, circ_e = 0;
  check(hfq_blob_from_labeled(g_shots.ptr, e_shots.ptr, &fitted, &sigma_g, &sigma_e, &circ_g,
                              &circ_e),
        "blob fit");
  double snr = 0, theta = 0;
  check(hfq_snr_empirical(&fitted, &snr), "snr");
  check(hfq_blob_theta_eg(&fitted, &theta), "theta");
  double eta = 0, t_sys = 0;
  int unphysical = 0;
  check(hfq_efficiency(&fitted, dev.kappa, nbar, scenario.tau_s, dev.f_cav, &eta, &t_sys,
                       &unphysical),
        "efficiency");

  const int bins = 720;
  std::vector<std::uint64_t> hist_g(bins), hist_e(bins);
  check(hfq_angular_histogram(g_shots.ptr, 0, 0, bins, hist_g.data()), "histogram g");
  check(hfq_angular_histogram(e_shots.ptr, 0, 0, bins, hist_e.data()), "histogram e");
  double threshold = 0;
  check(hfq_optimal_threshold(hist_g.data(), hist_e.data(), bins, &threshold), "threshold");
  double p_notg_g = 0, p_g_notg = 0, eps = 0;
  check(hfq_assignment_errors(hist_g.data(), hist_e.data(), bins, threshold, &p_notg_g,
                              &p_g_notg, &eps),
        "assignment errors");

  std::vector<std::vector<double>> hrows;
  const double width = 2.0 * 3.14159265358979323846 / bins;
  for (int k = 0; k < bins; ++k)
    hrows.push_back({(k + 0.5) * width,
                     static_cast<double>(hist_g[static_cast<std::size_t>(k)]),
                     static_cast<double>(hist_e[static_cast<std::size_t>(k)])});
  cli::write_csv((ctx.out_dir / "readout_histograms.csv").string(),
                 {"angle_rad", "count_g", "count_notg"}, hrows);

  json results;
  results["shots_per_set"] = n_shots;
  results["seed"] = scenario.seed;
  results["blob"] = {{"mu_g", {fitted.mu_g_i, fitted.mu_g_q}},
                     {"mu_e", {fitted.mu_e_i, fitted.mu_e_q}},
                     {"sigma", fitted.sigma},
                     {"sigma_g", sigma_g},
                     {"sigma_e", sigma_e},
                     {"circularity_g", circ_g},
                     {"circularity_e", circ_e}};
  results["snr_empirical"] = snr;
  results["theta_eg_rad"] = theta;
  results["eta"] = eta;
  results["eta_unphysical"] = unphysical != 0;
  results["t_sys_k"] = t_sys;
  results["threshold_rad"] = threshold;
  results["p_notg_given_g"] = p_notg_g;
  results["p_g_given_notg"] = p_g_notg;
  results["epsilon_assignment"] = eps;
  cli::write_report(ctx.out_dir, "readout-sim", ctx.resolved(), results);
  return 0;
}

int run_coherence_fit(Context& ctx, const std::string& t1_path, const std::string& echo_path,
                      const std::string& ramsey_path, int beats,
                      const std::string& spinlock_path, double rabi_mhz) {
  const Device dev = load_device(ctx);
  json results;
  double t1_fit = 0, t2e_fit = 0, t_rho = 0;
  bool have_t1 = false, have_echo = false, have_rho = false;

  auto fit_decay = [&](const std::string& file, const char* kind, const char* name,
                       double& value, bool& have) {
    std::vector<double> x, y;
    read_trace_csv(file, x, y);
    FitHandle fit;
    check(hfq_decay_fit(x.data(), y.data(), static_cast<int>(x.size()), kind, &fit.ptr), name);
    results[name] = fit_to_json(fit.ptr);
    double sigma = 0;
    check(hfq_fit_param(fit.ptr, "time_constant", &value, &sigma), name);
    have = true;
    double a = 0, c = 0;
    check(hfq_fit_param(fit.ptr, "amplitude", &a, &sigma), name);
    check(hfq_fit_param(fit.ptr, "offset", &c, &sigma), name);
    std::vector<std::vector<double>> rows;
    for (double xv : x) rows.push_back({xv, a * std::exp(-(xv - x.front()) / value) + c});
    cli::write_csv((ctx.out_dir / (std::string(name) + "_fit.csv")).string(), {"x", "y"},
                   rows);
  };

  if (!t1_path.empty()) fit_decay(t1_path, "t1", "t1", t1_fit, have_t1);
  if (!echo_path.empty()) fit_decay(echo_path, "echo", "echo", t2e_fit, have_echo);
  if (!spinlock_path.empty())
    fit_decay(spinlock_path, "spin_lock", "spin_lock", t_rho, have_rho);

  if (!ramsey_path.empty()) {
    std::vector<double> x, y;
    read_trace_csv(ramsey_path, x, y);
    FitHandle fit;
    const std::uint64_t seed = ctx.seed_override ? *ctx.seed_override : 0;
    check(hfq_ramsey_fit(x.data(), y.data(), static_cast<int>(x.size()), beats, seed,
                         &fit.ptr),
          "ramsey");
    results["ramsey"] = fit_to_json(fit.ptr);
  }

  if (have_t1 && have_echo) {
    double t_phi = 0;
    check(hfq_pure_dephasing_time(t1_fit, t2e_fit, &t_phi), "pure_dephasing_time");
    if (std::isinf(t_phi))
      results["t_phi_s"] = "infinite";
    else
      results["t_phi_s"] = t_phi;
  }
  if (have_t1 && have_rho) {
    double nbar = 0;
    check(hfq_nbar_from_spin_locking(t_rho, t1_fit, dev.chi, dev.kappa, rabi_mhz * 1e6, &nbar),
          "nbar_from_spin_locking");
    results["nbar_from_spin_locking"] = nbar;
    results["rabi_mhz"] = rabi_mhz;
  }

  if (results.empty())
    throw CliError("invalid_argument", "no traces given; nothing to fit", "coherence-fit");
  cli::write_report(ctx.out_dir, "coherence-fit", ctx.resolved(), results);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfcqed: dispersive cQED modeling toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_flag;
  std::string device_flag, chain_flag, scenario_flag;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;
  app.add_option("--config", config_path, "configuration file (JSON)")->required();
  app.add_option("--out", out_flag, "output directory (default from config out_dir)");
  app.add_option("--device", device_flag, "device entry to use");
  app.add_option("--chain", chain_flag, "chain entry to use");
  app.add_option("--scenario", scenario_flag, "scenario entry to use");
  app.add_option("--seed", seed_flag, "override random seed")
      ->each([&](const std::string&) { seed_given = true; });

  auto* sp = app.add_subcommand("spectrum", "diagonalize the transmon and report transitions");
  std::string fit_csv;
  sp->add_option("--fit", fit_csv, "CSV of measured transitions to invert for (E_J, E_C)");

  auto* cs = app.add_subcommand("chi-scan", "dispersive shift vs cavity frequency");
  double cs_min = 10.0, cs_max = 25.0, cs_guard = 50.0;
  int cs_points = 301, cs_levels = 12;
  cs->add_option("--min-ghz", cs_min, "scan start (GHz)");
  cs->add_option("--max-ghz", cs_max, "scan end (GHz)");
  cs->add_option("--points", cs_points, "grid points");
  cs->add_option("--levels", cs_levels, "levels in the dispersive sum");
  cs->add_option("--guard-mhz", cs_guard, "pole guard band (MHz)");

  auto* ck = app.add_subcommand("ckp-fit", "joint Stark-shift fit of g/e traces");
  std::string trace_g, trace_e;
  ck->add_option("--trace-g", trace_g, "g-prepared trace CSV (x,y)")->required();
  ck->add_option("--trace-e", trace_e, "e-prepared trace CSV (x,y)")->required();

  auto* rt = app.add_subcommand("rates", "dispersive rate table for the device");
  double rt_nbar = 1.0, rt_temp_mk = 50.0, rt_rabi = 1.5;
  rt->add_option("--nbar", rt_nbar, "cavity photon number");
  rt->add_option("--temperature-mk", rt_temp_mk, "temperature for thermal occupation (mK)");
  rt->add_option("--rabi-mhz", rt_rabi, "spin-locking Rabi frequency (MHz)");

  auto* tc = app.add_subcommand("thermal-chain", "cascaded attenuation photon number");
  double tc_min = 4.0, tc_max = 25.0;
  int tc_points = 211;
  tc->add_option("--min-ghz", tc_min, "grid start (GHz)");
  tc->add_option("--max-ghz", tc_max, "grid end (GHz)");
  tc->add_option("--points", tc_points, "grid points");

  auto* fm = app.add_subcommand("floquet-map", "quasienergy branches vs offset charge");
  double fm_stark = 30.0, fm_amp = 0.0, fm_nbar = 0.0, fm_ng_min = 0.0, fm_ng_max = 0.5;
  int fm_points = 101, fm_branches = 13;
  std::vector<std::string> fm_pairs;
  fm->add_option("--stark-mhz", fm_stark, "calibrate drive to this 0-1 Stark shift (MHz)");
  fm->add_option("--amplitude-ghz", fm_amp, "explicit drive amplitude (GHz), overrides");
  fm->add_option("--nbar-drive", fm_nbar, "drive amplitude from 2 g sqrt(nbar), overrides stark");
  fm->add_option("--ng-min", fm_ng_min, "offset charge start");
  fm->add_option("--ng-max", fm_ng_max, "offset charge end");
  fm->add_option("--ng-points", fm_points, "grid points");
  fm->add_option("--branches", fm_branches, "tracked branches");
  fm->add_option("--pair", fm_pairs, "anticrossing pair 'i:j' (repeatable; default 1:6)");

  auto* rs = app.add_subcommand("readout-sim", "simulate single shots and analyze readout");
  std::uint64_t rs_shots = 20000;
  rs->add_option("--shots", rs_shots, "shots per prepared state");

  auto* cf = app.add_subcommand("coherence-fit", "fit T1/echo/Ramsey/spin-locking traces");
  std::string cf_t1, cf_echo, cf_ramsey, cf_spinlock;
  int cf_beats = 1;
  double cf_rabi = 1.5;
  cf->add_option("--t1-trace", cf_t1, "T1 trace CSV (x,y; seconds)");
  cf->add_option("--echo-trace", cf_echo, "echo trace CSV");
  cf->add_option("--ramsey-trace", cf_ramsey, "Ramsey trace CSV");
  cf->add_option("--beats", cf_beats, "Ramsey beat count (1 or 2)");
  cf->add_option("--spinlock-trace", cf_spinlock, "spin-locking trace CSV");
  cf->add_option("--rabi-mhz", cf_rabi, "spin-locking Rabi frequency (MHz)");

  CLI11_PARSE(app, argc, argv);

  try {
    Context ctx;
    ctx.config_path = config_path;
    {
      std::ifstream in(config_path);
      if (!in) throw CliError("io", "cannot open config file", config_path);
      try {
        in >> ctx.config;
      } catch (const std::exception& e) {
        throw CliError("io", std::string("config is not valid JSON: ") + e.what(),
                       config_path);
      }
    }
    ctx.device_name = device_flag;
    ctx.chain_name = chain_flag;
    ctx.scenario_name = scenario_flag;
    if (seed_given) ctx.seed_override = seed_flag;

    if (!out_flag.empty())
      ctx.out_dir = out_flag;
    else if (ctx.config.contains("out_dir"))
      ctx.out_dir = ctx.config["out_dir"].get<std::string>();
    else
      ctx.out_dir = "out";
    std::filesystem::create_directories(ctx.out_dir);
    cli::DirLock lock(ctx.out_dir);

    if (*sp) return run_spectrum(ctx, fit_csv);
    if (*cs) return run_chi_scan(ctx, cs_min, cs_max, cs_points, cs_levels, cs_guard);
    if (*ck) return run_ckp_fit(ctx, trace_g, trace_e);
    if (*rt) return run_rates(ctx, rt_nbar, rt_temp_mk, rt_rabi);
    if (*tc) return run_thermal_chain(ctx, tc_min, tc_max, tc_points);
    if (*fm)
      return run_floquet_map(ctx, fm_stark, fm_amp, fm_nbar, fm_ng_min, fm_ng_max, fm_points,
                             fm_branches, fm_pairs);
    if (*rs) return run_readout_sim(ctx, rs_shots);
    if (*cf)
      return run_coherence_fit(ctx, cf_t1, cf_echo, cf_ramsey, cf_beats, cf_spinlock, cf_rabi);
    return 1;
  } catch (const CliError& e) {
    json err;
    err["error"] = {{"status", e.status}, {"message", e.message}};
    if (!e.field.empty()) err["error"]["field"] = e.field;
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"status", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  }
}
