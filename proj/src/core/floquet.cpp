#include "floquet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <thread>

#include "constants.hpp"
#include "eigh.hpp"
#include "errors.hpp"

namespace hfcqed {

namespace {

constexpr double kUnitarityTol = 1e-9;
constexpr double kEigenphaseTolRel = 1e-8;   // vs omega_d, under step doubling
constexpr int kMaxFloquetSteps = 1 << 15;

struct ChargeBasis {
  Eigen::VectorXd diag;    // 4 E_C (n - ng)^2 - E0_static
  Eigen::VectorXd sub;     // -E_J / 2
  Eigen::VectorXd charge;  // n values
  Eigen::VectorXd static_energies;  // ground-referenced
  Eigen::MatrixXd static_vectors;
};

ChargeBasis build_basis(const TransmonParams& p) {
  p.validate();
  const int dim = 2 * p.ncut + 1;
  ChargeBasis b;
  b.diag.resize(dim);
  b.charge.resize(dim);
  for (int k = 0; k < dim; ++k) {
    const double n = static_cast<double>(k - p.ncut);
    b.charge[k] = n;
    b.diag[k] = 4.0 * p.ec_hz * (n - p.ng) * (n - p.ng);
  }
  b.sub = Eigen::VectorXd::Constant(dim - 1, -p.ej_hz / 2.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  eigh_tridiagonal(b.diag, b.sub, es);
  const double e0 = es.eigenvalues()[0];
  b.diag.array() -= e0;  // ground-referenced Hamiltonian
  b.static_energies = es.eigenvalues().array() - e0;
  b.static_vectors = es.eigenvectors();
  return b;
}

Eigen::MatrixXcd propagate(const ChargeBasis& basis, const DriveConfig& drive, int n_steps) {
  const int dim = static_cast<int>(basis.diag.size());
  const double period = 1.0 / drive.omega_d_hz;
  const double dt = period / static_cast<double>(n_steps);

  // midpoint drive coefficients are mirror-symmetric within the period, so
  // each distinct step eigensystem is computed once and used twice
  struct StepEig {
    Eigen::MatrixXd v;
    Eigen::VectorXd cos_ph, sin_ph;
  };
  const int half = n_steps / 2;
  std::vector<StepEig> steps(static_cast<std::size_t>(half));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (int k = 0; k < half; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    const double c = drive.amplitude_hz * std::cos(constants::two_pi * drive.omega_d_hz * t);
    const Eigen::VectorXd diag_k = basis.diag + c * basis.charge;
    eigh_tridiagonal(diag_k, basis.sub, es);
    StepEig& se = steps[static_cast<std::size_t>(k)];
    se.v = es.eigenvectors();
    se.cos_ph.resize(dim);
    se.sin_ph.resize(dim);
    for (int m = 0; m < dim; ++m) {
      const double ang = -constants::two_pi * es.eigenvalues()[m] * dt;
      se.cos_ph[m] = std::cos(ang);
      se.sin_ph[m] = std::sin(ang);
    }
  }

  // accumulate U = V e^{-i w dt} V^T U in real/imaginary parts (V is real)
  Eigen::MatrixXd ur = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd ui = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd pr(dim, dim), pi(dim, dim);
  for (int k = 0; k < n_steps; ++k) {
    const int idx = k < half ? k : n_steps - 1 - k;
    const StepEig& se = steps[static_cast<std::size_t>(idx)];
    pr.noalias() = se.v.transpose() * ur;
    pi.noalias() = se.v.transpose() * ui;
    for (int m = 0; m < dim; ++m) {
      const double c = se.cos_ph[m], s = se.sin_ph[m];
      for (int j = 0; j < dim; ++j) {
        const double re = pr(m, j), im = pi(m, j);
        pr(m, j) = c * re - s * im;
        pi(m, j) = s * re + c * im;
      }
    }
    ur.noalias() = se.v * pr;
    ui.noalias() = se.v * pi;
  }
  Eigen::MatrixXcd u(dim, dim);
  u.real() = ur;
  u.imag() = ui;
  return u;
}

std::vector<double> fold_eigenphases(const Eigen::VectorXcd& lambdas, double omega_d) {
  std::vector<double> eps(static_cast<std::size_t>(lambdas.size()));
  for (Eigen::Index k = 0; k < lambdas.size(); ++k)
    eps[static_cast<std::size_t>(k)] =
        -std::arg(lambdas[k]) / constants::two_pi * omega_d;
  return eps;
}

// largest circular eigenphase displacement between two step resolutions
double eigenphase_mismatch(const std::vector<double>& a, const std::vector<double>& b,
                           double omega_d) {
  double worst = 0.0;
  for (double ea : a) {
    double best = omega_d;
    for (double eb : b) best = std::min(best, quasienergy_distance(ea, eb, omega_d));
    worst = std::max(worst, best);
  }
  return worst;
}

// greedy unique max-overlap assignment: returns, for each reference column,
// the matched candidate column index and the squared overlap
void greedy_assign(const Eigen::MatrixXcd& reference, const Eigen::MatrixXcd& candidates,
                   std::vector<int>& match, std::vector<double>& overlap) {
  const Eigen::Index n = reference.cols();
  Eigen::MatrixXd ov = (reference.adjoint() * candidates).cwiseAbs2();
  match.assign(static_cast<std::size_t>(n), -1);
  overlap.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) pairs.emplace_back(ov(r, c), r, c);
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<bool> used_r(static_cast<std::size_t>(n), false);
  std::vector<bool> used_c(static_cast<std::size_t>(n), false);
  for (const auto& [o, r, c] : pairs) {
    if (used_r[static_cast<std::size_t>(r)] || used_c[static_cast<std::size_t>(c)]) continue;
    used_r[static_cast<std::size_t>(r)] = true;
    used_c[static_cast<std::size_t>(c)] = true;
    match[static_cast<std::size_t>(r)] = static_cast<int>(c);
    overlap[static_cast<std::size_t>(r)] = o;
  }
}

FloquetModes modes_from_unitary(const Eigen::MatrixXcd& u, double omega_d) {
  const Eigen::Index dim = u.rows();
  FloquetModes out;
  out.propagator = u;
  out.unitarity_defect =
      (u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).norm();
  require(out.unitarity_defect < kUnitarityTol, ErrorCode::not_converged,
          "floquet: propagator unitarity defect above tolerance");

  // a unitary is normal, so its Schur form is diagonal and the Schur basis is
  // an orthonormal eigenbasis even through near-degeneracies
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u, true);
  require(schur.info() == Eigen::Success, ErrorCode::not_converged,
          "floquet: Schur decomposition failed");
  const Eigen::VectorXcd lambdas = schur.matrixT().diagonal();
  out.vectors = schur.matrixU();
  out.quasienergies = fold_eigenphases(lambdas, omega_d);

  for (std::size_t a = 0; a < out.quasienergies.size() && !out.degenerate_pair; ++a)
    for (std::size_t b = a + 1; b < out.quasienergies.size(); ++b)
      if (quasienergy_distance(out.quasienergies[a], out.quasienergies[b], omega_d) <
          1e-12 * omega_d) {
        out.degenerate_pair = true;
        break;
      }
  return out;
}

}  // namespace

void DriveConfig::validate() const {
  require(omega_d_hz > 0.0, ErrorCode::invalid_argument, "drive: omega_d must be > 0");
  require(amplitude_hz >= 0.0, ErrorCode::invalid_argument, "drive: amplitude must be >= 0");
}

double quasienergy_distance(double a_hz, double b_hz, double omega_d_hz) {
  double d = std::fmod(std::abs(a_hz - b_hz), omega_d_hz);
  return std::min(d, omega_d_hz - d);
}

Eigen::MatrixXcd period_propagator_fixed(const TransmonParams& params,
                                         const DriveConfig& drive, int n_steps) {
  drive.validate();
  require(n_steps >= 64, ErrorCode::invalid_argument, "floquet: n_steps must be >= 64");
  require(n_steps % 2 == 0, ErrorCode::invalid_argument, "floquet: n_steps must be even");
  const ChargeBasis basis = build_basis(params);
  return propagate(basis, drive, n_steps);
}

FloquetModes floquet_modes(const TransmonParams& params, const DriveConfig& drive,
                           int n_steps) {
  drive.validate();
  require(n_steps >= 64, ErrorCode::invalid_argument, "floquet: n_steps must be >= 64");
  const ChargeBasis basis = build_basis(params);

  int n = n_steps;
  Eigen::MatrixXcd u = propagate(basis, drive, n);
  std::vector<double> eps = quasienergies(u, drive.omega_d_hz);
  while (true) {
    Eigen::MatrixXcd u2 = propagate(basis, drive, 2 * n);
    std::vector<double> eps2 = quasienergies(u2, drive.omega_d_hz);
    if (eigenphase_mismatch(eps, eps2, drive.omega_d_hz) <=
        kEigenphaseTolRel * drive.omega_d_hz) {
      FloquetModes out = modes_from_unitary(u2, drive.omega_d_hz);
      out.n_steps_used = 2 * n;
      return out;
    }
    n *= 2;
    require(2 * n <= kMaxFloquetSteps, ErrorCode::not_converged,
            "floquet: eigenphases not converged at the step-doubling cap");
    u = std::move(u2);
    eps = std::move(eps2);
  }
}

std::vector<double> quasienergies(const Eigen::MatrixXcd& propagator, double omega_d_hz) {
  require(propagator.rows() == propagator.cols() && propagator.rows() > 0,
          ErrorCode::invalid_argument, "quasienergies: propagator must be square");
  const Eigen::Index dim = propagator.rows();
  const double defect =
      (propagator.adjoint() * propagator - Eigen::MatrixXcd::Identity(dim, dim)).norm();
  require(defect < kUnitarityTol, ErrorCode::invalid_argument,
          "quasienergies: matrix is not unitary within tolerance");
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(propagator, false);
  require(schur.info() == Eigen::Success, ErrorCode::not_converged,
          "quasienergies: Schur decomposition failed");
  std::vector<double> eps = fold_eigenphases(schur.matrixT().diagonal(), omega_d_hz);
  std::sort(eps.begin(), eps.end());
  return eps;
}

double amplitude_from_nbar(double g_hz, double nbar) {
  require(g_hz > 0.0 && nbar >= 0.0, ErrorCode::invalid_argument,
          "amplitude_from_nbar: g > 0 and nbar >= 0 required");
  return 2.0 * g_hz * std::sqrt(nbar);
}

namespace {

// signed 0-1 quasienergy shift relative to the static transition; returns the
// converged step count and writes the shift through *shift_out
int stark_shift_of(const TransmonParams& params, const DriveConfig& drive, int n_steps_start,
                   double* shift_out) {
  const ChargeBasis basis = build_basis(params);
  const FloquetModes modes = floquet_modes(params, drive, n_steps_start);
  std::vector<int> match;
  std::vector<double> overlap;
  greedy_assign(basis.static_vectors.cast<std::complex<double>>(), modes.vectors, match,
                overlap);
  const double f01 = basis.static_energies[1];
  const double e0 = modes.quasienergies[static_cast<std::size_t>(match[0])];
  const double e1 = modes.quasienergies[static_cast<std::size_t>(match[1])];
  // unwrap the 0-1 difference to the representative nearest the static f01
  double d = e1 - e0 - f01;
  d -= drive.omega_d_hz * std::round(d / drive.omega_d_hz);
  *shift_out = d;
  return modes.n_steps_used;
}

}  // namespace

double calibrate_drive_amplitude(const TransmonParams& params, double omega_d_hz,
                                 double target_stark_hz) {
  require(omega_d_hz > 0.0, ErrorCode::invalid_argument, "calibrate: omega_d must be > 0");
  require(target_stark_hz >= 0.0, ErrorCode::invalid_argument,
          "calibrate: target must be >= 0");
  if (target_stark_hz == 0.0) return 0.0;

  // the converged step count grows with amplitude; start each ladder near the
  // previous one to skip the low rungs
  int hint = kDefaultFloquetSteps;
  auto shift_mag = [&](double amp) {
    DriveConfig d{amp, omega_d_hz};
    double shift = 0.0;
    hint = std::max(kDefaultFloquetSteps, stark_shift_of(params, d, hint, &shift) / 2);
    return std::abs(shift);
  };

  double lo = 0.0;
  double hi = 0.05 * omega_d_hz;
  int grow = 0;
  while (shift_mag(hi) < target_stark_hz) {
    lo = hi;
    hi *= 1.5;
    require(++grow <= 40, ErrorCode::not_converged,
            "calibrate: bracketing failed (target beyond the perturbative regime "
            "for this drive frequency)");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shift_mag(mid) < target_stark_hz)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) < 1e-4 * hi) break;
  }
  const double amp = 0.5 * (lo + hi);
  const double achieved = shift_mag(amp);
  require(std::abs(achieved - target_stark_hz) <= 0.01 * target_stark_hz,
          ErrorCode::not_converged, "calibrate: shift not matched to 1%");
  return amp;
}

QuasienergySweep sweep_ng(const TransmonParams& params_template, const DriveConfig& drive,
                          const std::vector<double>& ng_grid, int n_branches) {
  drive.validate();
  require(ng_grid.size() >= 2, ErrorCode::invalid_argument, "sweep_ng: grid too small");
  for (std::size_t k = 1; k < ng_grid.size(); ++k)
    require(ng_grid[k] > ng_grid[k - 1], ErrorCode::invalid_argument,
            "sweep_ng: grid must be strictly increasing");
  const int dim = 2 * params_template.ncut + 1;
  require(n_branches >= 2 && n_branches <= dim, ErrorCode::invalid_argument,
          "sweep_ng: n_branches out of range");

  QuasienergySweep sweep;
  sweep.params = params_template;
  sweep.drive = drive;
  sweep.ng_grid = ng_grid;
  sweep.n_branches = n_branches;
  sweep.branches.resize(n_branches, static_cast<Eigen::Index>(ng_grid.size()));
  sweep.confidence.resize(n_branches, static_cast<Eigen::Index>(ng_grid.size()));

  // propagators per grid point are independent: evaluate them in parallel,
  // then run the (serial) adiabatic-continuation pass over the ordered
  // results so the output is identical to a serial sweep
  const std::size_t n_points = ng_grid.size();
  std::vector<FloquetModes> modes(n_points);
  {
    TransmonParams p0 = params_template;
    p0.ng = ng_grid[0];
    modes[0] = floquet_modes(p0, drive);
    const int hint = std::max(kDefaultFloquetSteps, modes[0].n_steps_used / 2);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min<std::size_t>(hw, n_points > 1 ? n_points - 1 : 1);
    std::atomic<std::size_t> next{1};
    auto worker = [&]() {
      for (std::size_t k = next.fetch_add(1); k < n_points; k = next.fetch_add(1)) {
        TransmonParams p = params_template;
        p.ng = ng_grid[k];
        modes[k] = floquet_modes(p, drive, hint);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Eigen::MatrixXcd prev_assigned(dim, dim);
  for (std::size_t k = 0; k < n_points; ++k) {
    Eigen::MatrixXcd reference;
    if (k == 0) {
      TransmonParams p = params_template;
      p.ng = ng_grid[0];
      reference = build_basis(p).static_vectors.cast<std::complex<double>>();
    } else {
      reference = prev_assigned;
    }
    std::vector<int> match;
    std::vector<double> overlap;
    greedy_assign(reference, modes[k].vectors, match, overlap);

    Eigen::MatrixXcd assigned(dim, dim);
    for (int b = 0; b < dim; ++b) {
      assigned.col(b) = modes[k].vectors.col(match[static_cast<std::size_t>(b)]);
      if (b < n_branches) {
        sweep.branches(b, static_cast<Eigen::Index>(k)) =
            modes[k]
                .quasienergies[static_cast<std::size_t>(match[static_cast<std::size_t>(b)])];
        sweep.confidence(b, static_cast<Eigen::Index>(k)) =
            overlap[static_cast<std::size_t>(b)];
      }
    }
    prev_assigned = std::move(assigned);
  }
  return sweep;
}

AnticrossingGap anticrossing_gap(const QuasienergySweep& sweep, int branch_i, int branch_j) {
  require(branch_i >= 0 && branch_i < sweep.n_branches && branch_j >= 0 &&
              branch_j < sweep.n_branches && branch_i != branch_j,
          ErrorCode::invalid_argument, "anticrossing_gap: branch indices out of range");

  const auto n = static_cast<Eigen::Index>(sweep.ng_grid.size());
  Eigen::Index kmin = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d = quasienergy_distance(sweep.branches(branch_i, k),
                                          sweep.branches(branch_j, k), sweep.drive.omega_d_hz);
    if (d < dmin) {
      dmin = d;
      kmin = k;
    }
  }

  // refine by 10x on the bracketing interval
  const Eigen::Index klo = kmin > 0 ? kmin - 1 : kmin;
  const Eigen::Index khi = kmin < n - 1 ? kmin + 1 : kmin;
  const double lo = sweep.ng_grid[static_cast<std::size_t>(klo)];
  const double hi = sweep.ng_grid[static_cast<std::size_t>(khi)];

  AnticrossingGap out;
  out.gap_hz = dmin;
  out.ng_at_min = sweep.ng_grid[static_cast<std::size_t>(kmin)];
  out.confidence_at_min = std::min(sweep.confidence(branch_i, kmin),
                                   sweep.confidence(branch_j, kmin));
  if (hi > lo) {
    const int refine_points = 21;
    std::vector<double> fine(refine_points);
    for (int t = 0; t < refine_points; ++t)
      fine[static_cast<std::size_t>(t)] =
          lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(refine_points - 1);
    const QuasienergySweep local = sweep_ng(sweep.params, sweep.drive, fine, sweep.n_branches);
    for (Eigen::Index k = 0; k < refine_points; ++k) {
      const double d = quasienergy_distance(local.branches(branch_i, k),
                                            local.branches(branch_j, k),
                                            sweep.drive.omega_d_hz);
      if (d < out.gap_hz) {
        out.gap_hz = d;
        out.ng_at_min = fine[static_cast<std::size_t>(k)];
        out.confidence_at_min = std::min(local.confidence(branch_i, k),
                                         local.confidence(branch_j, k));
      }
    }
  }
  out.interior_minimum = kmin > 0 && kmin < n - 1;
  return out;
}

}  // namespace hfcqed
