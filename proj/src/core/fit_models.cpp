#include "fit_models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "constants.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace hfcqed::fit {

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  return v[n / 2];
}

}  // namespace

double lorentzian(double x, double center, double fwhm, double amplitude, double offset) {
  const double hw = 0.5 * fwhm;
  const double d = x - center;
  return offset + amplitude * hw * hw / (d * d + hw * hw);
}

FitResult lorentzian_peak(const Trace& trace) {
  trace.validate();
  require(trace.size() >= 5, ErrorCode::invalid_argument,
          "lorentzian_peak: need at least 5 points");

  const double offset0 = median_of(trace.y);
  std::size_t ext = 0;
  for (std::size_t k = 1; k < trace.size(); ++k)
    if (std::abs(trace.y[k] - offset0) > std::abs(trace.y[ext] - offset0)) ext = k;
  const double amp0 = trace.y[ext] - offset0;
  const double span = trace.x.back() - trace.x.front();

  // crude width: x-extent of points beyond half the peak height
  double wlo = trace.x[ext], whi = trace.x[ext];
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (std::abs(trace.y[k] - offset0) >= 0.5 * std::abs(amp0)) {
      wlo = std::min(wlo, trace.x[k]);
      whi = std::max(whi, trace.x[k]);
    }
  }
  const double width0 = std::max(whi - wlo, span / static_cast<double>(trace.size()));

  Eigen::VectorXd init(4);
  init << trace.x[ext], width0, amp0, offset0;
  Bounds b = Bounds::unbounded(4);
  b.lower[0] = trace.x.front();
  b.upper[0] = trace.x.back();
  b.lower[1] = 1e-9 * span;

  ModelFn model = [](double x, const Eigen::VectorXd& p) {
    return lorentzian(x, p[0], p[1], p[2], p[3]);
  };
  FitResult r = fit_trace(model, trace, init, b, {"center", "width", "amplitude", "offset"});
  if (r.converged && std::abs(r.value("amplitude")) <= r.uncertainty("amplitude"))
    r.notes.push_back("amplitude consistent with 0");
  return r;
}

void CkpModel::validate() const {
  require(kappa_hz > 0.0, ErrorCode::invalid_argument, "ckp: kappa must be > 0");
  require(amp2_hz >= 0.0, ErrorCode::invalid_argument, "ckp: amp2 must be >= 0");
}

double ckp_stark_curve(double omega_d_hz, const CkpModel& m, bool excited) {
  const double center = excited ? m.omega_r_hz + m.chi_hz : m.omega_r_hz - m.chi_hz;
  const double half = 0.5 * m.kappa_hz;
  const double detune = omega_d_hz - center;
  const double nbar = m.kappa_hz * m.amp2_hz / (half * half + detune * detune);
  return m.omega01_hz + 2.0 * m.chi_hz * nbar;
}

namespace {

// data-driven starting point: baseline from the trace edges, resonator pull
// centers from the per-trace extrema, kappa from the half-height width
CkpModel ckp_init_from_data(const Trace& trace_g, const Trace& trace_e) {
  auto edge_baseline = [](const Trace& t) {
    const std::size_t n = t.size();
    const std::size_t m = std::max<std::size_t>(1, n / 8);
    std::vector<double> edges;
    for (std::size_t k = 0; k < m; ++k) {
      edges.push_back(t.y[k]);
      edges.push_back(t.y[n - 1 - k]);
    }
    return median_of(std::move(edges));
  };
  const double base = 0.5 * (edge_baseline(trace_g) + edge_baseline(trace_e));

  struct Peak {
    double center, height, width;
  };
  auto find_peak = [base](const Trace& t) {
    std::size_t ext = 0;
    for (std::size_t k = 1; k < t.size(); ++k)
      if (std::abs(t.y[k] - base) > std::abs(t.y[ext] - base)) ext = k;
    const double h = t.y[ext] - base;
    double lo = t.x[ext], hi = t.x[ext];
    for (std::size_t k = 0; k < t.size(); ++k)
      if (std::abs(t.y[k] - base) >= 0.5 * std::abs(h)) {
        lo = std::min(lo, t.x[k]);
        hi = std::max(hi, t.x[k]);
      }
    const double span = t.x.back() - t.x.front();
    return Peak{t.x[ext], h, std::max(hi - lo, span / static_cast<double>(t.size()))};
  };
  const Peak pg = find_peak(trace_g);
  const Peak pe = find_peak(trace_e);

  CkpModel m;
  m.omega01_hz = base;
  m.omega_r_hz = 0.5 * (pg.center + pe.center);
  m.chi_hz = 0.5 * (pe.center - pg.center);
  m.kappa_hz = 0.5 * (pg.width + pe.width);
  // peak height h = 2 chi * 4 amp2 / kappa at zero detuning
  const double h = 0.5 * (pg.height + pe.height);
  if (m.chi_hz == 0.0) m.chi_hz = (h < 0 ? -1.0 : 1.0) * 0.05 * m.kappa_hz;
  // keep the sign: h and chi share it for correctly labeled traces
  m.amp2_hz = h * m.kappa_hz / (8.0 * m.chi_hz);
  return m;
}

}  // namespace

FitResult ckp_joint_fit(const Trace& trace_g, const Trace& trace_e, const CkpModel& init) {
  trace_g.validate();
  trace_e.validate();
  init.validate();

  const auto mg = static_cast<Eigen::Index>(trace_g.size());
  const auto me = static_cast<Eigen::Index>(trace_e.size());
  ResidualFn fn = [&trace_g, &trace_e, mg, me](const Eigen::VectorXd& p) {
    CkpModel m;
    m.omega01_hz = p[0];
    m.chi_hz = p[1];
    m.kappa_hz = p[2];
    m.omega_r_hz = p[3];
    m.amp2_hz = p[4];
    Eigen::VectorXd r(mg + me);
    for (Eigen::Index k = 0; k < mg; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double w = trace_g.sigma.empty() ? 1.0 : trace_g.sigma[i];
      r[k] = (ckp_stark_curve(trace_g.x[i], m, false) - trace_g.y[i]) / w;
    }
    for (Eigen::Index k = 0; k < me; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double w = trace_e.sigma.empty() ? 1.0 : trace_e.sigma[i];
      r[mg + k] = (ckp_stark_curve(trace_e.x[i], m, true) - trace_e.y[i]) / w;
    }
    return r;
  };

  // amp2 is deliberately unconstrained in sign: the observable is the product
  // 2 chi nbar, and the exact trace-label symmetry (swap <-> chi negation)
  // carries amp2 -> -amp2. Correctly labeled data fits with amp2 > 0.
  Bounds b = Bounds::unbounded(5);
  b.lower[2] = 1e-6 * init.kappa_hz;  // kappa > 0

  const CkpModel from_data = ckp_init_from_data(trace_g, trace_e);
  const std::vector<std::string> names = {"omega01", "chi", "kappa", "omega_r", "amp2"};
  FitResult best;
  bool have = false;
  for (const CkpModel& start : {init, from_data}) {
    Eigen::VectorXd p0(5);
    p0 << start.omega01_hz, start.chi_hz, start.kappa_hz, start.omega_r_hz, start.amp2_hz;
    p0[2] = std::max(p0[2], b.lower[2]);
    FitResult r = least_squares(fn, p0, b, names);
    if (!r.converged) continue;
    if (!have || r.residual_norm < best.residual_norm) {
      best = std::move(r);
      have = true;
    }
  }
  require(have, ErrorCode::not_converged, "ckp_joint_fit: did not converge");
  if (std::abs(best.value("chi")) <= best.uncertainty("chi"))
    best.notes.push_back("chi consistent with 0");
  if (best.value("amp2") < 0.0)
    best.notes.push_back("amp2 negative: traces are likely label-swapped");
  return best;
}

namespace {

FitResult assemble_gamma_m_result(double chi, double chi_sigma, double kappa,
                                  double kappa_sigma, const FitResult& inner) {
  FitResult out;
  out.param_names = {"chi", "kappa"};
  out.params = Eigen::Vector2d(chi, kappa);
  out.covariance = Eigen::Matrix2d::Zero();
  out.covariance(0, 0) = chi_sigma * chi_sigma;
  out.covariance(1, 1) = kappa_sigma * kappa_sigma;
  out.residual_norm = inner.residual_norm;
  out.converged = inner.converged;
  out.iterations = inner.iterations;
  out.notes = inner.notes;
  return out;
}

}  // namespace

FitResult gamma_m_fit(std::span<const std::pair<double, double>> nbar_gamma,
                      double kappa_fixed_hz) {
  require(nbar_gamma.size() >= 3, ErrorCode::invalid_argument,
          "gamma_m_fit: need at least 3 points");
  require(kappa_fixed_hz > 0.0, ErrorCode::invalid_argument, "gamma_m_fit: kappa must be > 0");
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, g] : nbar_gamma) {
    require(n >= 0.0, ErrorCode::invalid_argument, "gamma_m_fit: nbar must be >= 0");
    require(n < 1.0, ErrorCode::domain, "gamma_m_fit: valid only in the nbar < 1 regime");
    sxx += n * n;
    sxy += n * g;
  }
  require(sxx > 0.0, ErrorCode::singular, "gamma_m_fit: all nbar zero; slope underdetermined");
  const double slope = sxy / sxx;
  require(slope > 0.0, ErrorCode::domain, "gamma_m_fit: negative slope");
  require(slope < 2.0 * kappa_fixed_hz, ErrorCode::domain,
          "gamma_m_fit: slope exceeds the 2*kappa bound of the model");

  // slope = 2 kappa chi^2 / (chi^2 + (kappa/2)^2)  =>  chi from closed form
  const double chi0 = 0.5 * kappa_fixed_hz * std::sqrt(slope / (2.0 * kappa_fixed_hz - slope));

  ResidualFn fn = [nbar_gamma, kappa_fixed_hz](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(nbar_gamma.size()));
    const double c2 = p[0] * p[0];
    const double k2 = 0.25 * kappa_fixed_hz * kappa_fixed_hz;
    for (std::size_t k = 0; k < nbar_gamma.size(); ++k)
      r[static_cast<Eigen::Index>(k)] =
          2.0 * nbar_gamma[k].first * kappa_fixed_hz * c2 / (c2 + k2) - nbar_gamma[k].second;
    return r;
  };
  Eigen::VectorXd p0(1);
  p0 << chi0;
  const FitResult inner = least_squares(fn, p0, Bounds::unbounded(1), {"chi"});
  require(inner.converged, ErrorCode::not_converged, "gamma_m_fit: did not converge");
  return assemble_gamma_m_result(inner.params[0], inner.uncertainty("chi"), kappa_fixed_hz,
                                 0.0, inner);
}

FitResult gamma_m_fit_joint(std::span<const std::pair<double, double>> nbar_gamma,
                            double chi_init_hz, double kappa_init_hz) {
  require(nbar_gamma.size() >= 3, ErrorCode::invalid_argument,
          "gamma_m_fit: need at least 3 points");
  ResidualFn fn = [nbar_gamma](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(nbar_gamma.size()));
    const double c2 = p[0] * p[0];
    const double k2 = 0.25 * p[1] * p[1];
    for (std::size_t k = 0; k < nbar_gamma.size(); ++k)
      r[static_cast<Eigen::Index>(k)] =
          2.0 * nbar_gamma[k].first * p[1] * c2 / (c2 + k2) - nbar_gamma[k].second;
    return r;
  };
  Eigen::VectorXd p0(2);
  p0 << chi_init_hz, kappa_init_hz;
  Bounds b = Bounds::unbounded(2);
  b.lower[1] = 1e-6 * kappa_init_hz;
  FitResult r = least_squares(fn, p0, b, {"chi", "kappa"});
  r.notes.push_back("joint (chi, kappa) mode: only the slope combination is well "
                    "determined; prefer the fixed-kappa mode");
  return r;
}

FitResult decay_fit(const Trace& trace, DecayKind kind) {
  trace.validate();
  require(trace.size() >= 4, ErrorCode::invalid_argument, "decay_fit: need at least 4 points");
  require(trace.x.front() >= 0.0, ErrorCode::invalid_argument,
          "decay_fit: times must be non-negative seconds");

  const std::size_t n = trace.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double c0 = 0.0;
  for (std::size_t k = n - tail; k < n; ++k) c0 += trace.y[k];
  c0 /= static_cast<double>(tail);
  const double a0 = trace.y.front() - c0;

  double yscale = 0.0;
  for (double y : trace.y) yscale = std::max(yscale, std::abs(y));
  require(std::abs(a0) > 1e-9 * std::max(yscale, 1e-300), ErrorCode::singular,
          "decay_fit: amplitude consistent with zero; time constant unidentifiable");

  const double span = trace.x.back() - trace.x.front();
  double tau0 = span / 3.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(trace.y[k] - c0) <= std::abs(a0) / std::numbers::e) {
      tau0 = std::max(trace.x[k] - trace.x.front(), span / static_cast<double>(n));
      break;
    }
  }

  Eigen::VectorXd init(3);
  init << tau0, a0, c0;
  Bounds b = Bounds::unbounded(3);
  b.lower[0] = 1e-6 * span;

  ModelFn model = [x0 = trace.x.front()](double x, const Eigen::VectorXd& p) {
    return p[1] * std::exp(-(x - x0) / p[0]) + p[2];
  };
  FitResult r = fit_trace(model, trace, init, b, {"time_constant", "amplitude", "offset"});
  require(r.converged, ErrorCode::not_converged, "decay_fit: did not converge");
  const double tau = r.value("time_constant");
  if (tau > span || tau < (trace.x[1] - trace.x[0]))
    r.notes.push_back("extrapolated: time constant outside sampled range");
  switch (kind) {
    case DecayKind::t1: r.notes.push_back("kind: t1"); break;
    case DecayKind::echo: r.notes.push_back("kind: echo"); break;
    case DecayKind::spin_lock: r.notes.push_back("kind: spin_lock"); break;
  }
  return r;
}

namespace {

struct BeatGuess {
  double freq = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
};

// naive DFT peak search on the detrended trace
std::vector<BeatGuess> periodogram_peaks(const Trace& trace, int want) {
  const std::size_t n = trace.size();
  const double mean = std::accumulate(trace.y.begin(), trace.y.end(), 0.0) /
                      static_cast<double>(n);
  const double span = trace.x.back() - trace.x.front();
  const std::size_t nf = n / 2;
  std::vector<std::complex<double>> amp(nf);
  std::vector<double> power(nf, 0.0);
  for (std::size_t j = 1; j < nf; ++j) {
    const double f = static_cast<double>(j) / span;
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double ph = constants::two_pi * f * (trace.x[k] - trace.x.front());
      acc += (trace.y[k] - mean) * std::complex<double>(std::cos(ph), -std::sin(ph));
    }
    amp[j] = acc;
    power[j] = std::norm(acc);
  }
  std::vector<BeatGuess> peaks;
  std::vector<bool> taken(nf, false);
  for (int p = 0; p < want; ++p) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < nf; ++j)
      if (!taken[j] && power[j] > power[best]) best = j;
    if (best == 0) break;
    // shade adjacent bins so the next peak is a distinct feature
    for (std::size_t j = best >= 2 ? best - 2 : 0; j <= std::min(best + 2, nf - 1); ++j)
      taken[j] = true;
    BeatGuess g;
    g.freq = static_cast<double>(best) / span;
    g.amplitude = 2.0 * std::abs(amp[best]) / static_cast<double>(n);
    g.phase = std::arg(amp[best]);
    peaks.push_back(g);
  }
  return peaks;
}

}  // namespace

FitResult ramsey_fit(const Trace& trace, int n_beats, std::uint64_t seed) {
  trace.validate();
  require(n_beats == 1 || n_beats == 2, ErrorCode::invalid_argument,
          "ramsey_fit: n_beats must be 1 or 2");
  require(trace.size() >= static_cast<std::size_t>(8 + 3 * n_beats),
          ErrorCode::invalid_argument, "ramsey_fit: too few points");

  const std::size_t n = trace.size();
  const double span = trace.x.back() - trace.x.front();
  double dt_min = span;
  for (std::size_t k = 1; k < n; ++k) dt_min = std::min(dt_min, trace.x[k] - trace.x[k - 1]);
  const double f_nyquist = 0.5 / dt_min;

  auto peaks = periodogram_peaks(trace, n_beats);
  require(!peaks.empty(), ErrorCode::singular, "ramsey_fit: no oscillation found");
  while (static_cast<int>(peaks.size()) < n_beats) {
    BeatGuess g = peaks.back();
    g.freq *= 1.3;
    g.amplitude *= 0.5;
    peaks.push_back(g);
  }

  const double mean = std::accumulate(trace.y.begin(), trace.y.end(), 0.0) /
                      static_cast<double>(n);
  const int np = 1 + 3 * n_beats + 1;

  auto make_init = [&](double f_jitter1, double f_jitter2, double ph1, double ph2) {
    Eigen::VectorXd p(np);
    p[0] = span / 2.0;  // t2_star
    p[1] = peaks[0].freq * f_jitter1;
    p[2] = peaks[0].amplitude;
    p[3] = peaks[0].phase + ph1;
    if (n_beats == 2) {
      p[4] = peaks[1].freq * f_jitter2;
      p[5] = peaks[1].amplitude;
      p[6] = peaks[1].phase + ph2;
    }
    p[np - 1] = mean;
    return p;
  };

  ModelFn model = [n_beats, x0 = trace.x.front()](double x, const Eigen::VectorXd& p) {
    const double t = x - x0;
    double osc = p[2] * std::cos(constants::two_pi * p[1] * t + p[3]);
    if (n_beats == 2) osc += p[5] * std::cos(constants::two_pi * p[4] * t + p[6]);
    return std::exp(-t / p[0]) * osc + p[p.size() - 1];
  };

  Bounds b = Bounds::unbounded(np);
  b.lower[0] = 1e-3 * span;
  b.lower[1] = 0.0;
  b.upper[1] = f_nyquist;
  if (n_beats == 2) {
    b.lower[4] = 0.0;
    b.upper[4] = f_nyquist;
  }

  std::vector<std::string> names = {"t2_star", "f1", "a1", "phi1"};
  if (n_beats == 2) {
    names.insert(names.end(), {"f2", "a2", "phi2"});
  }
  names.push_back("offset");

  const int n_starts = n_beats == 2 ? 8 : 1;
  FitResult best;
  bool have = false;
  for (int s = 0; s < n_starts; ++s) {
    Eigen::VectorXd init;
    if (s == 0) {
      init = make_init(1.0, 1.0, 0.0, 0.0);
    } else {
      RandomStream rs(seed, static_cast<std::uint64_t>(s));
      init = make_init(1.0 + 0.1 * rs.next_normal(), 1.0 + 0.1 * rs.next_normal(),
                       0.5 * rs.next_normal(), 0.5 * rs.next_normal());
      for (Eigen::Index j = 0; j < np; ++j)
        init[j] = std::clamp(init[j], b.lower[j], b.upper[j]);
    }
    FitResult r = fit_trace(model, trace, init, b, names);
    if (!r.converged) continue;
    if (!have || r.residual_norm < best.residual_norm) {
      best = std::move(r);
      have = true;
    }
  }
  require(have, ErrorCode::not_converged, "ramsey_fit: no start converged");

  if (n_beats == 2) {
    // canonical ordering f1 <= f2
    if (best.value("f1") > best.value("f2")) {
      std::swap(best.params[1], best.params[4]);
      std::swap(best.params[2], best.params[5]);
      std::swap(best.params[3], best.params[6]);
      best.covariance.row(1).swap(best.covariance.row(4));
      best.covariance.col(1).swap(best.covariance.col(4));
      best.covariance.row(2).swap(best.covariance.row(5));
      best.covariance.col(2).swap(best.covariance.col(5));
      best.covariance.row(3).swap(best.covariance.row(6));
      best.covariance.col(3).swap(best.covariance.col(6));
    }
    const double df = std::abs(best.value("f2") - best.value("f1"));
    if (df < 1.0 / span)
      fail(ErrorCode::singular,
           "ramsey_fit: beat collision (|f1 - f2| below the trace resolution); "
           "try n_beats=1");
  }
  return best;
}

BlobFitResult blob_fit(std::span<const Eigen::Vector2d> points, int n_components) {
  require(n_components == 1 || n_components == 2, ErrorCode::invalid_argument,
          "blob_fit: n_components must be 1 or 2");
  require(points.size() >= 100 * static_cast<std::size_t>(n_components),
          ErrorCode::invalid_argument, "blob_fit: need >= 100 shots per component");

  const std::size_t n = points.size();
  std::vector<int> member(n, 0);

  if (n_components == 2) {
    // split along the principal axis of the total covariance, then 2-means
    Eigen::Vector2d mu = Eigen::Vector2d::Zero();
    for (const auto& p : points) mu += p;
    mu /= static_cast<double>(n);
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : points) cov += (p - mu) * (p - mu).transpose();
    cov /= static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const Eigen::Vector2d axis = es.eigenvectors().col(1);  // largest variance

    std::vector<double> proj(n);
    for (std::size_t k = 0; k < n; ++k) proj[k] = axis.dot(points[k] - mu);
    const double split = median_of(proj);
    for (std::size_t k = 0; k < n; ++k) member[k] = proj[k] > split ? 1 : 0;

    Eigen::Vector2d centers[2];
    for (int pass = 0; pass < 50; ++pass) {
      Eigen::Vector2d sum[2] = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
      std::size_t cnt[2] = {0, 0};
      for (std::size_t k = 0; k < n; ++k) {
        sum[member[k]] += points[k];
        ++cnt[member[k]];
      }
      require(cnt[0] > 0 && cnt[1] > 0, ErrorCode::singular,
              "blob_fit: component collapsed during clustering");
      centers[0] = sum[0] / static_cast<double>(cnt[0]);
      centers[1] = sum[1] / static_cast<double>(cnt[1]);
      bool changed = false;
      for (std::size_t k = 0; k < n; ++k) {
        const int want = (points[k] - centers[0]).squaredNorm() <=
                                 (points[k] - centers[1]).squaredNorm()
                             ? 0
                             : 1;
        if (want != member[k]) {
          member[k] = want;
          changed = true;
        }
      }
      if (!changed) break;
    }
  }

  BlobFitResult out;
  for (int c = 0; c < n_components; ++c) {
    std::vector<Eigen::Vector2d> pts;
    for (std::size_t k = 0; k < n; ++k)
      if (member[k] == c) pts.push_back(points[k]);
    require(pts.size() >= 50, ErrorCode::singular, "blob_fit: component too small");

    // two-pass 4-sigma trim to exclude leakage tails
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    double sigma = 0.0;
    std::vector<Eigen::Vector2d> kept = pts;
    for (int pass = 0; pass < 3; ++pass) {
      mean.setZero();
      for (const auto& p : kept) mean += p;
      mean /= static_cast<double>(kept.size());
      double var = 0.0;
      for (const auto& p : kept) var += (p - mean).squaredNorm();
      var /= 2.0 * static_cast<double>(kept.size());  // isotropic per-axis variance
      sigma = std::sqrt(var);
      require(sigma > 0.0, ErrorCode::singular, "blob_fit: zero-variance component");
      if (pass == 2) break;
      std::vector<Eigen::Vector2d> next;
      next.reserve(kept.size());
      const double r2max = 16.0 * 2.0 * var;  // 4 sigma in 2D radial distance
      for (const auto& p : kept)
        if ((p - mean).squaredNorm() <= r2max) next.push_back(p);
      require(next.size() >= 50, ErrorCode::singular, "blob_fit: trim removed the component");
      kept.swap(next);
    }

    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : kept) cov += (p - mean) * (p - mean).transpose();
    cov /= static_cast<double>(kept.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const double lo = std::max(es.eigenvalues()[0], 0.0);
    const double hi = std::max(es.eigenvalues()[1], 0.0);
    require(lo > 0.0, ErrorCode::singular, "blob_fit: degenerate (zero-variance) component");

    BlobComponent comp;
    comp.mean = mean;
    comp.sigma = sigma;
    comp.circularity = std::sqrt(hi / lo);
    comp.count = kept.size();
    out.components.push_back(comp);
  }

  std::sort(out.components.begin(), out.components.end(),
            [](const BlobComponent& a, const BlobComponent& b) { return a.count > b.count; });

  if (n_components == 2) {
    const double d = (out.components[0].mean - out.components[1].mean).norm();
    const double s = 0.5 * (out.components[0].sigma + out.components[1].sigma);
    require(d >= 0.5 * s, ErrorCode::singular,
            "blob_fit: component collapse (means closer than sigma/2)");
  }

  double wsum = 0.0, ssum = 0.0;
  for (const auto& c : out.components) {
    wsum += static_cast<double>(c.count);
    ssum += static_cast<double>(c.count) * c.sigma;
  }
  out.sigma_common = ssum / wsum;
  return out;
}

}  // namespace hfcqed::fit
