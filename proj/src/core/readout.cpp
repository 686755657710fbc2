#include "readout.hpp"

#include <cmath>

#include "constants.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace hfcqed {

std::string to_string(StateLabel label) {
  switch (label) {
    case StateLabel::g: return "g";
    case StateLabel::e: return "e";
    case StateLabel::f: return "f";
    case StateLabel::h: return "h";
    case StateLabel::equilibrium: return "equilibrium";
  }
  return "?";
}

StateLabel state_label_from_string(const std::string& s) {
  if (s == "g") return StateLabel::g;
  if (s == "e") return StateLabel::e;
  if (s == "f") return StateLabel::f;
  if (s == "h") return StateLabel::h;
  if (s == "equilibrium") return StateLabel::equilibrium;
  fail(ErrorCode::invalid_argument, "unknown state label: " + s);
}

void ShotSet::validate() const {
  require(!shots.empty(), ErrorCode::invalid_argument, "shot set must be non-empty");
  for (const IqShot& s : shots)
    require(std::isfinite(s.i) && std::isfinite(s.q), ErrorCode::invalid_argument,
            "shot values must be finite");
}

void BlobModel::validate() const {
  require(sigma > 0.0, ErrorCode::invalid_argument, "blob model: sigma must be > 0");
}

double BlobModel::theta_eg() const {
  const double dot = mu_e.dot(mu_g);
  const double cross = mu_e.x() * mu_g.y() - mu_e.y() * mu_g.x();
  return std::atan2(std::abs(cross), dot);
}

double snr_empirical(const BlobModel& blob) {
  blob.validate();
  return (blob.mu_e - blob.mu_g).squaredNorm() / (2.0 * blob.sigma * blob.sigma);
}

double snr_theory(double eta, double kappa_hz, double nbar, double tau_s,
                  double theta_eg_rad) {
  require(eta >= 0.0 && eta <= 0.5, ErrorCode::domain,
          "snr_theory: eta must lie in [0, 0.5] (quantum limit)");
  require(kappa_hz > 0.0 && nbar >= 0.0 && tau_s >= 0.0, ErrorCode::invalid_argument,
          "snr_theory: kappa > 0, nbar >= 0, tau >= 0 required");
  const double s = std::sin(0.5 * theta_eg_rad);
  return 8.0 * eta * (constants::two_pi * kappa_hz) * nbar * tau_s * s * s;
}

EfficiencyResult efficiency(const BlobModel& blob, double kappa_hz, double nbar,
                            double tau_s, double omega_r_hz) {
  require(kappa_hz > 0.0 && nbar > 0.0 && tau_s > 0.0 && omega_r_hz > 0.0,
          ErrorCode::invalid_argument, "efficiency: inputs must be > 0");
  const double theta = blob.theta_eg();
  const double s = std::sin(0.5 * theta);
  require(s > 0.0, ErrorCode::singular,
          "efficiency: theta_eg = 0 (indistinguishable pointer states)");
  const double denom = 8.0 * (constants::two_pi * kappa_hz) * nbar * tau_s * s * s;
  EfficiencyResult out;
  out.eta = snr_empirical(blob) / denom;
  out.unphysical = out.eta > 0.5;
  out.t_sys_k = constants::planck * omega_r_hz / (constants::boltzmann * out.eta);
  return out;
}

double AngularHistogram::bin_width() const {
  return constants::two_pi / static_cast<double>(counts.size());
}

double AngularHistogram::bin_center(int k) const {
  return (static_cast<double>(k) + 0.5) * bin_width();
}

std::uint64_t AngularHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

double angle_from_neg_x(const Eigen::Vector2d& point, const Eigen::Vector2d& origin) {
  const Eigen::Vector2d d = point - origin;
  double a = std::atan2(d.y(), d.x()) + constants::pi;  // 0 at the negative x-axis
  if (a >= constants::two_pi) a -= constants::two_pi;
  if (a < 0.0) a += constants::two_pi;
  return a;
}

AngularHistogram angular_histogram(const ShotSet& shots, const Eigen::Vector2d& origin,
                                   int bins) {
  shots.validate();
  require(bins >= 16, ErrorCode::invalid_argument, "angular_histogram: bins must be >= 16");
  AngularHistogram h;
  h.origin = origin;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double w = constants::two_pi / static_cast<double>(bins);
  for (const IqShot& s : shots.shots) {
    const double a = angle_from_neg_x({s.i, s.q}, origin);
    auto k = static_cast<std::size_t>(a / w);
    if (k >= h.counts.size()) k = h.counts.size() - 1;  // a == 2pi edge
    ++h.counts[k];
  }
  return h;
}

AssignmentErrors assignment_errors(const AngularHistogram& hist_g,
                                   const AngularHistogram& hist_notg,
                                   double threshold_rad) {
  require(hist_g.bins() == hist_notg.bins(), ErrorCode::invalid_argument,
          "assignment_errors: histograms must share binning");
  require(threshold_rad > 0.0 && threshold_rad < constants::two_pi, ErrorCode::domain,
          "assignment_errors: threshold outside histogram domain");
  std::uint64_t g_above = 0, notg_below = 0;
  for (int k = 0; k < hist_g.bins(); ++k) {
    if (hist_g.bin_center(k) > threshold_rad) g_above += hist_g.counts[k];
    if (hist_notg.bin_center(k) <= threshold_rad) notg_below += hist_notg.counts[k];
  }
  AssignmentErrors e;
  e.p_notg_given_g = static_cast<double>(g_above) / static_cast<double>(hist_g.total());
  e.p_g_given_notg =
      static_cast<double>(notg_below) / static_cast<double>(hist_notg.total());
  e.epsilon_assignment = 0.5 * (e.p_notg_given_g + e.p_g_given_notg);
  return e;
}

double optimal_threshold(const AngularHistogram& hist_g, const AngularHistogram& hist_notg) {
  require(hist_g.bins() == hist_notg.bins(), ErrorCode::invalid_argument,
          "optimal_threshold: histograms must share binning");
  const double w = hist_g.bin_width();
  double best_thr = w;
  double best_eps = 1.0;
  for (int k = 1; k < hist_g.bins(); ++k) {
    const double thr = w * static_cast<double>(k);
    const AssignmentErrors e = assignment_errors(hist_g, hist_notg, thr);
    if (e.epsilon_assignment < best_eps) {
      best_eps = e.epsilon_assignment;
      best_thr = thr;
    }
  }
  return best_thr;
}

void ReadoutScenario::validate() const {
  blob.validate();
  require(tau_s > 0.0, ErrorCode::invalid_argument, "scenario: tau must be > 0");
  require(leakage_fraction >= 0.0 && leakage_fraction <= 1.0, ErrorCode::invalid_argument,
          "scenario: leakage_fraction must be a probability");
  double sum = 0.0;
  for (const auto& [label, p] : populations) {
    require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument,
            "scenario: populations must be probabilities");
    require(label == StateLabel::g || label == StateLabel::e, ErrorCode::unsupported,
            "scenario: the simulator models g and e populations only");
    sum += p;
  }
  require(sum <= 1.0 + 1e-12, ErrorCode::invalid_argument,
          "scenario: populations must sum to <= 1");
}

ShotSet simulate_shots(const ReadoutScenario& scenario, std::size_t n) {
  scenario.validate();
  require(n >= 1, ErrorCode::invalid_argument, "simulate_shots: n must be >= 1");

  double p_e = 0.0;
  if (auto it = scenario.populations.find(StateLabel::e); it != scenario.populations.end())
    p_e = it->second;

  const double p_decay =
      scenario.t1_s > 0.0 ? 1.0 - std::exp(-scenario.tau_s / scenario.t1_s) : 0.0;

  ShotSet out;
  out.label = p_e >= 1.0 ? StateLabel::e : (p_e <= 0.0 ? StateLabel::g : StateLabel::equilibrium);
  out.shots.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    RandomStream rs(scenario.seed, static_cast<std::uint64_t>(k));
    Eigen::Vector2d center = scenario.blob.mu_g;
    if (rs.next_uniform() < p_e) {
      center = scenario.blob.mu_e;
      if (p_decay > 0.0 && rs.next_uniform() < p_decay) {
        // pointer average of a decay at uniform time in [0, tau]
        const double u = rs.next_uniform();
        center = scenario.blob.mu_g + u * (scenario.blob.mu_e - scenario.blob.mu_g);
      }
    }
    if (scenario.leakage_fraction > 0.0 && rs.next_uniform() < scenario.leakage_fraction)
      center = scenario.leakage_center;
    out.shots[k].i = center.x() + scenario.blob.sigma * rs.next_normal();
    out.shots[k].q = center.y() + scenario.blob.sigma * rs.next_normal();
  }
  return out;
}

std::vector<bool> postselect_ground(const ShotSet& first_readout, const BlobModel& blob,
                                    double radius_sigmas) {
  first_readout.validate();
  blob.validate();
  require(radius_sigmas > 0.0, ErrorCode::invalid_argument,
          "postselect_ground: radius must be > 0");
  const double r2 = radius_sigmas * radius_sigmas * blob.sigma * blob.sigma;
  std::vector<bool> keep(first_readout.shots.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Eigen::Vector2d p(first_readout.shots[k].i, first_readout.shots[k].q);
    keep[k] = (p - blob.mu_g).squaredNorm() <= r2;
  }
  return keep;
}

ShotSet filter_shots(const ShotSet& shots, const std::vector<bool>& keep) {
  require(shots.shots.size() == keep.size(), ErrorCode::invalid_argument,
          "filter_shots: mask length mismatch");
  ShotSet out;
  out.label = shots.label;
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (keep[k]) out.shots.push_back(shots.shots[k]);
  return out;
}

BlobBuildResult blob_from_labeled(const ShotSet& g_shots, const ShotSet& e_shots) {
  g_shots.validate();
  e_shots.validate();

  auto to_points = [](const ShotSet& s) {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(s.shots.size());
    for (const IqShot& q : s.shots) pts.emplace_back(q.i, q.q);
    return pts;
  };
  const auto pg = to_points(g_shots);
  const auto pe = to_points(e_shots);
  const fit::BlobFitResult fg = fit::blob_fit(pg, 1);
  const fit::BlobFitResult fe = fit::blob_fit(pe, 1);

  BlobBuildResult out;
  out.blob.mu_g = fg.components[0].mean;
  out.blob.mu_e = fe.components[0].mean;
  out.sigma_g = fg.components[0].sigma;
  out.sigma_e = fe.components[0].sigma;
  out.circularity_g = fg.components[0].circularity;
  out.circularity_e = fe.components[0].circularity;
  out.blob.sigma = 0.5 * (out.sigma_g + out.sigma_e);
  return out;
}

}  // namespace hfcqed
