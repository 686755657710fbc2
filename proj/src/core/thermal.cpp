#include "thermal.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rates.hpp"

namespace hfcqed {

AttenuationProfile::AttenuationProfile(std::vector<double> freq_hz, std::vector<double> db)
    : freq_hz_(std::move(freq_hz)), db_(std::move(db)) {
  require(freq_hz_.size() >= 2 && freq_hz_.size() == db_.size(), ErrorCode::invalid_argument,
          "attenuation profile: need >= 2 matching (frequency, dB) rows");
  for (std::size_t k = 1; k < freq_hz_.size(); ++k)
    require(freq_hz_[k] > freq_hz_[k - 1], ErrorCode::invalid_argument,
            "attenuation profile: frequencies must be strictly increasing");
  for (double a : db_)
    require(a >= 0.0, ErrorCode::invalid_argument, "attenuation profile: dB must be >= 0");
}

double AttenuationProfile::db_at(double f_hz) const {
  require(f_hz >= freq_hz_.front() && f_hz <= freq_hz_.back(), ErrorCode::domain,
          "attenuation profile: frequency outside tabulated range (no extrapolation)");
  const auto it = std::upper_bound(freq_hz_.begin(), freq_hz_.end(), f_hz);
  if (it == freq_hz_.end()) return db_.back();
  const std::size_t hi = static_cast<std::size_t>(it - freq_hz_.begin());
  if (hi == 0) return db_.front();
  const std::size_t lo = hi - 1;
  const double t = (f_hz - freq_hz_[lo]) / (freq_hz_[hi] - freq_hz_[lo]);
  return db_[lo] + t * (db_[hi] - db_[lo]);
}

double Stage::attenuation_db(double f_hz) const {
  if (const double* fixed = std::get_if<double>(&attenuation)) return *fixed;
  return std::get<AttenuationProfile>(attenuation).db_at(f_hz);
}

void Stage::validate() const {
  require(temperature_k > 0.0, ErrorCode::invalid_argument, "stage: temperature must be > 0");
  if (const double* fixed = std::get_if<double>(&attenuation))
    require(*fixed >= 0.0, ErrorCode::invalid_argument, "stage: attenuation dB must be >= 0");
}

void AttenuationChain::validate() const {
  require(source_temperature_k > 0.0, ErrorCode::invalid_argument,
          "chain: source temperature must be > 0");
  require(!stages.empty(), ErrorCode::invalid_argument, "chain: must have at least one stage");
  for (const Stage& s : stages) s.validate();
}

double stage_step(double n_in, const Stage& stage, double f_hz) {
  stage.validate();
  require(n_in >= 0.0, ErrorCode::invalid_argument, "stage_step: n_in must be >= 0");
  const double a_db = stage.attenuation_db(f_hz);
  const double L = std::pow(10.0, -a_db / 10.0);
  return L * n_in + (1.0 - L) * bose_einstein(f_hz, stage.temperature_k);
}

double cascade(const AttenuationChain& chain, double f_hz) {
  chain.validate();
  double n = bose_einstein(f_hz, chain.source_temperature_k);
  for (const Stage& s : chain.stages) n = stage_step(n, s, f_hz);
  return n;
}

AttenuationChain apply_edits(const AttenuationChain& chain, const std::vector<ChainEdit>& edits) {
  AttenuationChain out = chain;
  for (const ChainEdit& e : edits) {
    require(e.stage_index < out.stages.size(), ErrorCode::invalid_argument,
            "chain edit: stage index out of range");
    Stage& s = out.stages[e.stage_index];
    if (e.temperature_k) s.temperature_k = *e.temperature_k;
    if (e.attenuation_db) s.attenuation = *e.attenuation_db;
  }
  return out;
}

ChainSweepTable chain_sweep(const AttenuationChain& chain, const std::vector<double>& f_grid_hz,
                            const std::vector<ChainVariant>& variants) {
  chain.validate();
  require(!f_grid_hz.empty(), ErrorCode::invalid_argument, "chain_sweep: empty frequency grid");

  std::vector<AttenuationChain> chains;
  ChainSweepTable table;
  table.columns.push_back("baseline");
  chains.push_back(chain);
  for (const ChainVariant& v : variants) {
    table.columns.push_back(v.name);
    chains.push_back(apply_edits(chain, v.edits));
  }

  table.freq_hz = f_grid_hz;
  table.occupations.resize(f_grid_hz.size());
  for (std::size_t k = 0; k < f_grid_hz.size(); ++k) {
    table.occupations[k].reserve(chains.size());
    for (const AttenuationChain& c : chains)
      table.occupations[k].push_back(cascade(c, f_grid_hz[k]));
  }
  return table;
}

}  // namespace hfcqed
