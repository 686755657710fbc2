#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hfcqed {

// Tabulated frequency -> attenuation(dB) profile (e.g. a measured filter
// response). Lookups interpolate linearly; out-of-range frequencies are an
// error, never extrapolated.
class AttenuationProfile {
 public:
  AttenuationProfile(std::vector<double> freq_hz, std::vector<double> db);
  double db_at(double f_hz) const;
  const std::vector<double>& frequencies() const { return freq_hz_; }
  const std::vector<double>& values_db() const { return db_; }

 private:
  std::vector<double> freq_hz_;
  std::vector<double> db_;
};

struct Stage {
  double temperature_k = 0.0;
  std::variant<double, AttenuationProfile> attenuation;  // fixed dB or profile

  double attenuation_db(double f_hz) const;
  void validate() const;
};

// Ordered warm-to-cold chain. Temperatures need not be monotone (supports
// what-if variants such as a warm last attenuator).
struct AttenuationChain {
  double source_temperature_k = 0.0;
  std::vector<Stage> stages;

  void validate() const;
};

// One attenuator step: n_out = L n_in + (1 - L) n_th(f, T), L = 10^(-A/10).
double stage_step(double n_in, const Stage& stage, double f_hz);

// Folds stage_step from n_th(f, source temperature) through all stages.
double cascade(const AttenuationChain& chain, double f_hz);

// A named edit applied to one stage of the baseline chain.
struct ChainEdit {
  std::size_t stage_index = 0;
  std::optional<double> temperature_k;      // replace stage temperature
  std::optional<double> attenuation_db;     // replace with fixed dB
};

struct ChainVariant {
  std::string name;
  std::vector<ChainEdit> edits;  // empty = baseline copy
};

AttenuationChain apply_edits(const AttenuationChain& chain, const std::vector<ChainEdit>& edits);

// Rows: one per frequency; columns: baseline then each variant.
struct ChainSweepTable {
  std::vector<double> freq_hz;
  std::vector<std::string> columns;               // "baseline", variant names...
  std::vector<std::vector<double>> occupations;   // [freq][column]
};

ChainSweepTable chain_sweep(const AttenuationChain& chain, const std::vector<double>& f_grid_hz,
                            const std::vector<ChainVariant>& variants);

}  // namespace hfcqed
