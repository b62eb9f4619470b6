#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ioi/common.hpp"
#include "ioi/rng.hpp"

namespace ioi::gibbs {

/// What a conditional builder hands back for one coordinate update: a
/// log-density (normalization not required) and, when the coordinate is
/// directly sampleable, a sampler.
struct ConditionalDensity {
  std::function<double(double)> logpdf;
  std::function<double(RandomStream&)> direct_sampler;  // empty => Metropolis only
};

enum class UpdateKind { DirectSample, Metropolis };

/// One parameter's full conditional. The builder receives the current values
/// of all parameters (its own entry is ignored) and must be pure; the data
/// set lives inside the builder's closure.
struct ConditionalSpec {
  std::string name;
  std::function<ConditionalDensity(const std::vector<double>&)> builder;
  UpdateKind update = UpdateKind::DirectSample;
  double metropolis_scale = 1.0;
};

struct ScanOrder {
  enum class Kind { Fixed, UniformRandom };
  Kind kind = Kind::UniformRandom;
  std::vector<int> order;  // permutation over coordinates, Fixed only

  static ScanOrder uniform_random() { return ScanOrder{}; }
  static ScanOrder fixed(std::vector<int> order);
};

struct GibbsConfig {
  long n_transitions = 0;
  long burn_in = 0;  // recorded rows discarded by estimators
  std::uint64_t seed = 0;
  ScanOrder scan;
  std::vector<double> initial;
};

/// Recorded transitions: one row per transition. Under a fixed scan a row is
/// the state after the full sweep (intermediate states are not recorded);
/// under the uniform random scan exactly one coordinate moves per row.
class Chain {
 public:
  long rows() const { return rows_; }
  int k() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const GibbsConfig& config() const { return config_; }

  double at(long row, int j) const { return data_[row * k() + j]; }
  int index_of(std::string_view name) const;
  std::vector<double> column(int j, long from_row = 0) const;
  std::vector<double> column(std::string_view name, long from_row = 0) const;

  /// Accepted / proposed for Metropolis coordinates, NaN for direct ones.
  double acceptance_rate(int j) const { return acceptance_rate_[j]; }
  /// How many times each coordinate was selected for an update.
  long update_count(int j) const { return update_count_[j]; }

 private:
  friend Chain run_chain(const std::vector<ConditionalSpec>&, const GibbsConfig&);
  std::vector<std::string> names_;
  long rows_ = 0;
  std::vector<double> data_;
  GibbsConfig config_;
  std::vector<double> acceptance_rate_;
  std::vector<long> update_count_;
};

/// Symmetric normal random-walk proposal; accepts with probability
/// min(1, exp(delta log-density)). Returns the new value and whether the
/// proposal was accepted.
std::pair<double, bool> metropolis_update(const std::function<double(double)>& logpdf,
                                          double current, double scale, RandomStream& rng);

/// Runs the sampler. Deterministic given the config. Throws on a stuck
/// Metropolis coordinate (zero acceptances over the burn-in) and when a
/// conditional evaluates to an unusable density at the current point.
Chain run_chain(const std::vector<ConditionalSpec>& conditionals, const GibbsConfig& config);

struct Estimate {
  double value;
  double std_error;
};

/// Mean of h over the retained rows with a batch-means standard error
/// (32 batches).
Estimate monte_carlo_expectation(const Chain& chain,
                                 const std::function<double(const std::vector<double>&)>& h,
                                 long burn_in);

}  // namespace ioi::gibbs
