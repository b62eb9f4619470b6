#include "ioi/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ioi::gibbs {

ScanOrder ScanOrder::fixed(std::vector<int> order) {
  require(!order.empty(), "ScanOrder: empty fixed order");
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    require(sorted[i] == static_cast<int>(i), "ScanOrder: fixed order must be a permutation");
  }
  ScanOrder s;
  s.kind = Kind::Fixed;
  s.order = std::move(order);
  return s;
}

int Chain::index_of(std::string_view name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return static_cast<int>(j);
  }
  throw std::invalid_argument("Chain: unknown parameter name: " + std::string(name));
}

std::vector<double> Chain::column(int j, long from_row) const {
  require(j >= 0 && j < k(), "Chain::column: bad index");
  require(from_row >= 0 && from_row <= rows_, "Chain::column: bad starting row");
  std::vector<double> out;
  out.reserve(rows_ - from_row);
  for (long r = from_row; r < rows_; ++r) out.push_back(at(r, j));
  return out;
}

std::vector<double> Chain::column(std::string_view name, long from_row) const {
  return column(index_of(name), from_row);
}

std::pair<double, bool> metropolis_update(const std::function<double(double)>& logpdf,
                                          double current, double scale, RandomStream& rng) {
  require(scale > 0.0, "metropolis_update: scale must be positive");
  const double lp_cur = logpdf(current);
  if (!std::isfinite(lp_cur)) {
    throw std::runtime_error("metropolis_update: log-density not finite at the current value");
  }
  const double proposal = current + scale * rng.normal01();
  const double lp_prop = logpdf(proposal);
  const double delta = lp_prop - lp_cur;
  if (delta >= 0.0) return {proposal, true};
  if (std::log(rng.uniform01()) < delta) return {proposal, true};
  return {current, false};
}

namespace {

struct MetropolisState {
  double scale = 1.0;
  long window_proposals = 0;
  long window_accepts = 0;
  long total_proposals = 0;
  long total_accepts = 0;
  long burnin_proposals = 0;
  long burnin_accepts = 0;
};

}  // namespace

Chain run_chain(const std::vector<ConditionalSpec>& conditionals, const GibbsConfig& config) {
  const int k = static_cast<int>(conditionals.size());
  require(k >= 1, "run_chain: need at least one conditional");
  require(config.n_transitions > 0, "run_chain: n_transitions must be positive");
  require(config.burn_in >= 0 && config.burn_in < config.n_transitions,
          "run_chain: need 0 <= burn_in < n_transitions");
  require(static_cast<int>(config.initial.size()) == k,
          "run_chain: initial value count must match the conditionals");
  if (config.scan.kind == ScanOrder::Kind::Fixed) {
    require(static_cast<int>(config.scan.order.size()) == k,
            "run_chain: fixed order must cover every coordinate exactly once");
  }
  for (const auto& c : conditionals) {
    require(static_cast<bool>(c.builder), "run_chain: conditional without a builder");
    require(c.update == UpdateKind::DirectSample || c.metropolis_scale > 0.0,
            "run_chain: metropolis scale must be positive");
  }

  RandomStream rng(config.seed);
  std::vector<double> current = config.initial;
  std::vector<MetropolisState> mstate(k);
  for (int j = 0; j < k; ++j) mstate[j].scale = conditionals[j].metropolis_scale;
  std::vector<long> update_count(k, 0);

  Chain chain;
  chain.names_.reserve(k);
  for (const auto& c : conditionals) chain.names_.push_back(c.name);
  chain.rows_ = config.n_transitions;
  chain.data_.resize(static_cast<std::size_t>(config.n_transitions) * k);
  chain.config_ = config;

  auto update_coordinate = [&](int j, bool in_burnin) {
    const ConditionalDensity cd = conditionals[j].builder(current);
    ++update_count[j];
    if (conditionals[j].update == UpdateKind::DirectSample) {
      if (!cd.direct_sampler) {
        throw std::runtime_error("run_chain: coordinate '" + conditionals[j].name +
                                 "' is tagged DirectSample but provides no sampler");
      }
      current[j] = cd.direct_sampler(rng);
      return;
    }
    if (!cd.logpdf) {
      throw std::runtime_error("run_chain: coordinate '" + conditionals[j].name +
                               "' provides no log-density");
    }
    auto& st = mstate[j];
    const auto [value, accepted] = metropolis_update(cd.logpdf, current[j], st.scale, rng);
    current[j] = value;
    ++st.window_proposals;
    ++st.total_proposals;
    st.window_accepts += accepted ? 1 : 0;
    st.total_accepts += accepted ? 1 : 0;
    if (in_burnin) {
      ++st.burnin_proposals;
      st.burnin_accepts += accepted ? 1 : 0;
      // Step-scale tuning runs during burn-in only and freezes afterwards.
      if (st.window_proposals >= 200) {
        const double rate = static_cast<double>(st.window_accepts) / st.window_proposals;
        if (rate > 0.5) st.scale *= 1.1;
        if (rate < 0.25) st.scale *= 0.9;
        st.window_proposals = 0;
        st.window_accepts = 0;
      }
    }
  };

  for (long t = 0; t < config.n_transitions; ++t) {
    const bool in_burnin = t < config.burn_in;
    if (config.scan.kind == ScanOrder::Kind::Fixed) {
      for (int j : config.scan.order) update_coordinate(j, in_burnin);
    } else {
      update_coordinate(rng.uniform_int(k), in_burnin);
    }
    std::copy(current.begin(), current.end(), chain.data_.begin() + t * k);

    if (t + 1 == config.burn_in) {
      for (int j = 0; j < k; ++j) {
        const auto& st = mstate[j];
        if (conditionals[j].update == UpdateKind::Metropolis && st.burnin_proposals >= 50 &&
            st.burnin_accepts == 0) {
          throw std::runtime_error("run_chain: coordinate '" + conditionals[j].name +
                                   "' accepted nothing over the burn-in (stuck chain)");
        }
      }
    }
  }

  chain.acceptance_rate_.assign(k, kNaN);
  chain.update_count_.assign(update_count.begin(), update_count.end());
  for (int j = 0; j < k; ++j) {
    if (conditionals[j].update == UpdateKind::Metropolis && mstate[j].total_proposals > 0) {
      chain.acceptance_rate_[j] =
          static_cast<double>(mstate[j].total_accepts) / mstate[j].total_proposals;
    }
  }
  return chain;
}

Estimate monte_carlo_expectation(const Chain& chain,
                                 const std::function<double(const std::vector<double>&)>& h,
                                 long burn_in) {
  require(burn_in >= 0 && burn_in < chain.rows(), "monte_carlo_expectation: bad burn_in");
  const long n = chain.rows() - burn_in;
  const int k = chain.k();
  std::vector<double> row(k);
  std::vector<double> values;
  values.reserve(n);
  for (long r = burn_in; r < chain.rows(); ++r) {
    for (int j = 0; j < k; ++j) row[j] = chain.at(r, j);
    const double v = h(row);
    if (!std::isfinite(v)) {
      throw std::runtime_error("monte_carlo_expectation: h is not finite on a retained row");
    }
    values.push_back(v);
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

  const int n_batches = static_cast<int>(std::min<long>(32, n));
  const long per = n / n_batches;
  double se = 0.0;
  if (n_batches >= 2 && per >= 1) {
    std::vector<double> bm(n_batches, 0.0);
    for (int b = 0; b < n_batches; ++b) {
      double s = 0.0;
      for (long i = 0; i < per; ++i) s += values[b * per + i];
      bm[b] = s / per;
    }
    const double bmean = std::accumulate(bm.begin(), bm.end(), 0.0) / n_batches;
    double var = 0.0;
    for (double v : bm) var += (v - bmean) * (v - bmean);
    var /= (n_batches - 1);
    se = std::sqrt(var / n_batches);
  }
  return {mean, se};
}

}  // namespace ioi::gibbs
