#pragma once
// Finite-population stochastic market: Poisson buyer arrivals, one Fermi
// imitation event per period.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "trustmarket/market.hpp"

namespace trustmarket::abm {

struct SimConfig {
  std::int64_t n_sellers = 2000;
  double lambda_per_seller = 2000.0;
  double sigma = 3.0;
  std::int64_t periods = 1000;
  std::uint64_t seed = 1;
  SellerDistribution initial{0.4, 0.4, 0.2};
  std::int64_t record_every = 1;  // keep every k-th period
};

struct Counts {
  std::int64_t good = 0;
  std::int64_t bad = 0;
  std::int64_t inactive = 0;
};

struct PeriodRecord {
  std::int64_t period = 0;
  Counts counts;               // at the start of the period
  std::optional<double> xi;    // absent when nobody is active
  std::int64_t sales_good = 0;
  std::int64_t sales_bad = 0;
  double revenue = 0.0;        // platform commission collected
};

struct SimTrajectory {
  std::int64_t periods = 0;
  std::vector<PeriodRecord> records;
  Counts final_counts;
  // Totals over all periods, recorded or not.
  std::int64_t total_sales_good = 0;
  std::int64_t total_sales_bad = 0;
  double total_seller_income_good = 0.0;
  double total_seller_income_bad = 0.0;
};

struct QuasiStationarySummary {
  double mode_xi = 0.0;
  std::vector<std::int64_t> histogram;
  std::int64_t window_begin = 0;  // [begin, end) in periods
  std::int64_t window_end = 0;
  bool extinct_good = false;
};

void validate(const SimConfig& config);

Counts initial_counts(const SellerDistribution& shares, std::int64_t n);

double fermi_switch_probability(double pi_focal, double pi_other, double sigma);

double effective_sigma(double sigma, double lambda_per_seller);

// Independent seed for replicate `index` derived from `base`.
std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index);

SimTrajectory run(const SimConfig& config, const MarketParams& params, const SignalPolicy& policy);

// Histogram of xi over the last quarter of the run. Throws EmptyWindow when
// that window holds no recorded period with active sellers.
QuasiStationarySummary quasi_stationary(const SimTrajectory& trajectory, int bins);

// period,N_G,N_B,N_I,xi,sales_good,sales_bad,revenue
void write_trajectory_csv(std::ostream& os, const SimTrajectory& trajectory);

}  // namespace trustmarket::abm
