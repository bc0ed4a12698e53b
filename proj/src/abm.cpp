#include "trustmarket/abm.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <cmath>
#include <ostream>
#include <string>

#include "trustmarket/csv.hpp"
#include "trustmarket/error.hpp"

namespace trustmarket::abm {

void validate(const SimConfig& config) {
  if (config.n_sellers < 2)
    throw ModelError(ErrorKind::InvalidArgument, "n_sellers must be >= 2");
  if (!std::isfinite(config.lambda_per_seller) || config.lambda_per_seller <= 0.0)
    throw ModelError(ErrorKind::InvalidArgument, "lambda_per_seller must be > 0");
  if (!std::isfinite(config.sigma) || config.sigma < 0.0)
    throw ModelError(ErrorKind::InvalidArgument, "sigma must be >= 0");
  if (config.periods < 0) throw ModelError(ErrorKind::InvalidArgument, "periods must be >= 0");
  if (config.record_every < 1)
    throw ModelError(ErrorKind::InvalidArgument, "record_every must be >= 1");
  trustmarket::validate(config.initial);
}

Counts initial_counts(const SellerDistribution& shares, std::int64_t n) {
  const auto nf = static_cast<double>(n);
  Counts c;
  c.good = std::llround(shares.x_good * nf);
  c.bad = std::min<std::int64_t>(std::llround(shares.x_bad * nf), n - c.good);
  c.inactive = n - c.good - c.bad;
  return c;
}

double fermi_switch_probability(double pi_focal, double pi_other, double sigma) {
  return 1.0 / (1.0 + std::exp(sigma * (pi_focal - pi_other)));
}

double effective_sigma(double sigma, double lambda_per_seller) {
  if (!(lambda_per_seller > 0.0))
    throw ModelError(ErrorKind::InvalidArgument, "lambda_per_seller must be > 0");
  return sigma / -std::expm1(-lambda_per_seller);
}

std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index) {
  // SplitMix64 finalizer over base + golden-ratio stride.
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

using Engine = boost::random::mt19937_64;

enum class Type { Good, Bad, Inactive };

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return boost::random::uniform_01<double>()(eng_); }

  std::int64_t index(std::int64_t n) {
    return boost::random::uniform_int_distribution<std::int64_t>(0, n - 1)(eng_);
  }

  std::int64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    return boost::random::poisson_distribution<std::int64_t, double>(mean)(eng_);
  }

  std::int64_t binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return boost::random::binomial_distribution<std::int64_t, double>(n, p)(eng_);
  }

 private:
  Engine eng_;
};

Type type_of(std::int64_t idx, const Counts& c) {
  if (idx < c.good) return Type::Good;
  if (idx < c.good + c.bad) return Type::Bad;
  return Type::Inactive;
}

std::int64_t& slot(Counts& c, Type t) {
  return t == Type::Good ? c.good : t == Type::Bad ? c.bad : c.inactive;
}

}  // namespace

SimTrajectory run(const SimConfig& config, const MarketParams& params, const SignalPolicy& policy) {
  validate(config);
  trustmarket::validate(params);
  trustmarket::validate(policy);
  // Signal labels are arbitrary, so simulate the canonical orientation.
  const SignalPolicy pol = canonicalize(policy).policy;

  Sampler rng(config.seed);
  Counts counts = initial_counts(config.initial, config.n_sellers);
  const std::int64_t n = config.n_sellers;
  const double lambda = config.lambda_per_seller;
  const double per_sale[2] = {params.r - params.c, 1.0 - params.c};
  const double p_ghat[2] = {pol.alpha, pol.beta};

  SimTrajectory traj;
  traj.periods = config.periods;
  traj.records.reserve(static_cast<std::size_t>(config.periods / config.record_every + 1));

  for (std::int64_t t = 0; t < config.periods; ++t) {
    PeriodRecord rec;
    rec.period = t;
    rec.counts = counts;
    const std::int64_t active = counts.good + counts.bad;
    double buy_ghat = 0.0;
    double buy_bhat = 0.0;
    if (active > 0) {
      const double xi = static_cast<double>(counts.good) / static_cast<double>(active);
      rec.xi = xi;
      const Thresholds th = decision_thresholds(params, pol);
      buy_ghat = purchase_probability(Signal::GoodHat, xi, th);
      buy_bhat = purchase_probability(Signal::BadHat, xi, th);
    }

    // Focal and model first; both get individual draws because their own
    // payoffs drive the imitation step.
    const std::int64_t focal = rng.index(n);
    std::int64_t model = rng.index(n - 1);
    if (model >= focal) ++model;
    const Type focal_type = type_of(focal, counts);
    const Type model_type = type_of(model, counts);

    std::int64_t sales[2] = {0, 0};
    const auto individual = [&](Type type) {
      if (type == Type::Inactive) return 0.0;
      const int k = type == Type::Good ? 0 : 1;
      const bool ghat = rng.uniform() < p_ghat[k];
      const std::int64_t s = rng.poisson(lambda * (ghat ? buy_ghat : buy_bhat));
      sales[k] += s;
      return s > 0 ? per_sale[k] : 0.0;
    };
    const double pi_focal = individual(focal_type);
    const double pi_model = individual(model_type);

    // Everybody else, aggregated by type and signal.
    for (int k = 0; k < 2; ++k) {
      const Type type = k == 0 ? Type::Good : Type::Bad;
      const std::int64_t rest = (k == 0 ? counts.good : counts.bad) -
                                (focal_type == type ? 1 : 0) - (model_type == type ? 1 : 0);
      if (rest <= 0) continue;
      std::int64_t ghat = 0;
      if (buy_ghat != buy_bhat) ghat = rng.binomial(rest, p_ghat[k]);
      const double rate = buy_ghat != buy_bhat
                              ? buy_ghat * static_cast<double>(ghat) +
                                    buy_bhat * static_cast<double>(rest - ghat)
                              : buy_ghat * static_cast<double>(rest);
      sales[k] += rng.poisson(lambda * rate);
    }

    if (rng.uniform() < fermi_switch_probability(pi_focal, pi_model, config.sigma) &&
        focal_type != model_type) {
      --slot(counts, focal_type);
      ++slot(counts, model_type);
    }

    rec.sales_good = sales[0];
    rec.sales_bad = sales[1];
    rec.revenue = params.c * static_cast<double>(sales[0] + sales[1]);
    traj.total_sales_good += sales[0];
    traj.total_sales_bad += sales[1];
    traj.total_seller_income_good += per_sale[0] * static_cast<double>(sales[0]);
    traj.total_seller_income_bad += per_sale[1] * static_cast<double>(sales[1]);
    if (t % config.record_every == 0) traj.records.push_back(rec);
  }
  traj.final_counts = counts;
  return traj;
}

QuasiStationarySummary quasi_stationary(const SimTrajectory& trajectory, int bins) {
  if (bins < 1) throw ModelError(ErrorKind::InvalidArgument, "bins must be >= 1");
  if (trajectory.periods < 4)
    throw ModelError(ErrorKind::EmptyWindow, "need at least 4 periods, got " +
                                                 std::to_string(trajectory.periods));
  QuasiStationarySummary out;
  out.window_end = trajectory.periods;
  out.window_begin = trajectory.periods - trajectory.periods / 4;
  out.histogram.assign(static_cast<std::size_t>(bins), 0);
  std::int64_t seen = 0;
  for (const PeriodRecord& rec : trajectory.records) {
    if (rec.period < out.window_begin || !rec.xi) continue;
    const auto b = std::min<std::int64_t>(static_cast<std::int64_t>(*rec.xi * bins), bins - 1);
    ++out.histogram[static_cast<std::size_t>(b)];
    ++seen;
  }
  if (seen == 0)
    throw ModelError(ErrorKind::EmptyWindow, "no period with active sellers in the window");
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.histogram.size(); ++i)
    if (out.histogram[i] > out.histogram[best]) best = i;
  out.mode_xi = (static_cast<double>(best) + 0.5) / bins;
  out.extinct_good = trajectory.final_counts.good == 0;
  return out;
}

void write_trajectory_csv(std::ostream& os, const SimTrajectory& trajectory) {
  csv::write_header(os, {"period", "N_G", "N_B", "N_I", "xi", "sales_good", "sales_bad", "revenue"});
  for (const PeriodRecord& rec : trajectory.records) {
    csv::Row row;
    row.add(rec.period)
        .add(rec.counts.good)
        .add(rec.counts.bad)
        .add(rec.counts.inactive)
        .add(rec.xi)
        .add(rec.sales_good)
        .add(rec.sales_bad)
        .add(rec.revenue);
    csv::write_row(os, row);
  }
}

}  // namespace trustmarket::abm
