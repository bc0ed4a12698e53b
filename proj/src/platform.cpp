#include "trustmarket/platform.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "trustmarket/error.hpp"
#include "trustmarket/nelder_mead.hpp"
#include "trustmarket/parallel.hpp"

namespace trustmarket {

void validate(const CostModel& m) {
  const auto prob = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!prob(m.alpha0) || !prob(m.beta0))
    throw ModelError(ErrorKind::InvalidArgument, "alpha0 and beta0 must lie in [0, 1]");
  if (!std::isfinite(m.kappa) || m.kappa < 0.0)
    throw ModelError(ErrorKind::InvalidArgument, "kappa must be >= 0");
  if (!std::isfinite(m.p) || m.p < 1.0)
    throw ModelError(ErrorKind::InvalidArgument, "p must be >= 1");
  if (!std::isfinite(m.q) || m.q <= 0.0 || m.q > 1.0)
    throw ModelError(ErrorKind::InvalidArgument, "q must lie in (0, 1]");
}

bool is_feasible(const MarketParams& params, const SignalPolicy& policy) {
  const SignalPolicy p = canonicalize(policy).policy;
  return params.r > params.c && p.alpha * (params.r - params.c) > p.beta * (1.0 - params.c);
}

double beta_bar(const MarketParams& params, double alpha) {
  if (!(params.c < 1.0))
    throw ModelError(ErrorKind::InvalidCommission, "beta_bar needs c < 1");
  return std::clamp(alpha * (params.r - params.c) / (1.0 - params.c), 0.0, 1.0);
}

double revenue(const MarketParams& params, const SignalPolicy& policy) {
  if (!is_feasible(params, policy)) return 0.0;
  const SignalPolicy p = canonicalize(policy).policy;
  const double a = p.alpha;
  const double b = p.beta;
  const double r = params.r;
  const double c = params.c;
  const double num = 2.0 * (1.0 - a) * c * r + (1.0 - b) * c * (2.0 - (1.0 - a) * (1.0 + r));
  return num / (2.0 * ((1.0 - a) * r + (1.0 - b)));
}

RevenueGradient revenue_gradient(const MarketParams& params, const SignalPolicy& policy) {
  if (!is_feasible(params, policy))
    throw ModelError(ErrorKind::InfeasiblePoint, "no stable equilibrium at this policy");
  const auto [p, flipped] = canonicalize(policy);
  const double a = p.alpha;
  const double b = p.beta;
  const double r = params.r;
  const double c = params.c;
  const double d = (1.0 - a) * r + (1.0 - b);
  const double d2 = 2.0 * d * d;
  RevenueGradient g{(1.0 - b) * (1.0 - b) * c * (1.0 + r) / d2,
                    (1.0 - a) * (1.0 - a) * c * r * (1.0 + r) / d2};
  if (flipped) g = {-g.d_alpha, -g.d_beta};
  return g;
}

namespace {

constexpr double kHullTolerance = 1e-12;

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double cross(Point2 a, Point2 b, Point2 p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

}  // namespace

double hull_distance(const SignalPolicy& policy, const CostModel& model) {
  const SignalPolicy nat = canonicalize({model.alpha0, model.beta0}).policy;
  const Point2 p{policy.alpha, policy.beta};
  if (nat.alpha - nat.beta <= kHullTolerance) {
    if (std::abs(p.x - p.y) <= kHullTolerance) return 0.0;
    return segment_distance(p, {0, 0}, {1, 1});
  }
  // Counter-clockwise: the natural point lies below the diagonal.
  const std::array<Point2, 4> v{{{0, 0}, {nat.alpha, nat.beta}, {1, 1}, {1 - nat.alpha, 1 - nat.beta}}};
  bool inside = true;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % v.size()];
    if (cross(a, b, p) < -kHullTolerance) inside = false;
    d = std::min(d, segment_distance(p, a, b));
  }
  return inside ? 0.0 : d;
}

double signal_cost(const SignalPolicy& policy, const CostModel& model) {
  if (model.kappa == 0.0) return 0.0;
  const double d = hull_distance(policy, model);
  if (d == 0.0) return 0.0;
  const double a = policy.alpha;
  const double b = policy.beta;
  const double den = a * b * (1.0 - a) * (1.0 - b);
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return model.kappa * std::pow(d, model.p) / std::pow(den, model.q);
}

ProfitReport profit(const MarketParams& params, const SignalPolicy& policy,
                    const CostModel& model) {
  ProfitReport out;
  out.feasible = is_feasible(params, policy);
  out.revenue = revenue(params, policy);
  out.cost = signal_cost(policy, model);
  out.profit = out.revenue - out.cost;
  return out;
}

namespace {

struct Candidate {
  double profit = -std::numeric_limits<double>::infinity();
  double cost = std::numeric_limits<double>::infinity();
  double alpha = 0.0;
  double beta = 0.0;
};

// Higher profit, then lower cost, lower beta, lower alpha.
bool beats(const Candidate& x, const Candidate& y) {
  if (x.profit != y.profit) return x.profit > y.profit;
  if (x.cost != y.cost) return x.cost < y.cost;
  if (x.beta != y.beta) return x.beta < y.beta;
  return x.alpha < y.alpha;
}

Candidate evaluate(const MarketParams& params, const CostModel& model, double a, double b) {
  Candidate c;
  c.alpha = a;
  c.beta = b;
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) return c;
  const ProfitReport rep = profit(params, {a, b}, model);
  c.profit = rep.profit;
  c.cost = rep.cost;
  return c;
}

}  // namespace

Optimum optimize_signals(const MarketParams& params, const CostModel& model,
                         const OptimizeOptions& options) {
  validate(params);
  validate(model);
  const double h = options.grid_h;
  if (!(h > 0.0 && h <= 0.1))
    throw ModelError(ErrorKind::InvalidArgument, "grid resolution must lie in (0, 0.1]");
  const auto n = static_cast<std::size_t>(std::floor(1.0 / h + 1e-9));

  // One best candidate per alpha column; reduced in column order afterwards.
  std::vector<Candidate> columns(n - 1);
  parallel_for(n - 1, options.jobs, [&](std::size_t i) {
    Candidate best;
    const double a = static_cast<double>(i + 1) * h;
    for (std::size_t j = 1; j < n; ++j) {
      const Candidate c = evaluate(params, model, a, static_cast<double>(j) * h);
      if (beats(c, best)) best = c;
    }
    columns[i] = best;
  });
  Candidate best;
  for (const Candidate& c : columns)
    if (beats(c, best)) best = c;

  const auto objective = [&](Point2 pt) { return evaluate(params, model, pt.x, pt.y).profit; };
  const auto better = [&](double va, Point2 pa, double vb, Point2 pb) {
    if (va != vb) return va > vb;
    return beats(evaluate(params, model, pa.x, pa.y), evaluate(params, model, pb.x, pb.y));
  };
  const NelderMeadResult nm =
      nelder_mead_max(objective, better, {best.alpha, best.beta}, h, options.refine_iterations);
  const Candidate refined = evaluate(params, model, nm.best.x, nm.best.y);
  if (beats(refined, best)) best = refined;

  Candidate natural;
  natural.alpha = model.alpha0;
  natural.beta = model.beta0;
  natural.cost = 0.0;
  natural.profit = revenue(params, {model.alpha0, model.beta0});
  if (beats(natural, best)) best = natural;

  Optimum out;
  out.grid_resolution = h;
  if (!(best.profit > 0.0)) {
    out.alpha_star = model.alpha0;
    out.beta_star = model.beta0;
    out.fallback = true;
    return out;
  }
  // (alpha, beta) and (1 - alpha, 1 - beta) tie; report the alpha >= beta labeling.
  const SignalPolicy star = canonicalize({best.alpha, best.beta}).policy;
  out.alpha_star = star.alpha;
  out.beta_star = star.beta;
  out.profit = best.profit;
  out.cost = best.cost;
  return out;
}

Optimum optimize_with_commission(double r, const CostModel& model,
                                 const std::vector<double>& s_grid,
                                 const OptimizeOptions& options) {
  if (s_grid.empty())
    throw ModelError(ErrorKind::InvalidArgument, "commission grid is empty");
  for (double s : s_grid)
    if (!(s >= 0.0 && s < 1.0))
      throw ModelError(ErrorKind::InvalidCommission,
                       "s must lie in [0, 1), got " + std::to_string(s));

  std::optional<Optimum> best;
  for (double s : s_grid) {
    Optimum o = optimize_signals({r, s * r}, model, options);
    o.s_star = s;
    // Strictly higher profit, then lower cost; earlier s wins remaining ties.
    if (!best || o.profit > best->profit || (o.profit == best->profit && o.cost < best->cost))
      best = o;
  }
  return *best;
}

}  // namespace trustmarket
