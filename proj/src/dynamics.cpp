#include "trustmarket/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "trustmarket/csv.hpp"
#include "trustmarket/error.hpp"

namespace trustmarket {

const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::HitXiGhat: return "HitXiGhat";
    case EventKind::HitXiBhat: return "HitXiBhat";
    case EventKind::SlidingStart: return "SlidingStart";
    case EventKind::AbsorbedNoTrade: return "AbsorbedNoTrade";
  }
  return "Unknown";
}

const char* to_string(EquilibriumKind kind) noexcept {
  return kind == EquilibriumKind::InteriorCoexistence ? "InteriorCoexistence" : "NoTrade";
}

namespace {

// Degenerate policies act like the uninformative policy (1/2, 1/2).
SignalPolicy effective_policy(const SignalPolicy& policy) {
  SignalPolicy p = canonicalize(policy).policy;
  if (is_degenerate(p)) p = {0.5, 0.5};
  return p;
}

}  // namespace

ReplicatorRates replicator_rhs(const SellerDistribution& state, const MarketParams& params,
                               const SignalPolicy& policy) {
  const double xg = state.x_good;
  const double xb = state.x_bad;
  const double xi_ = state.x_inactive;
  const auto xi = state.xi();
  if (!xi) return {};  // all sellers inactive

  const SignalPolicy p = effective_policy(policy);
  const SellerPayoffs pay =
      payoffs_from_thresholds(params, p, decision_thresholds(params, p), *xi);

  // Patched definitions on the measure-zero sets where a posterior is undefined.
  if (policy.alpha == 1.0 && xb == 0.0) {
    return {xg * (1.0 - xg) * pay.pi_good, -xi_ * xg * pay.pi_good};
  }
  if (policy.beta == 1.0 && xg == 0.0) {
    return {0.0, -xi_ * xb * pay.pi_bad};
  }
  return {xg * ((1.0 - xg) * (pay.pi_good - pay.pi_bad) + xi_ * pay.pi_bad),
          -xi_ * (xg * pay.pi_good + xb * pay.pi_bad)};
}

FilippovValue filippov_map(double xi, const MarketParams& params, const SignalPolicy& policy) {
  const SignalPolicy p = effective_policy(policy);
  const Thresholds th = decision_thresholds(params, p);
  const double g = xi * (1.0 - xi);
  const double above = g * (params.r - 1.0);
  const double middle = g * (p.alpha * (params.r - params.c) - p.beta * (1.0 - params.c));
  const auto hull = [](double u, double v) { return FilippovValue{std::min(u, v), std::max(u, v)}; };

  const bool at_b = std::abs(xi - th.xi_bhat) <= kThresholdTolerance;
  const bool at_g = std::abs(xi - th.xi_ghat) <= kThresholdTolerance;
  if (at_b && at_g) return hull(above, 0.0);
  if (at_b) return hull(above, middle);
  if (xi > th.xi_bhat) return {above, above};
  if (at_g) return hull(middle, 0.0);
  if (xi > th.xi_ghat) return {middle, middle};
  return {0.0, 0.0};
}

namespace {

using Shares = std::array<double, 3>;  // good, bad, inactive

enum class Mode { Below, Middle, Above, Sliding, Absorbed, Empty };

struct Frozen {
  double pi_good = 0.0;
  double pi_bad = 0.0;
};

SellerDistribution to_state(const Shares& x) { return {x[0], x[1], x[2]}; }

double xi_of(const Shares& x) {
  const double a = x[0] + x[1];
  return a > 0.0 ? x[0] / a : 0.0;
}

Shares replicator(const Shares& x, const Frozen& f) {
  const double mean = x[0] * f.pi_good + x[1] * f.pi_bad;
  return {x[0] * (f.pi_good - mean), x[1] * (f.pi_bad - mean), -x[2] * mean};
}

Shares axpy(const Shares& x, double h, const Shares& k) {
  return {x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]};
}

Shares renormalize(Shares x) {
  for (double& v : x) v = std::max(v, 0.0);
  const double s = x[0] + x[1] + x[2];
  for (double& v : x) v /= s;
  return x;
}

Shares rk4(const Shares& x, double h, const Frozen& f) {
  const Shares k1 = replicator(x, f);
  const Shares k2 = replicator(axpy(x, h / 2, k1), f);
  const Shares k3 = replicator(axpy(x, h / 2, k2), f);
  const Shares k4 = replicator(axpy(x, h, k3), f);
  Shares out;
  for (int i = 0; i < 3; ++i) out[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return renormalize(out);
}

// Logistic growth of the active share while xi is pinned.
double rk4_active(double a, double h, double mean_payoff) {
  const auto f = [&](double y) { return y * (1.0 - y) * mean_payoff; };
  const double k1 = f(a);
  const double k2 = f(a + h / 2 * k1);
  const double k3 = f(a + h / 2 * k2);
  const double k4 = f(a + h * k3);
  return std::clamp(a + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), 0.0, 1.0);
}

Shares snap(const Shares& x, double xi) {
  const double a = x[0] + x[1];
  const double g = xi * a;
  return {g, a - g, x[2]};
}

class Integrator {
 public:
  Integrator(const MarketParams& params, const SignalPolicy& policy, const IntegrateOptions& opt)
      : params_(params), policy_(effective_policy(policy)), opt_(opt) {
    th_ = decision_thresholds(params_, policy_);
    coincide_ = std::abs(th_.xi_ghat - th_.xi_bhat) <= kThresholdTolerance;
    drift_ = policy_.alpha * (params_.r - params_.c) - policy_.beta * (1.0 - params_.c);
    middle_ = {policy_.alpha * (params_.r - params_.c), policy_.beta * (1.0 - params_.c)};
    above_ = {params_.r - params_.c, 1.0 - params_.c};
    const SellerPayoffs eq = payoffs_from_thresholds(params_, policy_, th_, th_.xi_bhat);
    sliding_mean_ = th_.xi_bhat * eq.pi_good + (1.0 - th_.xi_bhat) * eq.pi_bad;
  }

  Trajectory run(const SellerDistribution& initial, double horizon, double step) {
    Shares x{initial.x_good, initial.x_bad, initial.x_inactive};
    double t = 0.0;
    classify(x, t);
    record(t, x);

    int quiet = 0;
    const double end_slack = 1e-12 * std::max(1.0, horizon);
    while (horizon - t > end_slack) {
      const double h = std::min(step, horizon - t);
      switch (mode_) {
        case Mode::Middle:
        case Mode::Above:
          t += advance_frozen(x, h, t);
          break;
        case Mode::Sliding:
          x = snap({0.0, rk4_active(x[0] + x[1], h, sliding_mean_), 0.0}, th_.xi_bhat);
          x[2] = 1.0 - (x[0] + x[1]);
          t += h;
          break;
        default:
          t += h;  // the field vanishes identically
          break;
      }
      const auto rates = record(t, x);
      if (std::max(std::abs(rates.dx_good), std::abs(rates.dx_inactive)) < opt_.convergence_rate) {
        if (++quiet >= opt_.quiet_steps) {
          traj_.converged = true;
          break;
        }
      } else {
        quiet = 0;
      }
    }
    return std::move(traj_);
  }

 private:
  const Frozen& frozen() const { return mode_ == Mode::Middle ? middle_ : above_; }

  void classify(Shares& x, double t) {
    if (!(x[0] + x[1] > 0.0)) {
      mode_ = Mode::Empty;
      return;
    }
    const double xi = xi_of(x);
    if (std::abs(xi - th_.xi_bhat) <= kThresholdTolerance) {
      x = snap(x, th_.xi_bhat);
      resolve_at_bhat(t);
    } else if (xi > th_.xi_bhat) {
      mode_ = Mode::Above;
    } else if (std::abs(xi - th_.xi_ghat) <= kThresholdTolerance) {
      x = snap(x, th_.xi_ghat);
      resolve_at_ghat(t);
    } else if (xi > th_.xi_ghat) {
      mode_ = Mode::Middle;
    } else {
      mode_ = Mode::Below;
    }
  }

  // Above xi_bhat the field always points down (r < 1). Below it, the middle
  // field decides between a stable sliding segment and passing through.
  void resolve_at_bhat(double t) {
    if (coincide_) {
      absorb(t);
    } else if (drift_ > 0.0) {
      mode_ = Mode::Sliding;
      traj_.events.push_back({t, EventKind::SlidingStart});
    } else {
      mode_ = Mode::Middle;
    }
  }

  void resolve_at_ghat(double t) {
    if (drift_ > 0.0) {
      mode_ = Mode::Middle;
    } else {
      absorb(t);
    }
  }

  void absorb(double t) {
    mode_ = Mode::Absorbed;
    traj_.events.push_back({t, EventKind::AbsorbedNoTrade});
  }

  // One step on the smooth field of the current region, cut short at the
  // first threshold crossing. Returns the time actually advanced.
  double advance_frozen(Shares& x, double h, double t) {
    const Frozen& f = frozen();
    const double lo = mode_ == Mode::Middle ? th_.xi_ghat : th_.xi_bhat;
    const double hi = mode_ == Mode::Middle ? th_.xi_bhat : 2.0;
    const auto crossed = [&](const Shares& s) {
      const double xi = xi_of(s);
      if (xi >= hi) return 1;
      if (xi <= lo) return -1;
      return 0;
    };

    Shares trial = rk4(x, h, f);
    const int dir = crossed(trial);
    if (dir == 0) {
      x = trial;
      return h;
    }

    double a = 0.0;
    double b = h;
    while (b - a > opt_.event_time_tolerance) {
      const double m = 0.5 * (a + b);
      if (crossed(rk4(x, m, f)) != 0) {
        b = m;
      } else {
        a = m;
      }
    }
    const double target = dir > 0 ? hi : lo;
    x = snap(rk4(x, b, f), target);
    const double te = t + b;
    if (target == th_.xi_bhat) {
      traj_.events.push_back({te, EventKind::HitXiBhat});
      resolve_at_bhat(te);
    } else {
      traj_.events.push_back({te, EventKind::HitXiGhat});
      resolve_at_ghat(te);
    }
    return b;
  }

  ReplicatorRates rates_at(const Shares& x, double& xi_rate) const {
    xi_rate = 0.0;
    switch (mode_) {
      case Mode::Middle:
      case Mode::Above: {
        const Frozen& f = frozen();
        const Shares d = replicator(x, f);
        const double xi = xi_of(x);
        xi_rate = xi * (1.0 - xi) * (f.pi_good - f.pi_bad);
        return {d[0], d[2]};
      }
      case Mode::Sliding: {
        const double a = x[0] + x[1];
        const double da = a * (1.0 - a) * sliding_mean_;
        return {th_.xi_bhat * da, -da};
      }
      default:
        return {};
    }
  }

  ReplicatorRates record(double t, const Shares& x) {
    double xi_rate = 0.0;
    const auto rates = rates_at(x, xi_rate);
    traj_.times.push_back(t);
    traj_.states.push_back(to_state(x));
    traj_.xi_rates.push_back(xi_rate);
    return rates;
  }

  MarketParams params_;
  SignalPolicy policy_;
  IntegrateOptions opt_;
  Thresholds th_;
  bool coincide_ = false;
  double drift_ = 0.0;
  Frozen middle_;
  Frozen above_;
  double sliding_mean_ = 0.0;
  Mode mode_ = Mode::Below;
  Trajectory traj_;
};

}  // namespace

Trajectory integrate(const SellerDistribution& initial, const MarketParams& params,
                     const SignalPolicy& policy, double horizon, double step,
                     const IntegrateOptions& options) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw ModelError(ErrorKind::InvalidStep, "step must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw ModelError(ErrorKind::InvalidArgument, "horizon must be >= 0");
  validate(initial);
  validate(params);
  validate(policy);
  return Integrator(params, policy, options).run(initial, horizon, step);
}

EquilibriumResult stable_equilibrium(const MarketParams& params, const SignalPolicy& policy) {
  validate(params);
  validate(policy);
  const SignalPolicy p = canonicalize(policy).policy;
  EquilibriumResult out;
  out.thresholds = decision_thresholds(params, p);
  out.condition_lhs = p.alpha * (params.r - params.c);
  out.condition_rhs = p.beta * (1.0 - params.c);
  if (params.r > params.c && out.condition_lhs > out.condition_rhs) {
    out.kind = EquilibriumKind::InteriorCoexistence;
    out.xi_star = out.thresholds.xi_bhat;
    out.boundary = *out.xi_star >= 1.0;
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, int stride) {
  stride = std::max(stride, 1);
  csv::write_header(os, {"t", "x_good", "x_bad", "x_inactive", "xi"});
  const std::size_t n = trajectory.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != n) continue;
    const SellerDistribution& s = trajectory.states[i];
    csv::Row row;
    row.add(trajectory.times[i]).add(s.x_good).add(s.x_bad).add(s.x_inactive).add(s.xi());
    csv::write_row(os, row);
  }
}

}  // namespace trustmarket
