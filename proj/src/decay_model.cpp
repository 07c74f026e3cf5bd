#include "lglab/decay_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "lglab/errors.hpp"
#include "lglab/fmtnum.hpp"

namespace lglab {

namespace {

constexpr double k_junction_slack = 1e-9;

double exp_survival(const ExponentialLaw& m, double t) {
  return std::exp(-m.gamma * t);
}

double toy_survival(const ToyLaw& m, double t) {
  return 0.5 * (std::exp(-m.gamma * t * t / (t + 1.0)) +
                1.0 / (1.0 + std::pow(t, m.alpha)));
}

double power_tail_survival(const PowerTailLaw& m, double t) {
  if (t <= m.turnover) return std::exp(-t / m.tau);
  return m.norm_k * std::pow(t, m.alpha);
}

double three_regime_survival(const ThreeRegimeLaw& m, double t) {
  if (t <= m.quad_exp_boundary) return 1.0 - t * t / (m.tau_z * m.tau_z);
  if (t <= m.exp_tail_boundary)
    return std::min(1.0, m.amplitude * std::exp(-m.gamma * t));
  return m.tail_k * std::pow(t, -m.tail_alpha);
}

// Bisection for f(t) = 0 on [lo, hi] with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// First sign change of f on (0, hi], scanned on a uniform grid.
std::optional<double> first_crossing(const std::function<double(double)>& f,
                                     double hi, int scan = 4096) {
  double prev_t = hi / scan;
  double prev = f(prev_t);
  for (int i = 2; i <= scan; ++i) {
    double t = hi * i / scan;
    double v = f(t);
    if (prev == 0.0) return prev_t;
    if ((prev < 0) != (v < 0)) return bisect(f, prev_t, t);
    prev_t = t;
    prev = v;
  }
  return std::nullopt;
}

// Last sign change of f (expected + to -) scanned log-uniformly on [lo, hi].
std::optional<double> last_crossing(const std::function<double(double)>& f,
                                    double lo, double hi, int scan = 4096) {
  double best_lo = 0.0, best_hi = 0.0;
  bool found = false;
  double prev_t = lo;
  double prev = f(lo);
  for (int i = 1; i <= scan; ++i) {
    double t = lo * std::pow(hi / lo, static_cast<double>(i) / scan);
    double v = f(t);
    if ((prev < 0) != (v < 0)) {
      best_lo = prev_t;
      best_hi = t;
      found = true;
    }
    prev_t = t;
    prev = v;
  }
  if (!found) return std::nullopt;
  return bisect(f, best_lo, best_hi);
}

}  // namespace

std::string to_string(DecayKind k) {
  switch (k) {
    case DecayKind::exponential: return "exponential";
    case DecayKind::toy: return "toy";
    case DecayKind::tunneling: return "tunneling";
    case DecayKind::piecewise_power_tail: return "power_tail";
    case DecayKind::three_regime: return "three_regime";
    case DecayKind::tabulated: return "tabulated";
  }
  return "?";
}

DecayModel DecayModel::exponential(double gamma) {
  if (!(gamma > 0.0)) throw config_error("gamma: must be positive");
  return DecayModel(DecayKind::exponential, ExponentialLaw{gamma});
}

DecayModel DecayModel::toy(double gamma, double alpha) {
  if (!(gamma > 0.0)) throw config_error("gamma: must be positive");
  if (!(alpha > 0.0)) throw config_error("alpha: must be positive");
  return DecayModel(DecayKind::toy, ToyLaw{gamma, alpha});
}

DecayModel DecayModel::piecewise_power_tail(double tau, double alpha,
                                            double turnover) {
  if (!(tau > 0.0)) throw config_error("tau: must be positive");
  if (!(alpha < 0.0))
    throw config_error("alpha: power-law index must be negative");
  if (!(turnover > 0.0)) throw config_error("turnover: must be positive");
  // continuity at the turnover fixes the tail normalization
  double norm_k = std::exp(-turnover / tau) * std::pow(turnover, -alpha);
  return DecayModel(DecayKind::piecewise_power_tail,
                    PowerTailLaw{tau, alpha, turnover, norm_k});
}

DecayModel DecayModel::three_regime(double tau_z, double amplitude,
                                    double gamma, double tail_k,
                                    double tail_alpha,
                                    std::optional<double> quad_exp_boundary,
                                    std::optional<double> exp_tail_boundary) {
  if (!(tau_z > 0.0)) throw config_error("tau_z: must be positive");
  if (!(amplitude > 0.0)) throw config_error("z: must be positive");
  if (!(gamma > 0.0)) throw config_error("gamma: must be positive");
  if (!(tail_k > 0.0)) throw config_error("k: must be positive");
  if (!(tail_alpha > 0.0)) throw config_error("alpha: must be positive");

  double t_a;
  if (quad_exp_boundary) {
    t_a = *quad_exp_boundary;
    if (!(t_a >= 0.0 && t_a <= tau_z))
      throw config_error("t_a: must lie in [0, tau_z]");
  } else {
    // value continuity: 1 - t^2/tau_z^2 = Z exp(-gamma t)
    auto f = [&](double t) {
      return 1.0 - t * t / (tau_z * tau_z) - amplitude * std::exp(-gamma * t);
    };
    auto root = first_crossing(f, tau_z);
    if (!root)
      throw config_error(
          "t_a: no continuity junction between the quadratic and exponential "
          "regimes for these parameters");
    t_a = *root;
  }

  double t_b;
  if (exp_tail_boundary) {
    t_b = *exp_tail_boundary;
    if (!(t_b > t_a)) throw config_error("t_b: must exceed t_a");
  } else {
    // value continuity: Z exp(-gamma t) = k t^(-alpha); take the handover
    // crossing (exponential falling below the tail).
    auto g = [&](double t) {
      return std::log(amplitude) - gamma * t - std::log(tail_k) +
             tail_alpha * std::log(t);
    };
    double lo = std::max(t_a, 1e-9);
    double hi = (700.0 + std::log(amplitude)) / gamma;
    auto root = last_crossing(g, lo * (1.0 + 1e-12), hi);
    if (!root)
      throw config_error(
          "t_b: no continuity junction between the exponential regime and the "
          "power tail for these parameters");
    t_b = *root;
  }

  ThreeRegimeLaw law{tau_z, amplitude, gamma, tail_k, tail_alpha, t_a, t_b};
  // nonincreasing across the junctions (small slack for rounding)
  double quad_at_a = 1.0 - t_a * t_a / (tau_z * tau_z);
  double exp_at_a = std::min(1.0, amplitude * std::exp(-gamma * t_a));
  if (exp_at_a > quad_at_a + k_junction_slack)
    throw config_error("t_a: exponential regime exceeds the quadratic at t_a");
  double exp_at_b = std::min(1.0, amplitude * std::exp(-gamma * t_b));
  double tail_at_b = tail_k * std::pow(t_b, -tail_alpha);
  if (tail_at_b > exp_at_b + k_junction_slack)
    throw config_error("t_b: power tail exceeds the exponential at t_b");
  if (tail_at_b > 1.0 + k_junction_slack)
    throw config_error("t_b: power tail exceeds 1 at t_b");
  return DecayModel(DecayKind::three_regime, law);
}

DecayModel DecayModel::tabulated(std::vector<double> t, std::vector<double> p) {
  if (t.empty() || t.front() != 0.0)
    throw config_error("tabulated grid must start at t = 0");
  if (p.empty() || std::abs(p.front() - 1.0) > 1e-12)
    throw config_error("tabulated p(0) must equal 1");
  p.front() = 1.0;
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0 + 1e-12))
      throw config_error("tabulated p values must lie in [0, 1]");
  auto interp =
      std::make_shared<PiecewiseCubic>(PiecewiseCubic::monotone(t, p));
  return DecayModel(DecayKind::tabulated, TabulatedLaw{std::move(interp)});
}

DecayModel DecayModel::tunneling_direct(const tunneling::Params& params,
                                        double t_max, int w_points,
                                        const std::filesystem::path& cache_dir,
                                        int threads) {
  tunneling::validate(params);
  if (!(t_max > 0.0)) throw config_error("t_max: must be positive");
  if (w_points < 16) throw config_error("w_points: must be >= 16");
  auto table =
      tunneling::load_or_build_wtable(params, t_max, w_points, cache_dir, threads);
  auto eval = std::make_shared<tunneling::LogPEvaluator>(std::move(table));
  return DecayModel(DecayKind::tunneling,
                    TunnelingLaw{params, t_max, w_points, std::move(eval)});
}

void DecayModel::set_time_unit(double tau) {
  if (!(tau > 0.0)) throw config_error("time unit must be positive");
  time_unit_ = tau;
}

bool DecayModel::monotone_kind() const {
  switch (kind_) {
    case DecayKind::exponential:
    case DecayKind::toy:
    case DecayKind::piecewise_power_tail:
    case DecayKind::three_regime:
      return true;
    default:
      return false;
  }
}

double DecayModel::coverage() const {
  if (kind_ == DecayKind::tabulated)
    return std::get<TabulatedLaw>(law_).p->back();
  if (kind_ == DecayKind::tunneling)
    return std::get<TunnelingLaw>(law_).eval->coverage();
  return std::numeric_limits<double>::infinity();
}

double survival(const DecayModel& model, double t) {
  if (!(t >= 0.0)) throw std::domain_error("survival: t must be >= 0");
  if (t == 0.0) return 1.0;
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, ExponentialLaw>)
          return exp_survival(law, t);
        else if constexpr (std::is_same_v<T, ToyLaw>)
          return toy_survival(law, t);
        else if constexpr (std::is_same_v<T, PowerTailLaw>)
          return power_tail_survival(law, t);
        else if constexpr (std::is_same_v<T, ThreeRegimeLaw>)
          return three_regime_survival(law, t);
        else if constexpr (std::is_same_v<T, TabulatedLaw>) {
          if (t > law.p->back())
            throw std::domain_error("survival: t beyond tabulated coverage (" +
                                    format_double(law.p->back()) + ")");
          return std::clamp((*law.p)(t), 0.0, 1.0);
        } else {
          static_assert(std::is_same_v<T, TunnelingLaw>);
          return std::exp(law.eval->log_p(t));
        }
      },
      model.law_);
}

double decay_density(const DecayModel& model, double t, bool* one_sided) {
  if (!(t > 0.0)) throw std::domain_error("decay_density: t must be > 0");
  if (one_sided) *one_sided = false;
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, ExponentialLaw>) {
          return law.gamma * std::exp(-law.gamma * t);
        } else if constexpr (std::is_same_v<T, ToyLaw>) {
          double u = t * t / (t + 1.0);
          double du = (t * t + 2.0 * t) / ((t + 1.0) * (t + 1.0));
          double ta = std::pow(t, law.alpha);
          return 0.5 * (law.gamma * du * std::exp(-law.gamma * u) +
                        law.alpha * ta / t / ((1.0 + ta) * (1.0 + ta)));
        } else if constexpr (std::is_same_v<T, PowerTailLaw>) {
          if (t == law.turnover && one_sided) *one_sided = true;
          if (t <= law.turnover) return std::exp(-t / law.tau) / law.tau;
          return -law.norm_k * law.alpha * std::pow(t, law.alpha - 1.0);
        } else if constexpr (std::is_same_v<T, ThreeRegimeLaw>) {
          if ((t == law.quad_exp_boundary || t == law.exp_tail_boundary) &&
              one_sided)
            *one_sided = true;
          if (t <= law.quad_exp_boundary) return 2.0 * t / (law.tau_z * law.tau_z);
          if (t <= law.exp_tail_boundary)
            return law.gamma * law.amplitude * std::exp(-law.gamma * t);
          return law.tail_k * law.tail_alpha * std::pow(t, -law.tail_alpha - 1.0);
        } else if constexpr (std::is_same_v<T, TabulatedLaw>) {
          if (t > law.p->back())
            throw std::domain_error("decay_density: t beyond tabulated coverage");
          return -law.p->derivative(t);
        } else {
          static_assert(std::is_same_v<T, TunnelingLaw>);
          // h = -p' = p(t) * int_0^t W
          return std::exp(law.eval->log_p(t)) * law.eval->cumulative_w(t);
        }
      },
      model.law_);
}

namespace {

struct LogFit {
  double slope, intercept, residual;
};

LogFit fit_log_survival(const DecayModel& model, TimeWindow window,
                        int samples) {
  if (!(window.start < window.end))
    throw config_error("fit window: start must be below end");
  if (!(window.start >= 0.0)) throw config_error("fit window: start must be >= 0");
  if (samples < 8) throw config_error("fit samples: must be >= 8");
  if (window.end > model.coverage())
    throw config_error("fit window: end beyond model coverage");
  std::vector<double> ts(samples), ys(samples);
  for (int i = 0; i < samples; ++i) {
    double t = window.start +
               (window.end - window.start) * static_cast<double>(i) / (samples - 1);
    double p = survival(model, t);
    if (!(p > 0.0))
      throw numerical_error("fit: survival not strictly positive at t = " +
                                format_double(t),
                            0.0);
    ts[i] = t;
    ys[i] = std::log(p);
  }
  double mt = 0.0, my = 0.0;
  for (int i = 0; i < samples; ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= samples;
  my /= samples;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < samples; ++i) {
    sxx += (ts[i] - mt) * (ts[i] - mt);
    sxy += (ts[i] - mt) * (ys[i] - my);
  }
  LogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mt;
  double ss = 0.0;
  for (int i = 0; i < samples; ++i) {
    double r = ys[i] - (f.intercept + f.slope * ts[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / samples);
  return f;
}

}  // namespace

double fit_effective_lifetime(const DecayModel& model, TimeWindow window,
                              int samples) {
  LogFit f = fit_log_survival(model, window, samples);
  if (!(f.slope < 0.0))
    throw numerical_error("fit: nonpositive decay rate over the window",
                          f.residual);
  return -1.0 / f.slope;
}

RegimeFit fit_exponential_regime(const DecayModel& model, TimeWindow window,
                                 int samples) {
  LogFit f = fit_log_survival(model, window, samples);
  if (!(f.slope < 0.0))
    throw numerical_error("fit: nonpositive decay rate over the window",
                          f.residual);
  return RegimeFit{std::exp(f.intercept), -f.slope, window, f.residual};
}

std::string regime_classification(double amplitude) {
  if (amplitude > 1.0) return "QZE";
  if (amplitude < 1.0) return "IZE";
  return "exponential";
}

DecayModel build_p_interpolant(const tunneling::Params& params, double t_max,
                               int n_grid,
                               const std::filesystem::path& cache_dir,
                               int threads, int w_points) {
  if (w_points <= 0) w_points = std::max(1024, 2 * n_grid);
  DecayModel direct =
      DecayModel::tunneling_direct(params, t_max, w_points, cache_dir, threads);
  return build_p_interpolant(direct, n_grid);
}

DecayModel build_p_interpolant(const DecayModel& tunneling_model, int n_grid) {
  if (tunneling_model.kind() != DecayKind::tunneling)
    throw config_error("build_p_interpolant: model is not a tunneling law");
  if (n_grid < 64) throw config_error("n_grid: must be >= 64");
  const auto& law = tunneling_model.law<TunnelingLaw>();
  double t_max = law.eval->coverage();
  std::vector<double> t(n_grid + 1), p(n_grid + 1);
  for (int i = 0; i <= n_grid; ++i) {
    t[i] = t_max * static_cast<double>(i) / n_grid;
    p[i] = std::exp(law.eval->log_p(t[i]));
  }
  t[0] = 0.0;
  p[0] = 1.0;
  return DecayModel::tabulated(std::move(t), std::move(p));
}

double monotone_prefix(const DecayModel& tabulated_model) {
  if (tabulated_model.kind() != DecayKind::tabulated)
    throw config_error("monotone_prefix: model is not tabulated");
  const auto& law = tabulated_model.law<TabulatedLaw>();
  const auto& t = law.p->grid();
  const auto& p = law.p->values();
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (p[i + 1] > p[i]) return t[i];
  return t.back();
}

}  // namespace lglab
