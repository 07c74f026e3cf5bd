#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lglab/interp.hpp"
#include "lglab/tunneling.hpp"

namespace lglab {

enum class DecayKind {
  exponential,
  toy,
  tunneling,
  piecewise_power_tail,
  three_regime,
  tabulated,
};

std::string to_string(DecayKind k);

/// p(t) = exp(-gamma t)
struct ExponentialLaw {
  double gamma;
};

/// p(t) = (exp(-gamma t^2/(t+1)) + 1/(1+t^alpha)) / 2
struct ToyLaw {
  double gamma;
  double alpha;
};

/// p(t) = exp(-t/tau) up to the turnover, then norm_k * t^alpha (alpha < 0);
/// norm_k is fixed by continuity at the turnover.
struct PowerTailLaw {
  double tau;
  double alpha;
  double turnover;
  double norm_k;
};

/// Schematic three-regime law: 1 - t^2/tau_z^2, then amplitude * exp(-gamma t),
/// then tail_k * t^(-tail_alpha). The regime boundaries are user supplied or
/// located by bisection on value continuity.
struct ThreeRegimeLaw {
  double tau_z;
  double amplitude;   // Z of the exponential regime
  double gamma;
  double tail_k;
  double tail_alpha;  // positive; tail decays as t^(-tail_alpha)
  double quad_exp_boundary;
  double exp_tail_boundary;
};

/// Grid + shape-preserving cubic; p(0) = 1 is required of the data.
struct TabulatedLaw {
  std::shared_ptr<const PiecewiseCubic> p;
};

/// Direct Eq.-style tunneling law evaluated through a precomputed W table.
struct TunnelingLaw {
  tunneling::Params params;
  double t_max;
  int w_points;
  std::shared_ptr<const tunneling::LogPEvaluator> eval;
};

/// A named survival law p(t): the single source of p and h = -p' for every
/// other module. Immutable apart from the committed time unit.
class DecayModel {
 public:
  static DecayModel exponential(double gamma);
  static DecayModel toy(double gamma, double alpha);
  static DecayModel piecewise_power_tail(double tau, double alpha,
                                         double turnover);
  static DecayModel three_regime(double tau_z, double amplitude, double gamma,
                                 double tail_k, double tail_alpha,
                                 std::optional<double> quad_exp_boundary = {},
                                 std::optional<double> exp_tail_boundary = {});
  static DecayModel tabulated(std::vector<double> t, std::vector<double> p);
  /// Builds (or loads from cache_dir) the W table up to t_max.
  static DecayModel tunneling_direct(const tunneling::Params& params,
                                     double t_max, int w_points = 2048,
                                     const std::filesystem::path& cache_dir = {},
                                     int threads = 1);

  DecayKind kind() const { return kind_; }
  double time_unit() const { return time_unit_; }
  void set_time_unit(double tau);

  /// True for kinds whose p is nonincreasing by construction.
  bool monotone_kind() const;
  /// Largest evaluable time (+inf for closed-form kinds).
  double coverage() const;

  template <class Law>
  const Law& law() const {
    return std::get<Law>(law_);
  }

  friend double survival(const DecayModel& model, double t);
  friend double decay_density(const DecayModel& model, double t,
                              bool* one_sided);

 private:
  using LawVariant = std::variant<ExponentialLaw, ToyLaw, PowerTailLaw,
                                  ThreeRegimeLaw, TabulatedLaw, TunnelingLaw>;
  DecayModel(DecayKind kind, LawVariant law)
      : kind_(kind), law_(std::move(law)) {}

  DecayKind kind_;
  LawVariant law_;
  double time_unit_ = 1.0;
};

/// Survival probability p(t). t < 0 is a domain error; p(0) = 1 exactly.
double survival(const DecayModel& model, double t);

/// Decay density h(t) = -p'(t), analytic for every kind. At a junction of a
/// piecewise kind the left derivative is returned and *one_sided set.
double decay_density(const DecayModel& model, double t,
                     bool* one_sided = nullptr);

struct TimeWindow {
  double start;
  double end;
};

/// Least-squares fit of log p(t) = c - t/tau over `samples` uniform points.
double fit_effective_lifetime(const DecayModel& model, TimeWindow window,
                              int samples);

struct RegimeFit {
  double amplitude;  // Z
  double gamma;
  TimeWindow window;
  double residual;   // RMS of log-residuals
};

/// Linear regression of log p: amplitude = exp(intercept), gamma = -slope.
RegimeFit fit_exponential_regime(const DecayModel& model, TimeWindow window,
                                 int samples);

/// "QZE" for Z > 1, "IZE" for Z < 1, "exponential" at Z == 1.
std::string regime_classification(double amplitude);

/// Tabulates exp(log p) of the tunneling law on n_grid+1 uniform nodes and
/// wraps it in a Tabulated model (node values bit-identical to direct
/// evaluation through the same W table).
DecayModel build_p_interpolant(const tunneling::Params& params, double t_max,
                               int n_grid,
                               const std::filesystem::path& cache_dir = {},
                               int threads = 1, int w_points = 0);
DecayModel build_p_interpolant(const DecayModel& tunneling_model, int n_grid);

/// Length of the initial nonincreasing run of a tabulated model's nodes.
double monotone_prefix(const DecayModel& tabulated_model);

}  // namespace lglab
