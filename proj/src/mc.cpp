#include "lglab/mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "lglab/errors.hpp"
#include "lglab/fmtnum.hpp"

namespace lglab {

namespace {

constexpr double k_p_floor = 1e-12;       // p below this counts as decayed
constexpr double k_sample_tol = 1e-12;    // |p(t) - u| target of the bisection

// Smallest time with p(t) < k_p_floor, or the model coverage if that comes
// first. Doubling search from t = 1.
double sampling_horizon(const DecayModel& model) {
  double cover = model.coverage();
  double hi = 1.0;
  for (int i = 0; i < 1100; ++i) {
    if (hi >= cover) return cover;
    if (survival(model, hi) < k_p_floor) return hi;
    hi *= 2.0;
  }
  return hi;
}

CappedSample invert_survival(const DecayModel& model, double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("sample_decay_time: u must be in (0, 1)");
  double horizon = sampling_horizon(model);
  if (survival(model, horizon) >= u) return {horizon, true};
  // bracket [lo, hi] with p(lo) >= u > p(hi)
  double lo = 0.0, hi = std::min(1.0, horizon);
  while (survival(model, hi) >= u) {
    lo = hi;
    hi = std::min(2.0 * hi, horizon);
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double pm = survival(model, mid);
    if (std::abs(pm - u) <= k_sample_tol) return {mid, false};
    if (pm >= u)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), false};
}

struct Counts {
  std::array<long long, 8> c{};  // index = outcome bits, bit k set = D at time k
};

// One trial's outcome bitmask for the given ontology.
template <class Uniform>
unsigned run_one_trial(const DecayModel& model, const std::vector<double>& times,
                       McOntology ontology, Uniform&& uniform) {
  const std::size_t k = times.size();
  unsigned bits = 0;
  switch (ontology) {
    case McOntology::classical_realist: {
      CappedSample s = invert_survival(model, uniform(0));
      for (std::size_t i = 0; i < k; ++i) {
        bool undecayed = s.hit_horizon ? (times[i] <= s.t) : (s.t > times[i]);
        if (!undecayed) bits |= 1u << i;
      }
      break;
    }
    case McOntology::quantum_collapse: {
      double prev = 0.0;
      bool alive = true;
      for (std::size_t i = 0; i < k; ++i) {
        if (alive) {
          double p_win = survival(model, times[i] - prev);
          alive = uniform(i) < p_win;
          prev = times[i];
        }
        if (!alive) bits |= 1u << i;
      }
      break;
    }
    case McOntology::classical_clock_reset: {
      double prev = 0.0;
      bool alive = true;
      std::size_t draw = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (alive) {
          // a fresh hidden decay time, measured from the last opening
          CappedSample s = invert_survival(model, uniform(draw++));
          double gap = times[i] - prev;
          bool undecayed = s.hit_horizon ? (gap <= s.t) : (s.t > gap);
          alive = undecayed;
          prev = times[i];
        }
        if (!alive) bits |= 1u << i;
      }
      break;
    }
  }
  return bits;
}

Counts run_counts(const DecayModel& model, const std::vector<double>& times,
                  McOntology ontology, long long n, const CounterRng& rng,
                  std::uint64_t stream_base, int threads) {
  threads = std::max(1, threads);
  auto worker_counts = [&](long long begin, long long end) {
    Counts c;
    for (long long trial = begin; trial < end; ++trial) {
      auto uniform = [&](std::size_t draw) {
        return rng.uniform(stream_base + static_cast<std::uint64_t>(trial),
                           draw);
      };
      c.c[run_one_trial(model, times, ontology, uniform)]++;
    }
    return c;
  };
  if (threads == 1 || n < 4 * threads) return worker_counts(0, n);
  std::vector<Counts> parts(threads);
  std::vector<std::thread> pool;
  long long chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    long long begin = w * chunk;
    long long end = std::min<long long>(n, begin + chunk);
    pool.emplace_back([&, w, begin, end]() {
      if (begin < end) parts[w] = worker_counts(begin, end);
    });
  }
  for (auto& th : pool) th.join();
  Counts total;
  for (const Counts& part : parts)
    for (std::size_t i = 0; i < total.c.size(); ++i) total.c[i] += part.c[i];
  return total;
}

void check_times(const std::vector<double>& times) {
  if (times.size() != 2 && times.size() != 3)
    throw config_error("mc times: need 2 or 3 measurement times");
  if (!(times.front() >= 0.0))
    throw config_error("mc times: times must be >= 0");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw config_error("mc times: must be strictly increasing");
}

std::string outcome_name(unsigned bits, std::size_t k) {
  std::string s(k, 'U');
  for (std::size_t i = 0; i < k; ++i)
    if (bits & (1u << i)) s[i] = 'D';
  return s;
}

// correlator of Q(first) * Q(second) from two-time counts
struct PairEstimate {
  double c;
  double err;
};

PairEstimate pair_correlator(const Counts& counts, long long n) {
  long long uu = counts.c[0b00], ud = counts.c[0b10];
  long long du = counts.c[0b01], dd = counts.c[0b11];
  double c = static_cast<double>(uu + dd - ud - du) / static_cast<double>(n);
  double var = std::max(0.0, 1.0 - c * c) / static_cast<double>(n);
  return {c, std::sqrt(var)};
}

}  // namespace

double sample_decay_time(const DecayModel& model, double u) {
  CappedSample s = invert_survival(model, u);
  if (s.hit_horizon)
    throw horizon_error("sample_decay_time: u = " + format_double(u) +
                            " below the survival reachable on the horizon",
                        s.t);
  return s.t;
}

CappedSample sample_decay_time_capped(const DecayModel& model, double u) {
  return invert_survival(model, u);
}

std::map<std::string, McEstimate> run_trials(const DecayModel& model,
                                             const std::vector<double>& times,
                                             McOntology ontology, long long n,
                                             std::uint64_t seed, int threads) {
  check_times(times);
  if (n < 1) throw config_error("mc trials: must be >= 1");
  CounterRng rng{seed};
  Counts counts = run_counts(model, times, ontology, n, rng, 0, threads);
  std::map<std::string, McEstimate> out;
  const std::size_t k = times.size();
  for (unsigned bits = 0; bits < (1u << k); ++bits) {
    double f = static_cast<double>(counts.c[bits]) / static_cast<double>(n);
    double err = std::sqrt(std::max(0.0, f * (1.0 - f) / static_cast<double>(n)));
    out[outcome_name(bits, k)] = McEstimate{f, err, n, seed};
  }
  return out;
}

McEstimate estimate_k3(const DecayModel& model, double t1, double t2, double t3,
                       McOntology ontology, long long n, std::uint64_t seed,
                       int threads) {
  if (!(t1 >= 0.0 && t1 < t2 && t2 < t3))
    throw std::domain_error("estimate_k3 times must satisfy 0 <= t1 < t2 < t3");
  if (n < 1) throw config_error("mc trials: must be >= 1");
  CounterRng rng{seed};
  const std::array<std::pair<double, double>, 3> pairs{
      std::pair{t1, t2}, std::pair{t2, t3}, std::pair{t1, t3}};
  std::array<PairEstimate, 3> est;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    std::vector<double> times{pairs[pi].first, pairs[pi].second};
    std::uint64_t stream_base = static_cast<std::uint64_t>(pi) *
                                static_cast<std::uint64_t>(n);
    Counts counts =
        run_counts(model, times, ontology, n, rng, stream_base, threads);
    est[pi] = pair_correlator(counts, n);
  }
  double k3 = est[0].c + est[1].c - est[2].c;
  double err = std::sqrt(est[0].err * est[0].err + est[1].err * est[1].err +
                         est[2].err * est[2].err);
  return McEstimate{k3, err, n, seed};
}

McEstimate estimate_k3_single_batch(const DecayModel& model, double t1,
                                    double t2, double t3, McOntology ontology,
                                    long long n, std::uint64_t seed,
                                    int threads) {
  if (!(t1 >= 0.0 && t1 < t2 && t2 < t3))
    throw std::domain_error("estimate_k3 times must satisfy 0 <= t1 < t2 < t3");
  if (n < 1) throw config_error("mc trials: must be >= 1");
  CounterRng rng{seed};
  std::vector<double> times{t1, t2, t3};
  Counts counts = run_counts(model, times, ontology, n, rng, 0, threads);
  // K3 per trajectory: Q1 Q2 + Q2 Q3 - Q1 Q3 with Q in {+1, -1}
  double sum = 0.0, sumsq = 0.0;
  for (unsigned bits = 0; bits < 8; ++bits) {
    double q1 = (bits & 1u) ? -1.0 : 1.0;
    double q2 = (bits & 2u) ? -1.0 : 1.0;
    double q3 = (bits & 4u) ? -1.0 : 1.0;
    double v = q1 * q2 + q2 * q3 - q1 * q3;
    sum += v * static_cast<double>(counts.c[bits]);
    sumsq += v * v * static_cast<double>(counts.c[bits]);
  }
  double mean = sum / static_cast<double>(n);
  double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
  return McEstimate{mean, std::sqrt(var / static_cast<double>(n)), n, seed};
}

}  // namespace lglab
