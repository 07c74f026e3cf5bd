#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lglab/decay_model.hpp"

namespace lglab {

/// Trajectory semantics for sequential measurements.
///   classical_realist: one hidden decay time per trial, read non-invasively.
///   quantum_collapse: survive each inter-measurement window with p(dt);
///     every measurement resets the decay clock.
///   classical_clock_reset: realist mouse whose hidden decay time is redrawn
///     from scratch after every U observation - macrorealism intact, but
///     non-invasiveness broken. Statistically indistinguishable from collapse.
enum class McOntology {
  classical_realist,
  quantum_collapse,
  classical_clock_reset,
};

struct McEstimate {
  double value;
  double std_error;
  long long n_trials;
  std::uint64_t seed;
};

/// Stateless counter-based generator: uniform(stream, draw) depends only on
/// (seed, stream, draw), so any trial can be computed by any worker in any
/// order with identical results.
struct CounterRng {
  std::uint64_t seed;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in the open interval (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t draw) const {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = mix(z);
    z ^= 0xD1B54A32D192ED03ull * (draw + 1);
    z = mix(z);
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
  }
};

/// Inverse-CDF draw of a decay time: the t with p(t) = u, found by bracket
/// expansion and bisection to |p(t) - u| <= 1e-12. Throws horizon_error when
/// u lies below the smallest survival reachable on the search horizon.
double sample_decay_time(const DecayModel& model, double u);

struct CappedSample {
  double t;
  bool hit_horizon;
};

/// Same search, but a sub-floor u returns the horizon time with a flag
/// instead of throwing; trial loops use this so that long-lived draws read U
/// inside the covered range and D beyond it.
CappedSample sample_decay_time_capped(const DecayModel& model, double u);

/// Frequencies of all outcome strings (e.g. "UU", "UD", ...) over n trials
/// with measurements at 2 or 3 strictly increasing times. Binomial standard
/// errors; bit-reproducible for fixed (seed, inputs) at any thread count.
std::map<std::string, McEstimate> run_trials(const DecayModel& model,
                                             const std::vector<double>& times,
                                             McOntology ontology, long long n,
                                             std::uint64_t seed,
                                             int threads = 1);

/// K3 assembled from three *independent* two-measurement batches of n trials
/// each, one per correlator, matching how the LG string is built from
/// two-time experiments. Standard error propagated in quadrature.
McEstimate estimate_k3(const DecayModel& model, double t1, double t2, double t3,
                       McOntology ontology, long long n, std::uint64_t seed,
                       int threads = 1);

/// Optional three-measurements-per-trajectory protocol (not what the LG
/// string uses; kept for side-by-side comparison): K3 from the eight
/// three-outcome frequencies of a single batch.
McEstimate estimate_k3_single_batch(const DecayModel& model, double t1,
                                    double t2, double t3, McOntology ontology,
                                    long long n, std::uint64_t seed,
                                    int threads = 1);

}  // namespace lglab
