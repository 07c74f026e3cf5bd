#pragma once

#include "lglab/decay_model.hpp"

namespace lglab {

/// Probability rules for a pair of sequential dichotomic measurements.
/// The clock-resetting classical ontology is deliberately absent here: its
/// closed forms coincide with quantum collapse, and it lives in the Monte
/// Carlo module as a distinct trajectory semantics.
enum class Ontology {
  classical_mrnim,
  quantum_collapse,
};

/// The four joint probabilities for outcomes (+-1, +-1) at t_i < t_j.
/// du is identically zero: a decayed system stays decayed.
struct JointTable {
  double t_i, t_j;
  double p_uu, p_ud, p_du, p_dd;
};

struct K3Result {
  double t1, t2, t3;
  double c12, c23, c13;
  double k3;  // always c12 + c23 - c13
};

/// Classical column: UU = p(t_j), UD = p(t_i) - p(t_j), DD = 1 - p(t_i).
/// Quantum column: UU = p(t_i) p(t_j - t_i), UD = p(t_i)[1 - p(t_j - t_i)],
/// DD = 1 - p(t_i). Requires 0 <= t_i < t_j. Under the classical ontology a
/// survival inversion below 1e-9 (interpolation dust) is clamped; a larger
/// one raises ontology_error.
JointTable joint_table(const DecayModel& model, double t_i, double t_j,
                       Ontology ontology);

/// Two-time correlator: classical 1 + 2p(t_j) - 2p(t_i); quantum
/// 1 + 2p(t_i)p(t_j - t_i) - 2p(t_i).
double correlator(const DecayModel& model, double t_i, double t_j,
                  Ontology ontology);

/// K3 = C12 + C23 - C13 at 0 <= t1 < t2 < t3.
K3Result k3(const DecayModel& model, double t1, double t2, double t3,
            Ontology ontology);

/// Closed forms of K3 in the exponential regime p(t) = Z exp(-gamma t):
/// interior_times takes t2 (1 + 2Z(Z-1)e^{-gamma t2}); first_time_zero takes
/// t3 instead.
enum class RegimeForm {
  interior_times,
  first_time_zero,
};

double k3_exponential_regime(double amplitude, double gamma, double t,
                             RegimeForm form);

}  // namespace lglab
