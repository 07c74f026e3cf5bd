#include "lglab/correlators.hpp"

#include <cmath>
#include <stdexcept>

#include "lglab/errors.hpp"
#include "lglab/fmtnum.hpp"

namespace lglab {

namespace {

constexpr double k_clamp_slack = 1e-9;

void check_pair(double t_i, double t_j) {
  if (!(t_i >= 0.0 && t_i < t_j))
    throw std::domain_error("measurement times must satisfy 0 <= t_i < t_j");
}

}  // namespace

JointTable joint_table(const DecayModel& model, double t_i, double t_j,
                       Ontology ontology) {
  check_pair(t_i, t_j);
  double p_i = survival(model, t_i);
  JointTable tbl{t_i, t_j, 0.0, 0.0, 0.0, 0.0};
  if (ontology == Ontology::classical_mrnim) {
    double p_j = survival(model, t_j);
    if (p_j > p_i) {
      if (p_j - p_i > k_clamp_slack)
        throw ontology_error(
            "classical table needs a nonincreasing survival law: p(" +
            format_double(t_i) + ") = " + format_double(p_i) + " < p(" +
            format_double(t_j) + ") = " + format_double(p_j));
      p_j = p_i;  // interpolation dust
    }
    tbl.p_uu = p_j;
    tbl.p_ud = p_i - p_j;
    tbl.p_dd = 1.0 - p_i;
  } else {
    double p_gap = survival(model, t_j - t_i);
    tbl.p_uu = p_i * p_gap;
    tbl.p_ud = p_i * (1.0 - p_gap);
    tbl.p_dd = 1.0 - p_i;
  }
  return tbl;
}

double correlator(const DecayModel& model, double t_i, double t_j,
                  Ontology ontology) {
  check_pair(t_i, t_j);
  double p_i = survival(model, t_i);
  if (ontology == Ontology::classical_mrnim) {
    double p_j = survival(model, t_j);
    if (p_j > p_i) {
      if (p_j - p_i > k_clamp_slack)
        throw ontology_error(
            "classical correlator needs a nonincreasing survival law");
      p_j = p_i;
    }
    return 1.0 + 2.0 * p_j - 2.0 * p_i;
  }
  double p_gap = survival(model, t_j - t_i);
  return 1.0 + 2.0 * p_i * p_gap - 2.0 * p_i;
}

K3Result k3(const DecayModel& model, double t1, double t2, double t3,
            Ontology ontology) {
  if (!(t1 >= 0.0 && t1 < t2 && t2 < t3))
    throw std::domain_error("k3 times must satisfy 0 <= t1 < t2 < t3");
  K3Result r{t1, t2, t3, 0.0, 0.0, 0.0, 0.0};
  r.c12 = correlator(model, t1, t2, ontology);
  r.c23 = correlator(model, t2, t3, ontology);
  r.c13 = correlator(model, t1, t3, ontology);
  r.k3 = r.c12 + r.c23 - r.c13;
  return r;
}

double k3_exponential_regime(double amplitude, double gamma, double t,
                             RegimeForm form) {
  if (!(amplitude > 0.0)) throw std::domain_error("amplitude must be positive");
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
  if (!(t >= 0.0)) throw std::domain_error("time must be >= 0");
  (void)form;  // both forms share the expression; the argument differs
  return 1.0 + 2.0 * amplitude * (amplitude - 1.0) * std::exp(-gamma * t);
}

}  // namespace lglab
