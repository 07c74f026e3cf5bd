#include "lglab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "lglab/errors.hpp"

namespace lglab {

namespace {

// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

template <int N>
GaussRule<N> build_rule() {
  GaussRule<N> r;
  for (int i = 0; i < (N + 1) / 2; ++i) {
    // Chebyshev-like initial guess for the i-th root, then Newton.
    double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(N, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    auto [p, dp] = legendre(N, x);
    (void)p;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.node[i] = -x;
    r.weight[i] = w;
    r.node[N - 1 - i] = x;
    r.weight[N - 1 - i] = w;
  }
  if (N % 2 == 1) {
    r.node[N / 2] = 0.0;
    auto [p, dp] = legendre(N, 0.0);
    (void)p;
    r.weight[N / 2] = 2.0 / (dp * dp);
  }
  return r;
}

struct Panel {
  double a, b;
  double value;
  double error;       // effective error used for ordering (includes guard floor)
  double gk_error;    // raw |G15 - G7|
  long long id;
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.id > y.id;  // older panel first on ties
  }
};

}  // namespace

template <int N>
const GaussRule<N>& GaussRule<N>::get() {
  static const GaussRule<N> rule = build_rule<N>();
  return rule;
}

template struct GaussRule<7>;
template struct GaussRule<15>;

QuadResult integrate_oscillatory(const OscillatorySpec& spec, double a, double b,
                                 const std::vector<double>& splits, double tol,
                                 int max_panels) {
  const auto& g7 = GaussRule<7>::get();
  const auto& g15 = GaussRule<15>::get();

  long long evals = 0;
  long long next_id = 0;
  const double total_len = b - a;

  auto make_panel = [&](double lo, double hi) {
    double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    double s7 = 0.0, s15 = 0.0;
    for (int i = 0; i < 7; ++i) s7 += g7.weight[i] * spec.integrand(c + hw * g7.node[i]);
    for (int i = 0; i < 15; ++i) s15 += g15.weight[i] * spec.integrand(c + hw * g15.node[i]);
    evals += 22;
    Panel p;
    p.a = lo;
    p.b = hi;
    p.value = hw * s15;
    p.gk_error = std::abs(hw * (s15 - s7));
    p.error = p.gk_error;
    double phase_span = std::abs(spec.phase(hi) - spec.phase(lo));
    if (phase_span > M_PI) {
      // Many oscillations inside one panel can fool the error estimate;
      // keep the panel "hot" unless its whole contribution is negligible.
      double bound = spec.envelope(lo, hi) * (hi - lo);
      double share = tol * (hi - lo) / total_len * 0.25;
      if (bound > share) p.error = std::max(p.error, bound);
    }
    p.id = next_id++;
    return p;
  };

  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap;
  double sum_value = 0.0, sum_error = 0.0;

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double s : splits)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = make_panel(cuts[i], cuts[i + 1]);
    sum_value += p.value;
    sum_error += p.error;
    heap.push(p);
  }

  int n_panels = static_cast<int>(heap.size());
  while (sum_error > tol && !heap.empty()) {
    if (n_panels >= max_panels)
      throw numerical_error("adaptive quadrature exhausted its panel budget",
                            sum_error);
    Panel worst = heap.top();
    heap.pop();
    sum_value -= worst.value;
    sum_error -= worst.error;
    double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b))
      throw numerical_error("adaptive quadrature hit an unsplittable panel",
                            sum_error + worst.error);
    Panel left = make_panel(worst.a, mid);
    Panel right = make_panel(mid, worst.b);
    sum_value += left.value + right.value;
    sum_error += left.error + right.error;
    heap.push(left);
    heap.push(right);
    ++n_panels;
  }

  // Final sum in panel creation order: immune to the rounding drift of the
  // running add/subtract bookkeeping above.
  std::vector<Panel> done;
  done.reserve(heap.size());
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(),
            [](const Panel& x, const Panel& y) { return x.id < y.id; });
  double value = 0.0, error = 0.0;
  for (const Panel& p : done) {
    value += p.value;
    error += p.error;
  }
  return {value, error, evals};
}

}  // namespace lglab
