#include "datajoin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace datajoin {

void NormSpec::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) throw data_error("norm exponent p must lie in (1, inf)");
  if (!(p_aux > 1.0) || !std::isfinite(p_aux))
    throw data_error("norm exponent p' must lie in (1, inf)");
}

void MetricParams::validate() const {
  if (kappa_aux < 0.0 || kappa_lab < 0.0) throw data_error("metric weights must be nonnegative");
}

double p_norm(std::span<const double> v, double p) {
  if (p == 2.0) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (const double x : v) s += std::pow(std::fabs(x), p);
  return std::pow(s, 1.0 / p);
}

double dual_norm(std::span<const double> v, double p) { return p_norm(v, p / (p - 1.0)); }

double dist_x(std::span<const double> x1, std::span<const double> x2, const NormSpec& norm) {
  if (x1.size() != x2.size()) throw data_error("dist_x: dimension mismatch");
  Vec d(x1.size());
  for (std::size_t i = 0; i < x1.size(); ++i) d[i] = x1[i] - x2[i];
  return p_norm(d, norm.p);
}

double dist_aux(std::span<const double> x1, std::span<const double> a1,
                std::span<const double> x2, std::span<const double> a2, const NormSpec& norm,
                double kappa_aux) {
  if (a1.size() != a2.size()) throw data_error("dist_aux: auxiliary dimension mismatch");
  Vec d(a1.size());
  for (std::size_t i = 0; i < a1.size(); ++i) d[i] = a1[i] - a2[i];
  return dist_x(x1, x2, norm) + kappa_aux * p_norm(d, norm.p_aux);
}

double dist_lab(std::span<const double> x1, int y1, std::span<const double> x2, int y2,
                const NormSpec& norm, double kappa_lab) {
  return dist_x(x1, x2, norm) + kappa_lab * std::abs(y1 - y2);
}

MatchSet build_match_set(const AuxDataset& aux, const LabeledDataset& labeled, std::size_t k,
                         const NormSpec& norm) {
  aux.validate();
  labeled.validate();
  if (k < 1) throw data_error("match set: k must be at least 1");
  if (aux.dim_x() != labeled.dim()) throw data_error("match set: feature dimension mismatch");
  const std::size_t n_a = aux.size(), n_p = labeled.size();

  Matrix dist(n_a, Vec(n_p));
  for (std::size_t i = 0; i < n_a; ++i)
    for (std::size_t j = 0; j < n_p; ++j) dist[i][j] = dist_x(aux.x[i], labeled.x[j], norm);

  // Select the k nearest rows by (distance, index) so ties resolve to the
  // lower index deterministically.
  const auto nearest = [](std::vector<std::size_t>& ids, const auto& key, std::size_t k_) {
    const auto cmp = [&](std::size_t l, std::size_t r) {
      const double dl = key(l), dr = key(r);
      return dl < dr || (dl == dr && l < r);
    };
    if (k_ < ids.size()) {
      std::nth_element(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k_ - 1), ids.end(), cmp);
      ids.resize(k_);
    }
  };

  std::vector<std::pair<std::size_t, std::size_t>> raw;
  std::vector<std::size_t> ids;
  for (std::size_t j = 0; j < n_p; ++j) {
    ids.resize(n_a);
    std::iota(ids.begin(), ids.end(), 0);
    nearest(ids, [&](std::size_t i) { return dist[i][j]; }, k);
    for (const std::size_t i : ids) raw.emplace_back(i, j);
  }
  for (std::size_t i = 0; i < n_a; ++i) {
    ids.resize(n_p);
    std::iota(ids.begin(), ids.end(), 0);
    nearest(ids, [&](std::size_t j) { return dist[i][j]; }, k);
    for (const std::size_t j : ids) raw.emplace_back(i, j);
  }
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

  MatchSet m;
  m.k = k;
  m.pairs.reserve(raw.size());
  for (const auto& [i, j] : raw) m.pairs.push_back({i, j, dist[i][j]});
  return m;
}

Matrix TransportPlan::dense() const {
  Matrix m(n_aux, Vec(n_lab, 0.0));
  for (const auto& e : entries) m[e.i][e.j] += e.mass;
  return m;
}

// ---------------------------------------------------------------------------
// Network simplex for the uniform-marginal transportation problem.
//
// Supplies are scaled to integers (n_lab units per source, n_aux units per
// sink) so every basic solution is integral and the ratio test is exact. The
// basis is a spanning tree over sources, sinks and an artificial root; the
// leaving arc is the last blocking arc encountered around the pivot cycle
// starting at its apex, which keeps the basis strongly feasible and rules out
// cycling under degeneracy.
namespace {

class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost) : n_a_(cost.size()), n_p_(cost.front().size()) {
    const std::size_t real = n_a_ * n_p_;
    n_nodes_ = n_a_ + n_p_ + 1;
    root_ = n_a_ + n_p_;
    n_arcs_ = real + n_a_ + n_p_;
    tail_.resize(n_arcs_);
    head_.resize(n_arcs_);
    cost_.resize(n_arcs_);
    flow_.assign(n_arcs_, 0.0);
    in_tree_.assign(n_arcs_, false);

    double cmax = 0.0;
    for (std::size_t i = 0; i < n_a_; ++i)
      for (std::size_t j = 0; j < n_p_; ++j) {
        const std::size_t a = i * n_p_ + j;
        tail_[a] = i;
        head_[a] = n_a_ + j;
        cost_[a] = cost[i][j];
        if (!std::isfinite(cost[i][j]) || cost[i][j] < 0.0)
          throw data_error("transportation: costs must be finite and nonnegative");
        cmax = std::max(cmax, cost[i][j]);
      }
    big_m_ = 1.0 + cmax * static_cast<double>(n_a_ + n_p_);
    eps_ = 1e-12 * (1.0 + cmax);

    const double supply = static_cast<double>(n_p_);
    const double demand = static_cast<double>(n_a_);
    tree_adj_.assign(n_nodes_, {});
    for (std::size_t i = 0; i < n_a_; ++i) {
      const std::size_t a = real + i;
      tail_[a] = i;
      head_[a] = root_;
      cost_[a] = big_m_;
      flow_[a] = supply;
      attach(a);
    }
    for (std::size_t j = 0; j < n_p_; ++j) {
      const std::size_t a = real + n_a_ + j;
      tail_[a] = root_;
      head_[a] = n_a_ + j;
      cost_[a] = big_m_;
      flow_[a] = demand;
      attach(a);
    }
    parent_.assign(n_nodes_, root_);
    pred_arc_.assign(n_nodes_, n_arcs_);
    depth_.assign(n_nodes_, 0);
    pi_.assign(n_nodes_, 0.0);
    refresh_tree();
  }

  void run() {
    const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_arcs_))));
    std::size_t scan = 0;
    const std::size_t max_pivots = 2000 * (n_nodes_ + 2) + 200 * n_arcs_;
    std::size_t pivots = 0;
    while (true) {
      std::size_t entering = n_arcs_;
      double best = -eps_;
      std::size_t seen = 0;
      while (seen < n_arcs_) {
        const std::size_t stop = std::min(n_arcs_ - seen, block);
        for (std::size_t t = 0; t < stop; ++t) {
          const std::size_t a = scan;
          scan = scan + 1 == n_arcs_ ? 0 : scan + 1;
          if (in_tree_[a]) continue;
          const double rc = cost_[a] + pi_[tail_[a]] - pi_[head_[a]];
          if (rc < best) {
            best = rc;
            entering = a;
          }
        }
        seen += stop;
        if (entering != n_arcs_) break;
      }
      if (entering == n_arcs_) break;
      pivot(entering);
      if (++pivots > max_pivots) throw numeric_error("transportation: pivot limit exceeded");
    }
  }

  TransportPlan extract(const Matrix& cost) const {
    TransportPlan plan;
    plan.n_aux = n_a_;
    plan.n_lab = n_p_;
    const double scale = static_cast<double>(n_a_) * static_cast<double>(n_p_);
    for (std::size_t a = n_a_ * n_p_; a < n_arcs_; ++a)
      if (flow_[a] > 0.5) throw numeric_error("transportation: artificial flow left in basis");
    for (std::size_t i = 0; i < n_a_; ++i)
      for (std::size_t j = 0; j < n_p_; ++j) {
        const double f = flow_[i * n_p_ + j];
        if (f > 0.0) {
          const double mass = f / scale;
          plan.entries.push_back({i, j, mass});
          plan.cost += mass * cost[i][j];
        }
      }
    return plan;
  }

 private:
  void attach(std::size_t arc) {
    in_tree_[arc] = true;
    tree_adj_[tail_[arc]].push_back(arc);
    tree_adj_[head_[arc]].push_back(arc);
  }

  void detach(std::size_t arc) {
    in_tree_[arc] = false;
    for (const std::size_t n : {tail_[arc], head_[arc]}) {
      auto& adj = tree_adj_[n];
      adj.erase(std::find(adj.begin(), adj.end(), arc));
    }
  }

  // Recompute parents, depths and potentials by a scan from the root.
  void refresh_tree() {
    std::vector<std::size_t> stack{root_};
    std::vector<bool> seen(n_nodes_, false);
    seen[root_] = true;
    pi_[root_] = 0.0;
    depth_[root_] = 0;
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      for (const std::size_t a : tree_adj_[n]) {
        const std::size_t other = tail_[a] == n ? head_[a] : tail_[a];
        if (seen[other]) continue;
        seen[other] = true;
        parent_[other] = n;
        pred_arc_[other] = a;
        depth_[other] = depth_[n] + 1;
        pi_[other] = tail_[a] == n ? pi_[n] + cost_[a] : pi_[n] - cost_[a];
        stack.push_back(other);
      }
    }
  }

  void pivot(std::size_t entering) {
    const std::size_t u = tail_[entering], v = head_[entering];
    std::vector<std::size_t> u_side, v_side;  // nodes whose pred arcs lie on the cycle
    std::size_t a = u, b = v;
    while (depth_[a] > depth_[b]) {
      u_side.push_back(a);
      a = parent_[a];
    }
    while (depth_[b] > depth_[a]) {
      v_side.push_back(b);
      b = parent_[b];
    }
    while (a != b) {
      u_side.push_back(a);
      v_side.push_back(b);
      a = parent_[a];
      b = parent_[b];
    }

    // Flow deltas: +1 means the arc gains when delta units are pushed along
    // the entering arc. The cycle traversal order from the apex is the
    // u-side from top to bottom, the entering arc, then the v-side bottom up.
    struct CycleArc {
      std::size_t node;  // node whose pred arc this is; n_nodes_ marks the entering arc
      int dir;
    };
    std::vector<CycleArc> order;
    order.reserve(u_side.size() + v_side.size() + 1);
    for (std::size_t t = u_side.size(); t-- > 0;) {
      const std::size_t n = u_side[t];
      order.push_back({n, head_[pred_arc_[n]] == n ? +1 : -1});
    }
    order.push_back({n_nodes_, +1});
    for (const std::size_t n : v_side)
      order.push_back({n, tail_[pred_arc_[n]] == n ? +1 : -1});

    double delta = std::numeric_limits<double>::infinity();
    for (const auto& c : order)
      if (c.dir < 0) delta = std::min(delta, flow_[pred_arc_[c.node]]);
    if (!std::isfinite(delta)) throw numeric_error("transportation: unbounded pivot");

    std::size_t leaving_node = n_nodes_;
    for (const auto& c : order)
      if (c.dir < 0 && flow_[pred_arc_[c.node]] == delta) leaving_node = c.node;
    if (leaving_node == n_nodes_) throw numeric_error("transportation: no leaving arc");

    for (const auto& c : order) {
      if (c.node == n_nodes_)
        flow_[entering] += delta;
      else
        flow_[pred_arc_[c.node]] += c.dir * delta;
    }

    detach(pred_arc_[leaving_node]);
    attach(entering);
    refresh_tree();
  }

  std::size_t n_a_, n_p_, n_nodes_, n_arcs_, root_;
  std::vector<std::size_t> tail_, head_;
  Vec cost_, flow_;
  std::vector<bool> in_tree_;
  std::vector<std::vector<std::size_t>> tree_adj_;
  std::vector<std::size_t> parent_, pred_arc_;
  std::vector<std::size_t> depth_;
  Vec pi_;
  double big_m_ = 0.0, eps_ = 0.0;
};

}  // namespace

TransportPlan solve_transportation(const Matrix& cost) {
  if (cost.empty() || cost.front().empty()) throw data_error("transportation: empty cost matrix");
  for (const auto& row : cost)
    if (row.size() != cost.front().size()) throw data_error("transportation: ragged cost matrix");
  TransportSimplex simplex(cost);
  simplex.run();
  return simplex.extract(cost);
}

TransportPlan wasserstein_x(const AuxDataset& aux, const LabeledDataset& labeled,
                            const NormSpec& norm) {
  aux.validate();
  labeled.validate();
  if (aux.dim_x() != labeled.dim()) throw data_error("wasserstein_x: feature dimension mismatch");
  Matrix cost(aux.size(), Vec(labeled.size()));
  for (std::size_t i = 0; i < aux.size(); ++i)
    for (std::size_t j = 0; j < labeled.size(); ++j)
      cost[i][j] = dist_x(aux.x[i], labeled.x[j], norm);
  return solve_transportation(cost);
}

FeasibilityCertificate check_feasibility(const AuxDataset& aux, const LabeledDataset& labeled,
                                         double r_aux, double r_lab, const NormSpec& norm) {
  if (r_aux < 0.0 || r_lab < 0.0) throw data_error("feasibility: radii must be nonnegative");
  FeasibilityCertificate cert;
  cert.witness = wasserstein_x(aux, labeled, norm);
  cert.distance = cert.witness.cost;
  cert.radius_sum = r_aux + r_lab;
  cert.feasible = cert.distance <= cert.radius_sum;
  return cert;
}

WitnessCoupling feasibility_witness_coupling(const TransportPlan& plan, double r_aux, double r_lab,
                                             const AuxDataset& aux, const LabeledDataset& labeled,
                                             const NormSpec& norm) {
  if (r_aux < 0.0 || r_lab < 0.0) throw data_error("witness: radii must be nonnegative");
  if (r_aux + r_lab <= 0.0) throw data_error("witness: r_aux + r_lab must be positive");
  if (plan.cost > r_aux + r_lab)
    throw data_error("witness: plan cost exceeds r_aux + r_lab, ambiguity set is empty");
  const double t = r_aux / (r_aux + r_lab);
  WitnessCoupling w;
  for (const auto& e : plan.entries) {
    if (e.mass <= 0.0) continue;
    WitnessPoint p;
    p.i = e.i;
    p.j = e.j;
    p.weight = e.mass;
    p.x = aux.x[e.i];
    for (std::size_t d = 0; d < p.x.size(); ++d) p.x[d] -= t * (aux.x[e.i][d] - labeled.x[e.j][d]);
    w.cost_aux += e.mass * dist_x(p.x, aux.x[e.i], norm);
    w.cost_lab += e.mass * dist_x(p.x, labeled.x[e.j], norm);
    w.points.push_back(std::move(p));
  }
  return w;
}

}  // namespace datajoin
