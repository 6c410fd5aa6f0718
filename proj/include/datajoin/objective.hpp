#pragma once

#include <limits>
#include <span>

#include "datajoin/common.hpp"
#include "datajoin/dataset.hpp"
#include "datajoin/geometry.hpp"
#include "datajoin/model.hpp"

namespace datajoin {

// log(1 + exp(t)), evaluated without overflow for large |t|.
double logistic_f(double t);

// Logistic sigmoid 1 / (1 + exp(-t)) = f'(t).
double sigmoid(double t);

// Convex conjugate of logistic_f: the binary entropy b log b + (1-b) log(1-b)
// on (0,1), zero at the endpoints. Throws outside [0,1].
double conjugate_fstar(double b);

// Worst case of the logistic loss over a label flip with penalty c:
// max(f(-y t), f(y t) - c) = f(-y t) + max(y t - c, 0).
double robust_label_term(double t, int y, double flip_cost);

// Single-pair summand of the surrogate: the robust label term evaluated at
// the branch's anchor point, minus min(alpha_aux, alpha_lab) * d_ij.
double pair_term(const MatchPair& pair, const ModelPoint& model, const AuxDataset& aux,
                 const LabeledDataset& labeled, const SolverConfig& cfg);

// Surrogate objective: alpha_aux r_aux + alpha_lab r_lab plus the normalized
// sum of pair terms over the match set. Summation order is fixed, so the
// value is bit-stable. The value is meaningful only on feasible points (the
// exact worst case is unbounded outside the constraint set); callers guard
// with model_feasible.
double omega(const ModelPoint& model, const MatchSet& match, const AuxDataset& aux,
             const LabeledDataset& labeled, const SolverConfig& cfg);

struct Subgradient {
  Vec theta_x;
  Vec theta_a;
  double alpha_aux = 0.0;
  double alpha_lab = 0.0;
};

// A subgradient of omega. At flip kinks (y t == flip cost) the inactive-side
// element is chosen, which keeps theta = 0 an exact stationary test point.
Subgradient omega_subgradient(const ModelPoint& model, const MatchSet& match,
                              const AuxDataset& aux, const LabeledDataset& labeled,
                              const SolverConfig& cfg);

constexpr double kInfiniteBound = std::numeric_limits<double>::infinity();

// Closed-form upper bound on the pair's exact dual constraint value
//   sup_{x,a} h(y theta, (x,a)) - alpha_aux ||x - x_i|| - alpha_lab ||x - x_j||
//             - alpha_aux kappa_aux ||a - a_i||.
// Returns +inf when the dual-norm budgets are violated (the sup is infinite).
double sup_upper_bound(std::span<const double> x_i, std::span<const double> x_j,
                       std::span<const double> a_i, int y, const ModelPoint& model,
                       const SolverConfig& cfg);

struct GridSpec {
  Vec lo_x, hi_x;     // feature-space box
  Vec lo_a, hi_a;     // auxiliary-space box
  double step = 0.1;  // lattice resolution in every dimension
};

// Grid-search evaluation of the same sup. Exponential in m1 + m2, refuses
// beyond 4 total dimensions. The lattice is augmented with the anchor points
// themselves so the surrogate evaluation point is always covered. The max is
// computed exactly over the lattice by splitting the objective into a
// feature part and an auxiliary part coupled only through the logistic
// argument, and scanning the two Pareto frontiers.
double sup_bruteforce(std::span<const double> x_i, std::span<const double> x_j,
                      std::span<const double> a_i, int y, const ModelPoint& model,
                      const SolverConfig& cfg, const GridSpec& grid);

struct GapCertificate {
  double lower = 0.0;   // surrogate evaluated at the branch anchor
  double upper = 0.0;   // closed-form upper bound
  double budget = 0.0;  // 2 * min(alpha_aux, alpha_lab) * d_ij
};

// Certifies upper - lower <= budget for a feasible model.
GapCertificate gap_certificate(std::span<const double> x_i, std::span<const double> x_j,
                               std::span<const double> a_i, int y, const ModelPoint& model,
                               const SolverConfig& cfg);

}  // namespace datajoin
