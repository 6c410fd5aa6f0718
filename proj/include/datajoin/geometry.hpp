#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "datajoin/common.hpp"
#include "datajoin/dataset.hpp"

namespace datajoin {

// Exponents of the ground norms on the feature space and the auxiliary
// space. Both must lie in (1, inf); the bound evaluators are not valid at
// the endpoints. Defaults match the experimental setting (Euclidean).
struct NormSpec {
  double p = 2.0;      // feature-space norm
  double p_aux = 2.0;  // auxiliary-space norm
  void validate() const;
  double dual_p() const { return p / (p - 1.0); }
  double dual_p_aux() const { return p_aux / (p_aux - 1.0); }
};

struct MetricParams {
  double kappa_aux = 1.0;  // weight of the auxiliary block in d_A
  double kappa_lab = 1.0;  // weight of a label flip in d_P
  void validate() const;
};

double p_norm(std::span<const double> v, double p);
double dual_norm(std::span<const double> v, double p);

double dist_x(std::span<const double> x1, std::span<const double> x2, const NormSpec& norm);
double dist_aux(std::span<const double> x1, std::span<const double> a1,
                std::span<const double> x2, std::span<const double> a2, const NormSpec& norm,
                double kappa_aux);
double dist_lab(std::span<const double> x1, int y1, std::span<const double> x2, int y2,
                const NormSpec& norm, double kappa_lab);

struct MatchPair {
  std::size_t i;  // row of the auxiliary dataset
  std::size_t j;  // row of the labeled dataset
  double dist;    // feature-space distance between the two anchors
};

struct MatchSet {
  std::vector<MatchPair> pairs;
  std::size_t k = 1;
};

// Union of the two directed kNN relations between the feature blocks: (i, j)
// is kept when x_i is among the k nearest auxiliary anchors of x_j, or x_j is
// among the k nearest labeled anchors of x_i. Distance ties break toward the
// lower row index. Brute-force distances; intended for desk-scale datasets.
MatchSet build_match_set(const AuxDataset& aux, const LabeledDataset& labeled, std::size_t k,
                         const NormSpec& norm);

struct PlanEntry {
  std::size_t i;
  std::size_t j;
  double mass;
};

// Discrete coupling between the two empirical feature distributions with
// uniform marginals 1/n_A and 1/n_P.
struct TransportPlan {
  std::size_t n_aux = 0;
  std::size_t n_lab = 0;
  std::vector<PlanEntry> entries;
  double cost = 0.0;

  Matrix dense() const;
};

// Exact minimizer of the uniform-marginal transportation problem under the
// feature-space metric (network simplex on the scaled integer formulation).
TransportPlan wasserstein_x(const AuxDataset& aux, const LabeledDataset& labeled,
                            const NormSpec& norm);

// Generic entry point used by tests: explicit cost matrix, uniform marginals.
TransportPlan solve_transportation(const Matrix& cost);

struct FeasibilityCertificate {
  bool feasible = false;
  double distance = 0.0;    // Wasserstein distance between the feature marginals
  double radius_sum = 0.0;  // r_aux + r_lab
  TransportPlan witness;
};

// The ambiguity set is nonempty exactly when the optimal transport distance
// between the two feature marginals is at most r_aux + r_lab; the optimal
// plan is returned as the witness.
FeasibilityCertificate check_feasibility(const AuxDataset& aux, const LabeledDataset& labeled,
                                         double r_aux, double r_lab, const NormSpec& norm);

struct WitnessPoint {
  std::size_t i;
  std::size_t j;
  Vec x;          // interpolated feature point
  double weight;  // coupling mass
};

struct WitnessCoupling {
  std::vector<WitnessPoint> points;
  double cost_aux = 0.0;  // transport cost of the aux-side marginal, must be <= r_aux
  double cost_lab = 0.0;  // transport cost of the labeled-side marginal, must be <= r_lab
};

// Explicit coupling certifying feasibility: every mass-carrying pair (i, j)
// emits the point x_i - (r_aux / (r_aux + r_lab)) (x_i - x_j), which splits
// the transport budget between the two anchors in proportion to the radii.
WitnessCoupling feasibility_witness_coupling(const TransportPlan& plan, double r_aux,
                                             double r_lab, const AuxDataset& aux,
                                             const LabeledDataset& labeled, const NormSpec& norm);

}  // namespace datajoin
