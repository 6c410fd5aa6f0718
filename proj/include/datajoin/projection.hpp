#pragma once

#include "datajoin/common.hpp"
#include "datajoin/model.hpp"

namespace datajoin {

// Closed convex set the descent iterates are projected onto:
//   { (theta_x, theta_a, alpha_aux, alpha_lab) :
//       ||theta_x||_2  <= scale * (alpha_aux + alpha_lab),
//       ||theta_a||_2  <= kappa_aux * alpha_aux            (when with_aux_cone),
//       branch order on (alpha_aux, alpha_lab),
//       alpha_aux >= 0, alpha_lab >= 0 }.
// scale is 1 for the plain program and 1/c_bar for the fairness program,
// which also drops the auxiliary cone.
struct FeasibleSetSpec {
  double kappa_aux = 1.0;
  Branch branch = Branch::aux_min;
  double scale = 1.0;
  bool with_aux_cone = true;

  void validate() const {
    if (kappa_aux < 0.0) throw data_error("projection: kappa_aux must be nonnegative");
    if (!(scale > 0.0)) throw data_error("projection: scale must be positive");
  }
};

double set_slack(const ModelPoint& point, const FeasibleSetSpec& set);

inline bool set_contains(const ModelPoint& point, const FeasibleSetSpec& set, double tol = 1e-9) {
  return set_slack(point, set) >= -tol;
}

// Euclidean projection onto the set. Because the set constrains the
// coefficient blocks only through their norms, the projection rescales each
// block and the problem reduces to a four-variable quadratic program over
// (||theta_x||, ||theta_a||, alpha_aux, alpha_lab) with linear constraints.
// Candidates are the stationary points of every active-set pattern: the
// eight closed-form interior-pattern solutions (both cones free/tight,
// crossed with the order constraint tight or slack) evaluated first, then
// the patterns that pin alphas or block norms to zero. The feasible
// candidate of minimal distance is returned; feasible inputs are returned
// unchanged.
ModelPoint project(const ModelPoint& point, const FeasibleSetSpec& set);

// Independent check: Dykstra's alternating projection onto the two cones and
// the (branch, alpha >= 0) wedge, run to convergence. Used by tests and as a
// fallback for degenerate inputs; never shares code with project().
ModelPoint project_oracle(const ModelPoint& point, const FeasibleSetSpec& set, double tol = 1e-10,
                          std::size_t max_sweeps = 200000);

// Fairness variant: theta_a and the free multipliers are untouched, the
// remaining coordinates are projected onto the scaled feature cone wedge.
ModelPoint project_fair(const ModelPoint& point, double scale, Branch branch);

}  // namespace datajoin
