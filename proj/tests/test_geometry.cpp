#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "lp_oracle.hpp"

#include "datajoin/geometry.hpp"
#include "datajoin/rng.hpp"

using namespace datajoin;

namespace {

AuxDataset aux_points(const Matrix& x) {
  AuxDataset d;
  d.x = x;
  return d;
}

LabeledDataset labeled_points(const Matrix& x) {
  LabeledDataset d;
  d.x = x;
  d.y.assign(x.size(), 1);
  return d;
}

Matrix random_points(Rng& rng, std::size_t n, std::size_t dim, double scale = 1.0) {
  Matrix m(n, Vec(dim));
  for (auto& row : m)
    for (auto& v : row) v = scale * rng.normal();
  return m;
}

}  // namespace

TEST_CASE("p_norm basics") {
  CHECK(p_norm(Vec{3.0, 4.0}, 2.0) == doctest::Approx(5.0));
  CHECK(dual_norm(Vec{3.0, 4.0}, 2.0) == doctest::Approx(5.0));
}

TEST_CASE("dual norm of the 3-norm is the 1.5-norm") {
  const Vec v{1.0, 1.0};
  const double expected = std::pow(2.0, 2.0 / 3.0);
  CHECK(dual_norm(v, 3.0) == doctest::Approx(expected).epsilon(1e-12));

  // independent oracle: maximize <v, u> over the 3-norm unit sphere
  double best = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    const double phi = 2.0 * 3.14159265358979323846 * k / 20000.0;
    Vec u{std::cos(phi), std::sin(phi)};
    const double n3 = p_norm(u, 3.0);
    best = std::max(best, (v[0] * u[0] + v[1] * u[1]) / n3);
  }
  CHECK(best <= dual_norm(v, 3.0) + 1e-9);
  CHECK(best == doctest::Approx(dual_norm(v, 3.0)).epsilon(1e-6));
}

TEST_CASE("Hoelder inequality on random pairs") {
  Rng rng(17);
  for (const double p : {1.5, 2.0, 3.0}) {
    for (int t = 0; t < 10000 / 3; ++t) {
      Vec u(4), v(4);
      for (auto& x : u) x = rng.normal();
      for (auto& x : v) x = rng.normal();
      CHECK(dot(u, v) <= p_norm(u, p) * dual_norm(v, p) + 1e-12);
    }
  }
}

TEST_CASE("metric examples") {
  NormSpec norm;
  CHECK(dist_aux(Vec{0.0, 0.0}, Vec{0.0}, Vec{3.0, 4.0}, Vec{1.0}, norm, 5.0) ==
        doctest::Approx(10.0));
  CHECK(dist_lab(Vec{1.0}, 1, Vec{1.0}, 1, norm, 3.0) == 0.0);
  CHECK(dist_lab(Vec{0.0}, 1, Vec{0.0}, -1, norm, 3.0) == doctest::Approx(6.0));
}

TEST_CASE("triangle inequality on random triples") {
  Rng rng(23);
  NormSpec norm;
  for (int t = 0; t < 500; ++t) {
    const Matrix x = random_points(rng, 3, 3);
    const Matrix a = random_points(rng, 3, 2);
    const double kappa = std::fabs(rng.normal());
    const double dab = dist_aux(x[0], a[0], x[1], a[1], norm, kappa);
    const double dbc = dist_aux(x[1], a[1], x[2], a[2], norm, kappa);
    const double dac = dist_aux(x[0], a[0], x[2], a[2], norm, kappa);
    CHECK(dac <= dab + dbc + 1e-12);
    const int y0 = t % 2 ? 1 : -1, y1 = (t / 2) % 2 ? 1 : -1, y2 = 1;
    const double pab = dist_lab(x[0], y0, x[1], y1, norm, kappa);
    const double pbc = dist_lab(x[1], y1, x[2], y2, norm, kappa);
    const double pac = dist_lab(x[0], y0, x[2], y2, norm, kappa);
    CHECK(pac <= pab + pbc + 1e-12);
  }
}

TEST_CASE("match set: mutual nearest neighbors") {
  const MatchSet m =
      build_match_set(aux_points({{0.0}, {10.0}}), labeled_points({{1.0}, {9.0}}), 1, NormSpec{});
  REQUIRE(m.pairs.size() == 2);
  CHECK(m.pairs[0].i == 0);
  CHECK(m.pairs[0].j == 0);
  CHECK(m.pairs[0].dist == doctest::Approx(1.0));
  CHECK(m.pairs[1].i == 1);
  CHECK(m.pairs[1].j == 1);
}

TEST_CASE("match set: union definition keeps the lone anchor connected") {
  const MatchSet m =
      build_match_set(aux_points({{0.0}}), labeled_points({{1.0}, {2.0}}), 1, NormSpec{});
  REQUIRE(m.pairs.size() == 2);
  CHECK(m.pairs[0].dist == doctest::Approx(1.0));
  CHECK(m.pairs[1].dist == doctest::Approx(2.0));
}

TEST_CASE("match set: saturation at large k") {
  const MatchSet m = build_match_set(aux_points({{0.0}, {1.0}, {2.0}}),
                                     labeled_points({{0.5}, {1.5}}), 5, NormSpec{});
  CHECK(m.pairs.size() == 6);
}

TEST_CASE("match set: coverage and size bound on random data") {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n_a = 2 + rng.below(12), n_p = 2 + rng.below(12);
    const std::size_t k = 1 + rng.below(3);
    const AuxDataset aux = aux_points(random_points(rng, n_a, 2));
    const LabeledDataset lab = labeled_points(random_points(rng, n_p, 2));
    const MatchSet m = build_match_set(aux, lab, k, NormSpec{});
    CHECK(m.pairs.size() <= k * (n_a + n_p));
    std::vector<bool> seen_i(n_a, false), seen_j(n_p, false);
    for (const auto& pr : m.pairs) {
      seen_i[pr.i] = true;
      seen_j[pr.j] = true;
      CHECK(pr.dist == doctest::Approx(dist_x(aux.x[pr.i], lab.x[pr.j], NormSpec{})));
    }
    CHECK(std::all_of(seen_i.begin(), seen_i.end(), [](bool b) { return b; }));
    CHECK(std::all_of(seen_j.begin(), seen_j.end(), [](bool b) { return b; }));
  }
}

TEST_CASE("transport: forced plans") {
  NormSpec norm;
  const TransportPlan same =
      wasserstein_x(aux_points({{0.0}, {2.0}}), labeled_points({{0.0}, {2.0}}), norm);
  CHECK(same.cost == doctest::Approx(0.0).epsilon(1e-12));

  const TransportPlan singletons =
      wasserstein_x(aux_points({{0.0}}), labeled_points({{4.0}}), norm);
  CHECK(singletons.cost == doctest::Approx(4.0));

  const TransportPlan split =
      wasserstein_x(aux_points({{0.0}, {2.0}}), labeled_points({{1.0}}), norm);
  CHECK(split.cost == doctest::Approx(1.0));
}

TEST_CASE("transport: marginals and cost match the plan entries") {
  Rng rng(5);
  const AuxDataset aux = aux_points(random_points(rng, 7, 2));
  const LabeledDataset lab = labeled_points(random_points(rng, 5, 2));
  const TransportPlan plan = wasserstein_x(aux, lab, NormSpec{});
  Vec row(7, 0.0), col(5, 0.0);
  double cost = 0.0;
  for (const auto& e : plan.entries) {
    CHECK(e.mass >= 0.0);
    row[e.i] += e.mass;
    col[e.j] += e.mass;
    cost += e.mass * dist_x(aux.x[e.i], lab.x[e.j], NormSpec{});
  }
  for (const double r : row) CHECK(r == doctest::Approx(1.0 / 7.0).epsilon(1e-9));
  for (const double c : col) CHECK(c == doctest::Approx(1.0 / 5.0).epsilon(1e-9));
  CHECK(cost == doctest::Approx(plan.cost).epsilon(1e-9));
}

TEST_CASE("transport: agrees with the lp oracle and is symmetric") {
  Rng rng(99);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n_a = 2 + rng.below(11), n_p = 2 + rng.below(11);
    const AuxDataset aux = aux_points(random_points(rng, n_a, 2));
    const LabeledDataset lab = labeled_points(random_points(rng, n_p, 2));
    const TransportPlan plan = wasserstein_x(aux, lab, NormSpec{});

    Matrix cost(n_a, Vec(n_p));
    for (std::size_t i = 0; i < n_a; ++i)
      for (std::size_t j = 0; j < n_p; ++j) cost[i][j] = dist_x(aux.x[i], lab.x[j], NormSpec{});
    const auto lp = lp_oracle::solve_transport_lp(cost);
    REQUIRE(lp.feasible);
    CHECK(plan.cost == doctest::Approx(lp.value).epsilon(1e-9));

    // symmetry: swap the roles of the two datasets
    const TransportPlan rev =
        wasserstein_x(aux_points(lab.x), labeled_points(aux.x), NormSpec{});
    CHECK(rev.cost == doctest::Approx(plan.cost).epsilon(1e-9));
  }
}

TEST_CASE("feasibility certificate") {
  NormSpec norm;
  const auto same = check_feasibility(aux_points({{0.0}, {1.0}}),
                                      labeled_points({{0.0}, {1.0}}), 0.0, 0.0, norm);
  CHECK(same.feasible);
  CHECK(same.distance == doctest::Approx(0.0).epsilon(1e-12));

  const auto apart =
      check_feasibility(aux_points({{0.0}}), labeled_points({{4.0}}), 1.0, 2.0, norm);
  CHECK_FALSE(apart.feasible);
  CHECK(apart.distance == doctest::Approx(4.0));

  const auto wide = check_feasibility(aux_points({{0.0}}), labeled_points({{4.0}}), 3.0, 2.0, norm);
  CHECK(wide.feasible);
}

TEST_CASE("witness coupling: endpoint and midpoint cases") {
  NormSpec norm;
  const AuxDataset aux = aux_points({{0.0, 0.0}});
  const LabeledDataset lab = labeled_points({{2.0, 0.0}});
  const TransportPlan plan = wasserstein_x(aux, lab, norm);

  const WitnessCoupling at_aux = feasibility_witness_coupling(plan, 0.0, 3.0, aux, lab, norm);
  CHECK(at_aux.points[0].x == Vec{0.0, 0.0});
  CHECK(at_aux.cost_aux == doctest::Approx(0.0));

  const WitnessCoupling mid = feasibility_witness_coupling(plan, 1.5, 1.5, aux, lab, norm);
  CHECK(mid.points[0].x[0] == doctest::Approx(1.0));
  CHECK(mid.cost_aux == doctest::Approx(1.0));
  CHECK(mid.cost_lab == doctest::Approx(1.0));
}

TEST_CASE("witness coupling: side costs within the radii on random feasible instances") {
  Rng rng(3);
  NormSpec norm;
  for (int t = 0; t < 30; ++t) {
    const AuxDataset aux = aux_points(random_points(rng, 3 + rng.below(8), 2));
    const LabeledDataset lab = labeled_points(random_points(rng, 3 + rng.below(8), 2));
    const TransportPlan plan = wasserstein_x(aux, lab, norm);
    const double slackness = 0.1 + rng.uniform01();
    const double r_aux = rng.uniform01() * plan.cost + 1e-6;
    const double r_lab = std::max(plan.cost * (1.0 + slackness) - r_aux, 1e-6);
    if (r_aux + r_lab < plan.cost) continue;
    const WitnessCoupling w = feasibility_witness_coupling(plan, r_aux, r_lab, aux, lab, norm);
    CHECK(w.cost_aux <= r_aux + 1e-9);
    CHECK(w.cost_lab <= r_lab + 1e-9);
    double total_mass = 0.0;
    for (const auto& p : w.points) total_mass += p.weight;
    CHECK(total_mass == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("witness coupling: infeasible radii rejected") {
  NormSpec norm;
  const AuxDataset aux = aux_points({{0.0}});
  const LabeledDataset lab = labeled_points({{4.0}});
  const TransportPlan plan = wasserstein_x(aux, lab, norm);
  CHECK_THROWS_AS(feasibility_witness_coupling(plan, 1.0, 2.0, aux, lab, norm), data_error);
  CHECK_THROWS_AS(feasibility_witness_coupling(plan, 0.0, 0.0, aux, lab, norm), data_error);
}
