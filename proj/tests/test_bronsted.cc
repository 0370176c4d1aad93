#include <cmath>
#include <random>

#include "doctest.h"
#include "dualrep/bronsted.h"
#include "dualrep/subdifferential.h"
#include "oracles.h"

using namespace dualrep;

namespace {

MaxAffineFunction abs_box() {
  return MaxAffineFunction({{{1.0}, 0.0}, {{-1.0}, 0.0}}, MaxAffineFunction::Box{{-2, 2}});
}

// tangents of x^2/2 at multiples of 0.1 on [-2, 2]
MaxAffineFunction quadratic_model() {
  std::vector<AffinePiece> p;
  for (int k = -20; k <= 20; ++k) p.push_back({Vector{k / 10.0}, k * k / 200.0});
  return MaxAffineFunction(p, MaxAffineFunction::Box{{-2, 2}});
}

bool all_pass(const std::vector<BoundCheck>& checks) {
  for (const BoundCheck& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

bool exact(const MaxAffineFunction& g, const DualPair& p) {
  return eps_subdiff_member(g, p.xstar, p.x, 0.0).verdict == Membership::kMember;
}

}  // namespace

TEST_CASE("exact pairs") {
  const MaxAffineFunction abs({{{1.0}, 0.0}, {{-1.0}, 0.0}});
  const std::vector<Vector> grid{{-1}, {0}, {1}};
  auto s = exact_pairs(abs, grid, {2});
  CHECK(s.pairs() == std::vector<DualPair>{{{-1}, {-1}}, {{0}, {1}}, {{0}, {-1}}, {{1}, {1}}});

  const MaxAffineFunction affine({{{2.0}, 1.0}});
  CHECK(exact_pairs(affine, grid).size() == 3);

  const MaxAffineFunction two({{{1.0}, 0.0}, {{2.0}, 1.0}});
  const std::vector<Vector> g2{{0}, {1}, {2}};
  s = exact_pairs(two, g2, {2});
  CHECK(s.size() == 4);

  // the default lattice puts 0.5 in the kink's subdifferential
  s = exact_pairs(abs, std::vector<Vector>{{0}});
  CHECK(s.size() == 11);
  for (const DualPair& p : s.pairs()) CHECK(exact(abs, p));

  CHECK_THROWS_AS(exact_pairs(abs_box(), std::vector<Vector>{{2}}), UnsupportedInput);
  CHECK_THROWS_AS(exact_pairs(abs, std::vector<Vector>{}), InputError);
}

TEST_CASE("infimum and proximal pairs") {
  CHECK(*infimum(abs_box()) == doctest::Approx(0.0));
  CHECK_FALSE(infimum(MaxAffineFunction({{{1.0}, 0.0}})).has_value());
  CHECK(*infimum(MaxAffineFunction({{{1.0}, 0.0}}, MaxAffineFunction::Box{{-1, 1}})) ==
        doctest::Approx(-1.0));

  // prox of |.| with t = 1 at w = 2.5 is 1.5 with subgradient 1
  const auto p = proximal_pair(abs_box(), Vector{2.5}, 1.0);
  REQUIRE(p);
  CHECK(p->xstar[0] == doctest::Approx(1.5));
  CHECK(p->x[0] == doctest::Approx(1.0));
  // z would sit on the box boundary
  CHECK_FALSE(proximal_pair(abs_box(), Vector{3}, 1.0));
  // soft threshold lands on the kink
  const auto q = proximal_pair(abs_box(), Vector{0.4}, 1.0);
  REQUIRE(q);
  CHECK(q->xstar[0] == doctest::Approx(0.0));
  CHECK(q->x[0] == doctest::Approx(0.4));
  CHECK(exact(abs_box(), *q));
}

TEST_CASE("t0 refinement") {
  const auto g = quadratic_model();
  auto r = t0_refine(g, Vector{0}, Vector{0.05}, 0.01);
  REQUIRE(r.found);
  CHECK(r.outcome == SearchOutcome::kSuccess);
  CHECK(r.xstar_distance <= 0.1);
  CHECK(r.x_distance <= 0.1);
  CHECK(exact(g, *r.found));
  CHECK(r.input_gap <= 0.01);

  // already exact: returned unchanged
  r = t0_refine(g, Vector{0.3}, Vector{0.3}, 0.01);
  REQUIRE(r.found);
  CHECK(r.xstar_distance == 0.0);
  CHECK(r.x_distance == 0.0);

  r = t0_refine(abs_box(), Vector{0}, Vector{0.5}, 0.01);
  REQUIRE(r.found);
  CHECK(r.found->x[0] == doctest::Approx(0.5));
  CHECK(r.xstar_distance == 0.0);

  CHECK_THROWS_AS(t0_refine(abs_box(), Vector{1}, Vector{-1}, 0.5), PreconditionError);
}

TEST_CASE("t0 failures are classified") {
  // x0 sits mid-way in the kink's subdifferential; the lattice only has its ends
  SearchOptions coarse;
  coarse.levels = 1;
  coarse.points_per_axis = 3;
  coarse.hull_points_per_edge = 2;
  coarse.constructive_candidates = false;
  auto r = t0_refine(quadratic_model(), Vector{0.05}, Vector{0.05}, 1e-6, coarse);
  CHECK(r.outcome == SearchOutcome::kGridResolution);
  CHECK_FALSE(r.grid.empty());
  coarse.constructive_candidates = true;
  r = t0_refine(quadratic_model(), Vector{0.05}, Vector{0.05}, 1e-6, coarse);
  CHECK(r.outcome == SearchOutcome::kSuccess);
}

TEST_CASE("t1 certificates") {
  const auto g = quadratic_model();
  auto c = t1_refine(g, Vector{0}, Vector{0.05}, 0.01, 1.0);
  CHECK(c.valid);
  CHECK(c.rechecked);
  CHECK(c.bounds.size() == 7);
  CHECK(all_pass(c.bounds));
  CHECK(c.outcome == SearchOutcome::kSuccess);
  CHECK(recheck_certificate(g, c));

  // exact input: every bound holds with the input pair itself
  c = t1_refine(g, Vector{0.5}, Vector{0.5}, 0.04, 1.0);
  REQUIRE(c.found);
  CHECK(c.found->xstar == Vector{0.5});
  CHECK(c.valid);
  CHECK(c.bounds[3].margin == doctest::Approx(0.2));

  // loose regime
  const MaxAffineFunction abs({{{1.0}, 0.0}, {{-1.0}, 0.0}}, MaxAffineFunction::Box{{-5, 5}});
  c = t1_refine(abs, Vector{1}, Vector{-0.9}, 4.0, 0.5);
  CHECK(c.valid);

  CHECK_THROWS_AS(t1_refine(g, Vector{0}, Vector{0.05}, 0.01, 0.0), InputError);
}

TEST_CASE("lemma searches") {
  auto r = l1_search(abs_box(), Vector{0.1}, 0.5, 0.3);
  REQUIRE(r.found);
  CHECK(r.outcome == SearchOutcome::kSuccess);
  CHECK(std::abs(r.found->x[0]) < 0.5);
  CHECK(std::abs(r.found->xstar[0] - 0.1) < 0.3);
  CHECK(all_pass(r.checks));

  r = l1_search(abs_box(), Vector{0}, 0.5, 0.3);
  REQUIRE(r.found);
  CHECK(r.found->x[0] == doctest::Approx(0.0));

  CHECK_THROWS_AS(l1_search(abs_box(), Vector{1}, 0.5, 0.3), PreconditionError);
  CHECK_THROWS_AS(l1_search(abs_box(), Vector{0}, 0.0, 0.3), PreconditionError);
  CHECK_THROWS_AS(l1_search(MaxAffineFunction({{{1.0}, 0.0}}), Vector{0}, 1, 1),
                  PreconditionError);

  // decreasing on [-2, 2]: the minimum sits on the boundary and every
  // interior slope has |x| >= 1 > alpha
  const MaxAffineFunction down({{{-1.1}, 0.0}, {{-1.0}, 0.0}}, MaxAffineFunction::Box{{-2, 2}});
  r = l1_search(down, Vector{1.5}, 0.5, 2.0);
  CHECK(r.outcome == SearchOutcome::kBoundaryOnly);
  CHECK(std::string(to_string(r.outcome)) == "boundary_only");

  r = l2_search(abs_box(), Vector{1});
  REQUIRE(r.found);
  CHECK(r.outcome == SearchOutcome::kSuccess);
  CHECK(evaluate(abs_box(), r.found->xstar).value() < 1.0);
  CHECK(dot(r.found->x, Vector{1} - r.found->xstar) > 0.0);

  r = l2_search(quadratic_model(), Vector{1});
  REQUIRE(r.found);
  CHECK(all_pass(r.checks));
  CHECK_THROWS_AS(l2_search(abs_box(), Vector{0}), PreconditionError);
}

TEST_CASE("density probe") {
  auto d = density_probe(abs_box(), {{-1, 1}}, 100, 1e-4, 42);
  CHECK(d.fraction == 1.0);
  CHECK(d.falsified == 0);
  const MaxAffineFunction one({{{0.5}, 0.0}}, MaxAffineFunction::Box{{-2, 2}});
  CHECK(density_probe(one, {{-1, 1}}, 20, 0.01, 3).fraction == 1.0);

  // start points at the kink of |.|: x0 anywhere in (-1, 1), lattice only at +-1
  SearchOptions coarse;
  coarse.levels = 1;
  coarse.points_per_axis = 3;
  coarse.hull_points_per_edge = 2;
  coarse.constructive_candidates = false;
  d = density_probe(abs_box(), {{-1e-13, 1e-13}}, 30, 1e-8, 42, coarse);
  CHECK(d.fraction < 1.0);
  CHECK(d.falsified == 0);
  CHECK(d.grid_resolution == d.trials - d.successes);
}

TEST_CASE("search options describe the grid") {
  SearchOptions o;
  CHECK(o.describe(2, 0.5).find("21") != std::string::npos);
  CHECK(std::string(to_string(SearchOutcome::kFalsified)) == "falsified");
}
