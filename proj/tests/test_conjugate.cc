#include <cmath>
#include <random>

#include "doctest.h"
#include "dualrep/conjugate.h"
#include "linalg.h"
#include "oracles.h"

using namespace dualrep;

namespace {

MaxAffineFunction abs_on(double r) {
  return MaxAffineFunction({{{1.0}, 0.0}, {{-1.0}, 0.0}}, MaxAffineFunction::Box{{-r, r}});
}

double at(const GridFunction1D& g, std::size_t i) { return g.values()[i]; }

}  // namespace

TEST_CASE("discrete conjugate by hand") {
  const GridFunction1D sq({-1, 0, 1}, {1, 0, 1});
  const std::vector<double> y0{0.0};
  CHECK(at(discrete_conjugate(sq, y0), 0) == 0.0);

  const GridFunction1D zero({-2, 2}, {0, 0});
  const std::vector<double> y3{3.0};
  CHECK(at(discrete_conjugate(zero, y3), 0) == 6.0);

  const GridFunction1D abs({-2, -1, 0, 1, 2}, {2, 1, 0, 1, 2});
  const std::vector<double> yh{0.5};
  CHECK(at(discrete_conjugate(abs, yh), 0) == 0.0);
}

TEST_CASE("fast conjugate matches brute force") {
  const GridFunction1D abs({-2, -1, 0, 1, 2}, {2, 1, 0, 1, 2});
  const std::vector<double> dual{-1, 0, 1};
  const auto fast = fast_conjugate_1d(abs, dual);
  CHECK(fast.values() == std::vector<double>{0, 0, 0});

  const GridFunction1D sq({-1, 0, 1}, {1, 0, 1});
  const std::vector<double> two{2.0};
  CHECK(at(fast_conjugate_1d(sq, two), 0) == 1.0);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs, vs, ys, unused;
    oracle::random_grid(rng, 1 + trial % 17, xs, vs);
    oracle::random_grid(rng, 9, ys, unused);
    const GridFunction1D f(xs, vs);
    const auto a = fast_conjugate_1d(f, ys);
    const auto b = discrete_conjugate(f, ys);
    for (std::size_t j = 0; j < ys.size(); ++j) CHECK(std::abs(at(a, j) - at(b, j)) <= 1e-12);
  }
  const std::vector<double> unsorted{1, 0};
  CHECK_THROWS_AS(fast_conjugate_1d(sq, unsorted), InputError);
}

TEST_CASE("conjugate report") {
  const GridFunction1D sq({-1, 0, 1}, {1, 0, 1});
  const std::vector<double> dual{-2, -1, 0, 1, 2};
  const auto rep = conjugate_report(sq, dual, ConjugateMethod::kFast1D);
  CHECK(rep.max_young_violation <= 1e-12);
  CHECK(std::get<GridFunction1D>(rep.dual_values).values() ==
        std::vector<double>{1, 0, 0, 0, 1});
  CHECK_THROWS_AS(conjugate_report(sq, dual, ConjugateMethod::kExactMaxAffine), InputError);
}

TEST_CASE("max-affine conjugate on a box") {
  const auto fs = conjugate_max_affine(abs_on(2));
  CHECK(fs.bounded());
  CHECK(fs(Vector{0.5}) == ExtReal(0.0));
  CHECK(fs(Vector{2}) == ExtReal(2.0));
  CHECK(fs(Vector{-3}) == ExtReal(4.0));

  const MaxAffineFunction zero({{{0.0, 0.0}, 0.0}}, MaxAffineFunction::Box{{0, 1}, {0, 1}});
  CHECK(conjugate_max_affine(zero)(Vector{1, 1}) == ExtReal(2.0));

  // the dual is itself max-affine and agrees with the evaluator
  const auto& dual = fs.as_max_affine();
  for (double y : {-2.5, -1.0, 0.0, 0.3, 1.7}) {
    CHECK(evaluate(dual, Vector{y}).value() == doctest::Approx(fs(Vector{y}).value()));
  }
}

TEST_CASE("max-affine conjugate without a box") {
  const MaxAffineFunction abs({{{1.0}, 0.0}, {{-1.0}, 0.0}});
  const auto fs = conjugate_max_affine(abs);
  CHECK_FALSE(fs.bounded());
  CHECK(fs(Vector{0.25}) == ExtReal(0.0));
  CHECK_FALSE(fs(Vector{1.5}).is_finite());
  CHECK_THROWS_AS(fs.as_max_affine(), UnsupportedInput);
  // max(x - 1, -x): f* on [-1, 1] interpolates (-1, 0) and (1, 1)
  const MaxAffineFunction g({{{1.0}, 1.0}, {{-1.0}, 0.0}});
  CHECK(hull_conjugate(g, Vector{0}).value() == doctest::Approx(0.5));

  const double inf = std::numeric_limits<double>::infinity();
  const MaxAffineFunction half({{{1.0}, 0.0}}, MaxAffineFunction::Box{{0, inf}});
  CHECK_THROWS_AS(conjugate_max_affine(half), UnsupportedInput);
}

TEST_CASE("max-affine conjugate against a dense grid") {
  std::mt19937_64 rng(11);
  for (std::size_t d = 1; d <= 2; ++d) {
    for (int trial = 0; trial < 10; ++trial) {
      const MaxAffineFunction f(oracle::random_pieces(rng, d, 4), oracle::cube(d, -1, 1.5));
      const auto fs = conjugate_max_affine(f);
      for (int k = 0; k < 10; ++k) {
        const Vector y = oracle::random_vector(rng, d, -4, 4);
        const double exact = fs(y).value();
        CHECK(oracle::grid_conjugate(f, y, 201) <= exact + 1e-9);
        // grid spacing 0.0125 and slopes below 8 in norm bound the gap
        CHECK(oracle::grid_conjugate(f, y, 201) >= exact - 0.0125 * 8 * std::sqrt(d));
        CHECK(fs.cross_check(y).consistent);
      }
    }
  }
}

TEST_CASE("biconjugate") {
  const auto convex = biconjugate_check(GridFunction1D({-1, 0, 1}, {1, 0, 1}));
  CHECK(convex.max_excess <= 1e-9);
  CHECK(convex.equality_points == std::vector<std::size_t>{0, 1, 2});

  const auto bumpy = biconjugate_check(GridFunction1D({0, 1, 2}, {0, 2, 1}));
  CHECK(bumpy.biconjugate.values()[1] == doctest::Approx(0.5));
  CHECK(bumpy.equality_points == std::vector<std::size_t>{0, 2});
  CHECK(bumpy.envelope_points == std::vector<std::size_t>{0, 2});

  const auto single = biconjugate_check(GridFunction1D({3}, {7}));
  CHECK(single.biconjugate.values()[0] == 7.0);
}

TEST_CASE("young-fenchel gap") {
  const auto f = abs_on(2);
  const auto fs = conjugate_max_affine(f);
  Evaluator fe = [&](const Vector& x) { return evaluate(f, x); };
  Evaluator fse = [&](const Vector& y) { return fs(y); };
  CHECK(young_fenchel_gap(fe, fse, Vector{1}, Vector{0}) == 1.0);
  CHECK(young_fenchel_gap(fe, fse, Vector{1}, Vector{1}) == 0.0);
  CHECK_THROWS_AS(young_fenchel_gap(fe, fse, Vector{3}, Vector{0}), DomainError);

  const MaxAffineFunction zero({{{0.0}, 0.0}}, MaxAffineFunction::Box{{-1, 1}});
  const auto zs = conjugate_max_affine(zero);
  Evaluator ze = [&](const Vector& x) { return evaluate(zero, x); };
  Evaluator zse = [&](const Vector& y) { return zs(y); };
  CHECK(young_fenchel_gap(ze, zse, Vector{0}, Vector{0}) == 0.0);

  // tangents of x^2/2 every 0.01: f and f* both approximate the parabola
  std::vector<AffinePiece> tangents;
  for (int k = -300; k <= 300; ++k) tangents.push_back({Vector{k / 100.0}, k * k / 20000.0});
  const MaxAffineFunction quad(tangents, MaxAffineFunction::Box{{-3, 3}});
  const auto qs = conjugate_max_affine(quad);
  Evaluator qe = [&](const Vector& x) { return evaluate(quad, x); };
  Evaluator qse = [&](const Vector& y) { return qs(y); };
  CHECK(std::abs(young_fenchel_gap(qe, qse, Vector{1}, Vector{1})) <= 1e-9);
}

TEST_CASE("polyhedral vertices") {
  const auto v = polyhedral_vertices(abs_on(2));
  CHECK(v.size() == 3);
  CHECK_THROWS_AS(polyhedral_vertices(MaxAffineFunction({{{1.0}, 0.0}})), UnsupportedInput);
}

TEST_CASE("hull minimum on large inputs") {
  // 40 points in 3-D go through the LP path; compare with plain enumeration
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vector> pts;
    std::vector<double> vals;
    for (int i = 0; i < 40; ++i) {
      pts.push_back(oracle::random_vector(rng, 3, -2, 2));
      vals.push_back(oracle::uniform(rng, -3, 3));
    }
    for (int k = 0; k < 5; ++k) {
      const Vector y = oracle::random_vector(rng, 3, -2.5, 2.5);
      std::optional<double> brute;
      std::vector<const Vector*> simplex;
      for (std::size_t m = 1; m <= 4; ++m) {
        linalg::for_each_subset(pts.size(), m, [&](std::span<const std::size_t> sub) {
          simplex.clear();
          for (std::size_t s : sub) simplex.push_back(&pts[s]);
          const auto w = linalg::barycentric(simplex, y, 1e-12);
          if (!w) return;
          double v = 0.0;
          for (std::size_t j = 0; j < m; ++j) v += (*w)[j] * vals[sub[j]];
          if (!brute || v < *brute) brute = v;
        });
      }
      const auto lp = linalg::hull_minimum(pts, vals, y, 1e-12);
      REQUIRE(lp.has_value() == brute.has_value());
      if (lp) CHECK(*lp == doctest::Approx(*brute).epsilon(1e-12));
    }
  }
}
