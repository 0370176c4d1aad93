#include <cmath>
#include <limits>

#include "doctest.h"
#include "dualrep/core.h"

using namespace dualrep;

namespace {

MaxAffineFunction abs_fn() { return MaxAffineFunction({{{1.0}, 0.0}, {{-1.0}, 0.0}}); }

}  // namespace

TEST_CASE("dot and norms") {
  CHECK(dot(Vector{1, 2}, Vector{3, 4}) == 11.0);
  CHECK(dot(Vector{5, -7}, Vector::zeros(2)) == 0.0);
  Vector a(std::vector<double>(10, 0.1)), b(std::vector<double>(10, 1.0));
  CHECK(std::abs(dot(a, b) - 1.0) <= 1e-12);
  CHECK(norm(Vector{3, 4}) == 5.0);
  CHECK(distance(Vector{1, 1}, Vector{4, 5}) == 5.0);
  CHECK_THROWS_AS(dot(Vector{1}, Vector{1, 2}), InputError);
}

TEST_CASE("vector construction") {
  CHECK(Vector::unit(3, 1, -1.0) == Vector{0, -1, 0});
  CHECK_THROWS_AS(Vector(std::vector<double>{}), InputError);
  CHECK_THROWS_AS(Vector(std::vector<double>{1.0, std::nan("")}), InputError);
  CHECK(Vector{1, 2} < Vector{1, 3});
}

TEST_CASE("extended reals") {
  const ExtReal inf = ExtReal::infinity();
  CHECK_FALSE(inf.is_finite());
  CHECK_THROWS_AS(inf.value(), DomainError);
  CHECK(ExtReal(2.0) < inf);
  CHECK_FALSE(inf < ExtReal(1e300));
  CHECK(ExtReal(1.5).value() == 1.5);
}

TEST_CASE("eval_max_affine") {
  const MaxAffineFunction f = abs_fn();
  auto e = eval_max_affine(f, Vector{2});
  CHECK(e.value == ExtReal(2.0));
  CHECK(e.active == std::vector<std::size_t>{0});
  e = eval_max_affine(f, Vector{0});
  CHECK(e.value == ExtReal(0.0));
  CHECK(e.active == std::vector<std::size_t>{0, 1});

  const MaxAffineFunction zero({{{0.0}, 0.0}});
  CHECK(evaluate(zero, Vector{-17.5}) == ExtReal(0.0));
  CHECK_THROWS_AS(evaluate(f, Vector{1, 2}), InputError);
}

TEST_CASE("box domain") {
  const MaxAffineFunction f({{{1.0}, 0.0}, {{-1.0}, 0.0}}, MaxAffineFunction::Box{{-2, 2}});
  CHECK(evaluate(f, Vector{2}) == ExtReal(2.0));
  CHECK_FALSE(evaluate(f, Vector{2.5}).is_finite());
  CHECK(eval_max_affine(f, Vector{3}).active.empty());
  CHECK(f.in_box(Vector{-2}));
  CHECK_FALSE(f.in_interior(Vector{-2}));
  CHECK(f.has_bounded_box());
  CHECK_FALSE(f.is_box_free());
  const double inf = std::numeric_limits<double>::infinity();
  const MaxAffineFunction g({{{1.0}, 0.0}}, MaxAffineFunction::Box{{-inf, inf}});
  CHECK(g.is_box_free());
  CHECK_THROWS_AS(MaxAffineFunction({{{1.0}, 0.0}}, MaxAffineFunction::Box{{1, 0}}), InputError);
}

TEST_CASE("duplicate pieces are merged") {
  const MaxAffineFunction f({{{1.0}, 0.0}, {{1.0}, 0.0}, {{-1.0}, 0.0}});
  CHECK(f.pieces().size() == 2);
  CHECK(f.pieces()[1].slope == Vector{-1});
  CHECK_THROWS_AS(MaxAffineFunction({}), InputError);
  CHECK_THROWS_AS(MaxAffineFunction({{{1.0}, 0.0}, {{1.0, 2.0}, 0.0}}), InputError);
}

TEST_CASE("lower convex envelope") {
  auto env = [](std::vector<EnvelopePoint> p) { return lower_convex_envelope(p); };
  CHECK(env({{0, 0}, {1, 0}, {2, 0}}) == std::vector<std::size_t>{0, 2});
  CHECK(env({{-1, 1}, {0, 0}, {1, 1}}) == std::vector<std::size_t>{0, 1, 2});
  CHECK(env({{0, 0}, {1, 2}, {2, 1}}) == std::vector<std::size_t>{0, 2});
  CHECK(env({{4, 4}}) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(env({}), InputError);
}

TEST_CASE("grid function validation") {
  CHECK_NOTHROW(GridFunction1D({0, 1}, {3, 4}));
  CHECK_THROWS_AS(GridFunction1D({0, 0}, {1, 1}), InputError);
  CHECK_THROWS_AS(GridFunction1D({0, 1}, {1}), InputError);
}

TEST_CASE("operator sample") {
  const OperatorSample s({{{0.0}, {1.0}}, {{1.0}, {0.0}}}, 1);
  CHECK(s.size() == 2);
  CHECK(s.base() == 1);
  CHECK(s.with_base(0).base() == 0);
  CHECK_THROWS_AS(OperatorSample({{{0.0}, {1.0}}}, 1), InputError);
  CHECK_THROWS_AS(OperatorSample({{{0.0}, {1.0, 2.0}}}, 0), InputError);
}

TEST_CASE("grid spec") {
  const GridSpec g = GridSpec::parse("-1:1:0.5");
  CHECK(g.points() == std::vector<double>{-1, -0.5, 0, 0.5, 1});
  // 0.1 steps accumulate error; the endpoint must still be kept
  CHECK(GridSpec::parse("0:1:0.1").points().size() == 11);
  CHECK(GridSpec::parse("0:1:0.1").points().back() == 1.0);
  CHECK_THROWS_AS(GridSpec::parse("1:0:0.5"), InputError);
  CHECK_THROWS_AS(GridSpec::parse("0:1"), InputError);
  CHECK_THROWS_AS(GridSpec::parse("0:1:0"), InputError);
  const auto t = tensor_grid(GridSpec::parse("0:1:1"), 2);
  REQUIRE(t.size() == 4);
  CHECK(t[1] == Vector{0, 1});
  CHECK(t[2] == Vector{1, 0});
}

TEST_CASE("tolerance profile") {
  CHECK_NOTHROW(ToleranceProfile{}.validate());
  CHECK_THROWS_AS((ToleranceProfile{1e-12, 1e-9}.validate()), InputError);
  CHECK_THROWS_AS((ToleranceProfile{1e-9, 0.0}.validate()), InputError);
}
