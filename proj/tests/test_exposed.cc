#include <random>

#include "doctest.h"
#include "dualrep/exposed.h"
#include "oracles.h"

using namespace dualrep;

namespace {

PointBody square() { return PointBody({{0, 0}, {1, 0}, {0, 1}, {1, 1}}); }

using Idx = std::vector<std::size_t>;

}  // namespace

TEST_CASE("support function") {
  CHECK(support_function(square(), Vector{1, 1}) == 2.0);
  CHECK(support_function(square(), Vector{0, 0}) == 0.0);
  CHECK(support_function(PointBody({{0, 0}, {2, 0}, {0, 3}}), Vector{1, 1}) == 3.0);
}

TEST_CASE("expose") {
  auto c = expose(square(), Vector{1, 1});
  CHECK(c.verdict == Exposure::kExposes);
  CHECK(c.argmax == Idx{3});
  CHECK(c.margin == ExtReal(1.0));
  c = expose(square(), Vector{1, 0});
  CHECK(c.verdict == Exposure::kTies);
  CHECK(c.argmax == Idx{1, 3});
  c = expose(PointBody({{0}, {0.5}, {1}}), Vector{1});
  CHECK(c.argmax == Idx{2});
  CHECK_FALSE(expose(PointBody({{1, 1}}), Vector{0, 1}).margin.is_finite());
  CHECK_THROWS_AS(expose(square(), Vector{0, 0}), InputError);

  // scaling u keeps the verdict and scales the margin
  const auto scaled = expose(square(), Vector{3, 3});
  CHECK(scaled.argmax == Idx{3});
  CHECK(scaled.margin == ExtReal(3.0));
}

TEST_CASE("exact exposed points") {
  PointBody sq({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}});
  CHECK(exp_points(sq).indices == Idx{0, 1, 2, 3});
  CHECK(exp_points(PointBody({{0}, {0.5}, {1}})).indices == Idx{0, 2});
  CHECK(exp_points(PointBody({{0, 0}, {1, 1}, {2, 2}})).indices == Idx{0, 2});
  CHECK(exp_points(PointBody({{5, 5}})).indices == Idx{0});

  // the octahedron plus its center
  PointBody octa({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}, {0, 0, 0}});
  CHECK(exp_points(octa).indices == Idx{0, 1, 2, 3, 4, 5});

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Vector> pts;
    for (int i = 0; i < 20; ++i) {
      Vector p = oracle::random_vector(rng, 2, -1, 1);
      if (norm(p) <= 1) pts.push_back(p);
    }
    const PointBody c(pts);
    CHECK(exp_points(c).indices == oracle::hull_vertices(c.points()));
  }
  CHECK_THROWS_AS(exp_points(PointBody({{0, 0, 0, 0}, {1, 0, 0, 0}})), UnsupportedInput);
}

TEST_CASE("sampled exposed points") {
  PointBody sq({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}});
  const auto r = exp_points(sq, ExpMode::kSampled, 42, 500);
  CHECK(r.approximate);
  CHECK(r.indices == Idx{0, 1, 2, 3});
  // every sampled index is an exact one
  std::vector<Vector> cube;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) cube.push_back({double(a), double(b), double(c), double(d)});
  cube.push_back({0.5, 0.5, 0.5, 0.5});
  const auto s = exp_points(PointBody(cube), ExpMode::kSampled, 1, 4000);
  CHECK(s.indices.size() == 16);
}

TEST_CASE("exposed points of a sampled graph") {
  auto r = exp_g(GridFunction1D({-1, 0, 1}, {1, 0, 1}));
  CHECK(r.indices == Idx{0, 1, 2});
  CHECK(exp_g(GridFunction1D({0, 1, 2}, {0, 1, 2})).indices == Idx{0, 2});
  r = exp_g(GridFunction1D({0, 1, 2, 3}, {0, 0, 0, 1}));
  CHECK(r.indices == Idx{0, 2, 3});
  // each slope exposes its point: (x_i, v_i) is the unique minimizer of v - s x
  const GridFunction1D g({0, 1, 2, 3}, {0, 0, 0, 1});
  for (std::size_t k = 0; k < r.indices.size(); ++k) {
    const double s = r.exposing_slopes[k];
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j == r.indices[k]) continue;
      CHECK(g.values()[j] - s * g.xs()[j] >
            g.values()[r.indices[k]] - s * g.xs()[r.indices[k]]);
    }
  }
}

TEST_CASE("epigraph vertices") {
  const std::vector<Vector> pts{{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {0, 0}};
  std::vector<double> bowl{1, 1, 1, 1, 0};
  CHECK(epigraph_vertices(pts, bowl) == Idx{0, 1, 2, 3, 4});
  std::vector<double> flat{1, 1, 1, 1, 1};
  CHECK(epigraph_vertices(pts, flat) == Idx{0, 1, 2, 3});
}

TEST_CASE("density") {
  auto d = density_check(square(), 10000, 42);
  CHECK(d.fraction >= 0.999);
  d = density_check(PointBody({{0, 0}, {1, 1}}), 10000, 42);
  CHECK(d.fraction >= 0.999);
  CHECK(density_check(PointBody({{3, 1}}), 100, 42).fraction == 1.0);
  CHECK(density_check(square(), 500, 9).exposing == density_check(square(), 500, 9).exposing);
}

TEST_CASE("epi-pointedness") {
  CHECK(is_epi_pointed(MaxAffineFunction({{{1.0}, 0.0}, {{-1.0}, 0.0}})));
  CHECK_FALSE(is_epi_pointed(MaxAffineFunction({{{1.0}, 0.0}})));
  // a bounded box makes dom g* everything
  CHECK(is_epi_pointed(MaxAffineFunction({{{1.0}, 0.0}}, MaxAffineFunction::Box{{0, 1}})));
  CHECK_FALSE(is_epi_pointed(MaxAffineFunction({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, 0.0}})));
  CHECK(is_epi_pointed(
      MaxAffineFunction({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}})));
}
