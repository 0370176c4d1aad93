#include "dualrep/exposed.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "linalg.h"

namespace dualrep {
namespace {

double cross(const Vector& o, const Vector& a, const Vector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<std::size_t> hull_vertices_2d(const std::vector<Vector>& pts, double tol) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
  if (order.size() < 3) return order;

  // Andrew's monotone chain; popping on cross <= tol drops points in the
  // relative interior of an edge.
  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (std::size_t idx : order) {
    while (k >= 2 && cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx]) <= tol) --k;
    hull[k++] = idx;
  }
  for (std::size_t i = order.size() - 1, lower = k + 1; i-- > 0;) {
    const std::size_t idx = order[i];
    while (k >= lower && cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx]) <= tol) --k;
    hull[k++] = idx;
  }
  hull.resize(k - 1);
  std::sort(hull.begin(), hull.end());
  hull.erase(std::unique(hull.begin(), hull.end()), hull.end());
  return hull;
}

}  // namespace

PointBody::PointBody(std::vector<Vector> points) {
  if (points.empty()) throw InputError("PointBody: no points");
  const std::size_t d = points.front().size();
  for (Vector& p : points) {
    if (p.size() != d) throw InputError("PointBody: mixed dimensions");
    if (std::find(points_.begin(), points_.end(), p) == points_.end()) {
      points_.push_back(std::move(p));
    }
  }
}

double support_function(const PointBody& c, const Vector& u) {
  if (u.size() != c.dim()) throw InputError("support_function: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& p : c.points()) best = std::max(best, dot(p, u));
  return best;
}

ExposureCertificate expose(const PointBody& c, const Vector& u,
                           const ToleranceProfile& tol) {
  if (norm(u) == 0.0) throw InputError("expose: zero direction");
  const double sigma = support_function(c, u);
  std::vector<std::size_t> argmax;
  double runner_up = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double v = dot(c.points()[i], u);
    if (sigma - v <= tol.strict_tol) {
      argmax.push_back(i);
    } else {
      runner_up = std::max(runner_up, v);
    }
  }
  const ExtReal margin = std::isfinite(runner_up) ? ExtReal(sigma - runner_up)
                                                  : ExtReal::infinity();
  const bool exposes = argmax.size() == 1 &&
                       (!margin.is_finite() || margin.value() > tol.strict_tol);
  return {u, sigma, std::move(argmax), exposes ? Exposure::kExposes : Exposure::kTies,
          margin};
}

Vector random_unit(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  while (true) {
    std::vector<double> c(d);
    for (double& v : c) v = normal(rng);
    double n = 0.0;
    for (double v : c) n += v * v;
    n = std::sqrt(n);
    if (n < 1e-12) continue;
    for (double& v : c) v /= n;
    return Vector(std::move(c));
  }
}

ExpPointsResult exp_points(const PointBody& c, ExpMode mode, std::uint64_t seed,
                           std::size_t directions, const ToleranceProfile& tol) {
  const std::size_t d = c.dim();
  const auto& pts = c.points();
  if (mode == ExpMode::kSampled) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> found;
    for (std::size_t k = 0; k < directions; ++k) {
      const ExposureCertificate cert = expose(c, random_unit(d, rng), tol);
      if (cert.verdict == Exposure::kExposes) found.push_back(cert.argmax.front());
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return {std::move(found), true};
  }

  if (d > kMaxExactExpDim) {
    throw UnsupportedInput("exp_points: exact mode supports d <= " +
                           std::to_string(kMaxExactExpDim));
  }
  if (pts.size() == 1) return {{0}, false};
  if (d == 1) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i][0] < pts[lo][0]) lo = i;
      if (pts[i][0] > pts[hi][0]) hi = i;
    }
    return {{std::min(lo, hi), std::max(lo, hi)}, false};
  }
  if (d == 2) return {hull_vertices_2d(pts, tol.strict_tol), false};

  const std::vector<double> zeros(pts.size(), 0.0);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!linalg::hull_minimum(pts, zeros, pts[i], tol.strict_tol, i)) out.push_back(i);
  }
  return {std::move(out), false};
}

ExpGResult exp_g(const GridFunction1D& g, const ToleranceProfile& tol) {
  std::vector<EnvelopePoint> pts(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) pts[i] = {g.xs()[i], g.values()[i]};
  ExpGResult out;
  out.indices = lower_convex_envelope(pts, tol);
  const auto& h = out.indices;
  std::vector<double> edge;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    edge.push_back((pts[h[k + 1]].value - pts[h[k]].value) /
                   (pts[h[k + 1]].abscissa - pts[h[k]].abscissa));
  }
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h.size() == 1) {
      out.exposing_slopes.push_back(0.0);
    } else if (k == 0) {
      out.exposing_slopes.push_back(edge.front() - 1.0);
    } else if (k + 1 == h.size()) {
      out.exposing_slopes.push_back(edge.back() + 1.0);
    } else {
      out.exposing_slopes.push_back(0.5 * (edge[k - 1] + edge[k]));
    }
  }
  return out;
}

std::vector<std::size_t> epigraph_vertices(std::span<const Vector> points,
                                           std::span<const double> values,
                                           const ToleranceProfile& tol) {
  if (points.size() != values.size() || points.empty()) {
    throw InputError("epigraph_vertices: need matching nonempty points and values");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto m = linalg::hull_minimum(points, values, points[i], tol.strict_tol, i);
    if (!m || values[i] < *m - tol.strict_tol) out.push_back(i);
  }
  return out;
}

DensityReport density_check(const PointBody& c, std::size_t trials,
                            std::uint64_t seed, const ToleranceProfile& tol) {
  if (trials == 0) throw InputError("density_check: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    if (expose(c, random_unit(c.dim(), rng), tol).verdict == Exposure::kExposes) ++hits;
  }
  return {trials, hits, static_cast<double>(hits) / static_cast<double>(trials)};
}

bool is_epi_pointed(const MaxAffineFunction& g) {
  const std::size_t d = g.dim();
  std::vector<Vector> pts;
  for (const AffinePiece& p : g.pieces()) pts.push_back(p.slope);
  if (g.box()) {
    const Vector s0 = pts.front();
    for (std::size_t i = 0; i < d; ++i) {
      if (std::isfinite((*g.box())[i].lo)) pts.push_back(s0 - Vector::unit(d, i));
      if (std::isfinite((*g.box())[i].hi)) pts.push_back(s0 + Vector::unit(d, i));
    }
  }
  return linalg::affine_rank(pts) == d;
}

}  // namespace dualrep
