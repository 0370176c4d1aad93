// Support functions and strongly exposed points of finite point bodies and
// of sampled epigraphs.
//
// For a finite body, a point is strongly exposed by u exactly when it is the
// unique maximizer of <., u> with a positive margin: any maximizing sequence
// over finitely many points is eventually constant.

#ifndef DUALREP_EXPOSED_H_
#define DUALREP_EXPOSED_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dualrep/core.h"

namespace dualrep {

// The convex hull of finitely many points. Duplicates are dropped on
// construction, keeping first occurrences.
class PointBody {
 public:
  explicit PointBody(std::vector<Vector> points);

  std::size_t dim() const { return points_.front().size(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<Vector>& points() const { return points_; }

 private:
  std::vector<Vector> points_;
};

double support_function(const PointBody& c, const Vector& u);

enum class Exposure { kExposes, kTies };

struct ExposureCertificate {
  Vector direction;
  double sigma;
  std::vector<std::size_t> argmax;  // within strict_tol of sigma
  Exposure verdict;
  // sigma minus the best value off the argmax set; +inf for one-point bodies.
  ExtReal margin;
};

// Throws InputError on a zero direction.
ExposureCertificate expose(const PointBody& c, const Vector& u,
                           const ToleranceProfile& tol = {});

enum class ExpMode { kExact, kSampled };

struct ExpPointsResult {
  std::vector<std::size_t> indices;  // ascending
  bool approximate;                  // sampled mode
};

inline constexpr std::size_t kMaxExactExpDim = 3;

// Exact mode returns the strict hull vertices (d <= 3). Sampled mode returns
// the points exposed by at least one of `directions` seeded random unit
// directions, in any dimension.
ExpPointsResult exp_points(const PointBody& c, ExpMode mode = ExpMode::kExact,
                           std::uint64_t seed = 42, std::size_t directions = 1000,
                           const ToleranceProfile& tol = {});

struct ExpGResult {
  std::vector<std::size_t> indices;
  // Slope s per index; (s, -1) strictly exposes (xs_i, values_i) in epi g.
  std::vector<double> exposing_slopes;
};

// Strict vertices of the lower convex envelope of the graph of g.
ExpGResult exp_g(const GridFunction1D& g, const ToleranceProfile& tol = {});

// d-dimensional analogue of exp_g for scattered samples: i is kept when
// (points_i, values_i) lies strictly below the convex hull of the other
// lifted samples (or points_i is outside their hull).
std::vector<std::size_t> epigraph_vertices(std::span<const Vector> points,
                                           std::span<const double> values,
                                           const ToleranceProfile& tol = {});

struct DensityReport {
  std::size_t trials;
  std::size_t exposing;
  double fraction;
};

// Fraction of seeded uniform unit directions whose certificate exposes.
DensityReport density_check(const PointBody& c, std::size_t trials,
                            std::uint64_t seed, const ToleranceProfile& tol = {});

// int(dom g*) is nonempty. dom g* is conv(slopes) plus the barrier cone of
// the box, so this is an affine-rank test on the slopes and the box normals.
bool is_epi_pointed(const MaxAffineFunction& g);

// Uniform direction on the unit sphere in R^d.
Vector random_unit(std::size_t d, std::mt19937_64& rng);

}  // namespace dualrep

#endif  // DUALREP_EXPOSED_H_
