// Constructive Brondsted-Rockafellar style refinements for max-affine g on
// R^d: starting from an eps-subgradient pair (x0*, x0), find an exact pair
// (x_e*, x_e) with x_e in the subdifferential of g at x_e* close to it, and
// certify the distance bounds.
//
// Candidates come from two sources. The proximal point z = prox_{tg}(w)
// always carries the exact subgradient (w - z)/t, and for the right choice of
// w and t it meets every bound by a strong convexity argument. Independently,
// deterministic nested grids around the start point contribute every exact
// pair at each grid node (active slopes plus a lattice on the segments
// between them). When the constructive candidates are switched off, a failed
// search is attributed to grid resolution; with them on, it is a
// falsification.

#ifndef DUALREP_BRONSTED_H_
#define DUALREP_BRONSTED_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dualrep/core.h"

namespace dualrep {

struct ExactPairsOptions {
  // Points per segment between two active slopes, endpoints included.
  std::size_t hull_points_per_edge = 11;
};

// All (x*, x) with x an active slope at x* or a lattice point between two
// active slopes. Every grid point must be interior to dom g. Base is pair 0.
OperatorSample exact_pairs(const MaxAffineFunction& g,
                           std::span<const Vector> dual_grid,
                           const ExactPairsOptions& options = {},
                           const ToleranceProfile& tol = {});

struct SearchOptions {
  std::size_t levels = 3;
  double factor = 10.0;
  std::size_t points_per_axis = 21;
  bool constructive_candidates = true;
  std::size_t hull_points_per_edge = 11;

  std::string describe(std::size_t dim, double radius) const;
};

// kBoundaryOnly: no interior subgradient is short enough, so the pair can
// only come from normal-cone functionals at the box boundary (unsupported).
enum class SearchOutcome { kSuccess, kGridResolution, kFalsified, kBoundaryOnly };

const char* to_string(SearchOutcome outcome);

// inf of g over dom g, computed as -g*(0). nullopt when g is unbounded below.
std::optional<double> infimum(const MaxAffineFunction& g,
                              const ToleranceProfile& tol = {});

// (z, x) with z = prox_{tg}(w) and x = (w - z)/t, solved exactly over active
// sets of at most d+1 pieces. nullopt when z is not interior to the box.
std::optional<DualPair> proximal_pair(const MaxAffineFunction& g, const Vector& w,
                                      double t, const ToleranceProfile& tol = {});

struct RefineReport {
  std::optional<DualPair> found;
  double xstar_distance;  // +inf when nothing was found
  double x_distance;
  double bound;           // sqrt(eps)
  double input_gap;       // gap of x0 at x0*
  SearchOutcome outcome;
  std::string grid;
  std::size_t candidates;
};

// Exact pair within sqrt(eps) of (x0*, x0) in both components, minimizing
// the larger distance. Throws PreconditionError unless x0 is an
// eps-subgradient at x0*.
RefineReport t0_refine(const MaxAffineFunction& g, const Vector& xstar0,
                       const Vector& x0, double eps, const SearchOptions& options = {},
                       const ToleranceProfile& tol = {});

// Named inequality. margin > 0 means satisfied with room to spare; pass
// allows margin down to -strict_tol for the non-strict bounds.
struct BoundCheck {
  std::string name;
  bool pass;
  double value;
  double bound;
  double margin;
};

struct BorweinCertificate {
  Vector xstar0;
  Vector x0;
  double eps;
  double beta;
  std::optional<DualPair> found;
  std::vector<BoundCheck> bounds;  // i .. vii, empty when nothing was found
  bool valid;                      // all seven pass
  bool rechecked;                  // pass flags reproduced from raw inputs
  bool sampled_v_agrees;           // v (sampled) and iv give the same verdict
  std::uint64_t seed;              // random probes for v
  std::size_t probes;
  SearchOutcome outcome;
  std::string grid;
  std::size_t candidates;
};

// Scores every candidate on the seven bounds; returns the first that passes
// all of them, else the one with most passes. beta must be > 0.
BorweinCertificate t1_refine(const MaxAffineFunction& g, const Vector& xstar0,
                             const Vector& x0, double eps, double beta,
                             std::uint64_t seed = 42,
                             const SearchOptions& options = {},
                             const ToleranceProfile& tol = {});

// Recomputes each bound of `cert` from g and the raw vectors and reports
// whether every pass flag matches.
bool recheck_certificate(const MaxAffineFunction& g, const BorweinCertificate& cert,
                         const ToleranceProfile& tol = {});

struct LemmaResult {
  std::optional<DualPair> found;
  std::vector<BoundCheck> checks;  // strict: pass iff margin > strict_tol
  SearchOutcome outcome;
  double infimum;
  std::string grid;
  std::size_t candidates;
};

// Exact pair with |x* - x0*| < beta and |x| < alpha. Requires alpha, beta > 0
// and g(x0*) < inf g + alpha*beta, else PreconditionError. A failed search is
// kBoundaryOnly when every point of conv(slopes) has norm >= alpha.
LemmaResult l1_search(const MaxAffineFunction& g, const Vector& xstar0, double alpha,
                      double beta, const SearchOptions& options = {},
                      const ToleranceProfile& tol = {});

// Exact pair (z*, z) with g(z*) < g(x*) and <z, x* - z*> > 0. Requires
// inf g < g(x*), else PreconditionError.
LemmaResult l2_search(const MaxAffineFunction& g, const Vector& xstar,
                      const SearchOptions& options = {},
                      const ToleranceProfile& tol = {});

struct DensityProbeReport {
  std::size_t trials;
  std::size_t successes;
  std::size_t grid_resolution;
  std::size_t falsified;
  double fraction;
};

// Random eps-pairs with x0* uniform in `region` (inside the interior of dom
// g) and x0 a random point of the eps-subdifferential; counts how often
// t0_refine succeeds.
DensityProbeReport density_probe(const MaxAffineFunction& g,
                                 const MaxAffineFunction::Box& region,
                                 std::size_t trials, double eps, std::uint64_t seed,
                                 const SearchOptions& options = {},
                                 const ToleranceProfile& tol = {});

}  // namespace dualrep

#endif  // DUALREP_BRONSTED_H_
