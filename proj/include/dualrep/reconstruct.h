// Reconstruction experiments: sample the subdifferential of a known
// max-affine g, rebuild it with the chain antiderivative and measure
//
//   g(y) - g(x0*) - h(y)
//
// on a set of evaluation points. h never overshoots; it is exact once the
// sample covers every piece with tight chains.

#ifndef DUALREP_RECONSTRUCT_H_
#define DUALREP_RECONSTRUCT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "dualrep/core.h"
#include "dualrep/cyclic.h"

namespace dualrep {

// One pair per active slope (multivalued) or only the smallest-index active
// piece. Points must be interior to dom g. The base pair is the first pair
// at dual_points[base_point].
OperatorSample sample_subdifferential(const MaxAffineFunction& g,
                                      std::span<const Vector> dual_points,
                                      bool multivalued, std::size_t base_point = 0,
                                      const ToleranceProfile& tol = {});

enum class ReconstructMode { kFull, kExposedOnly };

const char* to_string(ReconstructMode mode);

struct ReconstructionReport {
  AntiderivativeResult h;
  OperatorSample sample;
  ReconstructMode mode;
  std::vector<Vector> dual_points;  // after exposed-only filtering
  std::vector<Vector> eval_points;
  std::vector<double> g_values;
  std::vector<double> h_values;
  std::vector<double> true_minus_h;  // g(y) - g(x0*) - h(y)
  double sup_gap;                    // max |true_minus_h|
  bool lower_bound_holds;            // true_minus_h >= -eq_tol everywhere
};

// Exposed-only mode keeps the base point and the dual points whose lifted
// sample (x*, g(x*)) is a strict vertex of the sampled epigraph. Eval points
// must lie in dom g; dual points must be distinct.
ReconstructionReport reconstruct(const MaxAffineFunction& g,
                                 std::span<const Vector> dual_points,
                                 std::size_t base_point,
                                 std::span<const Vector> eval_points,
                                 ReconstructMode mode = ReconstructMode::kFull,
                                 bool multivalued = true,
                                 const ToleranceProfile& tol = {});

struct ConvergenceRow {
  double spacing;
  std::size_t dual_points;
  double sup_gap;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool nonincreasing;  // within eq_tol
};

// One reconstruction per grid. Dual points are the tensor grid of each spec
// restricted to the interior of dom g; `base` must be a node of every grid.
ConvergenceReport convergence_study(const MaxAffineFunction& g,
                                    std::span<const GridSpec> grids, const Vector& base,
                                    std::span<const Vector> eval_points,
                                    bool multivalued = false,
                                    const ToleranceProfile& tol = {});

struct DualCaseReport {
  ReconstructionReport report;
  bool covered;                             // every slope of g is a sampled functional
  std::vector<std::size_t> missing_pieces;  // pieces whose slope never appears
  bool exact;                               // sup_gap <= eq_tol
};

DualCaseReport dual_case_study(const MaxAffineFunction& g,
                               std::span<const Vector> dual_points,
                               std::size_t base_point,
                               std::span<const Vector> eval_points,
                               bool multivalued = true,
                               const ToleranceProfile& tol = {});

}  // namespace dualrep

#endif  // DUALREP_RECONSTRUCT_H_
