// Legendre-Fenchel transforms: exact discrete transforms of sampled 1-D
// functions, exact conjugates of max-affine functions, biconjugation and the
// Fenchel-Young gap.

#ifndef DUALREP_CONJUGATE_H_
#define DUALREP_CONJUGATE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "dualrep/core.h"

namespace dualrep {

// f*(y) = max_i (y * xs_i - values_i) at every dual point. O(n m).
GridFunction1D discrete_conjugate(const GridFunction1D& f,
                                  std::span<const double> dual_xs);

// Same maxima as discrete_conjugate, computed by walking the lower convex
// envelope of the samples against the sorted dual points: O(n + m) after
// the envelope.
GridFunction1D fast_conjugate_1d(const GridFunction1D& f,
                                 std::span<const double> dual_xs);

enum class ConjugateMethod { kBrute, kFast1D, kExactMaxAffine };

struct ConjugateReport {
  std::variant<GridFunction1D, MaxAffineFunction> dual_values;
  // max over sample/dual pairs of -(f(x) + f*(y) - <y, x>); at most strict_tol.
  double max_young_violation;
  ConjugateMethod method;
};

ConjugateReport conjugate_report(const GridFunction1D& f,
                                 std::span<const double> dual_xs,
                                 ConjugateMethod method);

// Vertices of the polyhedral complex of f restricted to a bounded box: box
// corners plus every point inside the box where d independent hyperplanes
// among {box faces, piece ties} meet. Every maximizer of a linear function
// minus f over the box is attained at one of them.
std::vector<Vector> polyhedral_vertices(const MaxAffineFunction& f,
                                        const ToleranceProfile& tol = {});

struct DenseGridCheck {
  double exact;
  double grid_lower_bound;
  std::size_t grid_points;
  bool consistent;  // grid_lower_bound <= exact + eq_tol
};

// Exact evaluator for f*.
//
// Bounded box: f* = max over polyhedral_vertices(f) of <y, v> - f(v), so f*
// is itself a box-free max-affine function (as_max_affine()).
// No box (or all bounds infinite): f*(y) = min { sum w_k c_k : sum w_k s_k = y,
// w in the simplex } and +inf outside conv(slopes).
// Boxes with some infinite and some finite bounds are rejected.
class MaxAffineConjugate {
 public:
  // Largest dimension accepted for bounded boxes; the dense-grid cross check
  // uses 64 points per axis, capped at 64^3.
  static constexpr std::size_t kMaxBoxedDim = 3;
  static constexpr std::size_t kGridPointsPerAxis = 64;

  explicit MaxAffineConjugate(MaxAffineFunction f,
                              const ToleranceProfile& tol = {});

  ExtReal operator()(const Vector& y) const;

  const MaxAffineFunction& primal() const { return f_; }
  bool bounded() const { return bounded_; }
  // Box-free max-affine form of f*; throws UnsupportedInput for box-free f.
  const MaxAffineFunction& as_max_affine() const;
  const std::vector<Vector>& vertices() const { return vertices_; }

  // Maximizes <y, x> - f(x) over a 64^d tensor grid of the box; the result
  // is a lower bound on f*(y).
  DenseGridCheck cross_check(const Vector& y) const;

 private:
  MaxAffineFunction f_;
  ToleranceProfile tol_;
  bool bounded_;
  std::vector<Vector> vertices_;
  std::vector<double> vertex_values_;
  std::optional<MaxAffineFunction> dual_;
  // box-free case
  std::vector<Vector> slopes_;
  std::vector<double> intercepts_;
};

MaxAffineConjugate conjugate_max_affine(const MaxAffineFunction& f,
                                        const ToleranceProfile& tol = {});

// Exact conjugate of a box-free max-affine function at y (see above).
ExtReal hull_conjugate(const MaxAffineFunction& f, const Vector& y,
                       const ToleranceProfile& tol = {});

struct BiconjugateReport {
  GridFunction1D biconjugate;      // f** on f's grid
  std::vector<double> dual_grid;   // envelope slopes and their midpoints
  double max_excess;               // max_i f**(x_i) - f(x_i)
  std::vector<std::size_t> equality_points;  // f(x_i) - f**(x_i) <= eq_tol
  std::vector<std::size_t> envelope_points;  // strict envelope vertices
};

BiconjugateReport biconjugate_check(const GridFunction1D& f,
                                    const ToleranceProfile& tol = {});

using Evaluator = std::function<ExtReal(const Vector&)>;

// f(x) + f*(y) - <y, x>. Throws DomainError if either value is +inf.
double young_fenchel_gap(const Evaluator& f, const Evaluator& fstar,
                         const Vector& x, const Vector& y);

}  // namespace dualrep

#endif  // DUALREP_CONJUGATE_H_
