// Small dense helpers shared by the enumeration-based routines. Systems here
// are at most (2d+2) x (2d+2), so everything is solved with a full-pivot LU.

#ifndef DUALREP_LINALG_H_
#define DUALREP_LINALG_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dualrep/core.h"

namespace dualrep::linalg {

// Row-major square system. Returns nullopt when numerically singular.
std::optional<std::vector<double>> solve(std::size_t n,
                                         std::span<const double> a,
                                         std::span<const double> b);

// Dimension of the affine hull of the points.
std::size_t affine_rank(std::span<const Vector> points);

// Barycentric weights of y w.r.t. the affinely independent points `simplex`
// (any count from 1 to d+1). nullopt when the points are dependent, y is
// farther than `tol` from their affine hull, or a weight is below -tol.
std::optional<std::vector<double>> barycentric(
    std::span<const Vector* const> simplex, const Vector& y, double tol);

// Calls fn on every k-subset of {0..n-1} in lexicographic order.
void for_each_subset(std::size_t n, std::size_t k,
                     const std::function<void(std::span<const std::size_t>)>& fn);

// min sum_i w_i values_i  s.t.  sum_i w_i points_i = y, w in the simplex,
// over indices not equal to `exclude`. Exact by Caratheodory: the optimum
// sits on an affinely independent subset of at most d+1 points. nullopt when
// y is outside the hull. Large inputs go through a simplex LP instead of
// subset enumeration.
std::optional<double> hull_minimum(std::span<const Vector> points,
                                   std::span<const double> values,
                                   const Vector& y, double tol,
                                   std::optional<std::size_t> exclude = {});

}  // namespace dualrep::linalg

#endif  // DUALREP_LINALG_H_
