// Exact and epsilon-subdifferentials of max-affine functions. Membership in
// the epsilon-subdifferential is decided by the Fenchel-Young gap
// f(x) + f*(y) - <y, x> <= eps, evaluated with the exact conjugate.

#ifndef DUALREP_SUBDIFFERENTIAL_H_
#define DUALREP_SUBDIFFERENTIAL_H_

#include <cstddef>
#include <vector>

#include "dualrep/conjugate.h"
#include "dualrep/core.h"

namespace dualrep {

// conv(generators); generators are the slopes of the pieces active at x.
struct SubdiffSet {
  std::vector<Vector> generators;
  std::vector<std::size_t> pieces;
};

// Throws UnsupportedInput unless x lies in the interior of the box.
SubdiffSet subdiff(const MaxAffineFunction& f, const Vector& x,
                   const ToleranceProfile& tol = {});

enum class Membership { kMember, kNonmember };

struct EpsMembershipCertificate {
  ExtReal gap;
  double eps;
  Membership verdict;  // member iff gap <= eps + strict_tol
};

EpsMembershipCertificate eps_subdiff_member(const MaxAffineFunction& f,
                                            const Vector& x, const Vector& y,
                                            double eps,
                                            const ToleranceProfile& tol = {});
// Reuses a prepared conjugate; `fstar` must belong to `f`.
EpsMembershipCertificate eps_subdiff_member(const MaxAffineFunction& f,
                                            const MaxAffineConjugate& fstar,
                                            const Vector& x, const Vector& y,
                                            double eps,
                                            const ToleranceProfile& tol = {});

// Some y in the eps-subdifferential of g at xstar: the smallest-index active
// slope, confirmed by the gap test. Throws DomainError outside dom g.
Vector eps_subdiff_witness(const MaxAffineFunction& g, const Vector& xstar,
                           double eps, const ToleranceProfile& tol = {});

// d+f(x)(u) = max over active slopes a of <a, u>; x must be interior.
double directional_derivative(const MaxAffineFunction& f, const Vector& x,
                              const Vector& u, const ToleranceProfile& tol = {});

struct DualitySwapReport {
  EpsMembershipCertificate primal;  // y in d_eps f(x)
  EpsMembershipCertificate dual;    // x in d_eps f*(y)
  double gap_difference;            // |primal.gap - dual.gap|, 0 if both +inf
  bool gaps_equal;
  bool verdicts_agree;
};

// The dual certificate evaluates f** independently of f: for a bounded box,
// as the hull conjugate of the max-affine form of f*; for box-free f, as
// max_k <s_k, x> - f*(s_k).
DualitySwapReport duality_swap_check(const MaxAffineFunction& f,
                                     const Vector& x, const Vector& y,
                                     double eps,
                                     const ToleranceProfile& tol = {});
DualitySwapReport duality_swap_check(const MaxAffineFunction& f,
                                     const MaxAffineConjugate& fstar,
                                     const Vector& x, const Vector& y,
                                     double eps,
                                     const ToleranceProfile& tol = {});

}  // namespace dualrep

#endif  // DUALREP_SUBDIFFERENTIAL_H_
