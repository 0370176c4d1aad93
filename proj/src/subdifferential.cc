#include "dualrep/subdifferential.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linalg.h"

namespace dualrep {
namespace {

void require_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw InputError("eps must be a finite number >= 0");
  }
}

EpsMembershipCertificate make_certificate(ExtReal gap, double eps,
                                          const ToleranceProfile& tol) {
  const bool member = gap.is_finite() && gap.value() <= eps + tol.strict_tol;
  return {gap, eps, member ? Membership::kMember : Membership::kNonmember};
}

// f** at x computed from f* alone.
ExtReal biconjugate_at(const MaxAffineConjugate& fstar, const Vector& x,
                       const ToleranceProfile& tol) {
  if (fstar.bounded()) return hull_conjugate(fstar.as_max_affine(), x, tol);
  double best = -std::numeric_limits<double>::infinity();
  for (const AffinePiece& p : fstar.primal().pieces()) {
    best = std::max(best, dot(p.slope, x) - fstar(p.slope).value());
  }
  return best;
}

}  // namespace

SubdiffSet subdiff(const MaxAffineFunction& f, const Vector& x,
                   const ToleranceProfile& tol) {
  if (x.size() != f.dim()) throw InputError("subdiff: dimension mismatch");
  if (!f.in_interior(x)) {
    throw UnsupportedInput("subdiff: " + x.to_string() +
                           " is not in the interior of the box");
  }
  const MaxAffineEval e = eval_max_affine(f, x, tol);
  SubdiffSet out;
  for (std::size_t k : e.active) {
    const Vector& s = f.pieces()[k].slope;
    if (std::find(out.generators.begin(), out.generators.end(), s) ==
        out.generators.end()) {
      out.generators.push_back(s);
      out.pieces.push_back(k);
    }
  }
  return out;
}

EpsMembershipCertificate eps_subdiff_member(const MaxAffineFunction& f,
                                            const Vector& x, const Vector& y,
                                            double eps,
                                            const ToleranceProfile& tol) {
  return eps_subdiff_member(f, conjugate_max_affine(f, tol), x, y, eps, tol);
}

EpsMembershipCertificate eps_subdiff_member(const MaxAffineFunction& f,
                                            const MaxAffineConjugate& fstar,
                                            const Vector& x, const Vector& y,
                                            double eps,
                                            const ToleranceProfile& tol) {
  require_eps(eps);
  if (x.size() != f.dim() || y.size() != f.dim()) {
    throw InputError("eps_subdiff_member: dimension mismatch");
  }
  const ExtReal fx = evaluate(f, x);
  if (!fx.is_finite()) {
    throw DomainError("eps_subdiff_member: " + x.to_string() + " is outside dom f");
  }
  const ExtReal fy = fstar(y);
  if (!fy.is_finite()) return make_certificate(ExtReal::infinity(), eps, tol);
  return make_certificate(fx.value() + fy.value() - dot(y, x), eps, tol);
}

Vector eps_subdiff_witness(const MaxAffineFunction& g, const Vector& xstar,
                           double eps, const ToleranceProfile& tol) {
  if (!(eps > 0.0)) throw InputError("eps_subdiff_witness: eps must be > 0");
  const MaxAffineEval e = eval_max_affine(g, xstar, tol);
  if (!e.value.is_finite()) {
    throw DomainError("eps_subdiff_witness: " + xstar.to_string() +
                      " is outside dom g");
  }
  const Vector y = g.pieces()[e.active.front()].slope;
  const auto cert = eps_subdiff_member(g, xstar, y, eps, tol);
  if (cert.verdict != Membership::kMember) {
    throw DomainError("eps_subdiff_witness: active slope failed the gap test (gap " +
                      cert.gap.to_string() + ")");
  }
  return y;
}

double directional_derivative(const MaxAffineFunction& f, const Vector& x,
                              const Vector& u, const ToleranceProfile& tol) {
  if (u.size() != f.dim()) throw InputError("directional_derivative: dimension mismatch");
  const SubdiffSet s = subdiff(f, x, tol);
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& a : s.generators) best = std::max(best, dot(a, u));
  return best;
}

DualitySwapReport duality_swap_check(const MaxAffineFunction& f,
                                     const Vector& x, const Vector& y,
                                     double eps, const ToleranceProfile& tol) {
  return duality_swap_check(f, conjugate_max_affine(f, tol), x, y, eps, tol);
}

DualitySwapReport duality_swap_check(const MaxAffineFunction& f,
                                     const MaxAffineConjugate& fstar,
                                     const Vector& x, const Vector& y,
                                     double eps, const ToleranceProfile& tol) {
  const EpsMembershipCertificate primal = eps_subdiff_member(f, fstar, x, y, eps, tol);

  const ExtReal fy = fstar(y);
  EpsMembershipCertificate dual = make_certificate(ExtReal::infinity(), eps, tol);
  if (fy.is_finite()) {
    const ExtReal fssx = biconjugate_at(fstar, x, tol);
    if (fssx.is_finite()) {
      dual = make_certificate(fy.value() + fssx.value() - dot(x, y), eps, tol);
    }
  }

  double diff = 0.0;
  double scale = 1.0;
  if (primal.gap.is_finite() != dual.gap.is_finite()) {
    diff = std::numeric_limits<double>::infinity();
  } else if (primal.gap.is_finite()) {
    diff = std::abs(primal.gap.value() - dual.gap.value());
    scale = std::max({1.0, std::abs(evaluate(f, x).value()), std::abs(fy.value()),
                      std::abs(dot(x, y))});
  }
  return {primal, dual, diff, diff <= tol.strict_tol * scale,
          primal.verdict == dual.verdict};
}

}  // namespace dualrep
