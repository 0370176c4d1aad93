#include "dualrep/conjugate.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linalg.h"

namespace dualrep {
namespace {

struct Hyperplane {
  std::vector<double> normal;
  double offset;
};

double vector_scale(const Vector& v) {
  double s = 1.0;
  for (double c : v) s = std::max(s, std::abs(c));
  return s;
}

bool near_equal(const Vector& a, const Vector& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol * std::max({1.0, std::abs(a[i]), std::abs(b[i])})) {
      return false;
    }
  }
  return true;
}

}  // namespace

GridFunction1D discrete_conjugate(const GridFunction1D& f,
                                  std::span<const double> dual_xs) {
  if (dual_xs.empty()) throw InputError("discrete_conjugate: empty dual grid");
  const auto& xs = f.xs();
  const auto& vs = f.values();
  std::vector<double> out(dual_xs.size());
  for (std::size_t j = 0; j < dual_xs.size(); ++j) {
    const double y = dual_xs[j];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) best = std::max(best, y * xs[i] - vs[i]);
    out[j] = best;
  }
  return GridFunction1D(std::vector<double>(dual_xs.begin(), dual_xs.end()),
                        std::move(out));
}

GridFunction1D fast_conjugate_1d(const GridFunction1D& f,
                                 std::span<const double> dual_xs) {
  if (dual_xs.empty()) throw InputError("fast_conjugate_1d: empty dual grid");
  const auto& xs = f.xs();
  const auto& vs = f.values();
  std::vector<EnvelopePoint> pts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) pts[i] = {xs[i], vs[i]};
  const std::vector<std::size_t> hull = lower_convex_envelope(pts, 0.0);

  std::vector<double> out(dual_xs.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < dual_xs.size(); ++j) {
    const double y = dual_xs[j];
    if (j > 0 && !(dual_xs[j - 1] < y)) {
      throw InputError("fast_conjugate_1d: dual grid must be strictly increasing");
    }
    // The maximizing envelope vertex moves right as y increases.
    while (k + 1 < hull.size() &&
           y * xs[hull[k + 1]] - vs[hull[k + 1]] >= y * xs[hull[k]] - vs[hull[k]]) {
      ++k;
    }
    out[j] = y * xs[hull[k]] - vs[hull[k]];
  }
  return GridFunction1D(std::vector<double>(dual_xs.begin(), dual_xs.end()),
                        std::move(out));
}

ConjugateReport conjugate_report(const GridFunction1D& f,
                                 std::span<const double> dual_xs,
                                 ConjugateMethod method) {
  GridFunction1D fstar = [&] {
    switch (method) {
      case ConjugateMethod::kBrute:
        return discrete_conjugate(f, dual_xs);
      case ConjugateMethod::kFast1D:
        return fast_conjugate_1d(f, dual_xs);
      case ConjugateMethod::kExactMaxAffine:
        break;
    }
    throw InputError("conjugate_report: grid functions use brute or fast1d");
  }();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = 0; j < fstar.size(); ++j) {
      const double gap =
          f.values()[i] + fstar.values()[j] - fstar.xs()[j] * f.xs()[i];
      worst = std::max(worst, -gap);
    }
  }
  return {std::move(fstar), worst, method};
}

std::vector<Vector> polyhedral_vertices(const MaxAffineFunction& f,
                                        const ToleranceProfile& tol) {
  if (!f.has_bounded_box()) {
    throw UnsupportedInput("polyhedral_vertices: box must be bounded");
  }
  const std::size_t d = f.dim();
  const auto& box = *f.box();
  const auto& pieces = f.pieces();

  std::vector<Hyperplane> planes;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> n(d, 0.0);
    n[i] = 1.0;
    planes.push_back({n, box[i].lo});
    planes.push_back({n, box[i].hi});
  }
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    for (std::size_t b = a + 1; b < pieces.size(); ++b) {
      if (pieces[a].slope == pieces[b].slope) continue;
      std::vector<double> n(d);
      for (std::size_t i = 0; i < d; ++i) n[i] = pieces[a].slope[i] - pieces[b].slope[i];
      planes.push_back({std::move(n), pieces[a].intercept - pieces[b].intercept});
    }
  }

  double box_scale = 1.0;
  for (const Interval& iv : box) {
    box_scale = std::max({box_scale, std::abs(iv.lo), std::abs(iv.hi)});
  }
  const double slack = 1e-9 * box_scale;

  std::vector<Vector> out;
  std::vector<double> a(d * d), rhs(d);
  linalg::for_each_subset(planes.size(), d, [&](std::span<const std::size_t> sub) {
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) a[r * d + c] = planes[sub[r]].normal[c];
      rhs[r] = planes[sub[r]].offset;
    }
    auto sol = linalg::solve(d, a, rhs);
    if (!sol) return;
    for (std::size_t i = 0; i < d; ++i) {
      if ((*sol)[i] < box[i].lo - slack || (*sol)[i] > box[i].hi + slack) return;
      (*sol)[i] = std::clamp((*sol)[i], box[i].lo, box[i].hi);
    }
    Vector v(std::move(*sol));
    for (const Vector& w : out) {
      if (near_equal(v, w, tol.strict_tol)) return;
    }
    out.push_back(std::move(v));
  });
  return out;
}

MaxAffineConjugate::MaxAffineConjugate(MaxAffineFunction f,
                                       const ToleranceProfile& tol)
    : f_(std::move(f)), tol_(tol), bounded_(f_.has_bounded_box()) {
  if (bounded_) {
    if (f_.dim() > kMaxBoxedDim) {
      throw UnsupportedInput("exact conjugation over a box is limited to d <= " +
                             std::to_string(kMaxBoxedDim));
    }
    vertices_ = polyhedral_vertices(f_, tol_);
    std::vector<AffinePiece> dual_pieces;
    for (const Vector& v : vertices_) {
      const double fv = evaluate(f_, v).value();
      vertex_values_.push_back(fv);
      dual_pieces.push_back({v, fv});
    }
    dual_.emplace(std::move(dual_pieces));
  } else if (f_.is_box_free()) {
    for (const AffinePiece& p : f_.pieces()) {
      slopes_.push_back(p.slope);
      intercepts_.push_back(p.intercept);
    }
  } else {
    throw UnsupportedInput(
        "conjugate of a max-affine function needs a bounded box or no box");
  }
}

ExtReal MaxAffineConjugate::operator()(const Vector& y) const {
  if (y.size() != f_.dim()) throw InputError("conjugate: dimension mismatch");
  if (bounded_) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      best = std::max(best, dot(y, vertices_[i]) - vertex_values_[i]);
    }
    if (vertices_.empty()) throw ImproperError("conjugate: empty vertex set");
    return best;
  }
  const auto v = linalg::hull_minimum(slopes_, intercepts_, y, tol_.strict_tol);
  if (!v) return ExtReal::infinity();
  return *v;
}

const MaxAffineFunction& MaxAffineConjugate::as_max_affine() const {
  if (!dual_) {
    throw UnsupportedInput("conjugate of a box-free function is not max-affine");
  }
  return *dual_;
}

DenseGridCheck MaxAffineConjugate::cross_check(const Vector& y) const {
  if (!bounded_) throw UnsupportedInput("cross_check needs a bounded box");
  const std::size_t d = f_.dim();
  const std::size_t n = kGridPointsPerAxis;
  const auto& box = *f_.box();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> c(d);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  while (true) {
    for (std::size_t i = 0; i < d; ++i) {
      const double t = static_cast<double>(idx[i]) / static_cast<double>(n - 1);
      c[i] = box[i].lo + t * (box[i].hi - box[i].lo);
    }
    const Vector x(c);
    best = std::max(best, dot(y, x) - evaluate(f_, x).value());
    ++count;
    std::size_t k = d;
    bool done = true;
    while (k > 0) {
      --k;
      if (++idx[k] < n) {
        done = false;
        break;
      }
      idx[k] = 0;
    }
    if (done) break;
  }
  const double exact = (*this)(y).value();
  return {exact, best, count, best <= exact + tol_.eq_tol * vector_scale(y)};
}

MaxAffineConjugate conjugate_max_affine(const MaxAffineFunction& f,
                                        const ToleranceProfile& tol) {
  return MaxAffineConjugate(f, tol);
}

ExtReal hull_conjugate(const MaxAffineFunction& f, const Vector& y,
                       const ToleranceProfile& tol) {
  if (!f.is_box_free()) throw UnsupportedInput("hull_conjugate: f has a box");
  std::vector<Vector> slopes;
  std::vector<double> intercepts;
  for (const AffinePiece& p : f.pieces()) {
    slopes.push_back(p.slope);
    intercepts.push_back(p.intercept);
  }
  const auto v = linalg::hull_minimum(slopes, intercepts, y, tol.strict_tol);
  if (!v) return ExtReal::infinity();
  return *v;
}

BiconjugateReport biconjugate_check(const GridFunction1D& f,
                                    const ToleranceProfile& tol) {
  const auto& xs = f.xs();
  const auto& vs = f.values();
  std::vector<EnvelopePoint> pts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) pts[i] = {xs[i], vs[i]};
  const std::vector<std::size_t> hull = lower_convex_envelope(pts, tol);

  std::vector<double> slopes;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    slopes.push_back((vs[hull[k + 1]] - vs[hull[k]]) / (xs[hull[k + 1]] - xs[hull[k]]));
  }
  std::vector<double> dual;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    dual.push_back(slopes[k]);
    if (k + 1 < slopes.size()) dual.push_back(0.5 * (slopes[k] + slopes[k + 1]));
  }
  if (dual.empty()) dual.push_back(0.0);
  std::sort(dual.begin(), dual.end());
  dual.erase(std::unique(dual.begin(), dual.end()), dual.end());

  const GridFunction1D fstar = discrete_conjugate(f, dual);
  GridFunction1D fss = discrete_conjugate(fstar, xs);

  double max_excess = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> equal;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double diff = fss.values()[i] - vs[i];
    max_excess = std::max(max_excess, diff);
    if (-diff <= tol.eq_tol) equal.push_back(i);
  }
  return {std::move(fss), std::move(dual), max_excess, std::move(equal), hull};
}

double young_fenchel_gap(const Evaluator& f, const Evaluator& fstar,
                         const Vector& x, const Vector& y) {
  const ExtReal fx = f(x);
  const ExtReal fy = fstar(y);
  if (!fx.is_finite() || !fy.is_finite()) {
    throw DomainError("young_fenchel_gap: f(x) and f*(y) must be finite");
  }
  return fx.value() + fy.value() - dot(y, x);
}

}  // namespace dualrep
