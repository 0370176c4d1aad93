#include "dualrep/core.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace dualrep {
namespace {

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw InputError(std::string(what) + ": dimension mismatch (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ToleranceProfile::validate() const {
  if (!(strict_tol > 0.0) || !(strict_tol <= eq_tol) || !std::isfinite(eq_tol)) {
    throw InputError("tolerance profile requires 0 < strict_tol <= eq_tol");
  }
}

Vector::Vector(std::initializer_list<double> coords)
    : Vector(std::vector<double>(coords)) {}

Vector::Vector(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw InputError("vector must have length >= 1");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw InputError("vector coordinates must be finite");
  }
}

Vector Vector::zeros(std::size_t dim) {
  return Vector(std::vector<double>(dim, 0.0));
}

Vector Vector::unit(std::size_t dim, std::size_t axis, double sign) {
  std::vector<double> c(dim, 0.0);
  c.at(axis) = sign;
  return Vector(std::move(c));
}

std::string Vector::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ", ";
    out += format_double(coords_[i]);
  }
  return out + ")";
}

Vector operator+(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "vector sum");
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
  return Vector(std::move(c));
}

Vector operator-(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "vector difference");
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
  return Vector(std::move(c));
}

Vector operator*(double s, const Vector& a) {
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = s * a[i];
  return Vector(std::move(c));
}

double dot(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

double distance(const Vector& a, const Vector& b) { return norm(a - b); }

ExtReal::ExtReal(double value) : value_(value) {
  if (!std::isfinite(value)) {
    throw DomainError("ExtReal holds finite reals or +inf only");
  }
}

ExtReal ExtReal::infinity() {
  ExtReal r;
  r.infinite_ = true;
  return r;
}

double ExtReal::value() const {
  if (infinite_) throw DomainError("value is +inf");
  return value_;
}

bool operator<(const ExtReal& a, const ExtReal& b) {
  if (a.infinite_) return false;
  if (b.infinite_) return true;
  return a.value_ < b.value_;
}

std::string ExtReal::to_string() const {
  return infinite_ ? std::string("+inf") : format_double(value_);
}

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

double AffinePiece::operator()(const Vector& x) const {
  return dot(slope, x) - intercept;
}

MaxAffineFunction::MaxAffineFunction(std::vector<AffinePiece> pieces,
                                     std::optional<Box> box)
    : box_(std::move(box)) {
  if (pieces.empty()) throw InputError("max-affine function needs a piece");
  dim_ = pieces.front().slope.size();
  for (auto& p : pieces) {
    if (p.slope.size() != dim_) {
      throw InputError("max-affine pieces have inconsistent dimensions");
    }
    if (!std::isfinite(p.intercept)) {
      throw InputError("max-affine intercepts must be finite");
    }
    if (std::find(pieces_.begin(), pieces_.end(), p) == pieces_.end()) {
      pieces_.push_back(std::move(p));
    }
  }
  if (box_) {
    if (box_->size() != dim_) throw InputError("box dimension mismatch");
    for (const Interval& iv : *box_) {
      if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi)) {
        throw InputError("box must have nonempty interior (lo < hi)");
      }
    }
  }
}

bool MaxAffineFunction::in_box(const Vector& x) const {
  if (x.size() != dim_) throw InputError("point dimension mismatch");
  if (!box_) return true;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (x[i] < (*box_)[i].lo || x[i] > (*box_)[i].hi) return false;
  }
  return true;
}

bool MaxAffineFunction::in_interior(const Vector& x) const {
  if (x.size() != dim_) throw InputError("point dimension mismatch");
  if (!box_) return true;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!(x[i] > (*box_)[i].lo && x[i] < (*box_)[i].hi)) return false;
  }
  return true;
}

bool MaxAffineFunction::has_bounded_box() const {
  return box_ && std::all_of(box_->begin(), box_->end(),
                             [](const Interval& iv) { return iv.bounded(); });
}

bool MaxAffineFunction::is_box_free() const {
  return !box_ || std::all_of(box_->begin(), box_->end(), [](const Interval& iv) {
           return std::isinf(iv.lo) && std::isinf(iv.hi);
         });
}

MaxAffineEval eval_max_affine(const MaxAffineFunction& f, const Vector& x,
                              const ToleranceProfile& tol) {
  if (x.size() != f.dim()) {
    throw InputError("eval_max_affine: dimension mismatch");
  }
  if (!f.in_box(x)) return {ExtReal::infinity(), {}};
  const auto& pieces = f.pieces();
  std::vector<double> values(pieces.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    values[k] = pieces[k](x);
    best = std::max(best, values[k]);
  }
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (values[k] >= best - tol.strict_tol) active.push_back(k);
  }
  return {ExtReal(best), std::move(active)};
}

ExtReal evaluate(const MaxAffineFunction& f, const Vector& x) {
  return eval_max_affine(f, x).value;
}

GridFunction1D::GridFunction1D(std::vector<double> xs, std::vector<double> values)
    : xs_(std::move(xs)), values_(std::move(values)) {
  if (xs_.empty() || xs_.size() != values_.size()) {
    throw InputError("grid function needs equal-length, nonempty xs and values");
  }
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i]) || !std::isfinite(values_[i])) {
      throw InputError("grid function entries must be finite");
    }
    if (i > 0 && !(xs_[i - 1] < xs_[i])) {
      throw InputError("grid abscissae must be strictly increasing");
    }
  }
}

OperatorSample::OperatorSample(std::vector<DualPair> pairs, std::size_t base)
    : pairs_(std::move(pairs)), base_(base) {
  if (pairs_.empty()) throw InputError("operator sample needs at least one pair");
  dim_ = pairs_.front().xstar.size();
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].xstar.size() != dim_ || pairs_[i].x.size() != dim_) {
      throw InputError("operator sample pairs have inconsistent dimensions");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (pairs_[j] == pairs_[i]) {
        throw InputError("operator sample contains duplicate pair " +
                         std::to_string(i));
      }
    }
  }
  if (base_ >= pairs_.size()) throw InputError("operator sample base out of range");
}

OperatorSample OperatorSample::with_base(std::size_t base) const {
  return OperatorSample(pairs_, base);
}

std::vector<std::size_t> lower_convex_envelope(
    std::span<const EnvelopePoint> points, double tol) {
  if (points.empty()) throw InputError("lower_convex_envelope: no points");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].abscissa < points[b].abscissa;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (points[order[i - 1]].abscissa == points[order[i]].abscissa) {
      throw InputError("lower_convex_envelope: abscissae must be distinct");
    }
  }

  // Monotone chain; pop the middle point while it is not strictly below the
  // chord from its predecessor to the incoming point.
  std::vector<std::size_t> hull;
  for (std::size_t idx : order) {
    const EnvelopePoint& c = points[idx];
    while (hull.size() >= 2) {
      const EnvelopePoint& a = points[hull[hull.size() - 2]];
      const EnvelopePoint& b = points[hull.back()];
      const double t = (b.abscissa - a.abscissa) / (c.abscissa - a.abscissa);
      const double chord = a.value + t * (c.value - a.value);
      if (chord - b.value <= tol) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(idx);
  }
  return hull;
}

std::vector<std::size_t> lower_convex_envelope(
    std::span<const EnvelopePoint> points, const ToleranceProfile& tol) {
  return lower_convex_envelope(points, tol.strict_tol);
}

GridSpec GridSpec::parse(const std::string& text) {
  double v[3];
  std::size_t start = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t colon = text.find(':', start);
    if ((k < 2) != (colon != std::string::npos)) {
      throw InputError("grid \"" + text + "\" must have the form lo:hi:step");
    }
    const std::string part =
        text.substr(start, k < 2 ? colon - start : std::string::npos);
    std::istringstream is(part);
    is >> v[k];
    if (!is || !(is >> std::ws).eof()) {
      throw InputError("grid \"" + text + "\": cannot parse \"" + part + "\"");
    }
    start = colon + 1;
  }
  GridSpec g{v[0], v[1], v[2]};
  if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || !(g.step > 0) ||
      g.hi < g.lo) {
    throw InputError("grid \"" + text + "\" needs finite lo <= hi and step > 0");
  }
  return g;
}

std::vector<double> GridSpec::points(const ToleranceProfile& tol) const {
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double p = lo + static_cast<double>(i) * step;
    if (p > hi + tol.strict_tol * std::max(1.0, std::abs(hi))) break;
    out.push_back(std::min(p, hi));
    if (out.size() > 10'000'000) throw InputError("grid too large");
  }
  if (!out.empty() && std::abs(out.back() - hi) <= tol.strict_tol * std::max(1.0, std::abs(hi))) {
    out.back() = hi;
  }
  return out;
}

std::string GridSpec::to_string() const {
  return format_double(lo) + ":" + format_double(hi) + ":" + format_double(step);
}

std::vector<Vector> tensor_grid(const GridSpec& axis, std::size_t dim,
                                const ToleranceProfile& tol) {
  const std::vector<double> pts = axis.points(tol);
  std::vector<Vector> out;
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    std::vector<double> c(dim);
    for (std::size_t i = 0; i < dim; ++i) c[i] = pts[idx[i]];
    out.emplace_back(std::move(c));
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++idx[k] < pts.size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
  }
}

}  // namespace dualrep
