// Shared value types for polyhedral convex analysis on R^d: vectors, the
// extended reals (-inf excluded), max-affine functions with an optional box
// domain, sampled 1-D functions and finite operator graphs.
//
// Everything in this header is an immutable value. All free functions are
// pure and may be called concurrently.

#ifndef DUALREP_CORE_H_
#define DUALREP_CORE_H_

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualrep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, NaN coordinates, bad grids.
class InputError : public Error {
 public:
  using Error::Error;
};

// Well-formed input outside what the implementation computes exactly
// (unbounded boxes, boundary points, dimensions above the enumeration cap).
class UnsupportedInput : public Error {
 public:
  using Error::Error;
};

// A finite value was required but +inf was produced or supplied.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A theorem hypothesis checked up front did not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A supremum over an empty set (the result would be -inf).
class ImproperError : public Error {
 public:
  using Error::Error;
};

struct ToleranceProfile {
  double eq_tol = 1e-9;
  double strict_tol = 1e-12;

  // Throws InputError unless 0 < strict_tol <= eq_tol.
  void validate() const;
};

class Vector {
 public:
  Vector(std::initializer_list<double> coords);
  explicit Vector(std::vector<double> coords);

  static Vector zeros(std::size_t dim);
  static Vector unit(std::size_t dim, std::size_t axis, double sign = 1.0);

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  std::vector<double>::const_iterator begin() const { return coords_.begin(); }
  std::vector<double>::const_iterator end() const { return coords_.end(); }

  friend bool operator==(const Vector& a, const Vector& b) = default;
  // Lexicographic; used only for deterministic tie-breaking.
  friend bool operator<(const Vector& a, const Vector& b) {
    return a.coords_ < b.coords_;
  }

  std::string to_string() const;

 private:
  std::vector<double> coords_;
};

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);

// Left-to-right summation, so results are reproducible bit for bit.
double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
double distance(const Vector& a, const Vector& b);

// A real number or +inf.
class ExtReal {
 public:
  ExtReal(double value);  // NOLINT: implicit from finite doubles
  static ExtReal infinity();

  bool is_finite() const { return !infinite_; }
  // Throws DomainError on +inf.
  double value() const;

  friend bool operator==(const ExtReal& a, const ExtReal& b) = default;
  friend bool operator<(const ExtReal& a, const ExtReal& b);

  std::string to_string() const;

 private:
  ExtReal() = default;
  bool infinite_ = false;
  double value_ = 0.0;
};

// Closed interval; either bound may be infinite.
struct Interval {
  double lo;
  double hi;

  bool bounded() const;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct AffinePiece {
  Vector slope;
  double intercept;

  // <slope, x> - intercept
  double operator()(const Vector& x) const;
  friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
};

// f(x) = max_k (<slope_k, x> - intercept_k) on the box, +inf outside.
// Identical pieces are merged on construction, keeping first occurrences.
class MaxAffineFunction {
 public:
  using Box = std::vector<Interval>;

  explicit MaxAffineFunction(std::vector<AffinePiece> pieces,
                             std::optional<Box> box = std::nullopt);

  std::size_t dim() const { return dim_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const std::optional<Box>& box() const { return box_; }

  bool in_box(const Vector& x) const;
  // Strictly inside every finite bound.
  bool in_interior(const Vector& x) const;
  bool has_bounded_box() const;
  // True when no box is present or every bound is infinite.
  bool is_box_free() const;

 private:
  std::size_t dim_;
  std::vector<AffinePiece> pieces_;
  std::optional<Box> box_;
};

struct MaxAffineEval {
  ExtReal value;
  // Pieces within strict_tol of the maximum, ascending. Empty outside the box.
  std::vector<std::size_t> active;
};

MaxAffineEval eval_max_affine(const MaxAffineFunction& f, const Vector& x,
                              const ToleranceProfile& tol = {});

// Shorthand for eval_max_affine(f, x).value.
ExtReal evaluate(const MaxAffineFunction& f, const Vector& x);

// Samples of a function of one variable on a strictly increasing grid.
class GridFunction1D {
 public:
  GridFunction1D(std::vector<double> xs, std::vector<double> values);

  std::size_t size() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> xs_;
  std::vector<double> values_;
};

// (x*, x) with x one of the values of T at x*.
struct DualPair {
  Vector xstar;
  Vector x;

  friend bool operator==(const DualPair&, const DualPair&) = default;
};

// A finite piece of the graph of a set-valued T : R^d -> 2^(R^d) with a
// distinguished base pair.
class OperatorSample {
 public:
  OperatorSample(std::vector<DualPair> pairs, std::size_t base);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return pairs_.size(); }
  const std::vector<DualPair>& pairs() const { return pairs_; }
  const DualPair& operator[](std::size_t i) const { return pairs_[i]; }
  std::size_t base() const { return base_; }

  OperatorSample with_base(std::size_t base) const;

 private:
  std::size_t dim_;
  std::vector<DualPair> pairs_;
  std::size_t base_;
};

struct EnvelopePoint {
  double abscissa;
  double value;
};

// Indices of the strict vertices of the lower convex envelope, sorted by
// abscissa. A point within `tol` (vertically) of the chord joining its
// neighbours is not a vertex.
std::vector<std::size_t> lower_convex_envelope(
    std::span<const EnvelopePoint> points, double tol);
std::vector<std::size_t> lower_convex_envelope(
    std::span<const EnvelopePoint> points, const ToleranceProfile& tol = {});

// Inclusive grid lo, lo+step, ..., hi (hi kept when within strict_tol).
struct GridSpec {
  double lo;
  double hi;
  double step;

  // Parses "lo:hi:step".
  static GridSpec parse(const std::string& text);
  std::vector<double> points(const ToleranceProfile& tol = {}) const;
  std::string to_string() const;
};

// Cartesian product of the same axis grid in `dim` dimensions, last
// coordinate varying fastest.
std::vector<Vector> tensor_grid(const GridSpec& axis, std::size_t dim,
                                const ToleranceProfile& tol = {});

}  // namespace dualrep

#endif  // DUALREP_CORE_H_
