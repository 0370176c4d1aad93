#include "linalg.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace dualrep::linalg {
namespace {

constexpr double kRankThreshold = 1e-10;

// In-place Gaussian elimination with partial pivoting on a k x k system
// (k <= 8 in practice). Returns false when a pivot underflows `pivot_tol`
// relative to the largest entry of the matrix.
bool gauss_solve(std::size_t k, double* m, double* rhs) {
  double scale = 0.0;
  for (std::size_t i = 0; i < k * k; ++i) scale = std::max(scale, std::abs(m[i]));
  if (scale == 0.0) return false;
  const double pivot_tol = kRankThreshold * scale;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(m[r * k + col]) > std::abs(m[piv * k + col])) piv = r;
    }
    if (std::abs(m[piv * k + col]) <= pivot_tol) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(m[piv * k + c], m[col * k + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < k; ++r) {
      const double factor = m[r * k + col] / m[col * k + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < k; ++c) m[r * k + c] -= factor * m[col * k + c];
      rhs[r] -= factor * rhs[col];
    }
  }
  for (std::size_t i = k; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < k; ++c) s -= m[i * k + c] * rhs[c];
    rhs[i] = s / m[i * k + i];
  }
  return true;
}

}  // namespace

std::optional<std::vector<double>> solve(std::size_t n,
                                         std::span<const double> a,
                                         std::span<const double> b) {
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs(i) = b[i];
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i * n + j];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(kRankThreshold);
  if (lu.rank() < static_cast<Eigen::Index>(n)) return std::nullopt;
  const Eigen::VectorXd sol = lu.solve(rhs);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(sol(i))) return std::nullopt;
    out[i] = sol(i);
  }
  return out;
}

std::size_t affine_rank(std::span<const Vector> points) {
  if (points.size() <= 1) return 0;
  const std::size_t d = points.front().size();
  Eigen::MatrixXd m(d, points.size() - 1);
  for (std::size_t j = 1; j < points.size(); ++j) {
    for (std::size_t i = 0; i < d; ++i) m(i, j - 1) = points[j][i] - points[0][i];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(kRankThreshold);
  return static_cast<std::size_t>(lu.rank());
}

std::optional<std::vector<double>> barycentric(
    std::span<const Vector* const> simplex, const Vector& y, double tol) {
  const std::size_t k = simplex.size();
  const std::size_t d = y.size();
  const Vector& p0 = *simplex[0];
  double scale = 1.0;
  for (const Vector* p : simplex) {
    for (double c : *p) scale = std::max(scale, std::abs(c));
  }
  for (double c : y) scale = std::max(scale, std::abs(c));

  std::vector<double> mu(k - 1, 0.0);
  if (k > 1) {
    const std::size_t m = k - 1;
    double mat[64];
    double rhs[8];
    if (m > 8) return std::nullopt;
    if (m == d) {
      // Full-dimensional simplex: solve the edge system directly.
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          mat[i * m + j] = (*simplex[j + 1])[i] - p0[i];
        }
        rhs[i] = y[i] - p0[i];
      }
    } else {
      // Lower-dimensional face: normal equations of the edge system.
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          double s = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            s += ((*simplex[a + 1])[i] - p0[i]) * ((*simplex[b + 1])[i] - p0[i]);
          }
          mat[a * m + b] = s;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          s += ((*simplex[a + 1])[i] - p0[i]) * (y[i] - p0[i]);
        }
        rhs[a] = s;
      }
    }
    if (!gauss_solve(m, mat, rhs)) return std::nullopt;
    std::copy(rhs, rhs + m, mu.begin());
  }

  // Residual in the original coordinates.
  double resid = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double r = p0[i] - y[i];
    for (std::size_t j = 0; j + 1 < k; ++j) r += mu[j] * ((*simplex[j + 1])[i] - p0[i]);
    resid = std::max(resid, std::abs(r));
  }
  if (resid > tol * scale) return std::nullopt;

  std::vector<double> w(k);
  double rest = 1.0;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    w[j + 1] = mu[j];
    rest -= mu[j];
  }
  w[0] = rest;
  for (double wi : w) {
    if (wi < -tol) return std::nullopt;
  }
  return w;
}

void for_each_subset(std::size_t n, std::size_t k,
                     const std::function<void(std::span<const std::size_t>)>& fn) {
  if (k == 0 || k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

namespace {

std::size_t choose(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c > 1e12 ? static_cast<std::size_t>(1e12) : static_cast<std::size_t>(c);
}

// Two-phase dense simplex with Bland's rule on
//   min c.w  s.t.  sum w_k p_k = y, sum w_k = 1, w >= 0.
// The final basis is re-solved with barycentric() so the value carries the
// same accuracy as the enumeration path.
std::optional<double> hull_minimum_lp(std::span<const Vector> points,
                                      std::span<const double> values,
                                      std::span<const std::size_t> pool,
                                      const Vector& y, double tol) {
  const std::size_t d = y.size();
  const std::size_t rows = d + 1;
  const std::size_t n = pool.size();
  const std::size_t cols = n + rows + 1;  // variables, artificials, rhs
  double scale = 1.0;
  for (std::size_t k : pool) {
    for (double c : points[k]) scale = std::max(scale, std::abs(c));
  }
  for (double c : y) scale = std::max(scale, std::abs(c));
  const double piv_tol = 1e-12 * scale;

  std::vector<double> t((rows + 1) * cols, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * cols + c]; };
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double rhs = r < d ? y[r] : 1.0;
    const double sign = rhs < 0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) at(r, k) = sign * (r < d ? points[pool[k]][r] : 1.0);
    at(r, n + r) = 1.0;
    at(r, cols - 1) = sign * rhs;
    basis[r] = n + r;
  }

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c < cols; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols; ++c) at(r, c) -= f * at(pr, c);
    }
    basis[pr] = pc;
  };
  // objective row holds reduced costs; entering columns limited to `limit`
  auto optimize = [&](std::size_t limit) {
    for (int iter = 0; iter < 100000; ++iter) {
      std::size_t enter = limit;
      for (std::size_t c = 0; c < limit; ++c) {
        if (at(rows, c) < -1e-13 * scale) {
          enter = c;
          break;
        }
      }
      if (enter == limit) return;
      std::size_t leave = rows;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows; ++r) {
        if (at(r, enter) > piv_tol) {
          const double ratio = at(r, cols - 1) / at(r, enter);
          if (ratio < best || (ratio == best && basis[r] < basis[leave])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave == rows) return;  // unbounded cannot happen on the simplex
      pivot(leave, enter);
    }
  };

  // phase 1: minimize the sum of artificials
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += at(r, c);
    at(rows, c) = c >= n && c < n + rows ? 0.0 : -s;
  }
  optimize(n);
  if (-at(rows, cols - 1) > tol * scale * static_cast<double>(rows)) return std::nullopt;
  // drive zero-level artificials out of the basis
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] < n) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (std::abs(at(r, c)) > piv_tol) {
        pivot(r, c);
        break;
      }
    }
  }

  // phase 2 (a row whose artificial could not leave is redundant; the
  // artificial column is never allowed to re-enter)
  for (std::size_t c = 0; c < cols; ++c) at(rows, c) = c < n ? values[pool[c]] : 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] >= n) continue;
    const double f = at(rows, basis[r]);
    for (std::size_t c = 0; c < cols; ++c) at(rows, c) -= f * at(r, c);
  }
  optimize(n);

  std::vector<const Vector*> simplex;
  std::vector<std::size_t> used;
  double value = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] >= n) continue;
    value += at(r, cols - 1) * values[pool[basis[r]]];
    simplex.push_back(&points[pool[basis[r]]]);
    used.push_back(pool[basis[r]]);
  }
  if (!simplex.empty()) {
    if (const auto w = barycentric(simplex, y, tol)) {
      double v = 0.0;
      for (std::size_t j = 0; j < used.size(); ++j) v += (*w)[j] * values[used[j]];
      return v;
    }
  }
  return value;
}

}  // namespace

std::optional<double> hull_minimum(std::span<const Vector> points,
                                   std::span<const double> values,
                                   const Vector& y, double tol,
                                   std::optional<std::size_t> exclude) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!exclude || *exclude != i) pool.push_back(i);
  }
  const std::size_t d = y.size();
  if (pool.empty()) return std::nullopt;
  if (choose(pool.size(), std::min(d + 1, pool.size())) > 4096) {
    return hull_minimum_lp(points, values, pool, y, tol);
  }
  std::optional<double> best;
  std::vector<const Vector*> simplex;
  for (std::size_t k = 1; k <= std::min(d + 1, pool.size()); ++k) {
    for_each_subset(pool.size(), k, [&](std::span<const std::size_t> sub) {
      simplex.clear();
      for (std::size_t s : sub) simplex.push_back(&points[pool[s]]);
      const auto w = barycentric(simplex, y, tol);
      if (!w) return;
      double v = 0.0;
      for (std::size_t j = 0; j < k; ++j) v += (*w)[j] * values[pool[sub[j]]];
      if (!best || v < *best) best = v;
    });
  }
  return best;
}

}  // namespace dualrep::linalg
