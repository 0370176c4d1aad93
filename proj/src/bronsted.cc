#include "dualrep/bronsted.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#include "dualrep/conjugate.h"
#include "dualrep/exposed.h"
#include "dualrep/subdifferential.h"
#include "linalg.h"

namespace dualrep {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Vector> active_slopes(const MaxAffineFunction& g, const Vector& xstar,
                                  const ToleranceProfile& tol) {
  std::vector<Vector> out;
  for (std::size_t k : eval_max_affine(g, xstar, tol).active) {
    const Vector& s = g.pieces()[k].slope;
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

// Active slopes first, then lattice points on the segments between them.
std::vector<Vector> exact_functionals(const MaxAffineFunction& g, const Vector& xstar,
                                      std::size_t lattice, const ToleranceProfile& tol) {
  std::vector<Vector> out = active_slopes(g, xstar, tol);
  const std::size_t m = out.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      for (std::size_t k = 1; k + 1 < lattice; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(lattice - 1);
        Vector v = (1.0 - t) * out[a] + t * out[b];
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
      }
    }
  }
  return out;
}

bool lex_less(const DualPair& a, const DualPair& b) {
  if (a.xstar == b.xstar) return a.x < b.x;
  return a.xstar < b.xstar;
}

// Visits every exact pair at the nodes of the nested grids. Level l has
// half-width radius / factor^l around center(), queried at the start of the
// level. Stops as soon as visit returns true.
void nested_grid_search(const MaxAffineFunction& g, double radius,
                        const SearchOptions& o, const ToleranceProfile& tol,
                        const std::function<Vector()>& center,
                        const std::function<bool(const DualPair&)>& visit) {
  const std::size_t d = g.dim();
  const std::size_t p = o.points_per_axis;
  double r = radius;
  for (std::size_t level = 0; level < o.levels; ++level, r /= o.factor) {
    const Vector c = center();
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> coords(d);
    while (true) {
      for (std::size_t i = 0; i < d; ++i) {
        const double u = p == 1 ? 0.0
                                : 2.0 * static_cast<double>(idx[i]) /
                                          static_cast<double>(p - 1) - 1.0;
        coords[i] = c[i] + r * u;
      }
      const Vector node(coords);
      if (g.in_interior(node)) {
        for (Vector& x : exact_functionals(g, node, o.hull_points_per_edge, tol)) {
          if (visit({node, std::move(x)})) return;
        }
      }
      std::size_t k = d;
      while (k > 0 && ++idx[k - 1] == p) idx[--k] = 0;
      if (k == 0) break;
    }
  }
}

void validate_options(const SearchOptions& o) {
  if (o.points_per_axis == 0 || o.hull_points_per_edge < 2 || !(o.factor > 1.0)) {
    throw InputError("search options: need points_per_axis >= 1, "
                     "hull_points_per_edge >= 2 and factor > 1");
  }
}

void validate_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InputError("eps must be finite and >= 0");
}

double gap_at(const MaxAffineFunction& g, const MaxAffineConjugate& conj,
              const Vector& xstar, const Vector& x) {
  const ExtReal gx = evaluate(g, xstar);
  const ExtReal cx = conj(x);
  if (!gx.is_finite() || !cx.is_finite()) return kInf;
  return gx.value() + cx.value() - dot(x, xstar);
}

bool is_exact(const MaxAffineFunction& g, const MaxAffineConjugate& conj,
              const DualPair& p, const ToleranceProfile& tol) {
  return gap_at(g, conj, p.xstar, p.x) <= tol.strict_tol;
}

BoundCheck upper(std::string name, double value, double bound,
                 const ToleranceProfile& tol) {
  return {std::move(name), value <= bound + tol.strict_tol, value, bound, bound - value};
}

BoundCheck strict_upper(std::string name, double value, double bound,
                        const ToleranceProfile& tol) {
  return {std::move(name), bound - value > tol.strict_tol, value, bound, bound - value};
}

std::vector<Vector> probe_directions(std::size_t d, std::uint64_t seed) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < d; ++i) {
    out.push_back(Vector::unit(d, i, 1.0));
    out.push_back(Vector::unit(d, i, -1.0));
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 10; ++k) out.push_back(random_unit(d, rng));
  return out;
}

struct BorweinInputs {
  const Vector& xstar0;
  const Vector& x0;
  double eps;
  double beta;
  double g0;       // g(x0*)
  double gstar_x0;  // g*(x0)
  const std::vector<Vector>& probes;
};

std::vector<BoundCheck> borwein_bounds(const MaxAffineFunction& g,
                                       const MaxAffineConjugate& conj,
                                       const BorweinInputs& in, const DualPair& p,
                                       const ToleranceProfile& tol) {
  const double se = std::sqrt(in.eps);
  const double gz = evaluate(g, p.xstar).value();
  const Vector dx = p.x - in.x0;
  const Vector dxs = p.xstar - in.xstar0;
  double probed = 0.0;
  for (const Vector& u : in.probes) probed = std::max(probed, std::abs(dot(dx, u)));

  const double gap_e = gap_at(g, conj, p.xstar, p.x);
  std::vector<BoundCheck> out;
  out.push_back({"i", gap_e <= tol.strict_tol, gap_e, 0.0, -gap_e});
  out.push_back(upper("ii", norm(dxs), se * (1.0 + in.beta * norm(in.xstar0)), tol));
  out.push_back(upper("iii", std::abs(gz - in.g0),
                      se * (norm(in.x0) + in.beta * std::abs(dot(in.xstar0, in.x0))) +
                          2.0 * in.eps,
                      tol));
  out.push_back(upper("iv", norm(dx), se, tol));
  out.push_back(upper("v", probed, se, tol));
  out.push_back(upper("vi", gz + in.gstar_x0 - dot(in.x0, p.xstar), 2.0 * in.eps, tol));
  out.push_back(upper("vii", std::abs(dot(dx, dxs)), in.eps, tol));
  return out;
}

std::size_t count_passes(const std::vector<BoundCheck>& checks) {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; }));
}

double min_margin(const std::vector<BoundCheck>& checks) {
  double m = kInf;
  for (const BoundCheck& c : checks) m = std::min(m, c.margin);
  return m;
}

double require_finite_value(const MaxAffineFunction& g, const Vector& xstar,
                            const char* what) {
  const ExtReal v = evaluate(g, xstar);
  if (!v.is_finite()) {
    throw DomainError(std::string(what) + ": " + xstar.to_string() + " is outside dom g");
  }
  return v.value();
}

void require_dim(const MaxAffineFunction& g, const Vector& v, const char* what) {
  if (v.size() != g.dim()) throw InputError(std::string(what) + ": dimension mismatch");
}

struct LemmaSearch {
  std::function<std::vector<BoundCheck>(const DualPair&)> checks;
  std::optional<DualPair> best;
  std::vector<BoundCheck> best_checks;
  double best_score = -kInf;
  std::size_t count = 0;

  static bool all_pass(const std::vector<BoundCheck>& c) {
    return count_passes(c) == c.size();
  }

  // true once a candidate meets every check
  bool consider(const DualPair& p) {
    ++count;
    std::vector<BoundCheck> c = checks(p);
    const double score = min_margin(c);
    if (!best || score > best_score) {
      best = p;
      best_checks = std::move(c);
      best_score = score;
    }
    return all_pass(best_checks);
  }
};

LemmaResult finish_lemma(LemmaSearch& s, const SearchOptions& o, double inf,
                         std::string grid) {
  const bool ok = s.best && LemmaSearch::all_pass(s.best_checks);
  const SearchOutcome outcome = ok ? SearchOutcome::kSuccess
                                   : (o.constructive_candidates ? SearchOutcome::kFalsified
                                                                : SearchOutcome::kGridResolution);
  return {s.best, s.best_checks, outcome, inf, std::move(grid), s.count};
}

// Smallest norm over conv(slopes of g). Caratheodory again: the minimizer
// lies on some affinely independent subset of at most d+1 slopes, where it
// solves min |sum w_j s_j|^2 subject to sum w_j = 1.
double min_slope_norm(const MaxAffineFunction& g) {
  std::vector<Vector> slopes;
  for (const AffinePiece& p : g.pieces()) slopes.push_back(p.slope);
  const std::size_t d = g.dim();
  double best = kInf;
  for (std::size_t k = 1; k <= std::min(d + 1, slopes.size()); ++k) {
    linalg::for_each_subset(slopes.size(), k, [&](std::span<const std::size_t> sub) {
      const std::size_t n = k + 1;
      std::vector<double> a(n * n, 0.0), b(n, 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) a[i * n + j] = dot(slopes[sub[i]], slopes[sub[j]]);
        a[i * n + k] = 1.0;
        a[k * n + i] = 1.0;
      }
      b[k] = 1.0;
      const auto w = linalg::solve(n, a, b);
      if (!w) return;
      Vector x = Vector::zeros(d);
      for (std::size_t i = 0; i < k; ++i) {
        if ((*w)[i] < -1e-12) return;
        x = x + (*w)[i] * slopes[sub[i]];
      }
      best = std::min(best, norm(x));
    });
  }
  return best;
}

}  // namespace

std::string SearchOptions::describe(std::size_t dim, double radius) const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu levels, %zu^%zu nodes, factor %g, radius %.6g%s",
                levels, points_per_axis, dim, factor, radius,
                constructive_candidates ? ", proximal candidates" : "");
  return buf;
}

const char* to_string(SearchOutcome outcome) {
  switch (outcome) {
    case SearchOutcome::kSuccess:
      return "success";
    case SearchOutcome::kGridResolution:
      return "grid_resolution";
    case SearchOutcome::kFalsified:
      return "falsified";
    case SearchOutcome::kBoundaryOnly:
      return "boundary_only";
  }
  return "unknown";
}

OperatorSample exact_pairs(const MaxAffineFunction& g, std::span<const Vector> dual_grid,
                           const ExactPairsOptions& options,
                           const ToleranceProfile& tol) {
  if (dual_grid.empty()) throw InputError("exact_pairs: empty grid");
  if (options.hull_points_per_edge < 2) {
    throw InputError("exact_pairs: hull_points_per_edge must be >= 2");
  }
  std::vector<DualPair> pairs;
  for (const Vector& xstar : dual_grid) {
    require_dim(g, xstar, "exact_pairs");
    if (!g.in_interior(xstar)) {
      throw UnsupportedInput("exact_pairs: " + xstar.to_string() +
                             " is not interior to dom g");
    }
    for (Vector& x : exact_functionals(g, xstar, options.hull_points_per_edge, tol)) {
      DualPair p{xstar, std::move(x)};
      if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(std::move(p));
    }
  }
  return OperatorSample(std::move(pairs), 0);
}

std::optional<double> infimum(const MaxAffineFunction& g, const ToleranceProfile& tol) {
  const ExtReal v = conjugate_max_affine(g, tol)(Vector::zeros(g.dim()));
  if (!v.is_finite()) return std::nullopt;
  return -v.value();
}

std::optional<DualPair> proximal_pair(const MaxAffineFunction& g, const Vector& w,
                                      double t, const ToleranceProfile& tol) {
  require_dim(g, w, "proximal_pair");
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("proximal_pair: t must be > 0");
  const auto& pieces = g.pieces();
  const std::size_t d = g.dim();
  const std::size_t n = pieces.size();

  // KKT: z = w - t sum_b l_b s_b, <s_a, z> - c_a = tau on the active set A,
  // l in the simplex, every other piece <= tau at z.
  std::optional<DualPair> found;
  for (std::size_t k = 1; k <= std::min(d + 1, n) && !found; ++k) {
    const std::size_t m = k + 1;
    std::vector<double> a(m * m), rhs(m);
    linalg::for_each_subset(n, k, [&](std::span<const std::size_t> set) {
      if (found) return;
      for (std::size_t r = 0; r < k; ++r) {
        const AffinePiece& pr = pieces[set[r]];
        for (std::size_t c = 0; c < k; ++c) {
          a[r * m + c] = -t * dot(pr.slope, pieces[set[c]].slope);
        }
        a[r * m + k] = -1.0;
        rhs[r] = pr.intercept - dot(pr.slope, w);
      }
      for (std::size_t c = 0; c < k; ++c) a[k * m + c] = 1.0;
      a[k * m + k] = 0.0;
      rhs[k] = 1.0;
      const auto sol = linalg::solve(m, a, rhs);
      if (!sol) return;
      std::vector<double> lambda(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(k));
      double total = 0.0;
      for (double& l : lambda) {
        if (l < -1e-9) return;
        l = std::max(l, 0.0);
        total += l;
      }
      std::vector<double> xc(d, 0.0);
      for (std::size_t c = 0; c < k; ++c) {
        const Vector& s = pieces[set[c]].slope;
        for (std::size_t i = 0; i < d; ++i) xc[i] += lambda[c] / total * s[i];
      }
      const Vector x(std::move(xc));
      const Vector z = w - t * x;
      double low = kInf;
      for (std::size_t c = 0; c < k; ++c) low = std::min(low, pieces[set[c]](z));
      double high = -kInf;
      for (const AffinePiece& p : pieces) high = std::max(high, p(z));
      if (high > low + tol.eq_tol * std::max(1.0, std::abs(high))) return;
      found = DualPair{z, x};
    });
  }
  if (!found || !g.in_interior(found->xstar)) return std::nullopt;
  return found;
}

RefineReport t0_refine(const MaxAffineFunction& g, const Vector& xstar0, const Vector& x0,
                       double eps, const SearchOptions& o, const ToleranceProfile& tol) {
  validate_eps(eps);
  validate_options(o);
  require_dim(g, xstar0, "t0_refine");
  require_dim(g, x0, "t0_refine");
  const MaxAffineConjugate conj = conjugate_max_affine(g, tol);
  const EpsMembershipCertificate start = eps_subdiff_member(g, conj, xstar0, x0, eps, tol);
  if (start.verdict != Membership::kMember) {
    throw PreconditionError("t0_refine: x0 is not an eps-subgradient at x0* (gap " +
                            start.gap.to_string() + ")");
  }
  const double bound = std::sqrt(eps);

  std::optional<DualPair> best;
  double best_score = kInf;
  std::size_t count = 0;
  auto consider = [&](const DualPair& p) {
    ++count;
    const double s = std::max(distance(p.xstar, xstar0), distance(p.x, x0));
    if (!best || s < best_score || (s == best_score && lex_less(p, *best))) {
      best = p;
      best_score = s;
    }
    return false;
  };

  if (o.constructive_candidates) {
    const DualPair input{xstar0, x0};
    if (is_exact(g, conj, input, tol)) consider(input);
    const auto prox = proximal_pair(g, xstar0 + x0, 1.0, tol);
    if (prox && is_exact(g, conj, *prox, tol)) consider(*prox);
  }
  nested_grid_search(g, bound, o, tol, [&] { return best ? best->xstar : xstar0; },
                     consider);

  RefineReport rep{best, kInf, kInf, bound, start.gap.value(), SearchOutcome::kSuccess,
                   o.describe(g.dim(), bound), count};
  if (best) {
    rep.xstar_distance = distance(best->xstar, xstar0);
    rep.x_distance = distance(best->x, x0);
  }
  const bool ok = best && rep.xstar_distance <= bound + tol.strict_tol &&
                  rep.x_distance <= bound + tol.strict_tol;
  if (!ok) {
    rep.outcome = o.constructive_candidates ? SearchOutcome::kFalsified
                                            : SearchOutcome::kGridResolution;
  }
  return rep;
}

BorweinCertificate t1_refine(const MaxAffineFunction& g, const Vector& xstar0,
                             const Vector& x0, double eps, double beta,
                             std::uint64_t seed, const SearchOptions& o,
                             const ToleranceProfile& tol) {
  validate_eps(eps);
  validate_options(o);
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InputError("t1_refine: beta must be finite and > 0");
  }
  require_dim(g, xstar0, "t1_refine");
  require_dim(g, x0, "t1_refine");
  const MaxAffineConjugate conj = conjugate_max_affine(g, tol);
  const EpsMembershipCertificate start = eps_subdiff_member(g, conj, xstar0, x0, eps, tol);
  if (start.verdict != Membership::kMember) {
    throw PreconditionError("t1_refine: x0 is not an eps-subgradient at x0* (gap " +
                            start.gap.to_string() + ")");
  }
  const std::vector<Vector> probes = probe_directions(g.dim(), seed);
  const BorweinInputs in{xstar0, x0, eps, beta, evaluate(g, xstar0).value(),
                         conj(x0).value(), probes};
  const double radius = std::sqrt(eps);

  BorweinCertificate cert{xstar0, x0, eps, beta, std::nullopt, {}, false, false, false,
                          seed, probes.size(), SearchOutcome::kSuccess,
                          o.describe(g.dim(), radius), 0};
  std::size_t best_passes = 0;
  auto consider = [&](const DualPair& p) {
    ++cert.candidates;
    std::vector<BoundCheck> checks = borwein_bounds(g, conj, in, p, tol);
    const std::size_t passes = count_passes(checks);
    if (!cert.found || passes > best_passes) {
      cert.found = p;
      cert.bounds = std::move(checks);
      best_passes = passes;
    }
    return best_passes == 7;
  };

  bool done = false;
  if (o.constructive_candidates) {
    const DualPair input{xstar0, x0};
    if (is_exact(g, conj, input, tol)) done = consider(input);
    if (!done) {
      const auto prox = proximal_pair(g, xstar0 + x0, 1.0, tol);
      if (prox && is_exact(g, conj, *prox, tol)) done = consider(*prox);
    }
  }
  if (!done) {
    nested_grid_search(g, radius, o, tol,
                       [&] { return cert.found ? cert.found->xstar : xstar0; }, consider);
  }

  cert.valid = cert.found && best_passes == 7;
  if (!cert.valid) {
    cert.outcome = o.constructive_candidates ? SearchOutcome::kFalsified
                                             : SearchOutcome::kGridResolution;
  }
  if (cert.found) cert.sampled_v_agrees = cert.bounds[3].pass == cert.bounds[4].pass;
  cert.rechecked = recheck_certificate(g, cert, tol);
  return cert;
}

bool recheck_certificate(const MaxAffineFunction& g, const BorweinCertificate& cert,
                         const ToleranceProfile& tol) {
  if (!cert.found) return cert.bounds.empty();
  if (cert.bounds.size() != 7) return false;
  const std::size_t d = g.dim();
  const Vector& zs = cert.found->xstar;
  const Vector& z = cert.found->x;
  auto l2 = [&](auto&& coord) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += coord(i) * coord(i);
    return std::sqrt(s);
  };
  auto pairing = [&](auto&& a, auto&& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += a(i) * b(i);
    return s;
  };
  auto dx = [&](std::size_t i) { return z[i] - cert.x0[i]; };
  auto dxs = [&](std::size_t i) { return zs[i] - cert.xstar0[i]; };
  auto xs0 = [&](std::size_t i) { return cert.xstar0[i]; };
  auto x0 = [&](std::size_t i) { return cert.x0[i]; };

  const MaxAffineConjugate conj(g, tol);
  const double gz = eval_max_affine(g, zs, tol).value.value();
  const double g0 = eval_max_affine(g, cert.xstar0, tol).value.value();
  const ExtReal cz = conj(z);
  const double se = std::sqrt(cert.eps);
  const double slack = tol.strict_tol;

  double probed = 0.0;
  for (const Vector& u : probe_directions(d, cert.seed)) {
    probed = std::max(probed, std::abs(pairing(dx, [&](std::size_t i) { return u[i]; })));
  }
  const bool expect[7] = {
      cz.is_finite() && gz + cz.value() - pairing([&](std::size_t i) { return z[i]; },
                                                  [&](std::size_t i) { return zs[i]; }) <=
                            slack,
      l2(dxs) <= se * (1.0 + cert.beta * l2(xs0)) + slack,
      std::abs(gz - g0) <= se * (l2(x0) + cert.beta * std::abs(pairing(xs0, x0))) +
                               2.0 * cert.eps + slack,
      l2(dx) <= se + slack,
      probed <= se + slack,
      gz + conj(cert.x0).value() -
              pairing(x0, [&](std::size_t i) { return zs[i]; }) <=
          2.0 * cert.eps + slack,
      std::abs(pairing(dx, dxs)) <= cert.eps + slack,
  };
  for (std::size_t k = 0; k < 7; ++k) {
    if (cert.bounds[k].pass != expect[k]) return false;
  }
  return true;
}

LemmaResult l1_search(const MaxAffineFunction& g, const Vector& xstar0, double alpha,
                      double beta, const SearchOptions& o, const ToleranceProfile& tol) {
  validate_options(o);
  require_dim(g, xstar0, "l1_search");
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw PreconditionError("l1_search: alpha and beta must be finite and > 0");
  }
  const double g0 = require_finite_value(g, xstar0, "l1_search");
  const auto inf = infimum(g, tol);
  if (!inf) throw PreconditionError("l1_search: g is unbounded below");
  if (!(g0 < *inf + alpha * beta)) {
    throw PreconditionError("l1_search: g(x0*) = " + std::to_string(g0) +
                            " is not below inf g + alpha*beta = " +
                            std::to_string(*inf + alpha * beta));
  }
  const MaxAffineConjugate conj = conjugate_max_affine(g, tol);
  LemmaSearch s;
  s.checks = [&](const DualPair& p) {
    return std::vector<BoundCheck>{
        strict_upper("xstar_distance", distance(p.xstar, xstar0), beta, tol),
        strict_upper("x_norm", norm(p.x), alpha, tol)};
  };
  bool done = false;
  if (o.constructive_candidates) {
    const auto prox = proximal_pair(g, xstar0, beta / alpha, tol);
    if (prox && is_exact(g, conj, *prox, tol)) done = s.consider(*prox);
  }
  if (!done) {
    nested_grid_search(g, beta, o, tol, [&] { return s.best ? s.best->xstar : xstar0; },
                       [&](const DualPair& p) { return s.consider(p); });
  }
  LemmaResult res = finish_lemma(s, o, *inf, o.describe(g.dim(), beta));
  if (res.outcome != SearchOutcome::kSuccess && min_slope_norm(g) >= alpha - tol.strict_tol) {
    res.outcome = SearchOutcome::kBoundaryOnly;
  }
  return res;
}

LemmaResult l2_search(const MaxAffineFunction& g, const Vector& xstar,
                      const SearchOptions& o, const ToleranceProfile& tol) {
  validate_options(o);
  require_dim(g, xstar, "l2_search");
  const double gx = require_finite_value(g, xstar, "l2_search");
  const auto inf = infimum(g, tol);
  if (inf && gx - *inf <= tol.strict_tol * std::max(1.0, std::abs(gx))) {
    throw PreconditionError("l2_search: x* minimizes g");
  }
  const MaxAffineConjugate conj = conjugate_max_affine(g, tol);
  LemmaSearch s;
  s.checks = [&](const DualPair& p) {
    const double gz = evaluate(g, p.xstar).value();
    const double pair = dot(p.x, xstar - p.xstar);
    return std::vector<BoundCheck>{
        strict_upper("value_decrease", gz, gx, tol),
        {"pairing", pair > tol.strict_tol, pair, 0.0, pair}};
  };
  bool done = false;
  if (o.constructive_candidates) {
    for (double t = 1.0; t <= 1e6 && !done; t *= 10.0) {
      const auto prox = proximal_pair(g, xstar, t, tol);
      if (prox && is_exact(g, conj, *prox, tol)) done = s.consider(*prox);
    }
  }
  double radius = std::max(1.0, norm(xstar));
  if (g.has_bounded_box()) {
    radius = 0.0;
    for (const Interval& iv : *g.box()) radius = std::max(radius, 0.5 * (iv.hi - iv.lo));
  }
  if (!done) {
    nested_grid_search(g, radius, o, tol, [&] { return s.best ? s.best->xstar : xstar; },
                       [&](const DualPair& p) { return s.consider(p); });
  }
  return finish_lemma(s, o, inf ? *inf : -kInf, o.describe(g.dim(), radius));
}

DensityProbeReport density_probe(const MaxAffineFunction& g,
                                 const MaxAffineFunction::Box& region, std::size_t trials,
                                 double eps, std::uint64_t seed, const SearchOptions& o,
                                 const ToleranceProfile& tol) {
  validate_eps(eps);
  const std::size_t d = g.dim();
  if (region.size() != d) throw InputError("density_probe: region dimension mismatch");
  for (std::size_t i = 0; i < d; ++i) {
    const Interval& iv = region[i];
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
      throw InputError("density_probe: region must be a bounded box");
    }
    if (g.box() && !(iv.lo > (*g.box())[i].lo && iv.hi < (*g.box())[i].hi)) {
      throw UnsupportedInput("density_probe: region must lie inside the interior of dom g");
    }
  }
  const MaxAffineConjugate conj = conjugate_max_affine(g, tol);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  DensityProbeReport rep{trials, 0, 0, 0, 0.0};
  for (std::size_t k = 0; k < trials; ++k) {
    std::vector<double> c(d);
    for (std::size_t i = 0; i < d; ++i) {
      c[i] = region[i].lo + unit(rng) * (region[i].hi - region[i].lo);
    }
    const Vector xstar0(std::move(c));
    // Random point of the hull of the active slopes, then a random push that
    // is halved until the gap test accepts it.
    const std::vector<Vector> act = active_slopes(g, xstar0, tol);
    std::vector<double> w(act.size());
    double total = 0.0;
    for (double& v : w) total += (v = expo(rng));
    Vector base = Vector::zeros(d);
    for (std::size_t j = 0; j < act.size(); ++j) base = base + (w[j] / total) * act[j];
    const Vector dir = random_unit(d, rng);
    double r = std::sqrt(eps) * unit(rng);
    Vector x0 = base + r * dir;
    for (int halvings = 0;
         halvings < 64 && eps_subdiff_member(g, conj, xstar0, x0, eps, tol).verdict !=
                              Membership::kMember;
         ++halvings) {
      r *= 0.5;
      x0 = base + r * dir;
    }
    if (eps_subdiff_member(g, conj, xstar0, x0, eps, tol).verdict != Membership::kMember) {
      x0 = base;
    }
    switch (t0_refine(g, xstar0, x0, eps, o, tol).outcome) {
      case SearchOutcome::kSuccess:
        ++rep.successes;
        break;
      case SearchOutcome::kGridResolution:
        ++rep.grid_resolution;
        break;
      case SearchOutcome::kFalsified:
      case SearchOutcome::kBoundaryOnly:
        ++rep.falsified;
        break;
    }
  }
  rep.fraction = trials == 0 ? 1.0
                             : static_cast<double>(rep.successes) / static_cast<double>(trials);
  return rep;
}

}  // namespace dualrep
