#include "dualrep/reconstruct.h"

#include <algorithm>
#include <cmath>

#include "dualrep/exposed.h"

namespace dualrep {

OperatorSample sample_subdifferential(const MaxAffineFunction& g,
                                      std::span<const Vector> dual_points,
                                      bool multivalued, std::size_t base_point,
                                      const ToleranceProfile& tol) {
  if (dual_points.empty()) throw InputError("sample_subdifferential: no dual points");
  if (base_point >= dual_points.size()) {
    throw InputError("sample_subdifferential: base point index out of range");
  }
  std::vector<DualPair> pairs;
  std::size_t base = 0;
  for (std::size_t i = 0; i < dual_points.size(); ++i) {
    const Vector& xstar = dual_points[i];
    if (xstar.size() != g.dim()) throw InputError("sample_subdifferential: dimension mismatch");
    if (!g.in_interior(xstar)) {
      throw UnsupportedInput("sample_subdifferential: " + xstar.to_string() +
                             " is not interior to dom g");
    }
    if (i == base_point) base = pairs.size();
    const MaxAffineEval e = eval_max_affine(g, xstar, tol);
    for (std::size_t k : e.active) {
      DualPair p{xstar, g.pieces()[k].slope};
      if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(std::move(p));
      if (!multivalued) break;
    }
  }
  return OperatorSample(std::move(pairs), base);
}

const char* to_string(ReconstructMode mode) {
  return mode == ReconstructMode::kFull ? "full" : "exposed";
}

ReconstructionReport reconstruct(const MaxAffineFunction& g,
                                 std::span<const Vector> dual_points,
                                 std::size_t base_point,
                                 std::span<const Vector> eval_points,
                                 ReconstructMode mode, bool multivalued,
                                 const ToleranceProfile& tol) {
  if (base_point >= dual_points.size()) {
    throw InputError("reconstruct: base point index out of range");
  }
  for (std::size_t i = 0; i < dual_points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (dual_points[i] == dual_points[j]) {
        throw InputError("reconstruct: duplicate dual point " + dual_points[i].to_string());
      }
    }
  }

  std::vector<Vector> kept;
  std::size_t base = 0;
  if (mode == ReconstructMode::kFull) {
    kept.assign(dual_points.begin(), dual_points.end());
    base = base_point;
  } else {
    std::vector<double> values;
    for (const Vector& p : dual_points) {
      const ExtReal v = evaluate(g, p);
      if (!v.is_finite()) throw UnsupportedInput("reconstruct: dual point outside dom g");
      values.push_back(v.value());
    }
    std::vector<std::size_t> keep;
    if (g.dim() == 1) {
      // exp_g wants a sorted grid.
      std::vector<std::size_t> order(dual_points.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dual_points[a][0] < dual_points[b][0];
      });
      std::vector<double> xs, vs;
      for (std::size_t i : order) {
        xs.push_back(dual_points[i][0]);
        vs.push_back(values[i]);
      }
      for (std::size_t k : exp_g(GridFunction1D(xs, vs), tol).indices) {
        keep.push_back(order[k]);
      }
    } else {
      keep = epigraph_vertices(dual_points, values, tol);
    }
    if (std::find(keep.begin(), keep.end(), base_point) == keep.end()) {
      keep.push_back(base_point);
    }
    std::sort(keep.begin(), keep.end());
    for (std::size_t i : keep) {
      if (i == base_point) base = kept.size();
      kept.push_back(dual_points[i]);
    }
  }

  OperatorSample sample = sample_subdifferential(g, kept, multivalued, base, tol);
  AntiderivativeResult h = build_antiderivative(sample, tol);
  const double g_base = evaluate(g, kept[base]).value();

  ReconstructionReport rep{std::move(h), std::move(sample), mode, std::move(kept),
                           std::vector<Vector>(eval_points.begin(), eval_points.end()),
                           {}, {}, {}, 0.0, true};
  for (const Vector& y : eval_points) {
    const ExtReal gy = evaluate(g, y);
    if (!gy.is_finite()) {
      throw UnsupportedInput("reconstruct: eval point " + y.to_string() + " is outside dom g");
    }
    const double hy = evaluate(rep.h.h, y).value();
    const double diff = gy.value() - g_base - hy;
    rep.g_values.push_back(gy.value());
    rep.h_values.push_back(hy);
    rep.true_minus_h.push_back(diff);
    rep.sup_gap = std::max(rep.sup_gap, std::abs(diff));
    if (diff < -tol.eq_tol) rep.lower_bound_holds = false;
  }
  return rep;
}

ConvergenceReport convergence_study(const MaxAffineFunction& g,
                                    std::span<const GridSpec> grids, const Vector& base,
                                    std::span<const Vector> eval_points, bool multivalued,
                                    const ToleranceProfile& tol) {
  ConvergenceReport out{{}, true};
  for (const GridSpec& spec : grids) {
    std::vector<Vector> pts;
    std::size_t base_index = 0;
    bool has_base = false;
    for (Vector& p : tensor_grid(spec, g.dim(), tol)) {
      if (!g.in_interior(p)) continue;
      if (!has_base && distance(p, base) <= tol.strict_tol * std::max(1.0, norm(base))) {
        base_index = pts.size();
        has_base = true;
        p = base;
      }
      pts.push_back(std::move(p));
    }
    if (!has_base) {
      throw InputError("convergence_study: base " + base.to_string() +
                       " is not a node of grid " + spec.to_string());
    }
    const ReconstructionReport rep = reconstruct(g, pts, base_index, eval_points,
                                                 ReconstructMode::kFull, multivalued, tol);
    out.rows.push_back({spec.step, pts.size(), rep.sup_gap});
  }
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    if (out.rows[k].sup_gap > out.rows[k - 1].sup_gap + tol.eq_tol) out.nonincreasing = false;
  }
  return out;
}

DualCaseReport dual_case_study(const MaxAffineFunction& g,
                               std::span<const Vector> dual_points,
                               std::size_t base_point,
                               std::span<const Vector> eval_points, bool multivalued,
                               const ToleranceProfile& tol) {
  ReconstructionReport rep = reconstruct(g, dual_points, base_point, eval_points,
                                         ReconstructMode::kFull, multivalued, tol);
  std::vector<std::size_t> missing;
  for (std::size_t k = 0; k < g.pieces().size(); ++k) {
    const Vector& s = g.pieces()[k].slope;
    const auto& pairs = rep.sample.pairs();
    if (std::none_of(pairs.begin(), pairs.end(),
                     [&](const DualPair& p) { return p.x == s; })) {
      missing.push_back(k);
    }
  }
  const bool exact = rep.sup_gap <= tol.eq_tol;
  const bool covered = missing.empty();
  return {std::move(rep), covered, std::move(missing), exact};
}

}  // namespace dualrep
