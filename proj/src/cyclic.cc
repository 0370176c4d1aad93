#include "dualrep/cyclic.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace dualrep {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::vector<std::size_t> source_pairs(const OperatorSample& sample) {
  const Vector& base = sample[sample.base()].xstar;
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < sample.size(); ++p) {
    if (sample[p].xstar == base) out.push_back(p);
  }
  return out;
}

}  // namespace

ChainGraph::ChainGraph(const OperatorSample& sample)
    : n_(sample.size()), w_(n_ * n_, 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (i != j) w_[i * n_ + j] = dot(sample[i].x, sample[j].xstar - sample[i].xstar);
    }
  }
}

double cyclic_sum(const OperatorSample& sample, std::span<const std::size_t> cycle) {
  double sum = 0.0;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const DualPair& cur = sample[cycle[k]];
    const DualPair& next = sample[cycle[(k + 1) % cycle.size()]];
    sum += dot(cur.x, cur.xstar - next.xstar);
  }
  return sum;
}

CycleCertificate check_monotone(const OperatorSample& sample,
                                const ToleranceProfile& tol) {
  CycleCertificate cert{CycleVerdict::kCyclicallyMonotone, {}, std::nullopt};
  double worst = -tol.strict_tol;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      const std::size_t cycle[2] = {i, j};
      const double s = cyclic_sum(sample, cycle);
      if (s < worst) {
        worst = s;
        cert = {CycleVerdict::kViolated, {i, j}, s};
      }
    }
  }
  return cert;
}

CycleCertificate check_cyclic(const OperatorSample& sample,
                              const ToleranceProfile& tol) {
  const std::size_t n = sample.size();
  const ChainGraph graph(sample);
  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> parent(n, kNone);

  // Relaxations must gain more than strict_tol, so any cycle closing in the
  // predecessor graph has weight above strict_tol.
  const std::size_t max_rounds = 4 * n + 4;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double cand = dist[i] + graph.weight(i, j);
        if (!(cand > dist[j] + tol.strict_tol)) continue;
        dist[j] = cand;
        parent[j] = i;
        changed = true;

        std::vector<std::size_t> chain;
        for (std::size_t k = i, steps = 0; k != kNone && steps <= n;
             k = parent[k], ++steps) {
          chain.push_back(k);
          if (k == j) break;
        }
        if (chain.back() != j) continue;
        std::reverse(chain.begin(), chain.end());  // j -> ... -> i, then i -> j
        const double s = cyclic_sum(sample, chain);
        if (s < -tol.strict_tol) {
          return {CycleVerdict::kViolated, std::move(chain), s};
        }
      }
    }
    if (!changed) return {CycleVerdict::kCyclicallyMonotone, {}, std::nullopt};
  }
  throw Error("check_cyclic: relaxation did not settle after " +
              std::to_string(max_rounds) + " rounds");
}

NotCyclicallyMonotone::NotCyclicallyMonotone(CycleCertificate certificate)
    : PreconditionError("operator sample is not cyclically monotone (cycle sum " +
                        std::to_string(certificate.cycle_sum.value_or(0.0)) + ")"),
      certificate_(std::move(certificate)) {}

AntiderivativeResult build_antiderivative(const OperatorSample& sample,
                                          const ToleranceProfile& tol) {
  CycleCertificate cert = check_cyclic(sample, tol);
  if (cert.verdict == CycleVerdict::kViolated) {
    throw NotCyclicallyMonotone(std::move(cert));
  }
  const std::size_t n = sample.size();
  const ChainGraph graph(sample);
  const double minus_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> value(n, minus_inf);
  for (std::size_t s : source_pairs(sample)) value[s] = 0.0;

  // Paths longer than n - 1 edges repeat a pair, which only adds a
  // nonpositive cycle, so n rounds suffice.
  for (std::size_t round = 0; round < n; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (value[i] == minus_inf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double cand = value[i] + graph.weight(i, j);
        if (cand > value[j]) {
          value[j] = cand;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  std::vector<AffinePiece> pieces;
  pieces.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    pieces.push_back({sample[p].x, dot(sample[p].x, sample[p].xstar) - value[p]});
  }
  return {MaxAffineFunction(std::move(pieces)), std::move(value), sample.base()};
}

double chain_sup_bruteforce(const OperatorSample& sample, const Vector& y,
                            std::size_t max_len) {
  return chain_sup_bruteforce(sample, std::span<const Vector>(&y, 1), max_len).front();
}

std::vector<double> chain_sup_bruteforce(const OperatorSample& sample,
                                         std::span<const Vector> ys,
                                         std::size_t max_len) {
  const std::size_t n = sample.size();
  if (n > kBruteForceMaxPairs) {
    throw InputError("chain_sup_bruteforce: at most " +
                     std::to_string(kBruteForceMaxPairs) + " pairs");
  }
  const double minus_inf = -std::numeric_limits<double>::infinity();
  // Best prefix sum over all enumerated chains ending at each pair.
  std::vector<double> best(n, minus_inf);
  std::function<void(std::size_t, double, std::size_t)> walk =
      [&](std::size_t at, double sum, std::size_t depth) {
        best[at] = std::max(best[at], sum);
        if (depth == max_len) return;
        for (std::size_t next = 0; next < n; ++next) {
          if (next == at) continue;
          walk(next, sum + dot(sample[at].x, sample[next].xstar - sample[at].xstar),
               depth + 1);
        }
      };
  for (std::size_t s : source_pairs(sample)) walk(s, 0.0, 0);

  std::vector<double> out;
  out.reserve(ys.size());
  for (const Vector& y : ys) {
    double v = minus_inf;
    for (std::size_t p = 0; p < n; ++p) {
      if (best[p] == minus_inf) continue;
      v = std::max(v, best[p] + dot(sample[p].x, y - sample[p].xstar));
    }
    out.push_back(v);
  }
  return out;
}

InclusionReport check_graph_inclusion(const OperatorSample& sample,
                                      const MaxAffineFunction& h,
                                      std::uint64_t seed,
                                      std::size_t random_probes,
                                      const ToleranceProfile& tol) {
  if (h.dim() != sample.dim()) throw InputError("check_graph_inclusion: dimension mismatch");
  const std::size_t d = sample.dim();
  std::vector<Vector> probes;
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (const DualPair& p : sample.pairs()) {
    probes.push_back(p.xstar);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], p.xstar[i]);
      hi[i] = std::max(hi[i], p.xstar[i]);
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < random_probes; ++k) {
    std::vector<double> c(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double pad = std::max(1.0, hi[i] - lo[i]);
      std::uniform_real_distribution<double> u(lo[i] - pad, hi[i] + pad);
      c[i] = u(rng);
    }
    probes.emplace_back(std::move(c));
  }

  InclusionReport rep{std::numeric_limits<double>::infinity(), 0, probes.size(), true};
  for (std::size_t j = 0; j < sample.size(); ++j) {
    const ExtReal at = evaluate(h, sample[j].xstar);
    if (!at.is_finite()) {
      rep = {-std::numeric_limits<double>::infinity(), j, probes.size(), false};
      return rep;
    }
    for (const Vector& z : probes) {
      const ExtReal hz = evaluate(h, z);
      if (!hz.is_finite()) continue;
      const double slack =
          hz.value() - at.value() - dot(sample[j].x, z - sample[j].xstar);
      if (slack < rep.worst_slack) {
        rep.worst_slack = slack;
        rep.worst_pair = j;
      }
    }
  }
  rep.holds = rep.worst_slack >= -tol.strict_tol;
  return rep;
}

}  // namespace dualrep
