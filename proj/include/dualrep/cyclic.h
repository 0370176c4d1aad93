// Cyclic monotonicity of finite operator samples and the Rockafellar
// antiderivative
//
//   h(y) = sup { sum_{i<n} <x_i, x*_{i+1} - x*_i> + <x_n, y - x*_n> },
//
// the supremum running over chains of sample pairs that start at a pair
// sitting on the base dual point.
//
// The chain terms are the edge weights of a complete digraph on the pairs,
// w(i -> j) = <x_i, x*_j - x*_i>. A cycle's weight is minus its cyclic sum
// sum_k <x_k, x*_k - x*_{k+1}>, so the sample is cyclically monotone iff the
// graph has no positive cycle. When it has none, h is a longest-path problem
// over at most (#pairs - 1) edges and becomes an exact finite computation.

#ifndef DUALREP_CYCLIC_H_
#define DUALREP_CYCLIC_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dualrep/core.h"

namespace dualrep {

class ChainGraph {
 public:
  explicit ChainGraph(const OperatorSample& sample);

  std::size_t size() const { return n_; }
  // <x_i, x*_j - x*_i>; self-loops are not edges.
  double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> w_;
};

enum class CycleVerdict { kCyclicallyMonotone, kViolated };

struct CycleCertificate {
  CycleVerdict verdict;
  std::vector<std::size_t> cycle;  // x*_{k+1} follows x*_k; closes on itself
  std::optional<double> cycle_sum;  // sum_k <x_k, x*_k - x*_{k+1}>
};

// sum_k <x_k, x*_k - x*_{k+1}> over the closed cycle, recomputed from the pairs.
double cyclic_sum(const OperatorSample& sample, std::span<const std::size_t> cycle);

// 2-cycles only: <x_i - x_j, x*_i - x*_j> >= -strict_tol for every pair.
// A violation names the most negative pair.
CycleCertificate check_monotone(const OperatorSample& sample,
                                const ToleranceProfile& tol = {});

// Full cyclic monotonicity. Longest-path Bellman-Ford from a virtual source;
// a cycle appearing in the predecessor graph is returned as the witness.
CycleCertificate check_cyclic(const OperatorSample& sample,
                              const ToleranceProfile& tol = {});

class NotCyclicallyMonotone : public PreconditionError {
 public:
  explicit NotCyclicallyMonotone(CycleCertificate certificate);
  const CycleCertificate& certificate() const { return certificate_; }

 private:
  CycleCertificate certificate_;
};

struct AntiderivativeResult {
  // pieces: slope x_p, intercept <x_p, x*_p> - V_p
  MaxAffineFunction h;
  std::vector<double> chain_values;  // V_p, one per pair
  std::size_t base;
};

// Every pair whose dual point equals the base dual point is a source with
// V = 0. Throws NotCyclicallyMonotone when check_cyclic finds a violation.
AntiderivativeResult build_antiderivative(const OperatorSample& sample,
                                          const ToleranceProfile& tol = {});

// Largest sample accepted by the brute-force oracle.
inline constexpr std::size_t kBruteForceMaxPairs = 10;

// Enumerates every chain of at most max_len steps (pairs may repeat, but not
// consecutively) from a source pair and returns the best chain value at y.
double chain_sup_bruteforce(const OperatorSample& sample, const Vector& y,
                            std::size_t max_len);
// Batched form: the chain enumeration is shared across all ys.
std::vector<double> chain_sup_bruteforce(const OperatorSample& sample,
                                         std::span<const Vector> ys,
                                         std::size_t max_len);

struct InclusionReport {
  double worst_slack;       // min over pairs/probes of h(z) - h(x*_j) - <x_j, z - x*_j>
  std::size_t worst_pair;
  std::size_t probes;
  bool holds;               // worst_slack >= -strict_tol
};

// Checks the subgradient inequality of every pair against h at all sample
// dual points and `random_probes` seeded points around them.
InclusionReport check_graph_inclusion(const OperatorSample& sample,
                                      const MaxAffineFunction& h,
                                      std::uint64_t seed,
                                      std::size_t random_probes = 64,
                                      const ToleranceProfile& tol = {});

}  // namespace dualrep

#endif  // DUALREP_CYCLIC_H_
