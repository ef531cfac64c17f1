#ifndef EXACTNN_VERIFIER_HPP
#define EXACTNN_VERIFIER_HPP

#include "exactnn/affine_net.hpp"
#include "exactnn/feasibility.hpp"
#include "exactnn/model_io.hpp"
#include "exactnn/properties.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace exactnn {

enum class Status { Proved, Refuted, Timeout };

const char* status_name(Status s);

struct SearchStats {
  std::uint64_t nodes_explored = 0;
  std::uint64_t splits = 0;
  std::uint64_t max_depth = 0;
  std::int64_t elapsed_ms = 0;

  SearchStats& operator+=(const SearchStats& o);
  friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

struct Verdict {
  Status status = Status::Timeout;
  /// Present exactly when Refuted; violates the property under run().
  std::optional<Vector<Rational>> witness;
  SearchStats stats;
};

/// {status, witness?, stats{nodes_explored, splits, max_depth, elapsed_ms}}.
/// With `deterministic`, elapsed_ms is written as 0.
Json verdict_to_json(const Verdict& verdict, bool deterministic = false);

/// The query asks for something the engine cannot encode.
class UnsupportedQuery : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SearchOptions {
  /// Wall-clock budget; none means unbounded.
  std::optional<std::int64_t> timeout_ms;
  /// Deepest phase-split level that may still be expanded.
  std::size_t max_depth = 64;
  std::size_t workers = 1;
};

// ---------------------------------------------------------------------------
// Brute force

/// Calls `visit` with every binary input at L0 distance <= epsilon from
/// `center`: the center, then single flips by index, then pairs in
/// lexicographic order, and so on. Stops early when `visit` returns false.
void for_each_in_ball(const Vector<Rational>& center, std::size_t epsilon,
                      const std::function<bool(const Vector<Rational>&)>& visit);

std::vector<Vector<Rational>> enumerate_ball(const Vector<Rational>& center, std::size_t epsilon);

/// Every admissible input of the ball, checked with eval_robustness.
/// Requires the binary input constraint and the L0 norm.
template <ExactScalar S>
Verdict verify_robustness_brute(const Network<S>& net, const Vector<Rational>& center,
                                const RobustnessSpec& spec, const SearchOptions& options = {});

// ---------------------------------------------------------------------------
// Branch and bound

/// Σ input_coeff·x + Σ output_coeff·f(x)  (comparator)  rhs.
struct QueryConstraint {
  std::vector<std::pair<Index, Rational>> inputs;
  std::vector<std::pair<Index, Rational>> outputs;
  Comparator comparator = Comparator::Le;
  Rational rhs{0};

  bool holds(const Vector<Rational>& x, const Vector<Rational>& fx) const;
};

/// Is there x in the box meeting every constraint of at least one disjunct?
struct ReachQuery {
  Box box;
  std::vector<std::vector<QueryConstraint>> disjuncts;
};

struct SearchResult {
  /// Set when some x satisfies a disjunct; exact, re-checked on the lowered net.
  std::optional<Vector<Rational>> witness;
  /// A subtree was skipped for depth or time.
  bool incomplete = false;
  SearchStats stats;
};

using Clock = std::chrono::steady_clock;

/// Depth-first search over ReLU phases. Each node fixes the phases interval
/// bounds prove stable and splits the widest unstable pre-activation (lowest
/// index on ties); leaves are affine and go to the exact feasibility check.
SearchResult search(const AffineNet& net, const ReachQuery& query, const SearchOptions& options,
                    std::optional<Clock::time_point> deadline);

/// Decides the negation of the output predicate over the input box.
template <ExactScalar S>
Verdict verify_reach_bab(const Network<S>& net, const ReachSpec& spec, const SearchOptions& options = {});

/// Linf: one box query over center ± epsilon intersected with the domain.
/// L0 (binary inputs only): one point query per flip set of size <= epsilon.
template <ExactScalar S>
Verdict verify_robustness_bab(const Network<S>& net, const Vector<Rational>& center,
                              const RobustnessSpec& spec, const SearchOptions& options = {});

#define EXACTNN_VERIFIER_EXTERN(S)                                                           \
  extern template Verdict verify_robustness_brute(const Network<S>&, const Vector<Rational>&, \
                                                  const RobustnessSpec&, const SearchOptions&); \
  extern template Verdict verify_reach_bab(const Network<S>&, const ReachSpec&,              \
                                           const SearchOptions&);                            \
  extern template Verdict verify_robustness_bab(const Network<S>&, const Vector<Rational>&,   \
                                                const RobustnessSpec&, const SearchOptions&);
EXACTNN_VERIFIER_EXTERN(Rational)
EXACTNN_VERIFIER_EXTERN(Integer)
#undef EXACTNN_VERIFIER_EXTERN

}  // namespace exactnn

#endif
