#include "exactnn/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace exactnn {

const char* status_name(Status s) {
  switch (s) {
    case Status::Proved: return "proved";
    case Status::Refuted: return "refuted";
    case Status::Timeout: return "timeout";
  }
  return "?";
}

SearchStats& SearchStats::operator+=(const SearchStats& o) {
  nodes_explored += o.nodes_explored;
  splits += o.splits;
  max_depth = std::max(max_depth, o.max_depth);
  return *this;
}

Json verdict_to_json(const Verdict& verdict, bool deterministic) {
  Json doc;
  doc["status"] = status_name(verdict.status);
  if (verdict.witness) {
    Json w = Json::array();
    for (Index i = 0; i < verdict.witness->size(); ++i) w.push_back(to_decimal_string((*verdict.witness)(i)));
    doc["witness"] = std::move(w);
  }
  doc["stats"] = Json{{"nodes_explored", verdict.stats.nodes_explored},
                      {"splits", verdict.stats.splits},
                      {"max_depth", verdict.stats.max_depth},
                      {"elapsed_ms", deterministic ? 0 : verdict.stats.elapsed_ms}};
  return doc;
}

namespace {

std::optional<Clock::time_point> deadline_from(const SearchOptions& options, Clock::time_point start) {
  if (!options.timeout_ms) return std::nullopt;
  return start + std::chrono::milliseconds(*options.timeout_ms);
}

std::int64_t elapsed_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

bool expired(const std::optional<Clock::time_point>& deadline) {
  return deadline && Clock::now() >= *deadline;
}

/// Widened to rationals when the witness is not integral, since integer
/// networks only execute on integer inputs.
template <ExactScalar S>
Vector<Rational> run_on(const Network<S>& net, const Vector<Rational>& x) {
  if constexpr (std::same_as<S, Integer>) {
    for (Index i = 0; i < x.size(); ++i) {
      if (!is_integral(x(i))) return run(to_rational(net), x);
    }
  }
  return to_rational_vector(run(net, from_rational_vector<S>(x)));
}

std::size_t floor_count(const Rational& r) {
  if (r < 0) throw std::invalid_argument("negative count");
  const Integer q = numerator(r) / denominator(r);
  return static_cast<std::size_t>(q.convert_to<unsigned long long>());
}

}  // namespace

// ---------------------------------------------------------------------------
// Ball enumeration

void for_each_in_ball(const Vector<Rational>& center, std::size_t epsilon,
                      const std::function<bool(const Vector<Rational>&)>& visit) {
  for (Index i = 0; i < center.size(); ++i) {
    if (center(i) != 0 && center(i) != 1) {
      throw std::invalid_argument("ball enumeration needs a binary center; entry " + std::to_string(i) +
                                  " is " + to_decimal_string(center(i)));
    }
  }
  const std::size_t n = static_cast<std::size_t>(center.size());
  const std::size_t kmax = std::min(epsilon, n);
  Vector<Rational> x = center;
  for (std::size_t k = 0; k <= kmax; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      for (std::size_t i : idx) x(static_cast<Index>(i)) = 1 - center(static_cast<Index>(i));
      const bool more = visit(x);
      for (std::size_t i : idx) x(static_cast<Index>(i)) = center(static_cast<Index>(i));
      if (!more) return;
      // Next k-combination in lexicographic order.
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
}

std::vector<Vector<Rational>> enumerate_ball(const Vector<Rational>& center, std::size_t epsilon) {
  std::vector<Vector<Rational>> out;
  for_each_in_ball(center, epsilon, [&](const Vector<Rational>& x) {
    out.push_back(x);
    return true;
  });
  return out;
}

template <ExactScalar S>
Verdict verify_robustness_brute(const Network<S>& net, const Vector<Rational>& center,
                                const RobustnessSpec& spec, const SearchOptions& options) {
  if (spec.norm != Norm::L0 || spec.constraint != InputConstraint::Binary) {
    throw UnsupportedQuery("brute force needs the L0 norm over binary inputs");
  }
  const auto start = Clock::now();
  const auto deadline = deadline_from(options, start);
  const RobustnessEvaluator<S> eval(net, center, spec);
  Verdict verdict;
  verdict.status = Status::Proved;
  for_each_in_ball(center, floor_count(spec.epsilon), [&](const Vector<Rational>& x) {
    if (expired(deadline)) {
      verdict.status = Status::Timeout;
      return false;
    }
    ++verdict.stats.nodes_explored;
    if (!eval.holds_at(x)) {
      verdict.status = Status::Refuted;
      verdict.witness = x;
      return false;
    }
    return true;
  });
  verdict.stats.elapsed_ms = elapsed_since(start);
  return verdict;
}

// ---------------------------------------------------------------------------
// Branch and bound

bool QueryConstraint::holds(const Vector<Rational>& x, const Vector<Rational>& fx) const {
  Rational acc = 0;
  for (const auto& [i, c] : inputs) acc += c * x(i);
  for (const auto& [i, c] : outputs) acc += c * fx(i);
  return compare(acc, comparator, rhs);
}

namespace {

bool possible(const Interval& lhs, Comparator c, const Rational& rhs) {
  switch (c) {
    case Comparator::Le: return lhs.lo <= rhs;
    case Comparator::Lt: return lhs.lo < rhs;
    case Comparator::Ge: return lhs.hi >= rhs;
    case Comparator::Gt: return lhs.hi > rhs;
  }
  return true;
}

void accumulate(Interval& acc, const Rational& c, const Interval& x) {
  if (c > 0) {
    acc.lo += c * x.lo;
    acc.hi += c * x.hi;
  } else {
    acc.lo += c * x.hi;
    acc.hi += c * x.lo;
  }
}

struct Node {
  PhaseAssignment phases;
  std::size_t depth = 0;
};

struct Outcome {
  enum Kind { Pruned, Witness, Split, DepthLimit } kind = Pruned;
  Vector<Rational> witness;
  std::int64_t relu = -1;
};

class Searcher {
 public:
  Searcher(const AffineNet& net, const ReachQuery& query, const SearchOptions& options)
      : net_(net), query_(query), options_(options) {
    if (static_cast<Index>(query.box.size()) != net.input_size()) {
      throw DimensionError("search", std::to_string(net.input_size()) + " box dimensions",
                           static_cast<Index>(query.box.size()), 1);
    }
    for (const auto& d : query.disjuncts) {
      for (const auto& c : d) {
        for (const auto& [i, w] : c.inputs) {
          if (i < 0 || i >= net.input_size()) throw DimensionError("query", "input index", i, 1);
        }
        for (const auto& [i, w] : c.outputs) {
          if (i < 0 || i >= net.output_size()) throw DimensionError("query", "output index", i, 1);
        }
      }
    }
    free_index_.assign(query.box.size(), -1);
    for (std::size_t i = 0; i < query.box.size(); ++i) {
      if (!query.box[i].degenerate()) {
        free_index_[i] = static_cast<Index>(free_.size());
        free_.push_back(static_cast<Index>(i));
      }
    }
  }

  Outcome process(const Node& node) const {
    const BoundsResult b = propagate_bounds(net_, query_.box, &node.phases);
    if (!b.feasible) return {};

    std::vector<std::size_t> live;
    for (std::size_t d = 0; d < query_.disjuncts.size(); ++d) {
      bool ok = true;
      for (const auto& c : query_.disjuncts[d]) {
        Interval lhs{Rational(0), Rational(0)};
        for (const auto& [i, w] : c.inputs) accumulate(lhs, w, query_.box[static_cast<std::size_t>(i)]);
        for (const auto& [i, w] : c.outputs) accumulate(lhs, w, b.output[static_cast<std::size_t>(i)]);
        if (!possible(lhs, c.comparator, c.rhs)) {
          ok = false;
          break;
        }
      }
      if (ok) live.push_back(d);
    }
    if (live.empty()) return {};

    std::int64_t pick = -1;
    Rational widest = 0;
    for (std::size_t l = 0; l < net_.layers().size(); ++l) {
      const auto& layer = net_.layers()[l];
      for (std::size_t k = 0; k < layer.size(); ++k) {
        const auto& n = layer[k];
        if (n.relu_id < 0 || node.phases[static_cast<std::size_t>(n.relu_id)] != Phase::Unknown) continue;
        const Interval& iv = b.pre[l][k];
        if (iv.lo < 0 && iv.hi > 0) {
          const Rational w = iv.hi - iv.lo;
          if (pick < 0 || w > widest) {
            pick = n.relu_id;
            widest = w;
          }
        }
      }
    }
    if (pick >= 0) {
      Outcome out;
      out.kind = node.depth >= options_.max_depth ? Outcome::DepthLimit : Outcome::Split;
      out.relu = pick;
      return out;
    }
    return leaf(node, b, live);
  }

  std::vector<Node> children(const Node& node, std::int64_t relu) const {
    // Popped from the back: the Active branch is explored first.
    Node inactive{node.phases, node.depth + 1};
    inactive.phases[static_cast<std::size_t>(relu)] = Phase::Inactive;
    Node active{node.phases, node.depth + 1};
    active.phases[static_cast<std::size_t>(relu)] = Phase::Active;
    std::vector<Node> out;
    out.push_back(std::move(inactive));
    out.push_back(std::move(active));
    return out;
  }

  Node root() const { return Node{PhaseAssignment(net_.relu_count(), Phase::Unknown), 0}; }

 private:
  Vector<Rational> full_point(const Vector<Rational>& free_values) const {
    Vector<Rational> x(static_cast<Index>(query_.box.size()));
    for (std::size_t i = 0; i < query_.box.size(); ++i) {
      x(static_cast<Index>(i)) =
          free_index_[i] < 0 ? query_.box[i].lo : free_values(free_index_[i]);
    }
    return x;
  }

  Outcome witness_outcome(const Vector<Rational>& x, std::size_t disjunct) const {
    const Vector<Rational> fx = evaluate(net_, x);
    for (const auto& c : query_.disjuncts[disjunct]) {
      if (!c.holds(x, fx)) throw std::logic_error("search witness fails its own constraints");
    }
    Outcome out;
    out.kind = Outcome::Witness;
    out.witness = x;
    return out;
  }

  Outcome leaf(const Node& node, const BoundsResult& b, const std::vector<std::size_t>& live) const {
    const Index k = static_cast<Index>(free_.size());
    if (k == 0) {
      // Every interval is exact; the output box is the output.
      Vector<Rational> x = full_point(Vector<Rational>(0));
      Vector<Rational> fx(static_cast<Index>(b.output.size()));
      for (std::size_t i = 0; i < b.output.size(); ++i) fx(static_cast<Index>(i)) = b.output[i].lo;
      for (std::size_t d : live) {
        bool ok = true;
        for (const auto& c : query_.disjuncts[d]) ok = ok && c.holds(x, fx);
        if (ok) return witness_outcome(x, d);
      }
      return {};
    }

    FeasibilityProblem base;
    for (Index v : free_) base.bounds.push_back(query_.box[static_cast<std::size_t>(v)]);

    std::vector<LinearForm> prev;
    prev.reserve(query_.box.size());
    for (std::size_t i = 0; i < query_.box.size(); ++i) {
      LinearForm f{Vector<Rational>::Zero(k), Rational(0)};
      if (free_index_[i] < 0) {
        f.constant = query_.box[i].lo;
      } else {
        f.coefficients(free_index_[i]) = 1;
      }
      prev.push_back(std::move(f));
    }
    auto to_constraint = [&](const LinearForm& f, Comparator cmp, const Rational& rhs) {
      LinearConstraint c;
      for (Index j = 0; j < k; ++j) {
        if (f.coefficients(j) != 0) c.terms.emplace_back(j, f.coefficients(j));
      }
      c.comparator = cmp;
      c.rhs = rhs - f.constant;
      return c;
    };

    for (std::size_t l = 0; l < net_.layers().size(); ++l) {
      const auto& layer = net_.layers()[l];
      std::vector<LinearForm> cur;
      cur.reserve(layer.size());
      for (std::size_t j = 0; j < layer.size(); ++j) {
        const auto& n = layer[j];
        LinearForm f{Vector<Rational>::Zero(k), n.bias};
        for (const auto& [src, w] : n.terms) {
          const LinearForm& p = prev[static_cast<std::size_t>(src)];
          f.constant += w * p.constant;
          for (Index t = 0; t < k; ++t) {
            if (p.coefficients(t) != 0) f.coefficients(t) += w * p.coefficients(t);
          }
        }
        if (n.relu_id >= 0) {
          const Phase ph = node.phases[static_cast<std::size_t>(n.relu_id)];
          const Interval& iv = b.pre[l][j];
          bool active = false;
          if (ph == Phase::Active) {
            base.constraints.push_back(to_constraint(f, Comparator::Ge, Rational(0)));
            active = true;
          } else if (ph == Phase::Inactive) {
            base.constraints.push_back(to_constraint(f, Comparator::Le, Rational(0)));
          } else {
            active = iv.lo >= 0 && iv.hi > 0;
          }
          if (!active) f = LinearForm{Vector<Rational>::Zero(k), Rational(0)};
        }
        cur.push_back(std::move(f));
      }
      prev = std::move(cur);
    }

    for (std::size_t d : live) {
      FeasibilityProblem p = base;
      for (const auto& c : query_.disjuncts[d]) {
        LinearForm f{Vector<Rational>::Zero(k), Rational(0)};
        for (const auto& [i, w] : c.inputs) {
          const std::size_t ii = static_cast<std::size_t>(i);
          if (free_index_[ii] < 0) {
            f.constant += w * query_.box[ii].lo;
          } else {
            f.coefficients(free_index_[ii]) += w;
          }
        }
        for (const auto& [i, w] : c.outputs) {
          const LinearForm& o = prev[static_cast<std::size_t>(i)];
          f.constant += w * o.constant;
          for (Index t = 0; t < k; ++t) {
            if (o.coefficients(t) != 0) f.coefficients(t) += w * o.coefficients(t);
          }
        }
        p.constraints.push_back(to_constraint(f, c.comparator, c.rhs));
      }
      const FeasibilityResult r = check_feasibility(p);
      if (r.feasible) return witness_outcome(full_point(r.point), d);
    }
    return {};
  }

  const AffineNet& net_;
  const ReachQuery& query_;
  const SearchOptions& options_;
  std::vector<Index> free_;
  std::vector<Index> free_index_;
};

SearchResult search_serial(const Searcher& s, const std::optional<Clock::time_point>& deadline) {
  SearchResult result;
  std::vector<Node> stack{s.root()};
  while (!stack.empty()) {
    if (expired(deadline)) {
      result.incomplete = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++result.stats.nodes_explored;
    result.stats.max_depth = std::max<std::uint64_t>(result.stats.max_depth, node.depth);
    Outcome o = s.process(node);
    if (o.kind == Outcome::Witness) {
      result.witness = std::move(o.witness);
      break;
    }
    if (o.kind == Outcome::DepthLimit) result.incomplete = true;
    if (o.kind == Outcome::Split) {
      ++result.stats.splits;
      for (auto& c : s.children(node, o.relu)) stack.push_back(std::move(c));
    }
  }
  return result;
}

SearchResult search_parallel(const Searcher& s, std::size_t workers,
                             const std::optional<Clock::time_point>& deadline) {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Node> queue{s.root()};
  std::size_t busy = 0;
  bool stop = false;
  std::optional<Vector<Rational>> witness;
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<std::uint64_t> splits{0};
  std::atomic<std::uint64_t> depth{0};
  std::atomic<bool> incomplete{false};
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return stop || !queue.empty() || busy == 0; });
      if (stop || queue.empty()) {
        cv.notify_all();
        return;
      }
      Node node = std::move(queue.back());
      queue.pop_back();
      ++busy;
      lock.unlock();

      std::vector<Node> kids;
      std::optional<Vector<Rational>> found;
      try {
        if (expired(deadline)) {
          incomplete = true;
          lock.lock();
          stop = true;
          --busy;
          cv.notify_all();
          return;
        }
        ++nodes;
        std::uint64_t d = node.depth;
        std::uint64_t seen = depth.load();
        while (d > seen && !depth.compare_exchange_weak(seen, d)) {
        }
        Outcome o = s.process(node);
        if (o.kind == Outcome::Witness) found = std::move(o.witness);
        if (o.kind == Outcome::DepthLimit) incomplete = true;
        if (o.kind == Outcome::Split) {
          ++splits;
          kids = s.children(node, o.relu);
        }
      } catch (...) {
        lock.lock();
        if (!failure) failure = std::current_exception();
        stop = true;
        --busy;
        cv.notify_all();
        return;
      }

      lock.lock();
      --busy;
      if (found) {
        if (!witness) witness = std::move(found);
        stop = true;
      }
      for (auto& k : kids) queue.push_back(std::move(k));
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SearchResult result;
  result.witness = std::move(witness);
  result.incomplete = incomplete || (!result.witness && !queue.empty());
  result.stats.nodes_explored = nodes;
  result.stats.splits = splits;
  result.stats.max_depth = depth;
  return result;
}

}  // namespace

SearchResult search(const AffineNet& net, const ReachQuery& query, const SearchOptions& options,
                    std::optional<Clock::time_point> deadline) {
  const Searcher s(net, query, options);
  if (query.disjuncts.empty()) return {};
  return options.workers <= 1 ? search_serial(s, deadline) : search_parallel(s, options.workers, deadline);
}

template <ExactScalar S>
Verdict verify_reach_bab(const Network<S>& net, const ReachSpec& spec, const SearchOptions& options) {
  const auto start = Clock::now();
  const AffineNet lowered = lower_network(net);
  if (static_cast<Index>(spec.output.coefficients.size()) != lowered.output_size()) {
    throw DimensionError("verify_reach", std::to_string(lowered.output_size()) + " output coefficients",
                         static_cast<Index>(spec.output.coefficients.size()), 1);
  }
  QueryConstraint negated;
  for (std::size_t i = 0; i < spec.output.coefficients.size(); ++i) {
    if (spec.output.coefficients[i] != 0) negated.outputs.emplace_back(static_cast<Index>(i), spec.output.coefficients[i]);
  }
  negated.comparator = negate(spec.output.comparator);
  negated.rhs = spec.output.threshold;
  const ReachQuery query{spec.input_box, {{negated}}};

  const SearchResult r = search(lowered, query, options, deadline_from(options, start));
  Verdict verdict;
  verdict.stats = r.stats;
  if (r.witness) {
    if (!spec.input_box.contains(*r.witness) || spec.output.holds(run_on(net, *r.witness))) {
      throw std::logic_error("reach witness does not violate the property under run");
    }
    verdict.status = Status::Refuted;
    verdict.witness = r.witness;
  } else {
    verdict.status = r.incomplete ? Status::Timeout : Status::Proved;
  }
  verdict.stats.elapsed_ms = elapsed_since(start);
  return verdict;
}

namespace {

/// Output-side violations for a center output y: each disjunct is one way
/// the consequent can fail. `threshold` is delta for SR and the Lipschitz
/// bound L·dist for LR under L0.
std::vector<std::vector<QueryConstraint>> l0_or_class_violations(const RobustnessSpec& spec,
                                                                 const Vector<Rational>& y,
                                                                 const Rational& threshold) {
  std::vector<std::vector<QueryConstraint>> out;
  const Index n = y.size();
  const Index c = static_cast<Index>(spec.target_class);
  switch (spec.variant) {
    case RobustnessVariant::CR:
      for (Index j = 0; j < n; ++j) {
        if (j == c) continue;
        out.push_back({QueryConstraint{{}, {{j, Rational(1)}, {c, Rational(-1)}},
                                       j < c ? Comparator::Ge : Comparator::Gt, Rational(0)}});
      }
      break;
    case RobustnessVariant::ACR:
      out.push_back({QueryConstraint{{}, {{c, Rational(1)}}, Comparator::Lt, spec.eta}});
      break;
    case RobustnessVariant::SR:
    case RobustnessVariant::LR: {
      // More than `threshold` outputs move: some floor(threshold)+1 of them
      // each move up or down.
      const std::size_t k = floor_count(threshold) + 1;
      if (k > static_cast<std::size_t>(n)) break;
      std::vector<Index> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<Index>(i);
      for (;;) {
        for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << k); ++signs) {
          std::vector<QueryConstraint> conj;
          for (std::size_t i = 0; i < k; ++i) {
            const bool up = ((signs >> i) & 1U) == 0;
            conj.push_back(QueryConstraint{{}, {{idx[i], Rational(1)}}, up ? Comparator::Gt : Comparator::Lt,
                                           y(idx[i])});
          }
          out.push_back(std::move(conj));
        }
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - static_cast<Index>(k + 1 - pos)) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
      }
      break;
    }
  }
  return out;
}

std::vector<std::vector<QueryConstraint>> linf_violations(const RobustnessSpec& spec,
                                                          const Vector<Rational>& center,
                                                          const Vector<Rational>& y) {
  if (spec.variant == RobustnessVariant::CR || spec.variant == RobustnessVariant::ACR) {
    return l0_or_class_violations(spec, y, Rational(0));
  }
  std::vector<std::vector<QueryConstraint>> out;
  for (Index i = 0; i < y.size(); ++i) {
    for (int s : {1, -1}) {
      const Rational sign(s);
      if (spec.variant == RobustnessVariant::SR) {
        // s·(f_i - y_i) > delta
        out.push_back({QueryConstraint{{}, {{i, sign}}, Comparator::Gt, sign * y(i) + spec.delta}});
        continue;
      }
      // s·(f_i - y_i) > L·|x_j - c_j| for every j and both signs of x_j - c_j.
      std::vector<QueryConstraint> conj;
      if (spec.lipschitz == 0 || center.size() == 0) {
        conj.push_back(QueryConstraint{{}, {{i, sign}}, Comparator::Gt, sign * y(i)});
      }
      for (Index j = 0; j < center.size() && spec.lipschitz != 0; ++j) {
        for (int t : {1, -1}) {
          const Rational lt = spec.lipschitz * Rational(t);
          conj.push_back(QueryConstraint{{{j, -lt}}, {{i, sign}}, Comparator::Gt, sign * y(i) - lt * center(j)});
        }
      }
      out.push_back(std::move(conj));
    }
  }
  return out;
}

template <ExactScalar S>
void recheck_robustness(const Network<S>& net, const Vector<Rational>& center, const RobustnessSpec& spec,
                        const Vector<Rational>& witness) {
  bool integral = true;
  for (Index i = 0; i < witness.size(); ++i) integral = integral && is_integral(witness(i));
  bool holds = false;
  if constexpr (std::same_as<S, Integer>) {
    if (!integral) {
      const Network<Rational> wide = to_rational(net);
      holds = RobustnessEvaluator<Rational>(wide, center, spec).holds_at(witness);
    } else {
      holds = RobustnessEvaluator<S>(net, center, spec).holds_at(witness);
    }
  } else {
    holds = RobustnessEvaluator<S>(net, center, spec).holds_at(witness);
  }
  if (holds) throw std::logic_error("robustness witness does not violate the property under run");
}

}  // namespace

template <ExactScalar S>
Verdict verify_robustness_bab(const Network<S>& net, const Vector<Rational>& center,
                              const RobustnessSpec& spec, const SearchOptions& options) {
  const auto start = Clock::now();
  const auto deadline = deadline_from(options, start);
  const RobustnessEvaluator<S> eval(net, center, spec);
  const AffineNet lowered = lower_network(net);
  const Vector<Rational>& y = eval.center_output();

  Verdict verdict;
  verdict.status = Status::Proved;
  bool incomplete = false;
  auto run_query = [&](const ReachQuery& q) {
    const SearchResult r = search(lowered, q, options, deadline);
    verdict.stats += r.stats;
    incomplete = incomplete || r.incomplete;
    if (r.witness) {
      verdict.status = Status::Refuted;
      verdict.witness = r.witness;
      return false;
    }
    if (expired(deadline)) {
      incomplete = true;
      return false;
    }
    return true;
  };

  if (spec.norm == Norm::L0) {
    if (spec.constraint != InputConstraint::Binary) {
      throw UnsupportedQuery("L0 branch and bound needs the binary input constraint");
    }
    const std::size_t eps = floor_count(spec.epsilon);
    for_each_in_ball(center, eps, [&](const Vector<Rational>& x) {
      if (!satisfies_constraint(spec, x)) return true;
      const Rational flips = norm_dist(x, center, Norm::L0);
      const Rational threshold = spec.variant == RobustnessVariant::LR ? spec.lipschitz * flips : spec.delta;
      ReachQuery q{Box::point(x), l0_or_class_violations(spec, y, threshold)};
      return run_query(q);
    });
  } else {
    if (spec.constraint == InputConstraint::Binary) {
      throw UnsupportedQuery("Linf branch and bound over binary inputs is not supported");
    }
    std::vector<Interval> bounds;
    bool empty = false;
    for (Index i = 0; i < center.size(); ++i) {
      Interval iv{center(i) - spec.epsilon, center(i) + spec.epsilon};
      if (spec.domain) {
        iv.lo = std::max(iv.lo, spec.domain->lo);
        iv.hi = std::min(iv.hi, spec.domain->hi);
      }
      empty = empty || iv.hi < iv.lo;
      bounds.push_back(std::move(iv));
    }
    if (!empty) run_query(ReachQuery{Box(std::move(bounds)), linf_violations(spec, center, y)});
  }

  if (verdict.status == Status::Refuted) {
    recheck_robustness(net, center, spec, *verdict.witness);
  } else if (incomplete) {
    verdict.status = Status::Timeout;
  }
  verdict.stats.elapsed_ms = elapsed_since(start);
  return verdict;
}

#define EXACTNN_VERIFIER_INSTANTIATE(S)                                                      \
  template Verdict verify_robustness_brute(const Network<S>&, const Vector<Rational>&,       \
                                           const RobustnessSpec&, const SearchOptions&);     \
  template Verdict verify_reach_bab(const Network<S>&, const ReachSpec&, const SearchOptions&); \
  template Verdict verify_robustness_bab(const Network<S>&, const Vector<Rational>&,         \
                                         const RobustnessSpec&, const SearchOptions&);
EXACTNN_VERIFIER_INSTANTIATE(Rational)
EXACTNN_VERIFIER_INSTANTIATE(Integer)

}  // namespace exactnn
