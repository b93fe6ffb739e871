#include "optsample/optimize.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <stdexcept>

namespace optsample {

namespace {

ExtReal ctx_zero(const EvalContext& ctx) {
  return ctx.mode == EvalMode::kExact ? ExtReal::exact(Rational(0))
                                      : ExtReal::flt(BigFloat::from_long(0, ctx.mantissa_bits));
}

// Cost of m -> m + delta for one positive-probability entry q = p_i.
ExtReal entry_cost(const Rational& q, const mpz_class& m, int delta, const mpz_class& z,
                   const DivergenceKind& kind, const EvalContext& ctx) {
  mpz_class target = m + delta;
  if (target < 0 || target > z) return ExtReal::pos_inf();
  Rational zq = Rational(z) * q;
  ExtReal g_new = gen_eval(kind, ExtReal::exact(Rational(target) / zq), ctx);
  ExtReal g_old = gen_eval(kind, ExtReal::exact(Rational(m) / zq), ctx);
  bool new_inf = g_new.is_pos_inf();
  bool old_inf = g_old.is_pos_inf();
  if (new_inf && old_inf) return ctx_zero(ctx);
  if (new_inf) return ExtReal::pos_inf();
  if (old_inf) return ExtReal::neg_inf();
  return q * (g_new - g_old);
}

// Pair sums where an impossible half (+inf) poisons the pair even against
// -inf: a swap needs both halves to be applicable moves.
ExtReal pair_sum(const ExtReal& a, const ExtReal& b) {
  if (a.is_pos_inf() || b.is_pos_inf()) return ExtReal::pos_inf();
  if (a.is_neg_inf() || b.is_neg_inf()) return ExtReal::neg_inf();
  return a + b;
}

struct HeapEntry {
  ExtReal cost;
  size_t idx;
  uint64_t version;
};

// Min-heap order: exact (cost, index) lexicographic.
bool entry_greater(const HeapEntry& a, const HeapEntry& b) {
  int c = ExtReal::compare(a.cost, b.cost, nullptr);
  if (c != 0) return c > 0;
  return a.idx > b.idx;
}

// Lazy min-heap over (cost, index): stale versions are dropped at pop time;
// float near-ties (within the context tolerance of the top) are gathered and
// resolved to the lowest index.
class CostHeap {
 public:
  explicit CostHeap(const BigFloat& tol) : tol_(tol) {}

  void push(ExtReal cost, size_t idx, uint64_t version) {
    heap_.push_back({std::move(cost), idx, version});
    std::push_heap(heap_.begin(), heap_.end(), entry_greater);
  }

  // Lowest-cost live entry under the tie rule; removed from the heap.
  std::optional<HeapEntry> pop_best(const std::vector<uint64_t>& versions) {
    std::optional<HeapEntry> top = pop_live(versions);
    if (!top) return std::nullopt;
    std::vector<HeapEntry> ties;
    while (true) {
      std::optional<HeapEntry> next = pop_live(versions);
      if (!next) break;
      if (ExtReal::compare(next->cost, top->cost, &tol_) != 0) {
        push(std::move(next->cost), next->idx, next->version);
        break;
      }
      ties.push_back(std::move(*next));
    }
    for (auto& t : ties) {
      if (t.idx < top->idx) std::swap(t, *top);
    }
    for (auto& t : ties) push(std::move(t.cost), t.idx, t.version);
    return top;
  }

 private:
  std::optional<HeapEntry> pop_live(const std::vector<uint64_t>& versions) {
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), entry_greater);
      HeapEntry e = std::move(heap_.back());
      heap_.pop_back();
      if (e.version == versions[e.idx]) return e;
    }
    return std::nullopt;
  }

  BigFloat tol_;
  std::vector<HeapEntry> heap_;
};

}  // namespace

ExtReal step_cost(const std::vector<Rational>& p, const Assignment& a, size_t i, int delta,
                  const DivergenceKind& kind, const EvalContext& ctx) {
  validate_context(kind, ctx);
  if (i >= p.size() || i >= a.m.size()) throw std::out_of_range("step_cost: index out of range");
  if (delta != 1 && delta != -1) throw std::invalid_argument("step_cost: delta must be +1 or -1");
  mpz_class target = a.m[i] + delta;
  if (target < 0 || target > a.z) return ExtReal::pos_inf();
  if (p[i].is_zero()) {
    ExtReal s = slope_at_infinity(kind);
    if (s.is_pos_inf()) {
      // Contribution is +inf whenever M_i > 0; differences follow set rules.
      bool inf_before = a.m[i] > 0;
      bool inf_after = target > 0;
      if (inf_before && inf_after) return ctx_zero(ctx);
      if (inf_after) return ExtReal::pos_inf();
      return ExtReal::neg_inf();
    }
    Rational unit = s.exact_value() / Rational(a.z);
    Rational cost = delta > 0 ? unit : -unit;
    return ctx.mode == EvalMode::kExact
               ? ExtReal::exact(cost)
               : ExtReal::flt(BigFloat::from_rational(cost, ctx.mantissa_bits));
  }
  return entry_cost(p[i], a.m[i], delta, a.z, kind, ctx);
}

Assignment optimize_z(const std::vector<Rational>& p, const mpz_class& z,
                      const DivergenceKind& kind, const EvalContext& ctx, OptimizeStats* stats,
                      bool trace) {
  validate_context(kind, ctx);
  check_distribution(p);
  if (z < 1) throw std::domain_error("optimize_z: Z must be >= 1");
  const size_t n = p.size();

  std::vector<size_t> pos;
  for (size_t i = 0; i < n; ++i) {
    if (!p[i].is_zero()) pos.push_back(i);
  }
  Assignment out;
  out.z = z;
  out.m.assign(n, 0);
  if (stats != nullptr) *stats = OptimizeStats{};
  if (pos.size() == 1) {
    out.m[pos[0]] = z;
    return out;
  }

  const size_t np = pos.size();
  const BigFloat tol = ctx.tolerance();
  const ExtReal zero = ctx_zero(ctx);
  std::vector<Rational> q(np);
  std::vector<mpz_class> m(np);
  for (size_t i = 0; i < np; ++i) q[i] = p[pos[i]];

  // Step 1: per-entry rounding; floor wins ties (g(floor ratio) <= g(ceil ratio)).
  for (size_t i = 0; i < np; ++i) {
    Rational zq = Rational(z) * q[i];
    mpz_class f = zq.floor();
    ExtReal c_floor = gen_eval(kind, ExtReal::exact(Rational(f) / zq), ctx);
    ExtReal c_ceil = gen_eval(kind, ExtReal::exact(Rational(mpz_class(f + 1)) / zq), ctx);
    m[i] = ExtReal::compare(c_floor, c_ceil, &tol) <= 0 ? f : f + 1;
  }

  auto push_costs = [&](CostHeap& inc, CostHeap& dec, const std::vector<uint64_t>& ver, size_t i) {
    if (m[i] + 1 <= z) inc.push(entry_cost(q[i], m[i], +1, z, kind, ctx), i, ver[i]);
    if (m[i] - 1 >= 0) dec.push(entry_cost(q[i], m[i], -1, z, kind, ctx), i, ver[i]);
  };

  // Step 3: swap a unit between the cheapest increment and the cheapest
  // decrement while that strictly improves the objective.
  {
    CostHeap inc(tol), dec(tol);
    std::vector<uint64_t> ver(np, 0);
    for (size_t i = 0; i < np; ++i) push_costs(inc, dec, ver, i);
    size_t iters = 0;
    while (true) {
      std::optional<HeapEntry> bi = inc.pop_best(ver);
      std::optional<HeapEntry> bd = dec.pop_best(ver);
      std::optional<std::pair<size_t, size_t>> chosen;
      ExtReal chosen_sum;
      if (bi && bd && bi->idx != bd->idx) {
        chosen = {bi->idx, bd->idx};
        chosen_sum = pair_sum(bi->cost, bd->cost);
      } else if (bi && bd) {
        std::optional<HeapEntry> si = inc.pop_best(ver);
        std::optional<HeapEntry> sd = dec.pop_best(ver);
        if (sd) {
          chosen = {bi->idx, sd->idx};
          chosen_sum = pair_sum(bi->cost, sd->cost);
        }
        if (si) {
          ExtReal alt = pair_sum(si->cost, bd->cost);
          int c = chosen ? ExtReal::compare(alt, chosen_sum, &tol) : -1;
          bool better = c < 0 || (c == 0 && (!chosen || si->idx < chosen->first ||
                                             (si->idx == chosen->first && bd->idx < chosen->second)));
          if (better) {
            chosen = {si->idx, bd->idx};
            chosen_sum = alt;
          }
        }
        if (si) inc.push(std::move(si->cost), si->idx, si->version);
        if (sd) dec.push(std::move(sd->cost), sd->idx, sd->version);
      }
      if (bi) inc.push(std::move(bi->cost), bi->idx, bi->version);
      if (bd) dec.push(std::move(bd->cost), bd->idx, bd->version);
      if (!chosen || ExtReal::compare(chosen_sum, zero, &tol) >= 0) break;
      m[chosen->first] += 1;
      m[chosen->second] -= 1;
      ver[chosen->first] += 1;
      ver[chosen->second] += 1;
      push_costs(inc, dec, ver, chosen->first);
      push_costs(inc, dec, ver, chosen->second);
      ++iters;
      if (iters > np) {
        throw std::logic_error("optimize_z: swap loop exceeded its n-iteration bound");
      }
      if (stats != nullptr && trace) {
        stats->moves.push_back({3, pos[chosen->first], pos[chosen->second], true, true, chosen_sum});
      }
    }
    if (stats != nullptr) stats->swap_iterations = iters;
  }

  // Steps 4-7: restore sum(M) = Z with |S| cheapest single-direction moves.
  mpz_class sum = 0;
  for (const auto& v : m) sum += v;
  mpz_class s = sum - z;
  if (stats != nullptr) stats->shortfall = s;
  if (mpz_class(::abs(s)) > mpz_class(np)) {
    throw std::logic_error("optimize_z: fill shortfall exceeded its bound");
  }
  if (s != 0) {
    int delta = s < 0 ? +1 : -1;
    CostHeap fill(tol);
    std::vector<uint64_t> ver(np, 0);
    for (size_t i = 0; i < np; ++i) {
      if (m[i] + delta >= 0 && m[i] + delta <= z) {
        fill.push(entry_cost(q[i], m[i], delta, z, kind, ctx), i, ver[i]);
      }
    }
    mpz_class todo = ::abs(s);
    for (mpz_class step = 0; step < todo; ++step) {
      std::optional<HeapEntry> best = fill.pop_best(ver);
      if (!best) throw std::logic_error("optimize_z: fill loop ran out of applicable moves");
      size_t i = best->idx;
      m[i] += delta;
      ver[i] += 1;
      if (m[i] + delta >= 0 && m[i] + delta <= z) {
        fill.push(entry_cost(q[i], m[i], delta, z, kind, ctx), i, ver[i]);
      }
      if (stats != nullptr && trace) {
        Move mv;
        mv.step = 7;
        mv.cost = best->cost;
        if (delta > 0) {
          mv.inc_index = pos[i];
          mv.has_inc = true;
        } else {
          mv.dec_index = pos[i];
          mv.has_dec = true;
        }
        stats->moves.push_back(mv);
      }
    }
  }

  for (size_t i = 0; i < np; ++i) out.m[pos[i]] = m[i];
  return out;
}

Assignment brute_force_optimum(const std::vector<Rational>& p, const mpz_class& z,
                               const DivergenceKind& kind, const EvalContext& ctx) {
  validate_context(kind, ctx);
  check_distribution(p);
  if (z < 1) throw std::domain_error("brute_force_optimum: Z must be >= 1");
  const size_t n = p.size();
  mpz_class count;
  mpz_bin_ui(count.get_mpz_t(), mpz_class(z + n - 1).get_mpz_t(), static_cast<unsigned long>(n - 1));
  if (count > 1000000) {
    throw std::domain_error("brute_force_optimum: " + count.get_str() +
                            " compositions exceed the 10^6 enumeration guard");
  }
  const BigFloat tol = ctx.tolerance();
  std::vector<mpz_class> cur(n, 0);
  std::optional<Assignment> best;
  ExtReal best_val;
  // Ascending lexicographic enumeration with <=-replacement keeps the
  // lexicographically greatest minimizer.
  auto consider = [&]() {
    ExtReal val = divergence(p, cur, z, kind, ctx);
    if (!best || ExtReal::compare(val, best_val, &tol) <= 0) {
      best = Assignment{cur, z};
      best_val = val;
    }
  };
  auto rec = [&](auto&& self, size_t idx, const mpz_class& remaining) -> void {
    if (idx + 1 == n) {
      cur[idx] = remaining;
      consider();
      return;
    }
    for (mpz_class v = 0; v <= remaining; ++v) {
      cur[idx] = v;
      self(self, idx + 1, remaining - v);
    }
  };
  if (n == 1) {
    cur[0] = z;
    consider();
  } else {
    rec(rec, 0, z);
  }
  return *best;
}

ApproxResult closest_approx(const std::vector<Rational>& p, uint32_t k,
                            const DivergenceKind& kind, const EvalContext& ctx, ApproxClass cls) {
  validate_context(kind, ctx);
  check_distribution(p);
  if (k < 1) throw std::domain_error("closest_approx: k must be >= 1");
  std::vector<uint32_t> ls;
  if (cls == ApproxClass::kBoundedDyadic) {
    ls.push_back(k);
  } else {
    for (uint32_t l = 0; l <= k; ++l) ls.push_back(l);
  }
  const BigFloat tol = ctx.tolerance();
  struct Candidate {
    PrecisionSpec spec;
    Assignment a;
    ExtReal err;
  };
  std::vector<Candidate> cands;
  cands.reserve(ls.size());
  for (uint32_t l : ls) {
    PrecisionSpec spec{k, l};
    mpz_class z = z_kl(spec);
    Assignment a = optimize_z(p, z, kind, ctx);
    ExtReal err = divergence(p, a.m, z, kind, ctx);
    cands.push_back({spec, std::move(a), std::move(err)});
  }
  size_t best = 0;
  for (size_t i = 1; i < cands.size(); ++i) {
    if (ExtReal::compare(cands[i].err, cands[best].err, &tol) < 0) best = i;
  }
  // Ties at the minimum prefer the largest l (the sweep is ascending in l).
  size_t chosen = best;
  for (size_t i = 0; i < cands.size(); ++i) {
    if (ExtReal::compare(cands[i].err, cands[best].err, &tol) == 0 && cands[i].spec.l >= cands[chosen].spec.l) {
      chosen = i;
    }
  }
  ApproxResult res;
  res.spec = cands[chosen].spec;
  res.assignment = std::move(cands[chosen].a);
  res.kind = kind;
  res.ctx = ctx;
  res.error = std::move(cands[chosen].err);
  return res;
}

}  // namespace optsample
