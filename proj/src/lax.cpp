#include "laxkit/lax.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include "laxkit/json_io.hpp"

namespace laxkit {

RelSeq::RelSeq(std::vector<Rel> rels) : rels_(std::move(rels)) {
  if (rels_.empty()) throw std::invalid_argument("RelSeq: empty sequence");
  for (std::size_t i = 0; i + 1 < rels_.size(); ++i)
    if (rels_[i].cod() != rels_[i + 1].dom())
      throw std::invalid_argument("RelSeq: stage " + std::to_string(i) +
                                  " does not compose");
}

Rel RelSeq::composite() const {
  Rel acc = rels_.front();
  for (std::size_t i = 1; i < rels_.size(); ++i) acc = compose(acc, rels_[i]);
  return acc;
}

LiftedRel span_lift(const Functor& F, const Span& span) {
  FinFun lp = F.lift(span.left);
  FinFun rq = F.lift(span.right);
  Rel out(lp.cod(), rq.cod());
  for (std::size_t w = 0; w < lp.dom().size(); ++w) out.add(lp(w), rq(w));
  return out;
}

namespace {

// The lift only depends on the apex through its size, so the apex is
// re-canonicalised; carrier and lift memos then hit by size instead of
// accumulating one entry per relation.
Span renamed_canonical_span(const Rel& r) {
  Span s = canonical_span(r);
  FinSet apex = canonical_set(s.apex.size(), "w");
  return Span(apex, FinFun(apex, r.dom(), s.left.table()),
              FinFun(apex, r.cod(), s.right.table()));
}

}  // namespace

LiftedRel barr_lift(const Functor& F, const Rel& r) {
  return span_lift(F, renamed_canonical_span(r));
}

bool barr_member(const Functor& F, const Rel& r, const std::string& u,
                 const std::string& v) {
  if (auto fast = F.barr_member_fast(r, u, v)) return *fast;
  Span span = renamed_canonical_span(r);
  FinFun lp = F.lift(span.left);
  FinFun rq = F.lift(span.right);
  std::size_t ui = lp.cod().index_of(u);
  std::size_t vi = rq.cod().index_of(v);
  for (std::size_t w = 0; w < lp.dom().size(); ++w)
    if (lp(w) == ui && rq(w) == vi) return true;
  return false;
}

LiftedRel barr_lift_composite(const Functor& F, const RelSeq& seq) {
  Rel acc = barr_lift(F, seq.at(0));
  for (std::size_t i = 1; i < seq.size(); ++i)
    acc = compose(acc, barr_lift(F, seq.at(i)));
  return acc;
}

LiftedRel difunctional_lax_value(const Functor& F, const Cospan& c) {
  FinFun ff = F.lift(c.left);
  FinFun fg = F.lift(c.right);
  Rel out(ff.dom(), fg.dom());
  for (std::size_t u = 0; u < ff.dom().size(); ++u)
    for (std::size_t v = 0; v < fg.dom().size(); ++v)
      if (ff(u) == fg(v)) out.add(u, v);
  return out;
}

// ---------------------------------------------------------------------------
// Sequence enumeration helpers shared by laxification and normality search.

namespace {

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > SIZE_MAX / b) return SIZE_MAX;
  return a * b;
}

std::size_t sat_add(std::size_t a, std::size_t b) {
  return a > SIZE_MAX - b ? SIZE_MAX : a + b;
}

std::size_t pow2_sat(std::size_t bits) {
  return bits >= 63 ? SIZE_MAX : (std::size_t{1} << bits);
}

// Number of composable sequences source -> mids -> target with lengths in
// [2, max_len] and canonical mid sizes <= max_mid.
std::size_t sequence_space(std::size_t src, std::size_t tgt, std::size_t max_len,
                           std::size_t max_mid) {
  std::size_t total = 0;
  std::vector<std::size_t> mids;
  std::function<void(std::size_t)> rec = [&](std::size_t remaining) {
    if (remaining == 0) {
      std::size_t prod = 1;
      std::size_t prev = src;
      for (std::size_t m : mids) {
        prod = sat_mul(prod, pow2_sat(prev * m));
        prev = m;
      }
      prod = sat_mul(prod, pow2_sat(prev * tgt));
      total = sat_add(total, prod);
      return;
    }
    for (std::size_t m = 0; m <= max_mid; ++m) {
      mids.push_back(m);
      rec(remaining - 1);
      mids.pop_back();
    }
  };
  for (std::size_t n = 2; n <= max_len; ++n) rec(n - 1);
  return total;
}

Rel rel_from_mask(const FinSet& dom, const FinSet& cod, std::uint64_t mask) {
  Rel r(dom, cod);
  const std::size_t w = cod.size();
  for (std::size_t i = 0; i < dom.size(); ++i)
    for (std::size_t j = 0; j < w; ++j)
      if (mask & (std::uint64_t{1} << (i * w + j))) r.add(i, j);
  return r;
}

// Rows of the prefix composite must stay nonempty wherever the target
// relation has a nonempty row; otherwise no extension can reach the target.
bool prefix_viable(const Rel& prefix, const std::vector<bool>& target_rows) {
  auto rows = rel_domain_mask(prefix);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (target_rows[i] && !rows[i]) return false;
  return true;
}

// Exhaustively enumerate all sequences with composite exactly `target`,
// lengths in [1, max_len], canonical "m"-prefixed mids of size <= max_mid.
void enumerate_sequences(const Rel& target, std::size_t max_len, std::size_t max_mid,
                         const std::function<void(const std::vector<Rel>&)>& fn) {
  std::vector<Rel> stages;
  {
    std::vector<Rel> one{target};
    fn(one);
  }
  const std::vector<bool> target_rows = rel_domain_mask(target);
  std::vector<FinSet> mids(max_mid + 1);
  for (std::size_t m = 0; m <= max_mid; ++m) mids[m] = canonical_set(m, "m");

  // The prefix travels by value: the stages vector reallocates while the
  // recursion is live.
  std::function<void(std::size_t, std::size_t, Rel)> extend =
      [&](std::size_t n, std::size_t depth, Rel prefix) {
        // prefix : X ⇸ M(depth). Remaining stages: n - depth.
        if (depth + 1 == n) {
          const FinSet& d = prefix.cod();
          const std::size_t bits = d.size() * target.cod().size();
          if (bits > 62) return;
          for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
            Rel last = rel_from_mask(d, target.cod(), mask);
            if (compose(prefix, last) == target) {
              stages.push_back(last);
              std::vector<Rel> seq(stages.begin() + 1, stages.end());
              fn(seq);
              stages.pop_back();
            }
          }
          return;
        }
        for (std::size_t m = 0; m <= max_mid; ++m) {
          const FinSet& d = prefix.cod();
          const std::size_t bits = d.size() * m;
          if (bits > 62) continue;
          for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
            Rel stage = rel_from_mask(d, mids[m], mask);
            Rel next = compose(prefix, stage);
            if (!prefix_viable(next, target_rows)) continue;
            stages.push_back(stage);
            extend(n, depth + 1, next);
            stages.pop_back();
          }
        }
      };

  for (std::size_t n = 2; n <= max_len; ++n) {
    stages.assign({Rel::identity(target.dom())});
    extend(n, 0, stages.front());
  }
}

std::vector<Rel> random_sequence(const Rel& target, std::size_t max_len,
                                 std::size_t max_mid, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len_dist(2, max_len);
  std::uniform_int_distribution<std::size_t> mid_dist(0, max_mid);
  std::size_t n = len_dist(rng);
  std::vector<FinSet> sets{target.dom()};
  for (std::size_t i = 1; i < n; ++i) sets.push_back(canonical_set(mid_dist(rng), "m"));
  sets.push_back(target.cod());
  std::vector<Rel> seq;
  for (std::size_t i = 0; i < n; ++i) {
    Rel r(sets[i], sets[i + 1]);
    for (std::size_t a = 0; a < sets[i].size(); ++a)
      for (std::size_t b = 0; b < sets[i + 1].size(); ++b)
        if (rng() & 1) r.add(a, b);
    seq.push_back(std::move(r));
  }
  return seq;
}

}  // namespace

LiftedRel laxification_approx(const Functor& F, const Rel& r, LaxifyOptions opts) {
  if (opts.max_mid == 0) opts.max_mid = r.dom().size() + 2;
  if (opts.max_len < 1) throw std::invalid_argument("laxification_approx: max_len < 1");

  // Stages whose span apex exceeds the functor's size guard cannot be
  // lifted; their terms are dropped, which keeps the join a lower bound.
  Rel join(F.carrier(r.dom()), F.carrier(r.cod()));
  auto absorb = [&](const std::vector<Rel>& seq) {
    try {
      join = rel_join(join, barr_lift_composite(F, RelSeq(seq)));
    } catch (const SizeGuardError&) {
    }
  };
  absorb({r});
  if (opts.max_len == 1) return join;

  std::size_t space = sequence_space(r.dom().size(), r.cod().size(), opts.max_len,
                                     opts.max_mid);
  if (space <= opts.budget) {
    enumerate_sequences(r, opts.max_len, opts.max_mid,
                        [&](const std::vector<Rel>& seq) {
                          if (seq.size() > 1) absorb(seq);
                        });
    return join;
  }

  // Too large to exhaust: always include every graph/cograph length-2
  // decomposition r = (graph h)° · (graph e), then sample the rest.
  for (std::size_t m = 0; m <= opts.max_mid; ++m) {
    FinSet mid = canonical_set(m, "m");
    std::vector<std::size_t> ed(r.dom().size(), 0), hd(r.cod().size(), 0);
    if (m == 0 && (r.dom().size() > 0 || r.cod().size() > 0)) continue;
    for (;;) {
      FinFun e(r.dom(), mid, ed);
      std::vector<std::size_t> hd2(r.cod().size(), 0);
      for (;;) {
        FinFun h(r.cod(), mid, hd2);
        if (cospan_relation(Cospan(mid, e, h)) == r)
          absorb({Rel::graph(e), converse(Rel::graph(h))});
        std::size_t i = hd2.size();
        bool done = true;
        while (i-- > 0) {
          if (++hd2[i] < m) { done = false; break; }
          hd2[i] = 0;
        }
        if (done) break;
      }
      std::size_t i = ed.size();
      bool done = true;
      while (i-- > 0) {
        if (++ed[i] < m) { done = false; break; }
        ed[i] = 0;
      }
      if (done) break;
    }
  }

  std::mt19937_64 rng(opts.seed);
  for (std::size_t attempt = 0; attempt < opts.budget; ++attempt) {
    auto seq = random_sequence(r, opts.max_len, opts.max_mid, rng);
    Rel comp = RelSeq(seq).composite();
    if (comp == r) absorb(seq);
  }
  return join;
}

// ---------------------------------------------------------------------------
// Normality

namespace {

// Least violating pair of a subidentity check, with a witnessing chain.
std::optional<NormalityWitness> subidentity_violation(const Functor& F,
                                                      const RelSeq& seq) {
  std::vector<Rel> lifts;
  lifts.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) lifts.push_back(barr_lift(F, seq.at(i)));
  Rel composite = lifts.front();
  for (std::size_t i = 1; i < lifts.size(); ++i) composite = compose(composite, lifts[i]);

  std::optional<std::pair<std::size_t, std::size_t>> bad;
  for (auto [u, v] : composite.pairs())
    if (u != v) { bad = {u, v}; break; }
  if (!bad) return std::nullopt;

  NormalityWitness w;
  w.codes = {composite.dom().at(bad->first), composite.cod().at(bad->second)};
  w.sequence = seq.rels();

  // Backward reachability, then a greedy least chain.
  const std::size_t n = lifts.size();
  std::vector<std::vector<bool>> back(n + 1);
  back[n].assign(lifts.back().cod().size(), false);
  back[n][bad->second] = true;
  for (std::size_t i = n; i-- > 1;) {
    back[i].assign(lifts[i].dom().size(), false);
    for (std::size_t a = 0; a < back[i].size(); ++a)
      for (std::size_t b = 0; b < back[i + 1].size(); ++b)
        if (back[i + 1][b] && lifts[i].test(a, b)) { back[i][a] = true; break; }
  }
  std::size_t cur = bad->first;
  w.chain.push_back(lifts[0].dom().at(cur));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < lifts[i].cod().size(); ++b) {
      bool viable = (i + 1 == n) ? (b == bad->second) : back[i + 1][b];
      if (viable && lifts[i].test(cur, b)) {
        cur = b;
        w.chain.push_back(lifts[i].cod().at(b));
        break;
      }
    }
  }
  return w;
}

}  // namespace

std::optional<NormalityWitness> verify_normality_violation(const Functor& F,
                                                           const RelSeq& seq) {
  if (seq.source() != seq.target())
    throw std::invalid_argument("verify_normality_violation: endpoints differ");
  if (seq.composite() != Rel::identity(seq.source()))
    throw std::invalid_argument(
        "verify_normality_violation: composite is not the identity");
  return subidentity_violation(F, seq);
}

NormalitySearchResult normality_search(const Functor& F, const FinSet& x,
                                       NormalitySearchOptions opts,
                                       const std::vector<RelSeq>& seeds) {
  if (opts.max_mid == 0) opts.max_mid = x.size() + 2;
  NormalitySearchResult result;

  for (const RelSeq& seed : seeds) {
    ++result.sequences_checked;
    if (auto w = verify_normality_violation(F, seed)) {
      result.witness = std::move(w);
      return result;
    }
  }

  Rel target = Rel::identity(x);
  std::size_t space = sequence_space(x.size(), x.size(), opts.max_len, opts.max_mid);
  if (space <= opts.exhaustive_ceiling) {
    struct FoundWitness {};
    result.exhausted = true;
    try {
      enumerate_sequences(target, opts.max_len, opts.max_mid,
                          [&](const std::vector<Rel>& seq) {
                            ++result.sequences_checked;
                            RelSeq s(seq);
                            try {
                              if (auto w = subidentity_violation(F, s)) {
                                result.witness = *w;
                                throw FoundWitness{};
                              }
                            } catch (const SizeGuardError&) {
                              ++result.skipped;
                            }
                          });
    } catch (const FoundWitness&) {
      result.exhausted = false;  // stopped at the first witness
    }
    if (result.skipped > 0) result.exhausted = false;
    return result;
  }

  std::mt19937_64 rng(opts.seed);
  for (std::size_t attempt = 0; attempt < opts.sample_budget; ++attempt) {
    auto seq = random_sequence(target, opts.max_len, opts.max_mid, rng);
    if (RelSeq(seq).composite() != target) continue;
    ++result.sequences_checked;
    try {
      if (auto w = subidentity_violation(F, RelSeq(seq))) {
        result.witness = std::move(w);
        return result;
      }
    } catch (const SizeGuardError&) {
      ++result.skipped;
    }
  }
  return result;
}

PairTripleReport check_pair_triple_normality(const FunctorHandle& F,
                                             std::size_t size_bound) {
  PairTripleReport report;
  report.bound = size_bound;

  // Pointwise-maximal r2 with r2·r1 <= identity: (j, i) allowed iff the
  // r1-preimage of j is contained in {i}.
  auto max_closer = [](const Rel& r) {
    Rel out(r.cod(), r.dom());
    for (std::size_t j = 0; j < r.cod().size(); ++j) {
      std::optional<std::size_t> only;
      bool multiple = false;
      for (std::size_t i = 0; i < r.dom().size(); ++i)
        if (r.test(i, j)) {
          if (only) { multiple = true; break; }
          only = i;
        }
      if (multiple) continue;
      if (only) {
        out.add(j, *only);
      } else {
        for (std::size_t i = 0; i < r.dom().size(); ++i) out.add(j, i);
      }
    }
    return out;
  };

  auto check_seq = [&](const std::vector<Rel>& rels) -> bool {
    RelSeq seq(rels);
    try {
      if (auto w = subidentity_violation(*F, seq)) {
        report.pass = false;
        report.witness = *w;
        return true;
      }
    } catch (const SizeGuardError&) {
      ++report.skipped;
    }
    return false;
  };

  for (std::size_t x = 0; x <= size_bound && report.pass; ++x) {
    FinSet sx = canonical_set(x);
    for (std::size_t y = 0; y <= size_bound && report.pass; ++y) {
      FinSet sy = canonical_set(y);
      const std::size_t bits = x * y;
      if (bits > 62) continue;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
        Rel r1 = rel_from_mask(sx, sy, mask);
        ++report.pairs_checked;
        if (check_seq({r1, max_closer(r1)})) break;
      }
    }
  }

  const std::size_t triple_bound = std::min<std::size_t>(size_bound, 2);
  for (std::size_t x = 0; x <= triple_bound && report.pass; ++x) {
    FinSet sx = canonical_set(x);
    for (std::size_t y = 0; y <= triple_bound && report.pass; ++y) {
      FinSet sy = canonical_set(y);
      for (std::size_t z = 0; z <= triple_bound && report.pass; ++z) {
        FinSet sz = canonical_set(z);
        const std::size_t bits1 = x * y, bits2 = y * z;
        if (bits1 > 62 || bits2 > 62) continue;
        for (std::uint64_t m1 = 0; m1 < (std::uint64_t{1} << bits1) && report.pass;
             ++m1) {
          Rel r1 = rel_from_mask(sx, sy, m1);
          for (std::uint64_t m2 = 0; m2 < (std::uint64_t{1} << bits2); ++m2) {
            Rel r2 = rel_from_mask(sy, sz, m2);
            ++report.triples_checked;
            if (check_seq({r1, r2, max_closer(compose(r1, r2))})) break;
          }
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sequence surgeries

std::pair<Rel, Rel> reduce_triple_by_pushout(const Rel& r1, const Rel& r2,
                                             const Rel& r3) {
  if (r1.cod() != r2.dom() || r2.cod() != r3.dom())
    throw std::invalid_argument("reduce_triple_by_pushout: not composable");
  Span span = canonical_span(r2);
  Cospan po = pushout(span);
  Rel r1p = compose(r1, Rel::graph(po.left));
  Rel r3p = compose(converse(Rel::graph(po.right)), r3);
  return {std::move(r1p), std::move(r3p)};
}

std::array<Rel, 3> split_middle(const Rel& r1, const Rel& r2, const Rel& r3) {
  if (r1.cod() != r2.dom() || r2.cod() != r3.dom())
    throw std::invalid_argument("split_middle: not composable");
  auto cod1 = rel_codomain_mask(r1);
  auto dom3 = rel_domain_mask(r3);
  auto pairs = r2.pairs();

  std::vector<std::string> yatoms = r2.dom().atoms();
  std::vector<std::optional<std::size_t>> ycopy(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [y, z] = pairs[k];
    if (!cod1[y]) {
      FinSet sofar(yatoms);
      yatoms.push_back(
          fresh_atom(sofar, "(" + r2.dom().at(y) + "," + r2.cod().at(z) + ")"));
      ycopy[k] = yatoms.size() - 1;
    }
  }
  FinSet yprime(yatoms);

  std::vector<std::string> zatoms = r2.cod().atoms();
  std::vector<std::optional<std::size_t>> zcopy(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [y, z] = pairs[k];
    if (!dom3[z]) {
      FinSet sofar(zatoms);
      zatoms.push_back(
          fresh_atom(sofar, "(" + r2.dom().at(y) + "," + r2.cod().at(z) + ")"));
      zcopy[k] = zatoms.size() - 1;
    }
  }
  FinSet zprime(zatoms);

  Rel s1(r1.dom(), yprime);
  for (auto [a, y] : r1.pairs()) s1.add(a, y);
  Rel s2(yprime, zprime);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [y, z] = pairs[k];
    s2.add(ycopy[k] ? *ycopy[k] : y, zcopy[k] ? *zcopy[k] : z);
  }
  Rel s3(zprime, r3.cod());
  for (auto [z, w] : r3.pairs()) s3.add(z, w);
  return {std::move(s1), std::move(s2), std::move(s3)};
}

namespace {

RelSeq totalize_impl(const RelSeq& seq, bool split_star) {
  const std::size_t n = seq.size();
  if (n < 3) throw std::invalid_argument("totalize_surjectivize: length must be >= 3");

  // Extended inner sets with their fresh chain atoms.
  struct Ext {
    FinSet set;
    std::size_t zero, one;  // equal when a single star is used
  };
  std::vector<Ext> ext;  // for X_1 .. X_{n-1}
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const FinSet& base = seq.at(i).cod();
    std::vector<std::string> atoms = base.atoms();
    if (split_star) {
      atoms.push_back(fresh_atom(base, "*"));
      FinSet s(atoms);
      ext.push_back({s, s.size() - 1, s.size() - 1});
    } else {
      atoms.push_back(fresh_atom(base, "0"));
      FinSet tmp(atoms);
      atoms.push_back(fresh_atom(tmp, "1"));
      FinSet s(atoms);
      ext.push_back({s, s.size() - 2, s.size() - 1});
    }
  }

  std::vector<Rel> out;
  {
    Rel first(seq.at(0).dom(), ext[0].set);
    for (auto [a, b] : seq.at(0).pairs()) first.add(a, b);
    out.push_back(std::move(first));
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Rel& r = seq.at(i);
    const Ext& d = ext[i - 1];
    const Ext& c = ext[i];
    Rel stage(d.set, c.set);
    for (auto [a, b] : r.pairs()) stage.add(a, b);
    auto cod = rel_codomain_mask(r);
    stage.add(d.zero, c.zero);
    for (std::size_t b = 0; b < cod.size(); ++b)
      if (!cod[b]) stage.add(d.zero, b);
    auto dom = rel_domain_mask(r);
    stage.add(d.one, c.one);
    for (std::size_t a = 0; a < dom.size(); ++a)
      if (!dom[a]) stage.add(a, c.one);
    out.push_back(std::move(stage));
  }
  {
    const Rel& last = seq.at(n - 1);
    Rel stage(ext[n - 2].set, last.cod());
    for (auto [a, b] : last.pairs()) stage.add(a, b);
    out.push_back(std::move(stage));
  }
  return RelSeq(std::move(out));
}

}  // namespace

RelSeq totalize_surjectivize(const RelSeq& seq) { return totalize_impl(seq, false); }

RelSeq totalize_surjectivize_single_star(const RelSeq& seq) {
  return totalize_impl(seq, true);
}

RelSeq trim_sequence(const RelSeq& seq) {
  const std::size_t n = seq.size();
  std::vector<Rel> s(seq.rels());
  // Backward pass: keep pairs whose codomain atom reaches the next stage.
  for (std::size_t i = n - 1; i-- > 0;) {
    auto keep = rel_domain_mask(s[i + 1]);
    Rel restricted(s[i].dom(), s[i].cod());
    for (auto [a, b] : s[i].pairs())
      if (keep[b]) restricted.add(a, b);
    s[i] = std::move(restricted);
  }
  // Forward pass: keep pairs entered from the previous stage.
  for (std::size_t i = 1; i < n; ++i) {
    auto keep = rel_codomain_mask(s[i - 1]);
    Rel restricted(s[i].dom(), s[i].cod());
    for (auto [a, b] : s[i].pairs())
      if (keep[a]) restricted.add(a, b);
    s[i] = std::move(restricted);
  }
  // (Co)restriction to the actual (co)domains; the chain property makes
  // consecutive sets agree.
  std::vector<FinSet> sets;
  sets.push_back(subset_of(s[0].dom(), rel_domain_mask(s[0])));
  for (std::size_t i = 0; i < n; ++i)
    sets.push_back(subset_of(s[i].cod(), rel_codomain_mask(s[i])));
  std::vector<Rel> out;
  for (std::size_t i = 0; i < n; ++i) {
    Rel stage(sets[i], sets[i + 1]);
    for (auto [a, b] : s[i].pair_labels()) stage.add(sets[i].index_of(a), sets[i + 1].index_of(b));
    out.push_back(std::move(stage));
  }
  return RelSeq(std::move(out));
}

RelSeq pad_sequence_to_composite(const RelSeq& seq, const Rel& r) {
  if (seq.source() != r.dom() || seq.target() != r.cod())
    throw std::invalid_argument("pad_sequence_to_composite: endpoint mismatch");
  if (!rel_leq(seq.composite(), r))
    throw std::invalid_argument("pad_sequence_to_composite: composite not below target");
  const std::size_t n = seq.size();
  if (n == 1) return RelSeq({r});

  auto rpairs = r.pairs();
  auto label = [&](std::size_t k) {
    return "(" + r.dom().at(rpairs[k].first) + "," + r.cod().at(rpairs[k].second) + ")";
  };
  // Extend each intermediate set with a disjoint copy of the pair apex.
  std::vector<FinSet> sets;
  sets.push_back(seq.source());
  std::vector<std::vector<std::size_t>> apex_idx(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const FinSet& base = seq.at(i).cod();
    std::vector<std::string> atoms = base.atoms();
    for (std::size_t k = 0; k < rpairs.size(); ++k) {
      FinSet sofar(atoms);
      atoms.push_back(fresh_atom(sofar, label(k)));
      apex_idx[i].push_back(atoms.size() - 1);
    }
    sets.push_back(FinSet(atoms));
  }
  sets.push_back(seq.target());

  std::vector<Rel> out;
  {
    Rel first(sets[0], sets[1]);
    for (auto [a, b] : seq.at(0).pairs()) first.add(a, b);
    for (std::size_t k = 0; k < rpairs.size(); ++k)
      first.add(rpairs[k].first, apex_idx[0][k]);
    out.push_back(std::move(first));
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    Rel stage(sets[i], sets[i + 1]);
    for (auto [a, b] : seq.at(i).pairs()) stage.add(a, b);
    for (std::size_t k = 0; k < rpairs.size(); ++k)
      stage.add(apex_idx[i - 1][k], apex_idx[i][k]);
    out.push_back(std::move(stage));
  }
  {
    Rel last(sets[n - 1], sets[n]);
    for (auto [a, b] : seq.at(n - 1).pairs()) last.add(a, b);
    for (std::size_t k = 0; k < rpairs.size(); ++k)
      last.add(apex_idx[n - 2][k], rpairs[k].second);
    out.push_back(std::move(last));
  }
  return RelSeq(std::move(out));
}

bool check_barr_upper_bound(const Functor& F, const RelSeq& original,
                            const RelSeq& candidate) {
  if (original.source() != candidate.source() ||
      original.target() != candidate.target())
    return false;
  if (original.composite() != candidate.composite()) return false;
  return rel_leq(barr_lift_composite(F, original), barr_lift_composite(F, candidate));
}

RelSeq x5_quotient_sequence() {
  FinSet x({"x", "y"});
  FinSet x1({"a1", "a2", "a3"});
  FinSet x2({"b1", "b2", "b3", "b4"});
  FinSet x3({"c1", "c2", "c3"});
  Rel r1 = Rel::from_pairs(x, x1, {{"x", "a2"}, {"y", "a3"}});
  Rel r2 = Rel::from_pairs(
      x1, x2, {{"a1", "b1"}, {"a2", "b2"}, {"a2", "b4"}, {"a3", "b3"}, {"a3", "b4"}});
  Rel r3 = Rel::from_pairs(
      x2, x3, {{"b1", "c1"}, {"b1", "c2"}, {"b2", "c1"}, {"b3", "c2"}, {"b4", "c3"}});
  Rel r4 = Rel::from_pairs(x3, x, {{"c1", "x"}, {"c2", "y"}});
  RelSeq seq({r1, r2, r3, r4});
  if (seq.composite() != Rel::identity(x))
    throw std::logic_error("x5_quotient_sequence: fixture composite is not the identity");
  return seq;
}

nlohmann::json NormalityWitness::to_json() const {
  return {{"pair", {codes.first, codes.second}},
          {"chain", chain},
          {"sequence", relseq_to_json(sequence)}};
}

nlohmann::json PairTripleReport::to_json() const {
  nlohmann::json j{{"verdict", pass ? "pass" : "fail"},
                   {"bound", bound},
                   {"pairs_checked", pairs_checked},
                   {"triples_checked", triples_checked},
                   {"skipped", skipped}};
  if (!pass && witness) j["witness"] = witness->to_json();
  return j;
}

}  // namespace laxkit
