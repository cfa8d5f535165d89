#pragma once

// Barr lifting of relations along a functor, the exact value of normal lax
// extensions on difunctional relations, laxification approximants, and the
// sequence surgeries used by the normality analysis: pushout reduction,
// middle splitting, totalization and trimming, all of which produce Barr
// upper bounds of the input sequence under the respective hypotheses.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "laxkit/finrel.hpp"
#include "laxkit/functor.hpp"

namespace laxkit {

// A lifted relation lives over functor carriers; structurally it is a Rel.
using LiftedRel = Rel;

// Composable nonempty sequence r1 : X0 ⇸ X1, ..., rn : X(n-1) ⇸ Xn.
class RelSeq {
 public:
  explicit RelSeq(std::vector<Rel> rels);
  const std::vector<Rel>& rels() const { return rels_; }
  std::size_t size() const { return rels_.size(); }
  const Rel& at(std::size_t i) const { return rels_.at(i); }
  const FinSet& source() const { return rels_.front().dom(); }
  const FinSet& target() const { return rels_.back().cod(); }
  Rel composite() const;

 private:
  std::vector<Rel> rels_;
};

// Lift through an arbitrary span factorization: F(right) · F(left)°.
LiftedRel span_lift(const Functor& F, const Span& span);

// Barr lift through the canonical span of r.
LiftedRel barr_lift(const Functor& F, const Rel& r);

// (u, v) ∈ barr_lift(F, r), via the functor's fast path when available.
bool barr_member(const Functor& F, const Rel& r, const std::string& u,
                 const std::string& v);

// Composite of the Barr lifts of a sequence, F̄rn · ... · F̄r1.
LiftedRel barr_lift_composite(const Functor& F, const RelSeq& seq);

// Value every normal lax extension takes on the difunctional relation of a
// cospan: (F g)° · F f.
LiftedRel difunctional_lax_value(const Functor& F, const Cospan& c);

struct LaxifyOptions {
  std::size_t max_len = 4;
  std::size_t max_mid = 0;        // 0 = |dom r| + 2
  std::size_t budget = 200'000;   // sequence candidates before sampling
  std::uint64_t seed = 0x1a5eedULL;
};

// Lower approximant of the least lax extension: join of Barr-lift composites
// over composable sequences with composite exactly r, lengths <= max_len,
// intermediate sets canonical of size <= max_mid. Exhaustive when the
// candidate space fits the budget; otherwise the join still includes every
// graph/cograph length-2 decomposition plus seeded random samples, so the
// result stays a sound lower bound, monotone in both bounds.
LiftedRel laxification_approx(const Functor& F, const Rel& r, LaxifyOptions opts = {});

struct NormalityWitness {
  std::pair<std::string, std::string> codes;  // distinct related F-codes
  std::vector<std::string> chain;             // per-stage lifted codes
  std::vector<Rel> sequence;
  nlohmann::json to_json() const;
};

// Pre: composite of seq is the identity. Returns a witness when the lifted
// composite is not a subidentity.
std::optional<NormalityWitness> verify_normality_violation(const Functor& F,
                                                           const RelSeq& seq);

struct NormalitySearchOptions {
  std::size_t max_len = 4;
  std::size_t max_mid = 0;           // 0 = |X| + 2
  std::size_t exhaustive_ceiling = 10'000'000;
  std::size_t sample_budget = 200'000;
  std::uint64_t seed = 0xba111adULL;
};

struct NormalitySearchResult {
  std::optional<NormalityWitness> witness;
  bool exhausted = false;  // the whole bounded space was enumerated
  std::size_t sequences_checked = 0;
  std::size_t skipped = 0;  // stage lifts beyond the size guard
};

// Bounded refutation search: an empty witness means "no violation found
// within the bounds", never a normality proof. Seeds are re-verified first.
NormalitySearchResult normality_search(const Functor& F, const FinSet& x,
                                       NormalitySearchOptions opts = {},
                                       const std::vector<RelSeq>& seeds = {});

struct PairTripleReport {
  bool pass = true;
  std::size_t bound = 0;
  std::size_t pairs_checked = 0;
  std::size_t triples_checked = 0;
  std::size_t skipped = 0;  // size-guard trips
  std::optional<NormalityWitness> witness;
  nlohmann::json to_json() const;
};

// Exhaustive subidentity-composite test for length-2 and length-3 sequences
// over canonical sets of size <= bound. Length-3 enumeration ranges over the
// pointwise-maximal closing relation for each (r1, r2); by monotonicity of
// the Barr lift this decides the same verdict as the full range. Triples are
// capped at 2 atoms per set (documented cost ceiling); pairs use the bound.
PairTripleReport check_pair_triple_normality(const FunctorHandle& F,
                                             std::size_t size_bound);

// Pushout reduction of a composable triple: returns (r1', r3') with
// r3'·r1' = r3·r̂2·r1, where r̂2 is the difunctional closure of the middle.
std::pair<Rel, Rel> reduce_triple_by_pushout(const Rel& r1, const Rel& r2, const Rel& r3);

// Splits middle-set elements outside cod(r1)/dom(r3) so that (1) distinct
// predecessors of a shared successor force the successor into dom(s3), and
// (2) dually for shared predecessors. Preserves the composite.
std::array<Rel, 3> split_middle(const Rel& r1, const Rel& r2, const Rel& r3);

// Extends the inner relations of a sequence (length >= 3) to total and
// surjective ones with two fresh chain atoms; preserves the composite.
RelSeq totalize_surjectivize(const RelSeq& seq);
// Single fresh atom variant; does not preserve subidentity composites.
RelSeq totalize_surjectivize_single_star(const RelSeq& seq);

// Backward domain restriction, forward codomain restriction, then
// (co)restriction of every relation to its (co)domain. Preserves the
// composite; outputs are total and surjective when the composite is an
// identity.
RelSeq trim_sequence(const RelSeq& seq);

// Padding construction: from composite(seq) <= r, a sequence with composite
// exactly r whose Barr-lift composite dominates the original's.
RelSeq pad_sequence_to_composite(const RelSeq& seq, const Rel& r);

// candidate is a Barr upper bound of original: equal composites and
// pointwise domination of the composed Barr lifts.
bool check_barr_upper_bound(const Functor& F, const RelSeq& original,
                            const RelSeq& candidate);

// The four-relation sequence over X = {x,y} whose composite is the identity
// but whose Barr-lift composite under the X⁵+X⁵ quotient functor is not a
// subidentity. The loader asserts the composite.
RelSeq x5_quotient_sequence();

}  // namespace laxkit
