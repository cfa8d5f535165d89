#pragma once

// Finite sets, total functions and binary relations over opaque atom labels.
// A FinSet fixes the canonical enumeration order of its atoms; everything
// downstream (codes, witnesses, reports) inherits determinism from that order.
// Values are immutable once built and cheap to copy (shared storage).

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace laxkit {

class FinSet {
 public:
  FinSet();
  explicit FinSet(std::vector<std::string> atoms);

  std::size_t size() const { return data_->atoms.size(); }
  bool empty() const { return data_->atoms.empty(); }
  const std::string& at(std::size_t i) const { return data_->atoms.at(i); }
  const std::vector<std::string>& atoms() const { return data_->atoms; }

  std::optional<std::size_t> find(const std::string& atom) const;
  std::size_t index_of(const std::string& atom) const;  // throws if absent
  bool contains(const std::string& atom) const { return find(atom).has_value(); }

  bool operator==(const FinSet& other) const;
  bool operator!=(const FinSet& other) const { return !(*this == other); }

 private:
  struct Data {
    std::vector<std::string> atoms;
    std::unordered_map<std::string, std::size_t> index;
  };
  std::shared_ptr<const Data> data_;
};

// {"0", "1", ..., "n-1"}, optionally prefixed ("m0", "m1", ...).
FinSet canonical_set(std::size_t n, const std::string& prefix = "");

// A label based on `base` that does not occur in `s` (appends primes).
std::string fresh_atom(const FinSet& s, const std::string& base);

// Union keeping the order of `a` then the unseen atoms of `b`.
FinSet union_sets(const FinSet& a, const FinSet& b);

// Subset of `s` keeping canonical order; `keep[i]` decides atom i.
FinSet subset_of(const FinSet& s, const std::vector<bool>& keep);

class Rel;

class FinFun {
 public:
  FinFun(FinSet dom, FinSet cod, std::vector<std::size_t> map);
  static FinFun identity(const FinSet& s);
  static FinFun from_labels(const FinSet& dom, const FinSet& cod,
                            const std::vector<std::pair<std::string, std::string>>& entries);

  const FinSet& dom() const { return dom_; }
  const FinSet& cod() const { return cod_; }
  std::size_t operator()(std::size_t i) const { return map_.at(i); }
  const std::string& apply(const std::string& atom) const;
  const std::vector<std::size_t>& table() const { return map_; }

  // Diagrammatic composition: (*this);g, requires cod() == g.dom().
  FinFun then(const FinFun& g) const;

  bool is_injective() const;
  bool is_surjective() const;
  std::vector<bool> image_mask() const;

  bool operator==(const FinFun& other) const;
  bool operator!=(const FinFun& other) const { return !(*this == other); }

 private:
  FinSet dom_, cod_;
  std::vector<std::size_t> map_;
};

// Binary relation dom ⇸ cod stored as a bit matrix (row = dom atom).
class Rel {
 public:
  Rel(FinSet dom, FinSet cod);

  static Rel identity(const FinSet& s);
  static Rel full(const FinSet& dom, const FinSet& cod);
  static Rel empty(const FinSet& dom, const FinSet& cod) { return Rel(dom, cod); }
  static Rel from_pairs(const FinSet& dom, const FinSet& cod,
                        const std::vector<std::pair<std::string, std::string>>& pairs);
  static Rel graph(const FinFun& f);

  const FinSet& dom() const { return dom_; }
  const FinSet& cod() const { return cod_; }

  void add(std::size_t i, std::size_t j);
  void remove(std::size_t i, std::size_t j);
  bool test(std::size_t i, std::size_t j) const;

  std::size_t pair_count() const;
  // Pairs in scan order (dom index, then cod index).
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
  std::vector<std::pair<std::string, std::string>> pair_labels() const;

  bool operator==(const Rel& other) const;
  bool operator!=(const Rel& other) const { return !(*this == other); }

 private:
  FinSet dom_, cod_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;

  friend Rel compose(const Rel&, const Rel&);
  friend Rel converse(const Rel&);
  friend Rel rel_join(const Rel&, const Rel&);
  friend Rel rel_meet(const Rel&, const Rel&);
  friend bool rel_leq(const Rel&, const Rel&);
  friend bool is_difunctional(const Rel&);
  std::uint64_t* row(std::size_t i) { return bits_.data() + i * words_; }
  const std::uint64_t* row(std::size_t i) const { return bits_.data() + i * words_; }
};

// Applicative composition: compose(r: X⇸Y, s: Y⇸Z) = s·r : X⇸Z.
Rel compose(const Rel& r, const Rel& s);
Rel converse(const Rel& r);
Rel rel_join(const Rel& a, const Rel& b);
Rel rel_meet(const Rel& a, const Rel& b);
bool rel_leq(const Rel& a, const Rel& b);

struct RelPredicates {
  bool total = false;
  bool surjective = false;
  bool partial_function = false;
  bool converse_partial_function = false;
  bool subidentity = false;  // only meaningful when dom == cod
  std::vector<std::string> domain;
  std::vector<std::string> codomain;
};

RelPredicates rel_predicates(const Rel& r);

std::vector<bool> rel_domain_mask(const Rel& r);
std::vector<bool> rel_codomain_mask(const Rel& r);

bool is_total(const Rel& r);
bool is_surjective(const Rel& r);
bool is_partial_function(const Rel& r);
bool is_converse_partial_function(const Rel& r);
bool is_subidentity(const Rel& r);

// Zigzag condition: x1 r y r° x2 r y2 implies x1 r y2.
bool is_difunctional(const Rel& r);

// Least difunctional relation above r, by iterating r ∪ r·r°·r to a fixpoint.
Rel difunctional_closure(const Rel& r);
// Same value computed through the pushout of the canonical span.
Rel difunctional_closure_via_pushout(const Rel& r);

struct Span {
  FinSet apex;
  FinFun left;   // apex -> X
  FinFun right;  // apex -> Y
  Span(FinSet a, FinFun l, FinFun r);
};

struct Cospan {
  FinSet apex;
  FinFun left;   // X -> apex
  FinFun right;  // Y -> apex
  Cospan(FinSet a, FinFun l, FinFun r);
};

// Span of pair atoms "(x,y)" projecting back to dom/cod; right·left° = r.
Span canonical_span(const Rel& r);

// Relation right·left° determined by a span, or left°·... of a cospan.
Rel span_relation(const Span& s);
Rel cospan_relation(const Cospan& c);  // {(x,y) | left(x) = right(y)}

// Pullback {(x,y) | f(x) = g(y)} with pair-labelled apex.
Span pullback(const Cospan& c);

// Pushout of a span: quotient of X+Y by the equivalence generated by
// left(w) ~ right(w); classes are named "[m]" after their least member label.
Cospan pushout(const Span& s);

// f = injection ∘ surjection through the image (image atoms keep cod order).
std::pair<FinFun, FinFun> epi_mono_factorize(const FinFun& f);

}  // namespace laxkit
