#pragma once

// Operational presentation of finite set-functors: a Functor enumerates the
// carrier F X as canonical code strings and lifts total maps to codes.
// Carrier tables and lift tables are memoised; the memo is invisible in the
// results and guarded by a mutex, so handles are shareable across threads.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "laxkit/finrel.hpp"
#include "laxkit/monoid.hpp"

namespace laxkit {

class SizeGuardError : public std::runtime_error {
 public:
  explicit SizeGuardError(const std::string& what) : std::runtime_error(what) {}
};

struct SizeGuard {
  // Cap on pre-quotient carrier elements.
  std::size_t max_raw_elements = 2'000'000;
};

struct CarrierTable {
  FinSet base;
  FinSet codes;
  std::shared_ptr<const void> aux;  // functor-specific side data
};

class Functor {
 public:
  virtual ~Functor() = default;

  const std::string& name() const { return name_; }
  virtual nlohmann::json spec_json() const = 0;

  const SizeGuard& guard() const { return guard_; }
  void set_guard(SizeGuard g) { guard_ = g; }

  // Pre-quotient element count for a base of the given size; used by the
  // size guard before any enumeration happens. Saturates at SIZE_MAX.
  virtual std::size_t raw_count(std::size_t base_size) const = 0;

  const FinSet& carrier(const FinSet& base) const;
  FinFun lift(const FinFun& f) const;
  std::string map_element(const FinFun& f, const std::string& code) const;

  // Decides (u, v) ∈ F π₂ · (F π₁)° for the canonical span of r without
  // enumerating the apex carrier, when the functor has a direct
  // characterisation (the powerset handle does). nullopt = no fast path.
  virtual std::optional<bool> barr_member_fast(const Rel& r, const std::string& u,
                                               const std::string& v) const {
    (void)r; (void)u; (void)v;
    return std::nullopt;
  }

 protected:
  explicit Functor(std::string name) : name_(std::move(name)) {}

  virtual CarrierTable build_table(const FinSet& base) const = 0;
  // Index map dom-carrier -> cod-carrier for f between the table bases.
  virtual std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                                const CarrierTable& cod) const = 0;

  void check_guard(const FinSet& base) const;

 private:
  std::shared_ptr<const CarrierTable> table_for(const FinSet& base) const;

  std::string name_;
  SizeGuard guard_;
  // Memo tables behave as if absent: they are cleared wholesale when their
  // budget is exceeded, so streaming many distinct base sets stays bounded.
  mutable std::mutex mu_;
  mutable std::map<std::vector<std::string>, std::shared_ptr<const CarrierTable>> tables_;
  mutable std::size_t cached_codes_ = 0;
  mutable std::map<std::string, std::shared_ptr<const std::vector<std::uint32_t>>> lifts_;
  mutable std::size_t cached_lift_entries_ = 0;
};

using FunctorHandle = std::shared_ptr<const Functor>;

// The zoo.
FunctorHandle powerset_functor();
FunctorHandle monoid_valued_functor(MonoidSpec m);
FunctorHandle neighbourhood_functor();
FunctorHandle monotone_neighbourhood_functor();
FunctorHandle clique_functor();
FunctorHandle tuples_max2of3_functor();
FunctorHandle hom_quotient_functor(std::size_t arity);
FunctorHandle bounded_words_functor(std::size_t max_len);

// Quotients of tuple constructors by equation schemes.
struct TupleQuotientSpec {
  struct Term {
    std::string ctor;
    std::vector<std::string> vars;
  };
  struct Clause {
    Term lhs, rhs;
  };
  std::string name;
  std::vector<std::pair<std::string, std::size_t>> constructors;  // (name, arity)
  std::vector<Clause> clauses;
};

FunctorHandle tuple_quotient_functor(TupleQuotientSpec spec);

// X⁵+X⁵ quotient that preserves 1/4-iso pullbacks yet has no normal lax
// extension, and the X³ quotient that has one without preserving 1/4-mono
// or 4/4-epi pullbacks.
FunctorHandle x5_quotient_functor();
FunctorHandle x3_quotient_functor();

// {"kind":"powerset"} | {"kind":"monoid",...} | {"kind":"tuple_quotient",...}
// | {"kind":"hom_quotient","A":n} | {"kind":"bounded_words","L":n}
// | {"kind":"neighbourhood"|"monotone"|"clique"|"tuples_max2of3"}.
FunctorHandle build_functor(const nlohmann::json& spec);
// Builtin names like "powerset", "monoid:z2", "hom-quotient:2",
// "bounded-words:4", "x5-quotient", "x3-quotient".
FunctorHandle functor_by_name(const std::string& name);

struct FunctorLawReport {
  bool pass = true;
  std::string detail;  // first violation, empty on pass
};

// Identity and composition laws over all maps between canonical sets of
// size <= size_bound.
FunctorLawReport validate_functoriality(const Functor& f, std::size_t size_bound);

}  // namespace laxkit
