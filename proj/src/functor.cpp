#include "laxkit/functor.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <unordered_map>

namespace laxkit {

namespace {

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > SIZE_MAX / b) return SIZE_MAX;
  return a * b;
}

std::size_t sat_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out = sat_mul(out, base);
  return out;
}

std::size_t sat_add(std::size_t a, std::size_t b) {
  return a > SIZE_MAX - b ? SIZE_MAX : a + b;
}

std::string braced(const std::vector<std::string>& parts) {
  std::string out = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  return out + "}";
}

std::string subset_code(const FinSet& base, std::uint32_t mask) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < base.size(); ++i)
    if (mask & (1u << i)) parts.push_back(base.at(i));
  return braced(parts);
}

std::string tuple_code(const std::vector<std::string>& parts) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  return out + ")";
}

}  // namespace

void Functor::check_guard(const FinSet& base) const {
  std::size_t raw = raw_count(base.size());
  if (raw > guard_.max_raw_elements)
    throw SizeGuardError(name_ + ": carrier on " + std::to_string(base.size()) +
                         " atoms exceeds the size guard");
}

namespace {

constexpr std::size_t kCarrierCacheBudget = 4'000'000;  // summed code count
constexpr std::size_t kLiftCacheBudget = 32'000'000;    // summed table entries

}  // namespace

std::shared_ptr<const CarrierTable> Functor::table_for(const FinSet& base) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = tables_.find(base.atoms());
  if (it != tables_.end()) return it->second;
  check_guard(base);
  auto table = std::make_shared<CarrierTable>(build_table(base));
  if (cached_codes_ + table->codes.size() > kCarrierCacheBudget) {
    tables_.clear();
    cached_codes_ = 0;
  }
  cached_codes_ += table->codes.size();
  tables_.emplace(base.atoms(), table);
  return table;
}

const FinSet& Functor::carrier(const FinSet& base) const { return table_for(base)->codes; }

namespace {

std::string fun_key(const FinFun& f) {
  std::string key;
  auto push = [&key](const std::string& s) {
    key += std::to_string(s.size());
    key += ':';
    key += s;
  };
  for (const auto& a : f.dom().atoms()) push(a);
  key += '|';
  for (const auto& a : f.cod().atoms()) push(a);
  key += '|';
  for (std::size_t v : f.table()) {
    key += std::to_string(v);
    key += ',';
  }
  return key;
}

}  // namespace

FinFun Functor::lift(const FinFun& f) const {
  auto dom_table = table_for(f.dom());
  auto cod_table = table_for(f.cod());
  std::string key = fun_key(f);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = lifts_.find(key);
    if (it != lifts_.end()) {
      std::vector<std::size_t> map(it->second->begin(), it->second->end());
      return FinFun(dom_table->codes, cod_table->codes, std::move(map));
    }
  }
  auto table = std::make_shared<std::vector<std::uint32_t>>(
      lift_table(f, *dom_table, *cod_table));
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (cached_lift_entries_ + table->size() > kLiftCacheBudget) {
      lifts_.clear();
      cached_lift_entries_ = 0;
    }
    cached_lift_entries_ += table->size();
    lifts_.emplace(std::move(key), table);
  }
  std::vector<std::size_t> map(table->begin(), table->end());
  return FinFun(dom_table->codes, cod_table->codes, std::move(map));
}

std::string Functor::map_element(const FinFun& f, const std::string& code) const {
  FinFun lf = lift(f);
  return lf.cod().at(lf(lf.dom().index_of(code)));
}

// ---------------------------------------------------------------------------
// Powerset

namespace {

class PowersetFunctor final : public Functor {
 public:
  PowersetFunctor() : Functor("powerset") {}

  nlohmann::json spec_json() const override { return {{"kind", "powerset"}}; }

  std::size_t raw_count(std::size_t n) const override {
    return n >= 21 ? SIZE_MAX : (std::size_t{1} << n);
  }

  std::optional<bool> barr_member_fast(const Rel& r, const std::string& u,
                                       const std::string& v) const override {
    // Egli-Milner: every element of u sees v through r and vice versa; this
    // is exactly liftability through the canonical span for subsets.
    std::uint32_t mu = static_cast<std::uint32_t>(carrier(r.dom()).index_of(u));
    std::uint32_t mv = static_cast<std::uint32_t>(carrier(r.cod()).index_of(v));
    for (std::size_t i = 0; i < r.dom().size(); ++i) {
      if (!(mu & (1u << i))) continue;
      bool hit = false;
      for (std::size_t j = 0; j < r.cod().size() && !hit; ++j)
        hit = (mv & (1u << j)) && r.test(i, j);
      if (!hit) return false;
    }
    for (std::size_t j = 0; j < r.cod().size(); ++j) {
      if (!(mv & (1u << j))) continue;
      bool hit = false;
      for (std::size_t i = 0; i < r.dom().size() && !hit; ++i)
        hit = (mu & (1u << i)) && r.test(i, j);
      if (!hit) return false;
    }
    return true;
  }

 protected:
  CarrierTable build_table(const FinSet& base) const override {
    std::vector<std::string> codes;
    const std::size_t count = std::size_t{1} << base.size();
    codes.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask)
      codes.push_back(subset_code(base, static_cast<std::uint32_t>(mask)));
    return {base, FinSet(std::move(codes)), nullptr};
  }

  std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                        const CarrierTable& cod) const override {
    (void)cod;
    const std::size_t count = std::size_t{1} << dom.base.size();
    std::vector<std::uint32_t> out(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
      std::uint32_t img = 0;
      for (std::size_t i = 0; i < dom.base.size(); ++i)
        if (mask & (std::size_t{1} << i)) img |= 1u << f(i);
      out[mask] = img;
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Monoid-valued: finitely supported maps X -> M, codes "{x:m,...}".

class MonoidValuedFunctor final : public Functor {
 public:
  explicit MonoidValuedFunctor(MonoidSpec m)
      : Functor("monoid:" + m.name()), monoid_(std::move(m)) {}

  nlohmann::json spec_json() const override {
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t a = 0; a < monoid_.size(); ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t b = 0; b < monoid_.size(); ++b)
        row.push_back(monoid_.carrier().at(monoid_.add(a, b)));
      table.push_back(row);
    }
    return {{"kind", "monoid"},
            {"name", monoid_.name()},
            {"carrier", monoid_.carrier().atoms()},
            {"zero", monoid_.carrier().at(monoid_.zero())},
            {"table", table}};
  }

  std::size_t raw_count(std::size_t n) const override {
    return sat_pow(monoid_.size(), n);
  }

  const MonoidSpec& monoid() const { return monoid_; }

 protected:
  CarrierTable build_table(const FinSet& base) const override {
    const std::size_t count = raw_count(base.size());
    std::vector<std::string> codes;
    codes.reserve(count);
    std::vector<std::size_t> digits(base.size(), monoid_.zero());
    for (std::size_t rank = 0; rank < count; ++rank) {
      decode(rank, base.size(), digits);
      std::vector<std::string> parts;
      for (std::size_t i = 0; i < base.size(); ++i)
        if (digits[i] != monoid_.zero())
          parts.push_back(base.at(i) + ":" + monoid_.carrier().at(digits[i]));
      codes.push_back(braced(parts));
    }
    return {base, FinSet(std::move(codes)), nullptr};
  }

  std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                        const CarrierTable& cod) const override {
    (void)cod;
    const std::size_t nd = dom.base.size(), nc = f.cod().size();
    const std::size_t count = raw_count(nd);
    std::vector<std::uint32_t> out(count);
    std::vector<std::size_t> digits(nd), image(nc);
    for (std::size_t rank = 0; rank < count; ++rank) {
      decode(rank, nd, digits);
      std::fill(image.begin(), image.end(), monoid_.zero());
      for (std::size_t i = 0; i < nd; ++i)
        image[f(i)] = monoid_.add(image[f(i)], digits[i]);
      std::size_t orank = 0;
      for (std::size_t j = nc; j-- > 0;) orank = orank * monoid_.size() + image[j];
      out[rank] = static_cast<std::uint32_t>(orank);
    }
    return out;
  }

 private:
  void decode(std::size_t rank, std::size_t n, std::vector<std::size_t>& digits) const {
    for (std::size_t i = 0; i < n; ++i) {
      digits[i] = rank % monoid_.size();
      rank /= monoid_.size();
    }
  }

  MonoidSpec monoid_;
};

// ---------------------------------------------------------------------------
// Neighbourhood family. Elements are families of subsets, indexed by a
// family bitmask (bit j = subset with bitmask j belongs to the family).

std::uint32_t neighbourhood_image(std::uint32_t family, const FinFun& f) {
  const std::size_t nd = f.dom().size(), nc = f.cod().size();
  std::uint32_t out = 0;
  for (std::uint32_t b = 0; b < (1u << nc); ++b) {
    std::uint32_t pre = 0;
    for (std::size_t i = 0; i < nd; ++i)
      if (b & (1u << f(i))) pre |= 1u << i;
    if (family & (1u << pre)) out |= 1u << b;
  }
  return out;
}

class NeighbourhoodFunctor final : public Functor {
 public:
  NeighbourhoodFunctor() : Functor("neighbourhood") {}

  nlohmann::json spec_json() const override { return {{"kind", "neighbourhood"}}; }

  std::size_t raw_count(std::size_t n) const override {
    return n >= 5 ? SIZE_MAX : (std::size_t{1} << (std::size_t{1} << n));
  }

 protected:
  CarrierTable build_table(const FinSet& base) const override {
    const std::size_t subsets = std::size_t{1} << base.size();
    const std::size_t count = std::size_t{1} << subsets;
    std::vector<std::string> codes;
    codes.reserve(count);
    for (std::size_t fam = 0; fam < count; ++fam) {
      std::vector<std::string> parts;
      for (std::size_t b = 0; b < subsets; ++b)
        if (fam & (std::size_t{1} << b))
          parts.push_back(subset_code(base, static_cast<std::uint32_t>(b)));
      codes.push_back(braced(parts));
    }
    return {base, FinSet(std::move(codes)), nullptr};
  }

  std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                        const CarrierTable& cod) const override {
    (void)cod;
    const std::size_t count = std::size_t{1} << (std::size_t{1} << dom.base.size());
    std::vector<std::uint32_t> out(count);
    for (std::size_t fam = 0; fam < count; ++fam)
      out[fam] = neighbourhood_image(static_cast<std::uint32_t>(fam), f);
    return out;
  }
};

// Upset functors: monotone neighbourhood and its clique subfunctor. Elements
// are up-closed families, coded by their antichain of minimal sets.

struct UpsetAux {
  std::vector<std::uint32_t> families;
  std::unordered_map<std::uint32_t, std::uint32_t> index;
};

class UpsetFunctor final : public Functor {
 public:
  explicit UpsetFunctor(bool clique)
      : Functor(clique ? "clique" : "monotone"), clique_(clique) {}

  nlohmann::json spec_json() const override {
    return {{"kind", clique_ ? "clique" : "monotone"}};
  }

  std::size_t raw_count(std::size_t n) const override {
    return n >= 5 ? SIZE_MAX : (std::size_t{1} << (std::size_t{1} << n));
  }

 protected:
  CarrierTable build_table(const FinSet& base) const override {
    const std::size_t n = base.size();
    const std::size_t subsets = std::size_t{1} << n;
    // For each subset, the family mask of all its supersets.
    std::vector<std::uint32_t> sup(subsets, 0);
    for (std::uint32_t s = 0; s < subsets; ++s)
      for (std::uint32_t t = 0; t < subsets; ++t)
        if ((s & t) == s) sup[s] |= 1u << t;

    auto aux = std::make_shared<UpsetAux>();
    std::vector<std::string> codes;
    for (std::size_t fam = 0; fam < (std::size_t{1} << subsets); ++fam) {
      bool ok = true;
      for (std::uint32_t s = 0; s < subsets && ok; ++s)
        if (fam & (std::size_t{1} << s))
          ok = (fam & sup[s]) == sup[s];
      if (ok && clique_) {
        for (std::uint32_t s = 0; s < subsets && ok; ++s) {
          if (!(fam & (std::size_t{1} << s))) continue;
          for (std::uint32_t t = s; t < subsets && ok; ++t)
            if (fam & (std::size_t{1} << t)) ok = (s & t) != 0;
        }
      }
      if (!ok) continue;
      auto f32 = static_cast<std::uint32_t>(fam);
      aux->index.emplace(f32, static_cast<std::uint32_t>(aux->families.size()));
      aux->families.push_back(f32);
      codes.push_back(upset_code(base, f32));
    }
    return {base, FinSet(std::move(codes)), std::move(aux)};
  }

  std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                        const CarrierTable& cod) const override {
    const auto& daux = *static_cast<const UpsetAux*>(dom.aux.get());
    const auto& caux = *static_cast<const UpsetAux*>(cod.aux.get());
    std::vector<std::uint32_t> out(daux.families.size());
    for (std::size_t k = 0; k < daux.families.size(); ++k) {
      std::uint32_t img = neighbourhood_image(daux.families[k], f);
      auto it = caux.index.find(img);
      if (it == caux.index.end())
        throw std::logic_error(name() + ": image family is not up-closed");
      out[k] = it->second;
    }
    return out;
  }

 private:
  static std::string upset_code(const FinSet& base, std::uint32_t fam) {
    if (fam == 0) return "∅";
    const std::size_t subsets = std::size_t{1} << base.size();
    std::string out;
    bool first = true;
    for (std::uint32_t s = 0; s < subsets; ++s) {
      if (!(fam & (1u << s))) continue;
      bool minimal = true;
      for (std::uint32_t t = 0; t < subsets && minimal; ++t)
        if (t != s && (fam & (1u << t)) && (t & s) == t) minimal = false;
      if (!minimal) continue;
      if (!first) out += " ∪ ";
      out += "↑" + subset_code(base, s);
      first = false;
    }
    return out;
  }

  bool clique_;
};

// ---------------------------------------------------------------------------
// Triples with at most two distinct components.

struct TuplesAux {
  std::unordered_map<std::uint32_t, std::uint32_t> index;
  std::vector<std::array<std::uint16_t, 3>> triples;
};

class TuplesMax2of3Functor final : public Functor {
 public:
  TuplesMax2of3Functor() : Functor("tuples_max2of3") {}

  nlohmann::json spec_json() const override { return {{"kind", "tuples_max2of3"}}; }

  std::size_t raw_count(std::size_t n) const override { return sat_pow(n, 3); }

 protected:
  CarrierTable build_table(const FinSet& base) const override {
    const std::size_t n = base.size();
    auto aux = std::make_shared<TuplesAux>();
    std::vector<std::string> codes;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          if (i != j && j != k && i != k) continue;
          auto key = static_cast<std::uint32_t>((i * n + j) * n + k);
          aux->index.emplace(key, static_cast<std::uint32_t>(aux->triples.size()));
          aux->triples.push_back({static_cast<std::uint16_t>(i),
                                  static_cast<std::uint16_t>(j),
                                  static_cast<std::uint16_t>(k)});
          codes.push_back(tuple_code({base.at(i), base.at(j), base.at(k)}));
        }
    return {base, FinSet(std::move(codes)), std::move(aux)};
  }

  std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                        const CarrierTable& cod) const override {
    const auto& daux = *static_cast<const TuplesAux*>(dom.aux.get());
    const auto& caux = *static_cast<const TuplesAux*>(cod.aux.get());
    const std::size_t m = f.cod().size();
    std::vector<std::uint32_t> out(daux.triples.size());
    for (std::size_t k = 0; k < daux.triples.size(); ++k) {
      const auto& t = daux.triples[k];
      auto key = static_cast<std::uint32_t>((f(t[0]) * m + f(t[1])) * m + f(t[2]));
      out[k] = caux.index.at(key);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Hom quotient Set(A,-)/~ : injective maps are kept apart, all non-injective
// maps form a single class "⊥".

struct HomAux {
  std::unordered_map<std::uint64_t, std::uint32_t> index;  // tuple rank -> idx
  std::vector<std::uint64_t> ranks;                        // injective tuples
  std::optional<std::uint32_t> bot;
};

class HomQuotientFunctor final : public Functor {
 public:
  explicit HomQuotientFunctor(std::size_t arity)
      : Functor("hom-quotient:" + std::to_string(arity)), arity_(arity) {
    if (arity_ < 2)
      throw std::invalid_argument("hom_quotient: arity must be at least 2");
  }

  nlohmann::json spec_json() const override {
    return {{"kind", "hom_quotient"}, {"A", arity_}};
  }

  std::size_t raw_count(std::size_t n) const override { return sat_pow(n, arity_); }

 protected:
  CarrierTable build_table(const FinSet& base) const override {
    const std::size_t n = base.size();
    auto aux = std::make_shared<HomAux>();
    std::vector<std::string> codes;
    std::vector<std::size_t> digits(arity_);
    const std::size_t count = raw_count(n);
    for (std::size_t rank = 0; rank < count; ++rank) {
      decode(rank, n, digits);
      if (!distinct(digits)) continue;
      std::vector<std::string> parts;
      for (std::size_t d : digits) parts.push_back(base.at(d));
      aux->index.emplace(rank, static_cast<std::uint32_t>(aux->ranks.size()));
      aux->ranks.push_back(rank);
      codes.push_back(tuple_code(parts));
    }
    if (n >= 1) {  // some non-injective map exists since arity >= 2
      aux->bot = static_cast<std::uint32_t>(codes.size());
      codes.push_back("⊥");
    }
    return {base, FinSet(std::move(codes)), std::move(aux)};
  }

  std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                        const CarrierTable& cod) const override {
    const auto& daux = *static_cast<const HomAux*>(dom.aux.get());
    const auto& caux = *static_cast<const HomAux*>(cod.aux.get());
    const std::size_t nd = dom.base.size(), nc = f.cod().size();
    std::vector<std::uint32_t> out(dom.codes.size());
    std::vector<std::size_t> digits(arity_), image(arity_);
    for (std::size_t k = 0; k < daux.ranks.size(); ++k) {
      decode(daux.ranks[k], nd, digits);
      for (std::size_t i = 0; i < arity_; ++i) image[i] = f(digits[i]);
      if (distinct(image)) {
        std::uint64_t rank = 0;
        for (std::size_t i = 0; i < arity_; ++i) rank = rank * nc + image[i];
        out[k] = caux.index.at(rank);
      } else {
        out[k] = *caux.bot;
      }
    }
    if (daux.bot) out[*daux.bot] = *caux.bot;
    return out;
  }

 private:
  void decode(std::uint64_t rank, std::size_t n, std::vector<std::size_t>& digits) const {
    for (std::size_t i = arity_; i-- > 0;) {
      digits[i] = rank % n;
      rank /= n;
    }
  }
  static bool distinct(const std::vector<std::size_t>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j)
        if (v[i] == v[j]) return false;
    return true;
  }

  std::size_t arity_;
};

// ---------------------------------------------------------------------------
// Tuple quotients: constructor terms modulo universally quantified clause
// schemes, closed by union-find. Class codes are the lexicographically least
// member term.

struct TupleQuotientAux {
  std::vector<std::uint32_t> class_of_raw;
  std::vector<std::uint64_t> rep_rank;  // member realising the class code
};

class TupleQuotientFunctor final : public Functor {
 public:
  explicit TupleQuotientFunctor(TupleQuotientSpec spec)
      : Functor(spec.name.empty() ? "tuple-quotient" : spec.name),
        spec_(std::move(spec)) {
    for (const auto& clause : spec_.clauses) {
      validate_term(clause.lhs);
      validate_term(clause.rhs);
    }
  }

  nlohmann::json spec_json() const override {
    nlohmann::json ctors = nlohmann::json::array();
    for (const auto& [n, a] : spec_.constructors)
      ctors.push_back(nlohmann::json::array({n, a}));
    nlohmann::json clauses = nlohmann::json::array();
    for (const auto& c : spec_.clauses)
      clauses.push_back(nlohmann::json::array(
          {nlohmann::json::array({c.lhs.ctor, c.lhs.vars}),
           nlohmann::json::array({c.rhs.ctor, c.rhs.vars})}));
    return {{"kind", "tuple_quotient"},
            {"name", name()},
            {"constructors", ctors},
            {"clauses", clauses}};
  }

  std::size_t raw_count(std::size_t n) const override {
    std::size_t total = 0;
    for (const auto& [_, arity] : spec_.constructors)
      total = sat_add(total, sat_pow(n, arity));
    return total;
  }

  const TupleQuotientSpec& spec() const { return spec_; }

 protected:
  CarrierTable build_table(const FinSet& base) const override {
    const std::size_t n = base.size();
    const std::size_t raw = raw_count(n);
    std::vector<std::size_t> offset(spec_.constructors.size());
    {
      std::size_t acc = 0;
      for (std::size_t c = 0; c < spec_.constructors.size(); ++c) {
        offset[c] = acc;
        acc += sat_pow(n, spec_.constructors[c].second);
      }
    }

    std::vector<std::uint32_t> parent(raw);
    for (std::size_t i = 0; i < raw; ++i) parent[i] = static_cast<std::uint32_t>(i);
    std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    auto unite = [&](std::uint32_t a, std::uint32_t b) {
      a = find(a);
      b = find(b);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };

    if (n > 0) {
      for (const auto& clause : spec_.clauses)
        close_clause(clause, n, offset, unite);
    }

    // Classes in first-occurrence order; code = least member code.
    auto aux = std::make_shared<TupleQuotientAux>();
    aux->class_of_raw.assign(raw, UINT32_MAX);
    std::unordered_map<std::uint32_t, std::uint32_t> class_of_root;
    std::vector<std::string> codes;
    std::vector<std::size_t> args;
    for (std::size_t rank = 0; rank < raw; ++rank) {
      std::uint32_t root = find(static_cast<std::uint32_t>(rank));
      auto it = class_of_root.find(root);
      std::string code = term_code(base, rank, offset, args);
      if (it == class_of_root.end()) {
        auto idx = static_cast<std::uint32_t>(codes.size());
        class_of_root.emplace(root, idx);
        codes.push_back(std::move(code));
        aux->rep_rank.push_back(rank);
        aux->class_of_raw[rank] = idx;
      } else {
        aux->class_of_raw[rank] = it->second;
        if (code < codes[it->second]) {
          codes[it->second] = std::move(code);
          aux->rep_rank[it->second] = rank;
        }
      }
    }
    return {base, FinSet(std::move(codes)), std::move(aux)};
  }

  std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                        const CarrierTable& cod) const override {
    const auto& daux = *static_cast<const TupleQuotientAux*>(dom.aux.get());
    const auto& caux = *static_cast<const TupleQuotientAux*>(cod.aux.get());
    const std::size_t nd = dom.base.size(), nc = f.cod().size();
    std::vector<std::size_t> doffset(spec_.constructors.size());
    std::vector<std::size_t> coffset(spec_.constructors.size());
    {
      std::size_t da = 0, ca = 0;
      for (std::size_t c = 0; c < spec_.constructors.size(); ++c) {
        doffset[c] = da;
        coffset[c] = ca;
        da += sat_pow(nd, spec_.constructors[c].second);
        ca += sat_pow(nc, spec_.constructors[c].second);
      }
    }
    std::vector<std::uint32_t> out(dom.codes.size());
    std::vector<std::size_t> args;
    for (std::size_t k = 0; k < daux.rep_rank.size(); ++k) {
      auto [c, arity] = locate(daux.rep_rank[k], nd, doffset);
      decode_args(daux.rep_rank[k] - doffset[c], nd, arity, args);
      std::uint64_t rank = 0;
      for (std::size_t i = 0; i < arity; ++i) rank = rank * nc + f(args[i]);
      out[k] = caux.class_of_raw.at(coffset[c] + rank);
    }
    return out;
  }

 private:
  void validate_term(const TupleQuotientSpec::Term& t) const {
    for (const auto& [cname, arity] : spec_.constructors)
      if (cname == t.ctor) {
        if (t.vars.size() != arity)
          throw std::invalid_argument("tuple_quotient: clause arity mismatch for " +
                                      t.ctor);
        return;
      }
    throw std::invalid_argument("tuple_quotient: unknown constructor " + t.ctor);
  }

  std::size_t ctor_index(const std::string& name) const {
    for (std::size_t c = 0; c < spec_.constructors.size(); ++c)
      if (spec_.constructors[c].first == name) return c;
    throw std::logic_error("tuple_quotient: unknown constructor");
  }

  std::pair<std::size_t, std::size_t> locate(std::uint64_t rank, std::size_t n,
                                             const std::vector<std::size_t>& offset) const {
    (void)n;
    for (std::size_t c = offset.size(); c-- > 0;)
      if (rank >= offset[c]) return {c, spec_.constructors[c].second};
    throw std::logic_error("tuple_quotient: rank out of range");
  }

  static void decode_args(std::uint64_t local, std::size_t n, std::size_t arity,
                          std::vector<std::size_t>& args) {
    args.assign(arity, 0);
    for (std::size_t i = arity; i-- > 0;) {
      args[i] = local % n;
      local /= n;
    }
  }

  std::string term_code(const FinSet& base, std::uint64_t rank,
                        const std::vector<std::size_t>& offset,
                        std::vector<std::size_t>& args) const {
    auto [c, arity] = locate(rank, base.size(), offset);
    decode_args(rank - offset[c], base.size(), arity, args);
    std::string out = spec_.constructors[c].first + "(";
    for (std::size_t i = 0; i < arity; ++i) {
      if (i) out += ",";
      out += base.at(args[i]);
    }
    return out + ")";
  }

  // All instances of lhs and rhs under a fixed assignment of the shared
  // variables form one class, so they are united through a single hub; the
  // private variables are swept linearly rather than in product.
  template <typename Unite>
  void close_clause(const TupleQuotientSpec::Clause& clause, std::size_t n,
                    const std::vector<std::size_t>& offset, Unite&& unite) const {
    std::vector<std::string> shared, priv_l, priv_r;
    auto contains = [](const std::vector<std::string>& v, const std::string& s) {
      return std::find(v.begin(), v.end(), s) != v.end();
    };
    auto collect = [&](const TupleQuotientSpec::Term& t, std::vector<std::string>& into,
                       const std::vector<std::string>& other_side) {
      for (const auto& v : t.vars) {
        if (contains(into, v) || contains(shared, v)) continue;
        if (contains(other_side, v)) {
          shared.push_back(v);
        } else {
          into.push_back(v);
        }
      }
    };
    collect(clause.lhs, priv_l, clause.rhs.vars);
    collect(clause.rhs, priv_r, clause.lhs.vars);
    // priv_l may still contain atoms that are shared (both occur); clean up.
    auto strip_shared = [&](std::vector<std::string>& v) {
      v.erase(std::remove_if(v.begin(), v.end(),
                             [&](const std::string& s) { return contains(shared, s); }),
              v.end());
    };
    strip_shared(priv_l);
    strip_shared(priv_r);

    std::unordered_map<std::string, std::size_t> value;
    auto rank_of = [&](const TupleQuotientSpec::Term& t) {
      std::size_t c = ctor_index(t.ctor);
      std::uint64_t rank = 0;
      for (const auto& v : t.vars) rank = rank * n + value.at(v);
      return offset[c] + rank;
    };

    std::vector<std::size_t> sigma(shared.size(), 0);
    for (;;) {
      for (std::size_t i = 0; i < shared.size(); ++i) value[shared[i]] = sigma[i];
      std::optional<std::uint64_t> hub;
      auto sweep = [&](const TupleQuotientSpec::Term& t,
                       const std::vector<std::string>& priv) {
        std::vector<std::size_t> tau(priv.size(), 0);
        for (;;) {
          for (std::size_t i = 0; i < priv.size(); ++i) value[priv[i]] = tau[i];
          std::uint64_t r = rank_of(t);
          if (!hub) {
            hub = r;
          } else {
            unite(static_cast<std::uint32_t>(*hub), static_cast<std::uint32_t>(r));
          }
          std::size_t i = 0;
          for (; i < tau.size(); ++i) {
            if (++tau[i] < n) break;
            tau[i] = 0;
          }
          if (i == tau.size()) break;
          if (priv.empty()) break;
        }
      };
      sweep(clause.lhs, priv_l);
      sweep(clause.rhs, priv_r);

      std::size_t i = 0;
      for (; i < sigma.size(); ++i) {
        if (++sigma[i] < n) break;
        sigma[i] = 0;
      }
      if (i == sigma.size()) break;
    }
  }

  TupleQuotientSpec spec_;
};

// ---------------------------------------------------------------------------
// Free semigroup modulo xxx = xx, truncated to words of bounded length.
// Carrier elements are rewrite normal forms (no letter three times in a row).

struct WordsAux {
  std::vector<std::vector<std::uint8_t>> words;
  std::unordered_map<std::string, std::uint32_t> index;
};

std::string word_key(const std::vector<std::uint8_t>& w) {
  return std::string(w.begin(), w.end());
}

void normalize_word(std::vector<std::uint8_t>& w) {
  for (std::size_t i = 0; i + 2 < w.size();) {
    if (w[i] == w[i + 1] && w[i + 1] == w[i + 2]) {
      w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
      i = i > 0 ? i - 1 : 0;
    } else {
      ++i;
    }
  }
}

class BoundedWordsFunctor final : public Functor {
 public:
  explicit BoundedWordsFunctor(std::size_t max_len)
      : Functor("bounded-words:" + std::to_string(max_len)), max_len_(max_len) {
    if (max_len_ < 1) throw std::invalid_argument("bounded_words: L must be >= 1");
  }

  nlohmann::json spec_json() const override {
    return {{"kind", "bounded_words"}, {"L", max_len_}};
  }

  std::size_t raw_count(std::size_t n) const override {
    std::size_t total = 0;
    for (std::size_t l = 1; l <= max_len_; ++l) total = sat_add(total, sat_pow(n, l));
    return total;
  }

 protected:
  CarrierTable build_table(const FinSet& base) const override {
    const std::size_t n = base.size();
    auto aux = std::make_shared<WordsAux>();
    std::vector<std::string> codes;
    std::vector<std::uint8_t> word;
    for (std::size_t len = 1; len <= max_len_ && n > 0; ++len) {
      word.assign(len, 0);
      for (;;) {
        bool normal = true;
        for (std::size_t i = 0; i + 2 < word.size() && normal; ++i)
          normal = !(word[i] == word[i + 1] && word[i + 1] == word[i + 2]);
        if (normal) {
          aux->index.emplace(word_key(word),
                             static_cast<std::uint32_t>(aux->words.size()));
          aux->words.push_back(word);
          std::string code;
          for (std::size_t i = 0; i < word.size(); ++i) {
            if (i) code += "·";
            code += base.at(word[i]);
          }
          codes.push_back(std::move(code));
        }
        std::size_t i = len;
        for (; i-- > 0;) {
          if (static_cast<std::size_t>(++word[i]) < n) break;
          word[i] = 0;
          if (i == 0) { i = SIZE_MAX; break; }
        }
        if (i == SIZE_MAX) break;
      }
    }
    return {base, FinSet(std::move(codes)), std::move(aux)};
  }

  std::vector<std::uint32_t> lift_table(const FinFun& f, const CarrierTable& dom,
                                        const CarrierTable& cod) const override {
    const auto& daux = *static_cast<const WordsAux*>(dom.aux.get());
    const auto& caux = *static_cast<const WordsAux*>(cod.aux.get());
    std::vector<std::uint32_t> out(daux.words.size());
    for (std::size_t k = 0; k < daux.words.size(); ++k) {
      std::vector<std::uint8_t> w = daux.words[k];
      for (auto& c : w) c = static_cast<std::uint8_t>(f(c));
      normalize_word(w);
      out[k] = caux.index.at(word_key(w));
    }
    return out;
  }

 private:
  std::size_t max_len_;
};

}  // namespace

// ---------------------------------------------------------------------------

FunctorHandle powerset_functor() { return std::make_shared<PowersetFunctor>(); }

FunctorHandle monoid_valued_functor(MonoidSpec m) {
  return std::make_shared<MonoidValuedFunctor>(std::move(m));
}

FunctorHandle neighbourhood_functor() { return std::make_shared<NeighbourhoodFunctor>(); }

FunctorHandle monotone_neighbourhood_functor() {
  return std::make_shared<UpsetFunctor>(false);
}

FunctorHandle clique_functor() { return std::make_shared<UpsetFunctor>(true); }

FunctorHandle tuples_max2of3_functor() {
  return std::make_shared<TuplesMax2of3Functor>();
}

FunctorHandle hom_quotient_functor(std::size_t arity) {
  return std::make_shared<HomQuotientFunctor>(arity);
}

FunctorHandle bounded_words_functor(std::size_t max_len) {
  return std::make_shared<BoundedWordsFunctor>(max_len);
}

FunctorHandle tuple_quotient_functor(TupleQuotientSpec spec) {
  return std::make_shared<TupleQuotientFunctor>(std::move(spec));
}

FunctorHandle x5_quotient_functor() {
  TupleQuotientSpec spec;
  spec.name = "x5-quotient";
  spec.constructors = {{"f", 5}, {"g", 5}};
  using T = TupleQuotientSpec::Term;
  spec.clauses = {
      {T{"f", {"y", "x", "z", "x", "t"}}, T{"f", {"y'", "x", "z'", "x", "t'"}}},
      {T{"f", {"t", "x", "x", "y", "y"}}, T{"f", {"t'", "x", "x", "y", "y"}}},
      {T{"g", {"y", "x", "z", "x", "t"}}, T{"g", {"y'", "x", "z'", "x", "t'"}}},
      {T{"g", {"x", "x", "y", "y", "t"}}, T{"g", {"x", "x", "y", "y", "t'"}}},
      {T{"f", {"y", "x", "z", "x", "t"}}, T{"g", {"y'", "x", "z'", "x", "t'"}}},
      {T{"f", {"t", "x", "z", "y", "z"}}, T{"g", {"t", "x", "t", "y", "z"}}},
  };
  return tuple_quotient_functor(std::move(spec));
}

FunctorHandle x3_quotient_functor() {
  TupleQuotientSpec spec;
  spec.name = "x3-quotient";
  spec.constructors = {{"c", 3}};
  using T = TupleQuotientSpec::Term;
  spec.clauses = {
      {T{"c", {"x", "x", "y"}}, T{"c", {"x", "x", "x"}}},
      {T{"c", {"x", "x", "x"}}, T{"c", {"y", "x", "x"}}},
  };
  return tuple_quotient_functor(std::move(spec));
}

FunctorHandle build_functor(const nlohmann::json& spec) {
  if (spec.is_string()) return functor_by_name(spec.get<std::string>());
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "powerset") return powerset_functor();
  if (kind == "neighbourhood") return neighbourhood_functor();
  if (kind == "monotone") return monotone_neighbourhood_functor();
  if (kind == "clique") return clique_functor();
  if (kind == "tuples_max2of3") return tuples_max2of3_functor();
  if (kind == "hom_quotient") return hom_quotient_functor(spec.at("A").get<std::size_t>());
  if (kind == "bounded_words")
    return bounded_words_functor(spec.at("L").get<std::size_t>());
  if (kind == "monoid") {
    FinSet carrier(spec.at("carrier").get<std::vector<std::string>>());
    std::size_t zero = carrier.index_of(spec.at("zero").get<std::string>());
    std::vector<std::vector<std::size_t>> table;
    for (const auto& row : spec.at("table")) {
      std::vector<std::size_t> r;
      for (const auto& cell : row) r.push_back(carrier.index_of(cell.get<std::string>()));
      table.push_back(std::move(r));
    }
    std::string name = spec.value("name", "monoid");
    return monoid_valued_functor(MonoidSpec(carrier, std::move(table), zero, name));
  }
  if (kind == "tuple_quotient") {
    TupleQuotientSpec tq;
    tq.name = spec.value("name", "tuple-quotient");
    for (const auto& c : spec.at("constructors"))
      tq.constructors.emplace_back(c.at(0).get<std::string>(), c.at(1).get<std::size_t>());
    for (const auto& cl : spec.at("clauses")) {
      TupleQuotientSpec::Clause clause;
      clause.lhs = {cl.at(0).at(0).get<std::string>(),
                    cl.at(0).at(1).get<std::vector<std::string>>()};
      clause.rhs = {cl.at(1).at(0).get<std::string>(),
                    cl.at(1).at(1).get<std::vector<std::string>>()};
      tq.clauses.push_back(std::move(clause));
    }
    return tuple_quotient_functor(std::move(tq));
  }
  throw std::invalid_argument("unknown functor kind: " + kind);
}

FunctorHandle functor_by_name(const std::string& name) {
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      std::size_t next = s.find(':', pos);
      if (next == std::string::npos) {
        parts.push_back(s.substr(pos));
        break;
      }
      parts.push_back(s.substr(pos, next - pos));
      pos = next + 1;
    }
    return parts;
  };
  auto parts = split(name);
  const std::string& head = parts[0];
  if (head == "powerset") return powerset_functor();
  if (head == "neighbourhood") return neighbourhood_functor();
  if (head == "monotone") return monotone_neighbourhood_functor();
  if (head == "clique") return clique_functor();
  if (head == "tuples_max2of3" || head == "tuples-max2of3")
    return tuples_max2of3_functor();
  if (head == "x5-quotient") return x5_quotient_functor();
  if (head == "x3-quotient") return x3_quotient_functor();
  if (head == "monoid" && parts.size() == 2) {
    if (parts[1] == "z2") return monoid_valued_functor(monoid_z2());
    if (parts[1] == "sat012") return monoid_valued_functor(monoid_sat012());
    if (parts[1].rfind("nat", 0) == 0)
      return monoid_valued_functor(
          monoid_truncated_nat(std::stoul(parts[1].substr(3))));
  }
  if ((head == "hom-quotient" || head == "hom_quotient") && parts.size() == 2)
    return hom_quotient_functor(std::stoul(parts[1]));
  if ((head == "bounded-words" || head == "bounded_words") && parts.size() == 2)
    return bounded_words_functor(std::stoul(parts[1]));
  throw std::invalid_argument("unknown functor name: " + name);
}

FunctorLawReport validate_functoriality(const Functor& f, std::size_t size_bound) {
  FunctorLawReport report;
  for (std::size_t n = 0; n <= size_bound; ++n) {
    FinSet base = canonical_set(n);
    FinFun lifted = f.lift(FinFun::identity(base));
    if (lifted != FinFun::identity(f.carrier(base))) {
      report.pass = false;
      report.detail = "identity law fails on the " + std::to_string(n) + "-atom set";
      return report;
    }
  }
  for (std::size_t x = 0; x <= size_bound; ++x) {
    FinSet sx = canonical_set(x);
    for (std::size_t y = 0; y <= size_bound; ++y) {
      FinSet sy = canonical_set(y);
      if (y == 0 && x > 0) continue;
      for (std::size_t z = 0; z <= size_bound; ++z) {
        FinSet sz = canonical_set(z);
        if (z == 0 && y > 0) continue;
        std::vector<std::size_t> fd(x, 0), gd(y, 0);
        for (;;) {  // all f: sx -> sy
          FinFun ff(sx, sy, fd);
          for (;;) {  // all g: sy -> sz
            FinFun gg(sy, sz, gd);
            if (f.lift(ff.then(gg)) != f.lift(ff).then(f.lift(gg))) {
              report.pass = false;
              report.detail = "composition law fails for maps " +
                              std::to_string(x) + "->" + std::to_string(y) + "->" +
                              std::to_string(z);
              return report;
            }
            std::size_t i = y;
            for (; i-- > 0;) {
              if (++gd[i] < z) break;
              gd[i] = 0;
              if (i == 0) { i = SIZE_MAX; break; }
            }
            if (i == SIZE_MAX || y == 0) break;
          }
          std::size_t i = x;
          for (; i-- > 0;) {
            if (++fd[i] < y) break;
            fd[i] = 0;
            if (i == 0) { i = SIZE_MAX; break; }
          }
          if (i == SIZE_MAX || x == 0) break;
        }
      }
    }
  }
  return report;
}

}  // namespace laxkit
