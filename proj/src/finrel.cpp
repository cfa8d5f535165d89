#include "laxkit/finrel.hpp"

#include <algorithm>
#include <numeric>

namespace laxkit {

FinSet::FinSet() : FinSet(std::vector<std::string>{}) {}

FinSet::FinSet(std::vector<std::string> atoms) {
  auto data = std::make_shared<Data>();
  data->index.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!data->index.emplace(atoms[i], i).second)
      throw std::invalid_argument("FinSet: duplicate atom '" + atoms[i] + "'");
  }
  data->atoms = std::move(atoms);
  data_ = std::move(data);
}

std::optional<std::size_t> FinSet::find(const std::string& atom) const {
  auto it = data_->index.find(atom);
  if (it == data_->index.end()) return std::nullopt;
  return it->second;
}

std::size_t FinSet::index_of(const std::string& atom) const {
  auto i = find(atom);
  if (!i) throw std::invalid_argument("FinSet: unknown atom '" + atom + "'");
  return *i;
}

bool FinSet::operator==(const FinSet& other) const {
  return data_ == other.data_ || data_->atoms == other.data_->atoms;
}

FinSet canonical_set(std::size_t n, const std::string& prefix) {
  std::vector<std::string> atoms;
  atoms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) atoms.push_back(prefix + std::to_string(i));
  return FinSet(std::move(atoms));
}

std::string fresh_atom(const FinSet& s, const std::string& base) {
  std::string candidate = base;
  while (s.contains(candidate)) candidate += "'";
  return candidate;
}

FinSet union_sets(const FinSet& a, const FinSet& b) {
  std::vector<std::string> atoms = a.atoms();
  for (const auto& x : b.atoms())
    if (!a.contains(x)) atoms.push_back(x);
  return FinSet(std::move(atoms));
}

FinSet subset_of(const FinSet& s, const std::vector<bool>& keep) {
  std::vector<std::string> atoms;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (keep.at(i)) atoms.push_back(s.at(i));
  return FinSet(std::move(atoms));
}

FinFun::FinFun(FinSet dom, FinSet cod, std::vector<std::size_t> map)
    : dom_(std::move(dom)), cod_(std::move(cod)), map_(std::move(map)) {
  if (map_.size() != dom_.size())
    throw std::invalid_argument("FinFun: map size does not match domain");
  for (std::size_t v : map_)
    if (v >= cod_.size()) throw std::invalid_argument("FinFun: image out of codomain");
}

FinFun FinFun::identity(const FinSet& s) {
  std::vector<std::size_t> map(s.size());
  std::iota(map.begin(), map.end(), std::size_t{0});
  return FinFun(s, s, std::move(map));
}

FinFun FinFun::from_labels(const FinSet& dom, const FinSet& cod,
                           const std::vector<std::pair<std::string, std::string>>& entries) {
  std::vector<std::size_t> map(dom.size(), SIZE_MAX);
  for (const auto& [a, b] : entries) {
    std::size_t i = dom.index_of(a);
    if (map[i] != SIZE_MAX) throw std::invalid_argument("FinFun: atom mapped twice: " + a);
    map[i] = cod.index_of(b);
  }
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] == SIZE_MAX)
      throw std::invalid_argument("FinFun: atom not mapped: " + dom.at(i));
  return FinFun(dom, cod, std::move(map));
}

const std::string& FinFun::apply(const std::string& atom) const {
  return cod_.at(map_.at(dom_.index_of(atom)));
}

FinFun FinFun::then(const FinFun& g) const {
  if (cod_ != g.dom()) throw std::invalid_argument("FinFun::then: middle sets differ");
  std::vector<std::size_t> map(dom_.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = g(map_[i]);
  return FinFun(dom_, g.cod(), std::move(map));
}

bool FinFun::is_injective() const {
  std::vector<bool> seen(cod_.size(), false);
  for (std::size_t v : map_) {
    if (seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

bool FinFun::is_surjective() const {
  std::vector<bool> seen(cod_.size(), false);
  for (std::size_t v : map_) seen[v] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::vector<bool> FinFun::image_mask() const {
  std::vector<bool> seen(cod_.size(), false);
  for (std::size_t v : map_) seen[v] = true;
  return seen;
}

bool FinFun::operator==(const FinFun& other) const {
  return dom_ == other.dom_ && cod_ == other.cod_ && map_ == other.map_;
}

Rel::Rel(FinSet dom, FinSet cod)
    : dom_(std::move(dom)),
      cod_(std::move(cod)),
      words_((cod_.size() + 63) / 64),
      bits_(dom_.size() * words_, 0) {}

Rel Rel::identity(const FinSet& s) {
  Rel r(s, s);
  for (std::size_t i = 0; i < s.size(); ++i) r.add(i, i);
  return r;
}

Rel Rel::full(const FinSet& dom, const FinSet& cod) {
  Rel r(dom, cod);
  for (std::size_t i = 0; i < dom.size(); ++i)
    for (std::size_t j = 0; j < cod.size(); ++j) r.add(i, j);
  return r;
}

Rel Rel::from_pairs(const FinSet& dom, const FinSet& cod,
                    const std::vector<std::pair<std::string, std::string>>& pairs) {
  Rel r(dom, cod);
  for (const auto& [a, b] : pairs) r.add(dom.index_of(a), cod.index_of(b));
  return r;
}

Rel Rel::graph(const FinFun& f) {
  Rel r(f.dom(), f.cod());
  for (std::size_t i = 0; i < f.dom().size(); ++i) r.add(i, f(i));
  return r;
}

void Rel::add(std::size_t i, std::size_t j) {
  if (i >= dom_.size() || j >= cod_.size()) throw std::out_of_range("Rel::add");
  row(i)[j / 64] |= std::uint64_t{1} << (j % 64);
}

void Rel::remove(std::size_t i, std::size_t j) {
  if (i >= dom_.size() || j >= cod_.size()) throw std::out_of_range("Rel::remove");
  row(i)[j / 64] &= ~(std::uint64_t{1} << (j % 64));
}

bool Rel::test(std::size_t i, std::size_t j) const {
  return (row(i)[j / 64] >> (j % 64)) & 1;
}

std::size_t Rel::pair_count() const {
  std::size_t n = 0;
  for (std::uint64_t w : bits_) n += static_cast<std::size_t>(__builtin_popcountll(w));
  return n;
}

std::vector<std::pair<std::size_t, std::size_t>> Rel::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < dom_.size(); ++i)
    for (std::size_t j = 0; j < cod_.size(); ++j)
      if (test(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<std::pair<std::string, std::string>> Rel::pair_labels() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto [i, j] : pairs()) out.emplace_back(dom_.at(i), cod_.at(j));
  return out;
}

bool Rel::operator==(const Rel& other) const {
  return dom_ == other.dom_ && cod_ == other.cod_ && bits_ == other.bits_;
}

Rel compose(const Rel& r, const Rel& s) {
  if (r.cod() != s.dom())
    throw std::invalid_argument("compose: middle sets differ");
  Rel out(r.dom(), s.cod());
  for (std::size_t i = 0; i < r.dom().size(); ++i) {
    auto* dst = out.row(i);
    for (std::size_t j = 0; j < r.cod().size(); ++j) {
      if (!r.test(i, j)) continue;
      const auto* src = s.row(j);
      for (std::size_t w = 0; w < out.words_; ++w) dst[w] |= src[w];
    }
  }
  return out;
}

Rel converse(const Rel& r) {
  Rel out(r.cod(), r.dom());
  for (auto [i, j] : r.pairs()) out.add(j, i);
  return out;
}

Rel rel_join(const Rel& a, const Rel& b) {
  if (a.dom() != b.dom() || a.cod() != b.cod())
    throw std::invalid_argument("rel_join: type mismatch");
  Rel out = a;
  for (std::size_t w = 0; w < out.bits_.size(); ++w) out.bits_[w] |= b.bits_[w];
  return out;
}

Rel rel_meet(const Rel& a, const Rel& b) {
  if (a.dom() != b.dom() || a.cod() != b.cod())
    throw std::invalid_argument("rel_meet: type mismatch");
  Rel out = a;
  for (std::size_t w = 0; w < out.bits_.size(); ++w) out.bits_[w] &= b.bits_[w];
  return out;
}

bool rel_leq(const Rel& a, const Rel& b) {
  if (a.dom() != b.dom() || a.cod() != b.cod())
    throw std::invalid_argument("rel_leq: type mismatch");
  for (std::size_t w = 0; w < a.bits_.size(); ++w)
    if (a.bits_[w] & ~b.bits_[w]) return false;
  return true;
}

std::vector<bool> rel_domain_mask(const Rel& r) {
  std::vector<bool> mask(r.dom().size(), false);
  for (std::size_t i = 0; i < mask.size(); ++i)
    for (std::size_t j = 0; j < r.cod().size(); ++j)
      if (r.test(i, j)) { mask[i] = true; break; }
  return mask;
}

std::vector<bool> rel_codomain_mask(const Rel& r) {
  std::vector<bool> mask(r.cod().size(), false);
  for (std::size_t i = 0; i < r.dom().size(); ++i)
    for (std::size_t j = 0; j < mask.size(); ++j)
      if (r.test(i, j)) mask[j] = true;
  return mask;
}

bool is_total(const Rel& r) {
  auto m = rel_domain_mask(r);
  return std::all_of(m.begin(), m.end(), [](bool b) { return b; });
}

bool is_surjective(const Rel& r) {
  auto m = rel_codomain_mask(r);
  return std::all_of(m.begin(), m.end(), [](bool b) { return b; });
}

bool is_partial_function(const Rel& r) {
  for (std::size_t i = 0; i < r.dom().size(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < r.cod().size(); ++j)
      if (r.test(i, j) && ++count > 1) return false;
  }
  return true;
}

bool is_converse_partial_function(const Rel& r) {
  for (std::size_t j = 0; j < r.cod().size(); ++j) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < r.dom().size(); ++i)
      if (r.test(i, j) && ++count > 1) return false;
  }
  return true;
}

bool is_subidentity(const Rel& r) {
  if (r.dom() != r.cod()) return false;
  for (auto [i, j] : r.pairs())
    if (i != j) return false;
  return true;
}

RelPredicates rel_predicates(const Rel& r) {
  RelPredicates p;
  p.total = is_total(r);
  p.surjective = is_surjective(r);
  p.partial_function = is_partial_function(r);
  p.converse_partial_function = is_converse_partial_function(r);
  p.subidentity = is_subidentity(r);
  auto dm = rel_domain_mask(r);
  auto cm = rel_codomain_mask(r);
  for (std::size_t i = 0; i < dm.size(); ++i)
    if (dm[i]) p.domain.push_back(r.dom().at(i));
  for (std::size_t j = 0; j < cm.size(); ++j)
    if (cm[j]) p.codomain.push_back(r.cod().at(j));
  return p;
}

bool is_difunctional(const Rel& r) {
  // Rows that share a codomain atom must be equal.
  const std::size_t n = r.dom().size();
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = i1 + 1; i2 < n; ++i2) {
      bool meet = false;
      for (std::size_t w = 0; w < r.words_; ++w)
        if (r.row(i1)[w] & r.row(i2)[w]) { meet = true; break; }
      if (!meet) continue;
      for (std::size_t w = 0; w < r.words_; ++w)
        if (r.row(i1)[w] != r.row(i2)[w]) return false;
    }
  }
  return true;
}

Rel difunctional_closure(const Rel& r) {
  Rel t = r;
  for (;;) {
    // Zigzag step X -t→ Y -t°→ X -t→ Y in diagrammatic order.
    Rel next = rel_join(t, compose(compose(t, converse(t)), t));
    if (next == t) return t;
    t = next;
  }
}

Rel difunctional_closure_via_pushout(const Rel& r) {
  Span sp = canonical_span(r);
  Cospan po = pushout(sp);
  return cospan_relation(po);
}

Span::Span(FinSet a, FinFun l, FinFun r)
    : apex(std::move(a)), left(std::move(l)), right(std::move(r)) {
  if (left.dom() != apex || right.dom() != apex)
    throw std::invalid_argument("Span: legs must share the apex as domain");
}

Cospan::Cospan(FinSet a, FinFun l, FinFun r)
    : apex(std::move(a)), left(std::move(l)), right(std::move(r)) {
  if (left.cod() != apex || right.cod() != apex)
    throw std::invalid_argument("Cospan: legs must share the apex as codomain");
}

namespace {

std::string pair_label(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

}  // namespace

Span canonical_span(const Rel& r) {
  std::vector<std::string> atoms;
  std::vector<std::size_t> lmap, rmap;
  for (auto [i, j] : r.pairs()) {
    atoms.push_back(pair_label(r.dom().at(i), r.cod().at(j)));
    lmap.push_back(i);
    rmap.push_back(j);
  }
  FinSet apex(std::move(atoms));
  return Span(apex, FinFun(apex, r.dom(), std::move(lmap)),
              FinFun(apex, r.cod(), std::move(rmap)));
}

Rel span_relation(const Span& s) {
  Rel out(s.left.cod(), s.right.cod());
  for (std::size_t w = 0; w < s.apex.size(); ++w) out.add(s.left(w), s.right(w));
  return out;
}

Rel cospan_relation(const Cospan& c) {
  Rel out(c.left.dom(), c.right.dom());
  for (std::size_t i = 0; i < c.left.dom().size(); ++i)
    for (std::size_t j = 0; j < c.right.dom().size(); ++j)
      if (c.left(i) == c.right(j)) out.add(i, j);
  return out;
}

Span pullback(const Cospan& c) {
  const FinSet& x = c.left.dom();
  const FinSet& y = c.right.dom();
  std::vector<std::string> atoms;
  std::vector<std::size_t> lmap, rmap;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (c.left(i) == c.right(j)) {
        atoms.push_back(pair_label(x.at(i), y.at(j)));
        lmap.push_back(i);
        rmap.push_back(j);
      }
  FinSet apex(std::move(atoms));
  return Span(apex, FinFun(apex, x, std::move(lmap)), FinFun(apex, y, std::move(rmap)));
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Cospan pushout(const Span& s) {
  const FinSet& x = s.left.cod();
  const FinSet& y = s.right.cod();
  const std::size_t nx = x.size(), ny = y.size();
  UnionFind uf(nx + ny);
  for (std::size_t w = 0; w < s.apex.size(); ++w) uf.unite(s.left(w), nx + s.right(w));

  // Classes in first-occurrence order over X then Y.
  std::unordered_map<std::size_t, std::size_t> class_index;
  std::vector<std::string> least_label;
  std::vector<std::size_t> xmap(nx), ymap(ny);
  auto visit = [&](std::size_t node, const std::string& label) {
    std::size_t root = uf.find(node);
    auto it = class_index.find(root);
    std::size_t idx;
    if (it == class_index.end()) {
      idx = least_label.size();
      class_index.emplace(root, idx);
      least_label.push_back(label);
    } else {
      idx = it->second;
      if (label < least_label[idx]) least_label[idx] = label;
    }
    return idx;
  };
  for (std::size_t i = 0; i < nx; ++i) xmap[i] = visit(i, x.at(i));
  for (std::size_t j = 0; j < ny; ++j) ymap[j] = visit(nx + j, y.at(j));

  std::vector<std::string> names(least_label.size());
  std::unordered_map<std::string, std::size_t> used;
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::string name = "[" + least_label[k] + "]";
    auto [it, fresh] = used.emplace(name, 1);
    if (!fresh) name += "@" + std::to_string(++it->second);
    names[k] = name;
  }
  FinSet apex(std::move(names));
  return Cospan(apex, FinFun(x, apex, std::move(xmap)), FinFun(y, apex, std::move(ymap)));
}

std::pair<FinFun, FinFun> epi_mono_factorize(const FinFun& f) {
  auto mask = f.image_mask();
  FinSet image = subset_of(f.cod(), mask);
  std::vector<std::size_t> to_image(f.cod().size(), SIZE_MAX);
  for (std::size_t j = 0, k = 0; j < f.cod().size(); ++j)
    if (mask[j]) to_image[j] = k++;
  std::vector<std::size_t> surj(f.dom().size());
  for (std::size_t i = 0; i < surj.size(); ++i) surj[i] = to_image[f(i)];
  std::vector<std::size_t> inj(image.size());
  for (std::size_t j = 0, k = 0; j < f.cod().size(); ++j)
    if (mask[j]) inj[k++] = j;
  return {FinFun(f.dom(), image, std::move(surj)), FinFun(image, f.cod(), std::move(inj))};
}

}  // namespace laxkit
