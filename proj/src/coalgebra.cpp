#include "laxkit/coalgebra.hpp"

#include <algorithm>
#include <unordered_map>

#include "laxkit/json_io.hpp"

namespace laxkit {

Coalgebra::Coalgebra(FunctorHandle functor, FinSet states,
                     std::vector<std::string> structure)
    : functor_(std::move(functor)),
      states_(std::move(states)),
      structure_(std::move(structure)) {
  if (structure_.size() != states_.size())
    throw std::invalid_argument("Coalgebra: structure size mismatch");
  const FinSet& codes = functor_->carrier(states_);
  for (const auto& c : structure_)
    if (!codes.contains(c))
      throw std::invalid_argument("Coalgebra: invalid carrier code '" + c + "'");
}

Coalgebra Coalgebra::from_json(const nlohmann::json& j) {
  FunctorHandle functor = build_functor(j.at("functor"));
  FinSet states = finset_from_json(j.at("states"));
  std::vector<std::string> structure(states.size());
  for (auto it = j.at("structure").begin(); it != j.at("structure").end(); ++it)
    structure.at(states.index_of(it.key())) = it.value().get<std::string>();
  return Coalgebra(std::move(functor), std::move(states), std::move(structure));
}

nlohmann::json Coalgebra::to_json() const {
  nlohmann::json structure = nlohmann::json::object();
  for (std::size_t i = 0; i < states_.size(); ++i)
    structure[states_.at(i)] = structure_[i];
  return {{"functor", functor_->spec_json()},
          {"states", finset_to_json(states_)},
          {"structure", structure}};
}

namespace {

void require_same_functor(const Coalgebra& a, const Coalgebra& b) {
  if (a.functor()->spec_json() != b.functor()->spec_json())
    throw std::invalid_argument("coalgebras are for different functors");
}

struct DisjointUnion {
  FinSet states;
  std::vector<std::string> structure;  // transported along the injections
};

DisjointUnion disjoint_union(const Coalgebra& a, const Coalgebra& b) {
  std::vector<std::string> atoms;
  for (const auto& s : a.states().atoms()) atoms.push_back("a:" + s);
  for (const auto& s : b.states().atoms()) atoms.push_back("b:" + s);
  FinSet u(atoms);
  const Functor& F = *a.functor();

  std::vector<std::size_t> amap(a.states().size()), bmap(b.states().size());
  for (std::size_t i = 0; i < amap.size(); ++i) amap[i] = i;
  for (std::size_t i = 0; i < bmap.size(); ++i) bmap[i] = a.states().size() + i;
  FinFun inj_a(a.states(), u, amap);
  FinFun inj_b(b.states(), u, bmap);
  FinFun lift_a = F.lift(inj_a);
  FinFun lift_b = F.lift(inj_b);

  DisjointUnion out{u, {}};
  out.structure.reserve(u.size());
  for (std::size_t i = 0; i < a.states().size(); ++i)
    out.structure.push_back(
        lift_a.cod().at(lift_a(lift_a.dom().index_of(a.structure(i)))));
  for (std::size_t i = 0; i < b.states().size(); ++i)
    out.structure.push_back(
        lift_b.cod().at(lift_b(lift_b.dom().index_of(b.structure(i)))));
  return out;
}

}  // namespace

Rel behavioural_equivalence(const Coalgebra& a, const Coalgebra& b) {
  require_same_functor(a, b);
  const Functor& F = *a.functor();
  DisjointUnion u = disjoint_union(a, b);
  const std::size_t n = u.states.size();

  std::vector<std::size_t> block(n, 0);
  std::size_t blocks = n == 0 ? 0 : 1;
  for (;;) {
    FinSet quotient = canonical_set(blocks, "q");
    FinFun q(u.states, quotient, block);
    FinFun lifted = F.lift(q);
    // Refine by (old block, lifted structure image).
    std::unordered_map<std::uint64_t, std::size_t> fresh;
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t sig =
          static_cast<std::uint64_t>(block[i]) * (lifted.cod().size() + 1) +
          lifted(lifted.dom().index_of(u.structure[i]));
      auto [it, inserted] = fresh.emplace(sig, fresh.size());
      (void)inserted;
      next[i] = it->second;
    }
    // Refinement only ever splits blocks, and ids are assigned in
    // first-occurrence order, so a stable partition reproduces itself.
    if (next == block) break;
    blocks = fresh.size();
    block = std::move(next);
  }

  Rel out(a.states(), b.states());
  const std::size_t na = a.states().size();
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < b.states().size(); ++j)
      if (block[i] == block[na + j]) out.add(i, j);
  return out;
}

std::string backend_name(const Backend& b) {
  if (std::holds_alternative<BarrBackend>(b)) return "barr";
  if (std::holds_alternative<DifunctionalExactBackend>(b)) return "difunctional";
  const auto& l = std::get<LaxifyBackend>(b);
  return "laxify:" + std::to_string(l.max_len) + ":" + std::to_string(l.max_mid);
}

std::optional<Backend> backend_from_name(const std::string& name) {
  if (name == "barr") return Backend{BarrBackend{}};
  if (name == "difunctional") return Backend{DifunctionalExactBackend{}};
  if (name.rfind("laxify:", 0) == 0) {
    auto rest = name.substr(7);
    auto colon = rest.find(':');
    if (colon == std::string::npos) return std::nullopt;
    LaxifyBackend l;
    l.max_len = std::stoul(rest.substr(0, colon));
    l.max_mid = std::stoul(rest.substr(colon + 1));
    return Backend{l};
  }
  return std::nullopt;
}

namespace {

// Membership test for the backend's lifting of s, evaluated lazily for the
// Barr backend (fast paths) and materialised otherwise.
class BackendLift {
 public:
  BackendLift(const Functor& F, const Rel& s, const Backend& backend) : f_(F), s_(s) {
    if (std::holds_alternative<LaxifyBackend>(backend)) {
      const auto& l = std::get<LaxifyBackend>(backend);
      LaxifyOptions opts;
      opts.max_len = l.max_len;
      opts.max_mid = l.max_mid;
      lifted_ = laxification_approx(F, s, opts);
    } else if (std::holds_alternative<DifunctionalExactBackend>(backend)) {
      if (!is_difunctional(s))
        throw std::invalid_argument(
            "difunctional backend applied to a non-difunctional relation");
      Cospan po = pushout(canonical_span(s));
      lifted_ = difunctional_lax_value(F, po);
    }
  }

  bool member(const std::string& u, const std::string& v) const {
    if (lifted_)
      return lifted_->test(lifted_->dom().index_of(u), lifted_->cod().index_of(v));
    return barr_member(f_, s_, u, v);
  }

 private:
  const Functor& f_;
  Rel s_;
  std::optional<Rel> lifted_;
};

}  // namespace

bool is_L_simulation(const Rel& s, const Coalgebra& a, const Coalgebra& b,
                     const Backend& backend) {
  require_same_functor(a, b);
  if (s.dom() != a.states() || s.cod() != b.states())
    throw std::invalid_argument("is_L_simulation: relation endpoints mismatch");
  auto pairs = s.pairs();
  if (pairs.empty()) return true;
  BackendLift lift(*a.functor(), s, backend);
  for (auto [x, y] : pairs)
    if (!lift.member(a.structure(x), b.structure(y))) return false;
  return true;
}

Rel greatest_L_bisimulation(const Coalgebra& a, const Coalgebra& b,
                            const Backend& backend) {
  require_same_functor(a, b);
  Rel s = Rel::full(a.states(), b.states());
  for (;;) {
    auto pairs = s.pairs();
    if (pairs.empty()) return s;
    BackendLift fwd(*a.functor(), s, backend);
    Rel sc = converse(s);
    BackendLift bwd(*a.functor(), sc, backend);
    Rel next = s;
    bool changed = false;
    for (auto [x, y] : pairs) {
      if (fwd.member(a.structure(x), b.structure(y)) &&
          bwd.member(b.structure(y), a.structure(x)))
        continue;
      next.remove(x, y);
      changed = true;
    }
    if (!changed) return s;
    s = std::move(next);
  }
}

}  // namespace laxkit
