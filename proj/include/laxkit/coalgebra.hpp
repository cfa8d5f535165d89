#pragma once

// Finite coalgebras for a functor handle: a state set plus a structure map
// into the carrier over the states. Behavioural equivalence is computed by
// partition refinement through lifted quotient maps; (bi)simulations are
// checked against a pluggable relation-lifting backend.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "laxkit/functor.hpp"
#include "laxkit/lax.hpp"

namespace laxkit {

class Coalgebra {
 public:
  // structure[i] is the carrier code assigned to state i; validated against
  // carrier(F, states).
  Coalgebra(FunctorHandle functor, FinSet states, std::vector<std::string> structure);
  static Coalgebra from_json(const nlohmann::json& j);

  const FunctorHandle& functor() const { return functor_; }
  const FinSet& states() const { return states_; }
  const std::string& structure(std::size_t state) const { return structure_.at(state); }
  const std::vector<std::string>& structures() const { return structure_; }
  nlohmann::json to_json() const;

 private:
  FunctorHandle functor_;
  FinSet states_;
  std::vector<std::string> structure_;
};

// Greatest behavioural-equivalence relation between the state sets of a and
// b, computed on the disjoint union by quotient-map partition refinement.
Rel behavioural_equivalence(const Coalgebra& a, const Coalgebra& b);

// Relation-lifting backends for (bi)simulation checks.
struct BarrBackend {};
struct LaxifyBackend {
  std::size_t max_len = 3;
  std::size_t max_mid = 4;
};
struct DifunctionalExactBackend {};  // valid only on difunctional relations
using Backend = std::variant<BarrBackend, LaxifyBackend, DifunctionalExactBackend>;

std::string backend_name(const Backend& b);
// "barr", "laxify:K:M", or "difunctional".
std::optional<Backend> backend_from_name(const std::string& name);

// β·s <= L s·α with L given by the backend.
bool is_L_simulation(const Rel& s, const Coalgebra& a, const Coalgebra& b,
                     const Backend& backend);

// Greatest fixpoint from the full relation, removing all violating pairs per
// round in both directions (simulation on s and on its converse).
Rel greatest_L_bisimulation(const Coalgebra& a, const Coalgebra& b,
                            const Backend& backend);

}  // namespace laxkit
