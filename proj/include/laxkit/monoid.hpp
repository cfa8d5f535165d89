#pragma once

// Commutative monoid presentations for monoid-valued functors, plus the
// positivity / refinability analysis that separates the weighted-functor
// preservation classes.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "laxkit/finrel.hpp"

namespace laxkit {

class MonoidSpec {
 public:
  // `table[i][j]` is the index of atom_i + atom_j. Laws (associativity,
  // commutativity, unit) are checked exhaustively on construction.
  MonoidSpec(FinSet carrier, std::vector<std::vector<std::size_t>> table,
             std::size_t zero, std::string name = "monoid");

  const FinSet& carrier() const { return carrier_; }
  std::size_t size() const { return carrier_.size(); }
  std::size_t zero() const { return zero_; }
  std::size_t add(std::size_t a, std::size_t b) const { return table_[a][b]; }
  const std::string& name() const { return name_; }
  const std::vector<std::vector<std::size_t>>& table() const { return table_; }

 private:
  FinSet carrier_;
  std::vector<std::vector<std::size_t>> table_;
  std::size_t zero_;
  std::string name_;
};

struct MonoidAnalysis {
  bool positive = false;
  bool refinable = false;
  // u + v = 0 with u != 0 (and then v != 0 as well).
  std::optional<std::pair<std::string, std::string>> inverse_witness;
  // m1 + m2 = n1 + n2 admitting no 2x2 refinement matrix.
  std::optional<std::array<std::string, 4>> refinability_witness;
};

// positivity: no non-zero invertible elements; refinability: every
// m1+m2 = n1+n2 has a 2x2 matrix with column sums m_i and row sums n_j.
MonoidAnalysis monoid_analysis(const MonoidSpec& m);

// Builtins.
MonoidSpec monoid_z2();                    // the group Z/2
MonoidSpec monoid_sat012();                // additive {0,1,2} with 2+1 = 2
MonoidSpec monoid_truncated_nat(std::size_t top);  // saturating {0..top}

}  // namespace laxkit
