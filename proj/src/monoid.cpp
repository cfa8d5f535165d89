#include "laxkit/monoid.hpp"

#include <array>

namespace laxkit {

MonoidSpec::MonoidSpec(FinSet carrier, std::vector<std::vector<std::size_t>> table,
                       std::size_t zero, std::string name)
    : carrier_(std::move(carrier)),
      table_(std::move(table)),
      zero_(zero),
      name_(std::move(name)) {
  const std::size_t n = carrier_.size();
  if (n == 0) throw std::invalid_argument("MonoidSpec: empty carrier");
  if (zero_ >= n) throw std::invalid_argument("MonoidSpec: zero out of range");
  if (table_.size() != n) throw std::invalid_argument("MonoidSpec: bad table height");
  for (const auto& row : table_) {
    if (row.size() != n) throw std::invalid_argument("MonoidSpec: bad table width");
    for (std::size_t v : row)
      if (v >= n) throw std::invalid_argument("MonoidSpec: table entry out of range");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (table_[zero_][a] != a || table_[a][zero_] != a)
      throw std::invalid_argument("MonoidSpec: unit law fails at " + carrier_.at(a));
    for (std::size_t b = 0; b < n; ++b) {
      if (table_[a][b] != table_[b][a])
        throw std::invalid_argument("MonoidSpec: commutativity fails");
      for (std::size_t c = 0; c < n; ++c)
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
          throw std::invalid_argument("MonoidSpec: associativity fails");
    }
  }
}

MonoidAnalysis monoid_analysis(const MonoidSpec& m) {
  MonoidAnalysis out;
  const std::size_t n = m.size();
  out.positive = true;
  for (std::size_t u = 0; u < n && out.positive; ++u) {
    if (u == m.zero()) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (m.add(u, v) == m.zero()) {
        out.positive = false;
        out.inverse_witness = {m.carrier().at(u), m.carrier().at(v)};
        break;
      }
    }
  }
  out.refinable = true;
  for (std::size_t m1 = 0; m1 < n && out.refinable; ++m1)
    for (std::size_t m2 = 0; m2 < n && out.refinable; ++m2)
      for (std::size_t n1 = 0; n1 < n && out.refinable; ++n1)
        for (std::size_t n2 = 0; n2 < n && out.refinable; ++n2) {
          if (m.add(m1, m2) != m.add(n1, n2)) continue;
          bool found = false;
          for (std::size_t a11 = 0; a11 < n && !found; ++a11)
            for (std::size_t a12 = 0; a12 < n && !found; ++a12)
              for (std::size_t a21 = 0; a21 < n && !found; ++a21)
                for (std::size_t a22 = 0; a22 < n && !found; ++a22)
                  found = m.add(a11, a21) == m1 && m.add(a12, a22) == m2 &&
                          m.add(a11, a12) == n1 && m.add(a21, a22) == n2;
          if (!found) {
            out.refinable = false;
            out.refinability_witness = {m.carrier().at(m1), m.carrier().at(m2),
                                        m.carrier().at(n1), m.carrier().at(n2)};
          }
        }
  return out;
}

MonoidSpec monoid_z2() {
  return MonoidSpec(FinSet({"0", "1"}), {{0, 1}, {1, 0}}, 0, "z2");
}

MonoidSpec monoid_sat012() { return monoid_truncated_nat(2); }

MonoidSpec monoid_truncated_nat(std::size_t top) {
  std::vector<std::string> atoms;
  for (std::size_t i = 0; i <= top; ++i) atoms.push_back(std::to_string(i));
  std::vector<std::vector<std::size_t>> table(top + 1, std::vector<std::size_t>(top + 1));
  for (std::size_t a = 0; a <= top; ++a)
    for (std::size_t b = 0; b <= top; ++b) table[a][b] = std::min(a + b, top);
  return MonoidSpec(FinSet(std::move(atoms)), std::move(table), 0,
                    top == 2 ? "sat012" : "nat" + std::to_string(top));
}

}  // namespace laxkit
