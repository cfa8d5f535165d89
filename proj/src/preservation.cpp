#include "laxkit/preservation.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "laxkit/json_io.hpp"
#include "laxkit/lax.hpp"

namespace laxkit {

std::string shape_name(SquareShape s) {
  switch (s) {
    case SquareShape::IsoQuarter: return "iso-quarter";
    case SquareShape::IsoMonoQuarter: return "iso-mono-quarter";
    case SquareShape::MonoQuarter: return "mono-quarter";
    case SquareShape::EpiAll: return "epi-all";
    case SquareShape::KernelPair: return "kernel-pair";
    case SquareShape::General: return "general";
  }
  return "general";
}

std::optional<SquareShape> shape_from_name(const std::string& name) {
  if (name == "iso-quarter") return SquareShape::IsoQuarter;
  if (name == "iso-mono-quarter") return SquareShape::IsoMonoQuarter;
  if (name == "mono-quarter") return SquareShape::MonoQuarter;
  if (name == "epi-all") return SquareShape::EpiAll;
  if (name == "kernel-pair") return SquareShape::KernelPair;
  if (name == "general") return SquareShape::General;
  return std::nullopt;
}

Square Square::of_cospan(const FinFun& f, const FinFun& g) {
  if (f.cod() != g.cod()) throw std::invalid_argument("Square: cospan mismatch");
  Span pb = pullback(Cospan(f.cod(), f, g));
  return Square{f, g, pb.apex, pb.left, pb.right};
}

namespace {

bool is_bijective(const FinFun& h) { return h.is_injective() && h.is_surjective(); }

}  // namespace

bool Square::matches(SquareShape shape) const {
  switch (shape) {
    case SquareShape::IsoQuarter:
      return is_bijective(p) || is_bijective(q);
    case SquareShape::IsoMonoQuarter:
      return (is_bijective(q) && g.is_injective()) ||
             (is_bijective(p) && f.is_injective());
    case SquareShape::MonoQuarter:
      return p.is_injective() || q.is_injective();
    case SquareShape::EpiAll:
      return f.is_surjective() && g.is_surjective() && p.is_surjective() &&
             q.is_surjective();
    case SquareShape::KernelPair:
      return f.dom() == g.dom() && f == g;
    case SquareShape::General:
      return true;
  }
  return true;
}

nlohmann::json Square::to_json() const {
  return {{"f", finfun_to_json(f)},
          {"g", finfun_to_json(g)},
          {"apex", finset_to_json(apex)},
          {"p", finfun_to_json(p)},
          {"q", finfun_to_json(q)}};
}

namespace {

// Every map dom -> cod as digit tuples f(0)..f(n-1), f(0) most significant.
void for_each_map(std::size_t dom, std::size_t cod,
                  const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (dom > 0 && cod == 0) return;
  std::vector<std::size_t> digits(dom, 0);
  for (;;) {
    fn(digits);
    std::size_t i = dom;
    bool done = true;
    while (i-- > 0) {
      if (++digits[i] < cod) { done = false; break; }
      digits[i] = 0;
    }
    if (done) break;
  }
}

std::vector<std::size_t> apply_perm(const std::vector<std::size_t>& perm,
                                    const std::vector<std::size_t>& digits) {
  std::vector<std::size_t> out(digits.size());
  for (std::size_t i = 0; i < digits.size(); ++i) out[i] = perm[digits[i]];
  return out;
}

std::vector<std::vector<std::size_t>> permutations_of(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// A cospan is canonical when both digit tuples are sorted and no codomain
// permutation yields a lexicographically smaller (sorted f, sorted g) key.
bool canonical_cospan(const std::vector<std::size_t>& f, const std::vector<std::size_t>& g,
                      const std::vector<std::vector<std::size_t>>& perms) {
  if (!std::is_sorted(f.begin(), f.end()) || !std::is_sorted(g.begin(), g.end()))
    return false;
  for (const auto& perm : perms) {
    auto pf = apply_perm(perm, f);
    auto pg = apply_perm(perm, g);
    std::sort(pf.begin(), pf.end());
    std::sort(pg.begin(), pg.end());
    if (pf < f || (pf == f && pg < g)) return false;
  }
  return true;
}

bool canonical_kernel(const std::vector<std::size_t>& f,
                      const std::vector<std::vector<std::size_t>>& perms) {
  if (!std::is_sorted(f.begin(), f.end())) return false;
  for (const auto& perm : perms) {
    auto pf = apply_perm(perm, f);
    std::sort(pf.begin(), pf.end());
    if (pf < f) return false;
  }
  return true;
}

}  // namespace

std::vector<Square> enumerate_squares(SquareShape shape, std::size_t size_bound) {
  std::vector<Square> out;
  for (std::size_t x = 0; x <= size_bound; ++x) {
    FinSet sx = canonical_set(x);
    for (std::size_t y = 0; y <= size_bound; ++y) {
      if (shape == SquareShape::KernelPair && y != x) continue;
      FinSet sy = canonical_set(y);
      for (std::size_t z = 0; z <= size_bound; ++z) {
        FinSet sz = canonical_set(z);
        if (z == 0 && (x > 0 || y > 0)) continue;
        auto perms = permutations_of(z);
        if (shape == SquareShape::KernelPair) {
          for_each_map(x, z, [&](const std::vector<std::size_t>& fd) {
            if (!canonical_kernel(fd, perms)) return;
            FinFun f(sx, sz, fd);
            Square sq = Square::of_cospan(f, f);
            if (sq.matches(shape)) out.push_back(std::move(sq));
          });
        } else {
          for_each_map(x, z, [&](const std::vector<std::size_t>& fd) {
            for_each_map(y, z, [&](const std::vector<std::size_t>& gd) {
              if (!canonical_cospan(fd, gd, perms)) return;
              FinFun f(sx, sz, fd);
              FinFun g(sy, sz, gd);
              Square sq = Square::of_cospan(f, g);
              if (sq.matches(shape)) out.push_back(std::move(sq));
            });
          });
        }
      }
    }
  }
  return out;
}

namespace {

struct LiftedSquare {
  FinFun ff, fg, fp, fq;
};

LiftedSquare lift_square(const Functor& F, const Square& sq) {
  return {F.lift(sq.f), F.lift(sq.g), F.lift(sq.p), F.lift(sq.q)};
}

std::optional<std::pair<std::string, std::string>> first_uncovered_pair(
    const Functor& F, const Square& sq) {
  LiftedSquare ls = lift_square(F, sq);
  const std::size_t ny = ls.fq.cod().size();
  std::unordered_set<std::uint64_t> covered;
  covered.reserve(ls.fp.dom().size() * 2);
  for (std::size_t w = 0; w < ls.fp.dom().size(); ++w)
    covered.insert(static_cast<std::uint64_t>(ls.fp(w)) * ny + ls.fq(w));
  for (std::size_t u = 0; u < ls.ff.dom().size(); ++u)
    for (std::size_t v = 0; v < ls.fg.dom().size(); ++v) {
      if (ls.ff(u) != ls.fg(v)) continue;
      if (!covered.count(static_cast<std::uint64_t>(u) * ny + v))
        return std::make_pair(ls.ff.dom().at(u), ls.fg.dom().at(v));
    }
  return std::nullopt;
}

// First pair of carrier codes collapsed by the lift of an injective leg.
std::optional<std::pair<std::string, std::string>> first_mono_collapse(
    const Functor& F, const Square& sq) {
  for (const FinFun* leg : {&sq.p, &sq.q}) {
    if (!leg->is_injective()) continue;
    FinFun lifted = F.lift(*leg);
    std::unordered_map<std::size_t, std::size_t> seen;
    for (std::size_t w = 0; w < lifted.dom().size(); ++w) {
      auto [it, fresh] = seen.emplace(lifted(w), w);
      if (!fresh)
        return std::make_pair(lifted.dom().at(it->second), lifted.dom().at(w));
    }
  }
  return std::nullopt;
}

bool shape_requires_mono_check(SquareShape s) {
  return s == SquareShape::IsoQuarter || s == SquareShape::IsoMonoQuarter ||
         s == SquareShape::MonoQuarter;
}

enum class SquareVerdict { Pass, UncoveredPair, MonoCollapse, Skipped };

SquareVerdict judge_square(const Functor& F, const Square& sq, bool mono_check) {
  try {
    if (mono_check && first_mono_collapse(F, sq)) return SquareVerdict::MonoCollapse;
    if (first_uncovered_pair(F, sq)) return SquareVerdict::UncoveredPair;
    return SquareVerdict::Pass;
  } catch (const SizeGuardError&) {
    return SquareVerdict::Skipped;
  }
}

PreservationReport run_preservation(const FunctorHandle& F, SquareShape shape,
                                    std::size_t size_bound, std::size_t jobs,
                                    const std::vector<Square>& squares) {
  const bool mono_check = shape_requires_mono_check(shape);
  PreservationReport report;
  report.shape = shape;
  report.bound = size_bound;
  report.squares_checked = squares.size();

  std::vector<SquareVerdict> verdicts(squares.size(), SquareVerdict::Pass);
  if (jobs <= 1 || squares.size() < 2) {
    for (std::size_t i = 0; i < squares.size(); ++i)
      verdicts[i] = judge_square(*F, squares[i], mono_check);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::size_t nworkers = std::min(jobs, squares.size());
    for (std::size_t t = 0; t < nworkers; ++t)
      workers.emplace_back([&]() {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= squares.size()) return;
          verdicts[i] = judge_square(*F, squares[i], mono_check);
        }
      });
    for (auto& w : workers) w.join();
  }

  for (std::size_t i = 0; i < squares.size(); ++i) {
    if (verdicts[i] == SquareVerdict::Skipped) {
      ++report.squares_skipped;
      continue;
    }
    if (verdicts[i] == SquareVerdict::Pass) continue;
    report.pass = false;
    report.witness_square = squares[i];
    if (verdicts[i] == SquareVerdict::MonoCollapse) {
      report.failure_kind = "mono-collapse";
      report.witness_pair = first_mono_collapse(*F, squares[i]);
    } else {
      report.failure_kind = "uncovered-pair";
      report.witness_pair = first_uncovered_pair(*F, squares[i]);
      if (report.witness_pair) {
        FinFun ff = F->lift(squares[i].f);
        report.witness_image = ff.cod().at(ff(ff.dom().index_of(report.witness_pair->first)));
      }
    }
    break;
  }
  return report;
}

}  // namespace

bool check_square_weak_preservation(const Functor& F, const Square& sq) {
  return !first_uncovered_pair(F, sq).has_value();
}

std::optional<std::pair<std::string, std::string>> weak_preservation_failure(
    const Functor& F, const Square& sq) {
  return first_uncovered_pair(F, sq);
}

bool weak_lift_exists(const Functor& F, const Square& sq, const std::string& u,
                      const std::string& v) {
  LiftedSquare ls = lift_square(F, sq);
  std::size_t ui = ls.ff.dom().index_of(u);
  std::size_t vi = ls.fg.dom().index_of(v);
  if (ls.ff(ui) != ls.fg(vi))
    throw std::invalid_argument("weak_lift_exists: pair does not agree on the cospan");
  for (std::size_t w = 0; w < ls.fp.dom().size(); ++w)
    if (ls.fp(w) == ui && ls.fq(w) == vi) return true;
  return false;
}

PreservationReport check_preservation(const FunctorHandle& F, SquareShape shape,
                                      std::size_t size_bound, std::size_t jobs) {
  return run_preservation(F, shape, size_bound, jobs, enumerate_squares(shape, size_bound));
}

PreservationReport check_inverse_image_preservation(const FunctorHandle& F,
                                                    std::size_t size_bound,
                                                    std::size_t jobs) {
  std::vector<Square> squares = enumerate_squares(SquareShape::General, size_bound);
  squares.erase(std::remove_if(squares.begin(), squares.end(),
                               [](const Square& sq) { return !sq.g.is_injective(); }),
                squares.end());
  return run_preservation(F, SquareShape::MonoQuarter, size_bound, jobs, squares);
}

nlohmann::json PreservationReport::to_json() const {
  nlohmann::json j{{"verdict", pass ? "pass" : "fail"},
                   {"shape", shape_name(shape)},
                   {"bound", bound},
                   {"squares_checked", squares_checked},
                   {"squares_skipped", squares_skipped}};
  if (!pass && witness_square) {
    nlohmann::json w{{"square", witness_square->to_json()},
                     {"kind", failure_kind}};
    if (witness_pair) w["pair"] = {witness_pair->first, witness_pair->second};
    if (witness_image) w["image"] = *witness_image;
    j["witness"] = w;
  }
  return j;
}

DifunctionalMonotoneReport check_difunctional_monotone(const FunctorHandle& F,
                                                       std::size_t size_bound) {
  DifunctionalMonotoneReport report;
  report.bound = size_bound;

  struct Entry {
    FinFun f, g;
    Rel rel;
    Rel lifted;
  };

  for (std::size_t x = 0; x <= size_bound && report.pass; ++x) {
    FinSet sx = canonical_set(x);
    for (std::size_t y = 0; y <= size_bound && report.pass; ++y) {
      FinSet sy = canonical_set(y);
      std::vector<Entry> entries;
      for (std::size_t a = 0; a <= size_bound; ++a) {
        FinSet sa = canonical_set(a);
        if (a == 0 && (x > 0 || y > 0)) continue;
        for_each_map(x, a, [&](const std::vector<std::size_t>& fd) {
          FinFun f(sx, sa, fd);
          for_each_map(y, a, [&](const std::vector<std::size_t>& gd) {
            FinFun g(sy, sa, gd);
            Cospan cospan(sa, f, g);
            entries.push_back(Entry{f, g, cospan_relation(cospan),
                                    difunctional_lax_value(*F, cospan)});
          });
        });
      }
      for (std::size_t i = 0; i < entries.size() && report.pass; ++i)
        for (std::size_t j = 0; j < entries.size(); ++j) {
          if (i == j) continue;
          ++report.pairs_checked;
          if (!rel_leq(entries[i].rel, entries[j].rel)) continue;
          if (rel_leq(entries[i].lifted, entries[j].lifted)) continue;
          report.pass = false;
          report.witness = {entries[i].f, entries[i].g, entries[j].f, entries[j].g};
          for (auto [u, v] : entries[i].lifted.pairs())
            if (!entries[j].lifted.test(u, v)) {
              report.witness_pair = {entries[i].lifted.dom().at(u),
                                     entries[i].lifted.cod().at(v)};
              break;
            }
          break;
        }
    }
  }
  return report;
}

nlohmann::json DifunctionalMonotoneReport::to_json() const {
  nlohmann::json j{{"verdict", pass ? "pass" : "fail"},
                   {"bound", bound},
                   {"pairs_checked", pairs_checked}};
  if (!pass && witness) {
    j["witness"] = {{"f", finfun_to_json((*witness)[0])},
                    {"g", finfun_to_json((*witness)[1])},
                    {"f2", finfun_to_json((*witness)[2])},
                    {"g2", finfun_to_json((*witness)[3])}};
    if (witness_pair) j["witness"]["pair"] = {witness_pair->first, witness_pair->second};
  }
  return j;
}

}  // namespace laxkit
