#pragma once

// Pullback squares over canonical finite sets and (weak) preservation checks.
// A Square holds a cospan (f: X→Z, g: Y→Z) together with its actual pullback
// span (p: P→X, q: P→Y). Enumeration is deduped up to renaming of X, Y, Z,
// and reported witnesses are the first failure in enumeration order.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "laxkit/finrel.hpp"
#include "laxkit/functor.hpp"

namespace laxkit {

enum class SquareShape { IsoQuarter, IsoMonoQuarter, MonoQuarter, EpiAll, KernelPair, General };

std::string shape_name(SquareShape s);
std::optional<SquareShape> shape_from_name(const std::string& name);

struct Square {
  FinFun f;  // X -> Z
  FinFun g;  // Y -> Z
  FinSet apex;
  FinFun p;  // P -> X
  FinFun q;  // P -> Y

  static Square of_cospan(const FinFun& f, const FinFun& g);
  bool matches(SquareShape shape) const;
  nlohmann::json to_json() const;
};

// All shape-matching squares with |X|,|Y|,|Z| <= size_bound over canonical
// sets, deduped by canonical renaming, in deterministic order.
std::vector<Square> enumerate_squares(SquareShape shape, std::size_t size_bound);

// Weak-pullback condition on the lifted square: every compatible pair of
// carrier elements is covered by a lifted apex element.
bool check_square_weak_preservation(const Functor& F, const Square& sq);

// First uncovered pair (u, v) in scan order, if any.
std::optional<std::pair<std::string, std::string>> weak_preservation_failure(
    const Functor& F, const Square& sq);

// True iff the specific pair (u, v) with lift(f)(u) = lift(g)(v) lifts
// through the apex carrier.
bool weak_lift_exists(const Functor& F, const Square& sq, const std::string& u,
                      const std::string& v);

struct PreservationReport {
  bool pass = true;
  SquareShape shape = SquareShape::General;
  std::size_t bound = 0;
  std::size_t squares_checked = 0;
  std::size_t squares_skipped = 0;  // size-guard trips, noted per square
  std::optional<Square> witness_square;
  std::optional<std::pair<std::string, std::string>> witness_pair;
  std::optional<std::string> witness_image;  // common image of the pair
  std::string failure_kind;  // "uncovered-pair" or "mono-collapse"
  nlohmann::json to_json() const;
};

// Weak preservation over all shape squares up to the bound; shapes with a
// monic projection additionally require the lifted leg to stay injective.
// `jobs` fans the per-square checks out across threads; the reported witness
// is the canonical (first in enumeration order) one regardless.
PreservationReport check_preservation(const FunctorHandle& F, SquareShape shape,
                                      std::size_t size_bound, std::size_t jobs = 1);

// Pullbacks along a monomorphism only (g monic); agrees with MonoQuarter.
PreservationReport check_inverse_image_preservation(const FunctorHandle& F,
                                                    std::size_t size_bound,
                                                    std::size_t jobs = 1);

struct DifunctionalMonotoneReport {
  bool pass = true;
  std::size_t bound = 0;
  std::size_t pairs_checked = 0;
  // Witnessing cospan pair: relation of (f,g) <= relation of (f',g') but the
  // lifted comparison fails.
  std::optional<std::array<FinFun, 4>> witness;  // f, g, f2, g2
  std::optional<std::pair<std::string, std::string>> witness_pair;
  nlohmann::json to_json() const;
};

// Monotonicity of the functor action on difunctional relations, checked
// exhaustively over cospan pairs on canonical sets of size <= bound.
DifunctionalMonotoneReport check_difunctional_monotone(const FunctorHandle& F,
                                                       std::size_t size_bound);

}  // namespace laxkit
