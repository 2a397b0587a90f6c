#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "trailnet/market.hpp"

namespace trailnet {

/// (X^B, X^S): contracts available to buyers and to sellers.
struct OfferPair {
  ContractSet buyer_side;
  ContractSet seller_side;

  ContractSet outcome() const { return buyer_side & seller_side; }
  bool operator==(const OfferPair&) const = default;
};

/// (Y,Z) ⊑ (Y',Z') iff Y ⊆ Y' and Z ⊇ Z'.
inline bool precedes(const OfferPair& a, const OfferPair& b) {
  return a.buyer_side.subset_of(b.buyer_side) && b.seller_side.subset_of(a.seller_side);
}
inline OfferPair lattice_join(const OfferPair& a, const OfferPair& b) {
  return {a.buyer_side | b.buyer_side, a.seller_side & b.seller_side};
}
inline OfferPair lattice_meet(const OfferPair& a, const OfferPair& b) {
  return {a.buyer_side & b.buyer_side, a.seller_side | b.seller_side};
}
/// Total order used for deterministic listings.
inline bool pair_less(const OfferPair& a, const OfferPair& b) {
  if (a.buyer_side != b.buyer_side) return a.buyer_side.bits() < b.buyer_side.bits();
  return a.seller_side.bits() < b.seller_side.bits();
}

inline OfferPair lattice_top(const ContractNetwork& net) { return {net.all(), {}}; }
inline OfferPair lattice_bottom(const ContractNetwork& net) { return {{}, net.all()}; }

/// Φ(Y,Z) = (X \ R_S(Z|Y), X \ R_B(Y|Z)).
OfferPair phi(const Market& market, const OfferPair& p);

struct FixedPointResult {
  OfferPair pair;
  ContractSet outcome;
  std::size_t iterations = 0;
  std::vector<OfferPair> trace;  // start .. fixed point, filled when requested
};

/// Applies Φ from `start` until it stops moving. Throws DomainError when the
/// start is not comparable with its image, AxiomViolation on a step against
/// the initial direction or when 2|X|+2 steps do not suffice.
FixedPointResult iterate(const Market& market, const OfferPair& start, bool keep_trace = false);

/// ⊑-maximal fixed point (iteration from (X, ∅)).
FixedPointResult buyer_optimal(const Market& market, bool keep_trace = false);
/// ⊑-minimal fixed point (iteration from (∅, X)).
FixedPointResult seller_optimal(const Market& market, bool keep_trace = false);

inline constexpr std::size_t kMaxEnumerationContracts = 12;

/// Every fixed point of Φ, sorted by pair_less. Only pairs covering X are
/// scanned. Throws GuardExceeded above kMaxEnumerationContracts contracts.
std::vector<OfferPair> enumerate_fixed_points(const Market& market, unsigned jobs = 1);

/// Distinct outcomes of a fixed-point list, sorted by bit pattern.
std::vector<ContractSet> fixed_point_outcomes(const std::vector<OfferPair>& points);

/// The fixed point built from a fully trail-stable outcome: X0^B collects the
/// contracts outside A reachable by a locally blocking-style walk, X0^S the
/// rest. Throws DomainError when A is not fully trail-stable and
/// AxiomViolation when the construction is not a fixed point.
OfferPair canonical_pair(const Market& market, ContractSet a);

enum class Superiority { equal, seller_superior, buyer_superior, incomparable };
const char* superiority_name(Superiority s);

/// Terminal superiority of A over W. Throws DomainError when A or W is not
/// individually rational for some terminal agent.
Superiority compare_terminal_superiority(const Market& market, ContractSet a, ContractSet w);

/// Projection of the fixed-point lattice onto terminal contracts.
struct TerminalLattice {
  std::vector<OfferPair> elements;          // projected pairs, sorted by pair_less
  std::vector<OfferPair> canonical_images;  // ⊑-greatest fixed point projecting to each element
  std::vector<std::vector<std::size_t>> join;  // indices into elements
  std::vector<std::vector<std::size_t>> meet;
};

/// Builds the lattice through canonical inverse images. Requires full
/// substitutability and LAD/LAS (AxiomViolation otherwise). Throws DomainError if
/// some join or meet falls outside the projected set or is not the least
/// upper / greatest lower bound there.
TerminalLattice terminal_lattice(const Market& market, unsigned jobs = 1);

}  // namespace trailnet
