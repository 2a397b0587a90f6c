#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <iterator>

namespace trailnet {

/// Index of a contract inside its network (declaration order).
using ContractIndex = std::size_t;
/// Index of an agent inside its network (declaration order).
using AgentIndex = std::size_t;

inline constexpr std::size_t kMaxContracts = 64;

/// A set of contracts of one network, stored as a 64-bit mask.
class ContractSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = ContractIndex;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = ContractIndex;

    constexpr iterator() = default;
    constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
    constexpr ContractIndex operator*() const {
      return static_cast<ContractIndex>(std::countr_zero(rest_));
    }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    constexpr bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr ContractSet() = default;
  constexpr explicit ContractSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr ContractSet single(ContractIndex i) {
    return ContractSet(std::uint64_t{1} << i);
  }
  /// {0, ..., n-1}
  static constexpr ContractSet first(std::size_t n) {
    return ContractSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(std::popcount(bits_));
  }
  constexpr bool contains(ContractIndex i) const { return (bits_ >> i) & 1U; }
  constexpr bool subset_of(ContractSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool intersects(ContractSet other) const {
    return (bits_ & other.bits_) != 0;
  }

  constexpr ContractSet& insert(ContractIndex i) {
    bits_ |= std::uint64_t{1} << i;
    return *this;
  }
  constexpr ContractSet& erase(ContractIndex i) {
    bits_ &= ~(std::uint64_t{1} << i);
    return *this;
  }

  constexpr ContractSet operator|(ContractSet o) const { return ContractSet(bits_ | o.bits_); }
  constexpr ContractSet operator&(ContractSet o) const { return ContractSet(bits_ & o.bits_); }
  /// Set difference.
  constexpr ContractSet operator-(ContractSet o) const { return ContractSet(bits_ & ~o.bits_); }
  constexpr ContractSet& operator|=(ContractSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr ContractSet& operator&=(ContractSet o) {
    bits_ &= o.bits_;
    return *this;
  }
  constexpr ContractSet& operator-=(ContractSet o) {
    bits_ &= ~o.bits_;
    return *this;
  }

  constexpr bool operator==(const ContractSet&) const = default;
  constexpr auto operator<=>(const ContractSet&) const = default;

  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

 private:
  std::uint64_t bits_ = 0;
};

/// Calls fn(sub) for every subset of `mask`, including the empty set and `mask` itself.
/// Subsets are visited in increasing order of their bit pattern.
template <typename Fn>
void for_each_subset(ContractSet mask, Fn&& fn) {
  const std::uint64_t m = mask.bits();
  std::uint64_t sub = 0;
  while (true) {
    fn(ContractSet(sub));
    if (sub == m) break;
    sub = (sub - m) & m;
  }
}

}  // namespace trailnet
