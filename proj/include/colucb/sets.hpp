#pragma once
#include <bit>
#include <cstdint>

namespace colucb {

/// Set of small integer ids (< 64) packed into one machine word.
/// Used for arm subsets and group subsets alike; both are capped at 64
/// members so that subset algebra is single-instruction.
struct Bits64 {
    std::uint64_t w = 0;

    constexpr Bits64() = default;
    constexpr explicit Bits64(std::uint64_t word) : w(word) {}

    static constexpr Bits64 none() { return Bits64{0}; }
    /// {0, 1, ..., n-1}
    static constexpr Bits64 first_n(unsigned n) {
        return Bits64{n >= 64 ? ~0ULL : ((1ULL << n) - 1)};
    }
    static constexpr Bits64 single(unsigned i) { return Bits64{1ULL << i}; }

    constexpr bool test(unsigned i) const { return (w >> i) & 1ULL; }
    constexpr void set(unsigned i) { w |= 1ULL << i; }
    constexpr void reset(unsigned i) { w &= ~(1ULL << i); }
    constexpr int count() const { return std::popcount(w); }
    constexpr bool empty() const { return w == 0; }
    constexpr bool any() const { return w != 0; }

    constexpr bool subset_of(Bits64 o) const { return (w & ~o.w) == 0; }
    constexpr bool intersects(Bits64 o) const { return (w & o.w) != 0; }
    /// Lowest member id; undefined on the empty set.
    constexpr unsigned lowest() const { return (unsigned)std::countr_zero(w); }

    constexpr Bits64 operator&(Bits64 o) const { return Bits64{w & o.w}; }
    constexpr Bits64 operator|(Bits64 o) const { return Bits64{w | o.w}; }
    constexpr Bits64 operator~() const { return Bits64{~w}; }
    constexpr Bits64 minus(Bits64 o) const { return Bits64{w & ~o.w}; }
    constexpr Bits64& operator&=(Bits64 o) { w &= o.w; return *this; }
    constexpr Bits64& operator|=(Bits64 o) { w |= o.w; return *this; }
    constexpr bool operator==(const Bits64&) const = default;

    /// Ascending-id iteration:  for (unsigned a : set) { ... }
    struct iterator {
        std::uint64_t rest;
        constexpr unsigned operator*() const { return (unsigned)std::countr_zero(rest); }
        constexpr iterator& operator++() { rest &= rest - 1; return *this; }
        constexpr bool operator!=(const iterator& o) const { return rest != o.rest; }
    };
    constexpr iterator begin() const { return {w}; }
    constexpr iterator end() const { return {0}; }
};

} // namespace colucb
