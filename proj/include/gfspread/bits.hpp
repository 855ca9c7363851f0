#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gfspread {

// Set of points of V(n,2), n <= 7. Bit p is the point whose coordinate
// mask equals p; bit 0 is never used, so 0 works as an iteration sentinel.
struct PointMask {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    void set(unsigned p) {
        if (p < 64) lo |= std::uint64_t{1} << p;
        else hi |= std::uint64_t{1} << (p - 64);
    }
    bool test(unsigned p) const {
        if (p < 64) return (lo >> p) & 1;
        return (hi >> (p - 64)) & 1;
    }
    int count() const { return std::popcount(lo) + std::popcount(hi); }
    bool empty() const { return lo == 0 && hi == 0; }

    bool subset_of(const PointMask& o) const {
        return (lo & ~o.lo) == 0 && (hi & ~o.hi) == 0;
    }
    bool intersects(const PointMask& o) const {
        return (lo & o.lo) != 0 || (hi & o.hi) != 0;
    }

    friend PointMask operator&(PointMask a, PointMask b) { return {a.lo & b.lo, a.hi & b.hi}; }
    friend PointMask operator|(PointMask a, PointMask b) { return {a.lo | b.lo, a.hi | b.hi}; }
    friend PointMask operator^(PointMask a, PointMask b) { return {a.lo ^ b.lo, a.hi ^ b.hi}; }
    friend bool operator==(const PointMask&, const PointMask&) = default;

    // Lowest set bit, or 0 when empty.
    unsigned first() const {
        if (lo) return static_cast<unsigned>(std::countr_zero(lo));
        if (hi) return 64u + static_cast<unsigned>(std::countr_zero(hi));
        return 0;
    }
    // Lowest set bit strictly above p, or 0 when none.
    unsigned next_after(unsigned p) const {
        PointMask m = *this;
        if (p < 63) {
            m.lo &= ~((std::uint64_t{2} << p) - 1);
        } else {
            m.lo = 0;
            if (p > 63) m.hi &= ~((std::uint64_t{2} << (p - 64)) - 1);
        }
        return m.first();
    }
};

// Fixed-size-at-construction bitset used for incidence rows and cover sets.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t nbits) : n_(nbits), w_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return n_; }
    void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t w = w_[wi];
            while (w) {
                unsigned b = static_cast<unsigned>(std::countr_zero(w));
                fn(wi * 64 + b);
                w &= w - 1;
            }
        }
    }

    const std::vector<std::uint64_t>& words() const { return w_; }
    std::vector<std::uint64_t>& words() { return w_; }

    friend bool operator==(const Bitset&, const Bitset&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

// FNV-1a, used as the trailer checksum of the binary cache formats.
class Fnv1a64 {
public:
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ull;
        }
    }
    std::uint64_t digest() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace gfspread
