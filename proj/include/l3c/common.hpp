#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace l3c {

using Vertex = int;
using Colour = int; // colours are 1, 2, 3

// A subset of {1,2,3} stored as a 3-bit mask. Value type, cheap to copy.
class ColourSet {
public:
    ColourSet() = default;

    static ColourSet full() { return ColourSet(0b111); }
    static ColourSet none() { return ColourSet(0); }
    static ColourSet single(Colour c) { return ColourSet(bit(c)); }
    static ColourSet of(std::initializer_list<Colour> cs) {
        ColourSet s;
        for (Colour c : cs) s.mask_ = static_cast<std::uint8_t>(s.mask_ | bit(c));
        return s;
    }

    bool contains(Colour c) const { return (mask_ & bit(c)) != 0; }
    int size() const { return std::popcount(mask_); }
    bool empty() const { return mask_ == 0; }

    ColourSet without(Colour c) const { return ColourSet(static_cast<std::uint8_t>(mask_ & ~bit(c))); }
    ColourSet with(Colour c) const { return ColourSet(static_cast<std::uint8_t>(mask_ | bit(c))); }
    ColourSet intersect(ColourSet o) const { return ColourSet(static_cast<std::uint8_t>(mask_ & o.mask_)); }
    ColourSet unite(ColourSet o) const { return ColourSet(static_cast<std::uint8_t>(mask_ | o.mask_)); }

    // Smallest colour in the set; throws on the empty set.
    Colour first() const {
        for (Colour c = 1; c <= 3; ++c)
            if (contains(c)) return c;
        throw std::logic_error("ColourSet::first on empty set");
    }
    // The single colour of a singleton set.
    Colour only() const {
        if (size() != 1) throw std::logic_error("ColourSet::only on non-singleton set");
        return first();
    }

    std::vector<Colour> colours() const {
        std::vector<Colour> out;
        for (Colour c = 1; c <= 3; ++c)
            if (contains(c)) out.push_back(c);
        return out;
    }

    std::string to_string() const {
        std::string s = "{";
        bool sep = false;
        for (Colour c : colours()) {
            if (sep) s += ",";
            s += std::to_string(c);
            sep = true;
        }
        return s + "}";
    }

    std::uint8_t mask() const { return mask_; }
    friend bool operator==(ColourSet a, ColourSet b) { return a.mask_ == b.mask_; }
    friend bool operator!=(ColourSet a, ColourSet b) { return a.mask_ != b.mask_; }

private:
    explicit ColourSet(std::uint8_t m) : mask_(m) {}
    static std::uint8_t bit(Colour c) {
        if (c < 1 || c > 3) throw std::invalid_argument("colour out of range: " + std::to_string(c));
        return static_cast<std::uint8_t>(1u << (c - 1));
    }
    std::uint8_t mask_ = 0;
};

// Sorted-unique vertex vectors are the set representation used throughout.
// Everything iterates in ascending label order, which keeps traces reproducible.
namespace vset {

inline void normalize(std::vector<Vertex>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline bool contains(const std::vector<Vertex>& v, Vertex x) {
    return std::binary_search(v.begin(), v.end(), x);
}

inline std::vector<Vertex> intersect(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    std::vector<Vertex> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::vector<Vertex> unite(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    std::vector<Vertex> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::vector<Vertex> difference(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    std::vector<Vertex> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace vset

// Real-valued thresholds are compared against integer set sizes with a fixed
// rounding convention: a size meets a lower bound b iff size >= ceil(b - 1e-9),
// and meets an upper bound b iff size <= floor(b + 1e-9). The 1e-9 slack
// absorbs floating-point noise in expressions like mu^(1/3+eps).
inline long long ceil_bound(double x) { return static_cast<long long>(std::ceil(x - 1e-9)); }
inline long long floor_bound(double x) { return static_cast<long long>(std::floor(x + 1e-9)); }
inline bool meets_lower(long long size, double bound) { return size >= ceil_bound(bound); }
inline bool meets_upper(long long size, double bound) { return size <= floor_bound(bound); }

inline long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

// splitmix64: seed derivation for per-item RNG streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x2545f4914f6cdd1dULL * (stream + 1));
    return splitmix64(s);
}

} // namespace l3c
