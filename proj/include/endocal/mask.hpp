#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

#include "endocal/errors.hpp"

namespace endocal {

/// Row-major binary raster packed 64 pixels per word. Bits past the row
/// width are kept zero so word-wise counting needs no masking.
struct BinaryMask {
    int width = 0;
    int height = 0;
    int words_per_row = 0;
    std::vector<std::uint64_t> words;

    BinaryMask() = default;
    BinaryMask(int w, int h)
        : width(w), height(h), words_per_row((w + 63) / 64),
          words(static_cast<std::size_t>(words_per_row) * static_cast<std::size_t>(h), 0) {}

    bool get(int u, int v) const {
        return (words[static_cast<std::size_t>(v) * words_per_row + (u >> 6)] >>
                (u & 63)) & 1ULL;
    }

    void set(int u, int v) {
        words[static_cast<std::size_t>(v) * words_per_row + (u >> 6)] |= 1ULL << (u & 63);
    }

    void clear(int u, int v) {
        words[static_cast<std::size_t>(v) * words_per_row + (u >> 6)] &= ~(1ULL << (u & 63));
    }

    void fill_zero() { std::fill(words.begin(), words.end(), 0ULL); }

    bool in_bounds(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }

    std::int64_t count() const {
        std::int64_t n = 0;
        for (std::uint64_t w : words) n += std::popcount(w);
        return n;
    }

    bool same_size(const BinaryMask& o) const { return width == o.width && height == o.height; }

    bool operator==(const BinaryMask& o) const {
        return width == o.width && height == o.height && words == o.words;
    }
};

inline std::int64_t intersection_count(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_size(b)) throw DimensionMismatchError("mask sizes differ");
    std::int64_t n = 0;
    for (std::size_t i = 0; i < a.words.size(); ++i) n += std::popcount(a.words[i] & b.words[i]);
    return n;
}

/// Per-pixel Euclidean distance (in pixels) to the nearest feature pixel.
/// Squared distances are stored exactly; with integer pixel positions they
/// are integers, so exactness is testable with ==. An empty feature set
/// yields +infinity everywhere.
struct DistanceField {
    int width = 0;
    int height = 0;
    std::vector<double> squared;

    DistanceField() = default;
    DistanceField(int w, int h)
        : width(w), height(h),
          squared(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
                  std::numeric_limits<double>::infinity()) {}

    double squared_at(int u, int v) const {
        return squared[static_cast<std::size_t>(v) * width + u];
    }
    double distance(int u, int v) const { return std::sqrt(squared_at(u, v)); }
};

/// Edge-proximity weights p(u, v) in [0, d_max^2]: d_max^2 exactly on edge
/// pixels, decaying to 0 where the nearest edge is d_max or farther.
struct WeightField {
    int width = 0;
    int height = 0;
    std::vector<double> p;

    WeightField() = default;
    WeightField(int w, int h)
        : width(w), height(h),
          p(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0) {}

    double at(int u, int v) const { return p[static_cast<std::size_t>(v) * width + u]; }
    bool same_size(const WeightField& o) const { return width == o.width && height == o.height; }
};

}  // namespace endocal
