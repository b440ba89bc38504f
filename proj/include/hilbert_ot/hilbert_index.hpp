#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hilbert_ot {

using uint128 = unsigned __int128;

/// Dimension count and order of a discrete Hilbert curve on the
/// 2^order x ... x 2^order grid. Keys occupy dims*order bits.
struct CurveParams {
    unsigned dims = 2;
    unsigned order = 1;

    static constexpr unsigned kMaxKeyBits = 128;

    /// Throws ParameterError unless dims >= 2, order >= 1 and dims*order <= 128.
    void validate() const;
    std::uint64_t side() const { return std::uint64_t{1} << order; }
};

struct GridCell {
    std::vector<std::uint64_t> coords;

    friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct HilbertKey {
    uint128 value = 0;

    friend bool operator==(const HilbertKey&, const HilbertKey&) = default;
    friend auto operator<=>(const HilbertKey& a, const HilbertKey& b) {
        return a.value <=> b.value;
    }
};

/// Rank of `cell` along the order-k Hilbert curve. The curve starts at the
/// origin cell; in 2D the first-level visiting order is (0,0),(0,1),(1,1),(1,0).
/// O(d*k) bit operations.
HilbertKey encode(const GridCell& cell, const CurveParams& params);

/// Inverse of encode.
GridCell decode(HilbertKey key, const CurveParams& params);

/// Unchecked hot-loop variant: `axes` holds one coordinate per dimension and
/// is overwritten with scratch data. Caller guarantees params are valid and
/// every coordinate is below 2^order.
HilbertKey encode_in_place(std::span<std::uint64_t> axes, unsigned order);

/// key / 2^(d*k), the curve parameter of the cell's interval start.
long double curve_position(HilbertKey key, const CurveParams& params);

std::string to_string(HilbertKey key);

}  // namespace hilbert_ot
