#include "hilbert_ot/hilbert_index.hpp"

#include <algorithm>
#include <cmath>

#include "hilbert_ot/error.hpp"

// Compact Hilbert index via the transposed representation: the key's bits
// are spread over d words, word 0 holding the most significant bit of each
// d-bit group. Axes <-> transpose conversion applies the per-level
// reflections and rotations of the Butz curve, followed by a Gray code.

namespace hilbert_ot {

void CurveParams::validate() const {
    if (dims < 2) throw ParameterError("Hilbert curve needs at least 2 dimensions, got " + std::to_string(dims));
    if (order < 1) throw ParameterError("Hilbert curve order must be >= 1");
    if (order > 63) throw ParameterError("Hilbert curve order must be <= 63 (64-bit grid coordinates)");
    if (static_cast<unsigned long>(dims) * order > kMaxKeyBits)
        throw ParameterError("d*k = " + std::to_string(dims * order) + " exceeds the 128-bit key width");
}

namespace {

void axes_to_transpose(std::span<std::uint64_t> x, unsigned order) {
    const std::size_t n = x.size();
    const std::uint64_t top = std::uint64_t{1} << (order - 1);

    for (std::uint64_t q = top; q > 1; q >>= 1) {
        const std::uint64_t p = q - 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] & q) {
                x[0] ^= p;
            } else {
                const std::uint64_t t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }

    for (std::size_t i = 1; i < n; ++i) x[i] ^= x[i - 1];
    std::uint64_t t = 0;
    for (std::uint64_t q = top; q > 1; q >>= 1)
        if (x[n - 1] & q) t ^= q - 1;
    for (std::size_t i = 0; i < n; ++i) x[i] ^= t;
}

void transpose_to_axes(std::span<std::uint64_t> x, unsigned order) {
    const std::size_t n = x.size();
    const std::uint64_t end = std::uint64_t{2} << (order - 1);

    // Gray decode
    std::uint64_t t = x[n - 1] >> 1;
    for (std::size_t i = n - 1; i > 0; --i) x[i] ^= x[i - 1];
    x[0] ^= t;

    for (std::uint64_t q = 2; q != end; q <<= 1) {
        const std::uint64_t p = q - 1;
        for (std::size_t i = n; i-- > 0;) {
            if (x[i] & q) {
                x[0] ^= p;
            } else {
                t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
}

uint128 interleave(std::span<const std::uint64_t> x, unsigned order) {
    uint128 key = 0;
    for (unsigned level = order; level-- > 0;)
        for (std::uint64_t word : x) key = (key << 1) | ((word >> level) & 1u);
    return key;
}

void deinterleave(uint128 key, std::span<std::uint64_t> x, unsigned order) {
    const std::size_t n = x.size();
    std::fill(x.begin(), x.end(), 0);
    unsigned bit = static_cast<unsigned>(n) * order;
    for (unsigned level = order; level-- > 0;) {
        for (std::size_t i = 0; i < n; ++i) {
            --bit;
            x[i] |= static_cast<std::uint64_t>((key >> bit) & 1u) << level;
        }
    }
}

uint128 key_limit(const CurveParams& params) {
    const unsigned bits = params.dims * params.order;
    return bits >= 128 ? ~uint128{0} : (uint128{1} << bits) - 1;
}

}  // namespace

HilbertKey encode_in_place(std::span<std::uint64_t> axes, unsigned order) {
    axes_to_transpose(axes, order);
    return HilbertKey{interleave(axes, order)};
}

HilbertKey encode(const GridCell& cell, const CurveParams& params) {
    params.validate();
    if (cell.coords.size() != params.dims)
        throw InvalidInput("grid cell has " + std::to_string(cell.coords.size()) + " coordinates, expected " +
                           std::to_string(params.dims));
    const std::uint64_t side = params.side();
    for (std::uint64_t c : cell.coords)
        if (c >= side)
            throw InvalidInput("grid coordinate " + std::to_string(c) + " outside [0, 2^" +
                               std::to_string(params.order) + ")");
    std::vector<std::uint64_t> scratch = cell.coords;
    return encode_in_place(scratch, params.order);
}

GridCell decode(HilbertKey key, const CurveParams& params) {
    params.validate();
    if (key.value > key_limit(params))
        throw InvalidInput("Hilbert key " + to_string(key) + " outside [0, 2^" +
                           std::to_string(params.dims * params.order) + ")");
    GridCell cell{std::vector<std::uint64_t>(params.dims)};
    deinterleave(key.value, cell.coords, params.order);
    transpose_to_axes(cell.coords, params.order);
    return cell;
}

long double curve_position(HilbertKey key, const CurveParams& params) {
    return std::ldexp(static_cast<long double>(key.value), -static_cast<int>(params.dims * params.order));
}

std::string to_string(HilbertKey key) {
    if (key.value == 0) return "0";
    std::string digits;
    uint128 v = key.value;
    while (v != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(digits.begin(), digits.end());
    return digits;
}

}  // namespace hilbert_ot
