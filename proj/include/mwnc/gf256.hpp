#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// GF(2^8) arithmetic with primitive polynomial x^8+x^4+x^3+x^2+1 (0x11D),
// log/antilog tables. All coding operations sit on top of these.
namespace mwnc::gf {

using FieldElement = std::uint8_t;
using FieldVector = std::vector<FieldElement>;

inline constexpr std::uint16_t kPoly = 0x11D;

namespace detail {
struct Tables {
    std::uint8_t exp[512];
    std::uint8_t log[256];  // log[0] unused
};
const Tables& tables();
}  // namespace detail

inline FieldElement add(FieldElement a, FieldElement b) { return a ^ b; }

inline FieldElement mul(FieldElement a, FieldElement b) {
    if (a == 0 || b == 0) return 0;
    const auto& t = detail::tables();
    return t.exp[t.log[a] + t.log[b]];
}

// Multiplicative inverse; a must be nonzero.
FieldElement inv(FieldElement a);

// target[i] += scale * source[i]. Returns the number of field multiply-adds
// performed (0 when scale == 0), which feeds the decoding-complexity counter.
std::size_t row_axpy(std::span<FieldElement> target, std::span<const FieldElement> source,
                     FieldElement scale);

// In-place scale of a row; no-op for scale == 1.
void row_scale(std::span<FieldElement> row, FieldElement scale);

}  // namespace mwnc::gf
