#include "mwnc/gf256.hpp"

#include <stdexcept>

namespace mwnc::gf {

namespace detail {

const Tables& tables() {
    static const Tables t = [] {
        Tables tt{};
        std::uint16_t x = 1;
        for (int i = 0; i < 255; ++i) {
            tt.exp[i] = static_cast<std::uint8_t>(x);
            tt.log[tt.exp[i]] = static_cast<std::uint8_t>(i);
            x <<= 1;
            if (x & 0x100) x ^= kPoly;
        }
        for (int i = 255; i < 512; ++i) tt.exp[i] = tt.exp[i - 255];
        return tt;
    }();
    return t;
}

}  // namespace detail

FieldElement inv(FieldElement a) {
    if (a == 0) throw std::domain_error("gf256: inverse of zero");
    const auto& t = detail::tables();
    return t.exp[255 - t.log[a]];
}

std::size_t row_axpy(std::span<FieldElement> target, std::span<const FieldElement> source,
                     FieldElement scale) {
    if (target.size() != source.size()) throw std::domain_error("gf256: row_axpy length mismatch");
    if (scale == 0) return 0;
    const auto& t = detail::tables();
    if (scale == 1) {
        for (std::size_t i = 0; i < target.size(); ++i) target[i] ^= source[i];
        return target.size();
    }
    const int ls = t.log[scale];
    for (std::size_t i = 0; i < target.size(); ++i) {
        const FieldElement s = source[i];
        if (s != 0) target[i] ^= t.exp[ls + t.log[s]];
    }
    return target.size();
}

void row_scale(std::span<FieldElement> row, FieldElement scale) {
    if (scale == 1) return;
    if (scale == 0) throw std::domain_error("gf256: scaling a row by zero");
    const auto& t = detail::tables();
    const int ls = t.log[scale];
    for (auto& v : row) {
        if (v != 0) v = t.exp[ls + t.log[v]];
    }
}

}  // namespace mwnc::gf
