#include <doctest.h>

#include <stdexcept>

#include "mwnc/gf256.hpp"
#include "mwnc/rng.hpp"

using namespace mwnc;

namespace {

// Ground-truth multiply: carry-less shift-and-add, reduced modulo 0x11D.
// Table-free on purpose; the table implementation must agree with this.
std::uint8_t mul_bitwise(std::uint8_t a, std::uint8_t b) {
    std::uint16_t acc = 0;
    std::uint16_t aa = a;
    for (int bit = 0; bit < 8; ++bit) {
        if (b & (1 << bit)) acc ^= aa << bit;
    }
    for (int bit = 15; bit >= 8; --bit) {
        if (acc & (1 << bit)) acc ^= gf::kPoly << (bit - 8);
    }
    return static_cast<std::uint8_t>(acc);
}

}  // namespace

TEST_CASE("gf256 add is xor with identity and self-inverse") {
    CHECK(gf::add(0x00, 0x00) == 0x00);
    CHECK(gf::add(0xAB, 0xAB) == 0x00);
    CHECK(gf::add(0x53, 0xCA) == 0x99);
    for (int a = 0; a < 256; ++a) {
        CHECK(gf::add(static_cast<std::uint8_t>(a), 0) == a);
        CHECK(gf::add(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(a)) == 0);
    }
}

TEST_CASE("gf256 table multiply agrees with the bitwise oracle on all pairs") {
    for (int a = 0; a < 256; ++a) {
        for (int b = 0; b < 256; ++b) {
            const auto ua = static_cast<std::uint8_t>(a);
            const auto ub = static_cast<std::uint8_t>(b);
            REQUIRE(gf::mul(ua, ub) == mul_bitwise(ua, ub));
        }
    }
}

TEST_CASE("gf256 multiply identities") {
    CHECK(gf::mul(0x02, 0x80) == 0x1D);
    for (int a = 0; a < 256; ++a) {
        const auto ua = static_cast<std::uint8_t>(a);
        CHECK(gf::mul(ua, 0x01) == ua);
        CHECK(gf::mul(ua, 0x00) == 0x00);
    }
}

TEST_CASE("gf256 multiply is commutative and distributes over add (exhaustive)") {
    for (int a = 0; a < 256; ++a) {
        for (int b = 0; b < 256; ++b) {
            const auto ua = static_cast<std::uint8_t>(a);
            const auto ub = static_cast<std::uint8_t>(b);
            REQUIRE(gf::mul(ua, ub) == gf::mul(ub, ua));
        }
    }
    Rng rng(42);
    for (int i = 0; i < 100000; ++i) {
        const std::uint8_t a = rng.byte(), b = rng.byte(), c = rng.byte();
        REQUIRE(gf::mul(a, gf::add(b, c)) == gf::add(gf::mul(a, b), gf::mul(a, c)));
    }
}

TEST_CASE("gf256 multiply is associative on random triples") {
    Rng rng(43);
    for (int i = 0; i < 100000; ++i) {
        const std::uint8_t a = rng.byte(), b = rng.byte(), c = rng.byte();
        REQUIRE(gf::mul(a, gf::mul(b, c)) == gf::mul(gf::mul(a, b), c));
    }
}

TEST_CASE("gf256 inverse over all nonzero elements") {
    CHECK(gf::inv(0x01) == 0x01);
    CHECK_THROWS_AS(gf::inv(0x00), std::domain_error);
    for (int a = 1; a < 256; ++a) {
        const auto ua = static_cast<std::uint8_t>(a);
        REQUIRE(gf::mul(ua, gf::inv(ua)) == 0x01);
        REQUIRE(gf::inv(gf::inv(ua)) == ua);
    }
}

TEST_CASE("row_axpy semantics and op accounting") {
    gf::FieldVector target{1, 2};
    gf::FieldVector source{3, 4};
    CHECK(gf::row_axpy(target, source, 0x02) == 2);
    CHECK(target == gf::FieldVector{0x07, 0x0A});

    gf::FieldVector same{5, 6, 7};
    CHECK(gf::row_axpy(same, same, 0x01) == 3);
    CHECK(same == gf::FieldVector{0, 0, 0});

    gf::FieldVector t2{9, 9};
    CHECK(gf::row_axpy(t2, source, 0x00) == 0);
    CHECK(t2 == gf::FieldVector{9, 9});

    gf::FieldVector wrong{1};
    CHECK_THROWS_AS(gf::row_axpy(wrong, source, 1), std::domain_error);
}

TEST_CASE("row_axpy matches per-element mul/add oracle on random rows") {
    Rng rng(44);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(32);
        gf::FieldVector target(n), source(n);
        for (auto& v : target) v = rng.byte();
        for (auto& v : source) v = rng.byte();
        const std::uint8_t scale = rng.byte();
        gf::FieldVector expect = target;
        for (std::size_t i = 0; i < n; ++i)
            expect[i] = gf::add(expect[i], mul_bitwise(scale, source[i]));
        gf::row_axpy(target, source, scale);
        REQUIRE(target == expect);
    }
}
