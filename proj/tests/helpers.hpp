#pragma once

// Test-only support: generic-symbol generation and small linear-algebra
// oracles kept independent of the decoder implementation.

#include <doctest.h>

#include <map>
#include <stdexcept>
#include <vector>

#include "mwnc/codec.hpp"

namespace mwnc::test {

class VectorPacketSource final : public PacketSource {
  public:
    explicit VectorPacketSource(std::vector<std::vector<std::uint8_t>> packets)
        : packets_(std::move(packets)) {}
    std::vector<std::uint8_t> packet(std::int64_t id) const override {
        if (id < 1 || id > static_cast<std::int64_t>(packets_.size()))
            throw std::domain_error("missing packet");
        return packets_[static_cast<std::size_t>(id - 1)];
    }

  private:
    std::vector<std::vector<std::uint8_t>> packets_;
};

// Draws source symbols until the draw is "generic": if anything in the span
// is unseen, the reduced symbol must pivot on the first unseen packet and be
// dense through the window head. This is the infinite-field idealization the
// trajectory and counting lemmas are stated for; a uniform draw satisfies it
// with probability about 1 - W/256 per symbol.
inline CodedSymbol generic_encode(std::int64_t t, const Decoder& dec, const PacketSource& src,
                                  const CodecParams& params, Rng& rng) {
    const auto [lo, hi] = window_bounds(t, params);
    const std::int64_t fu = dec.first_unseen();
    for (int attempt = 0; attempt < 512; ++attempt) {
        CodedSymbol s = encode(t, src, params, rng);
        if (fu > hi) return s;  // nothing unseen: any symbol is non-innovative
        const auto red = dec.probe(s);
        if (!red) continue;
        if (red->first != fu) continue;
        if (static_cast<std::int64_t>(red->second.size()) != hi - fu + 1) continue;
        bool dense = true;
        for (const auto c : red->second) dense &= c != 0;
        if (dense) return s;
    }
    REQUIRE_MESSAGE(false, "generic_encode: no generic draw in 512 attempts");
    return {};
}

// Offline batch Gaussian elimination over GF(2^8); returns the rank of the
// received coefficient matrix. Independent of the Decoder code path.
inline std::size_t offline_rank(const std::vector<CodedSymbol>& symbols, std::int64_t max_id) {
    std::vector<std::vector<std::uint8_t>> rows;
    for (const auto& s : symbols) {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(max_id), 0);
        for (std::int64_t id = s.window_lo; id <= s.window_hi; ++id)
            row[static_cast<std::size_t>(id - 1)] = s.coefficients[static_cast<std::size_t>(id - s.window_lo)];
        rows.push_back(std::move(row));
    }
    std::size_t rank = 0;
    std::map<std::size_t, std::vector<std::uint8_t>> pivots;
    for (auto& row : rows) {
        std::size_t p = 0;
        while (p < row.size()) {
            while (p < row.size() && row[p] == 0) ++p;
            if (p == row.size()) break;
            const auto it = pivots.find(p);
            if (it == pivots.end()) break;
            const std::uint8_t scale = row[p];
            for (std::size_t k = p; k < row.size(); ++k)
                row[k] = gf::add(row[k], gf::mul(scale, it->second[k]));
        }
        if (p == row.size()) continue;
        const std::uint8_t lead_inv = gf::inv(row[p]);
        for (std::size_t k = p; k < row.size(); ++k) row[k] = gf::mul(lead_inv, row[k]);
        pivots.emplace(p, row);
        ++rank;
    }
    return rank;
}

// True iff the candidate vector lies in the row space of the knowledge rows.
// Everything is mapped into the dense frame [base, base+len) and eliminated;
// membership means the candidate reduces to zero.
inline bool in_row_space(const std::vector<std::pair<std::int64_t, std::vector<std::uint8_t>>>& knowledge,
                         std::int64_t base, std::size_t len, std::int64_t vec_lo,
                         const std::vector<std::uint8_t>& vec) {
    const auto densify = [&](std::int64_t lo, const std::vector<std::uint8_t>& row) {
        std::vector<std::uint8_t> out(len, 0);
        for (std::size_t k = 0; k < row.size(); ++k) {
            const std::int64_t idx = lo + static_cast<std::int64_t>(k) - base;
            REQUIRE(idx >= 0);
            REQUIRE(idx < static_cast<std::int64_t>(len));
            out[static_cast<std::size_t>(idx)] = row[k];
        }
        return out;
    };

    std::map<std::size_t, std::vector<std::uint8_t>> pivots;
    const auto reduce = [&](std::vector<std::uint8_t> row) {
        std::size_t p = 0;
        while (true) {
            while (p < len && row[p] == 0) ++p;
            if (p == len) return std::make_pair(len, row);
            const auto it = pivots.find(p);
            if (it == pivots.end()) return std::make_pair(p, row);
            const std::uint8_t scale = row[p];
            for (std::size_t k = p; k < len; ++k)
                row[k] = gf::add(row[k], gf::mul(scale, it->second[k]));
        }
    };

    for (const auto& [rlo, r] : knowledge) {
        auto [p, row] = reduce(densify(rlo, r));
        if (p == len) continue;
        const std::uint8_t li = gf::inv(row[p]);
        for (auto& c : row) c = gf::mul(li, c);
        pivots.emplace(p, std::move(row));
    }
    return reduce(densify(vec_lo, vec)).first == len;
}

}  // namespace mwnc::test
