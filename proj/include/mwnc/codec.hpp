#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mwnc/gf256.hpp"
#include "mwnc/rational.hpp"
#include "mwnc/rng.hpp"

namespace mwnc {

// Window size W, moving speed V (exact rational in (0,1]) and payload bytes
// per packet. The coding window at slot t spans ceil(V*t)-W+1 .. ceil(V*t),
// clamped to start at packet 1 in the early stream.
struct CodecParams {
    std::int64_t window{1};
    Rational speed{1, 2};
    std::size_t payload_len{1};
};

struct WindowBounds {
    std::int64_t lo;
    std::int64_t hi;
};

// Exact window bounds at slot t >= 1.
WindowBounds window_bounds(std::int64_t t, const CodecParams& params);

// One on-air unit: a random linear combination over a contiguous packet span.
struct CodedSymbol {
    std::int64_t slot{0};
    std::int64_t window_lo{0};
    std::int64_t window_hi{0};
    gf::FieldVector coefficients;  // one per packet in [window_lo, window_hi]
    std::vector<std::uint8_t> payload;
};

// Little-endian framing: slot u64, window_lo u64, window_hi u64, coefficient
// bytes, payload bytes. Bit-exact across platforms.
std::vector<std::uint8_t> serialize_symbol(const CodedSymbol& s);
CodedSymbol parse_symbol(const std::vector<std::uint8_t>& bytes, std::size_t payload_len);

// Supplies original packet payloads to the encoder.
class PacketSource {
  public:
    virtual ~PacketSource() = default;
    virtual std::vector<std::uint8_t> packet(std::int64_t id) const = 0;
};

// Pseudorandom payloads derived from (seed, packet id); the saturated-source
// stand-in used by the simulator and round-trip tests.
class DeterministicPacketSource final : public PacketSource {
  public:
    DeterministicPacketSource(std::uint64_t seed, std::size_t payload_len)
        : seed_(seed), payload_len_(payload_len) {}
    std::vector<std::uint8_t> packet(std::int64_t id) const override;

  private:
    std::uint64_t seed_;
    std::size_t payload_len_;
};

// Source encode at slot t: coefficients i.i.d. uniform over GF(2^8), redrawn
// wholesale if the draw is all zero.
CodedSymbol encode(std::int64_t t, const PacketSource& packets, const CodecParams& params,
                   Rng& rng);

struct DecodeEvent {
    std::int64_t slot{0};
    std::vector<std::pair<std::int64_t, std::vector<std::uint8_t>>> packets;  // id, payload
};

struct LossEvent {
    std::int64_t slot{0};
    std::vector<std::int64_t> packets;
};

struct DecoderCounters {
    std::uint64_t lost{0};        // G
    std::uint64_t innovative{0};  // I
    std::uint64_t discarded{0};   // D
    std::uint64_t ops{0};         // cumulative field multiply-adds
    std::vector<std::size_t> row_nonzeros;
};

// Progressive Gauss-Jordan decoder. Rows are kept band-sparse (pivot offset +
// dense coefficient run) in echelon form; back-substitution happens at decode
// events, which is the accounting the complexity bound is stated for.
class Decoder {
  public:
    explicit Decoder(const CodecParams& params) : params_(params) {}

    // Reduces the symbol against decoded packets and existing rows. Inserts it
    // if innovative, else drops it. Emits a DecodeEvent when the reduced
    // matrix covers the whole live span.
    std::optional<DecodeEvent> ingest(const CodedSymbol& symbol);

    // End-of-slot window motion. Declares every undecoded packet behind the
    // next slot's window tail lost and prunes the rows that pointed at them.
    std::optional<LossEvent> advance(std::int64_t t);

    // Particle position S(t) = V*t - G - (I - D), exact.
    Rational particle(std::int64_t t) const;

    // Relay recode: random combination of decoded packets inside the expected
    // window plus reduced rows intersecting it. Returns nothing when the relay
    // knows nothing useful (the simulator treats that as silence).
    std::optional<CodedSymbol> recode(std::int64_t t, Rng& rng) const;

    DecoderCounters counters() const;

    const CodecParams& params() const { return params_; }
    std::int64_t front() const { return front_; }  // all ids <= front decoded or lost
    std::int64_t first_unseen() const;
    bool is_decoded(std::int64_t id) const { return decoded_.count(id) != 0; }
    bool is_lost(std::int64_t id) const { return lost_.count(id) != 0; }
    std::size_t live_rows() const { return rows_.size(); }

    // Dry-run forward elimination (no state change, no op accounting).
    // Returns the pivot and reduced coefficient run the symbol would get, or
    // nothing if it would be dropped.
    std::optional<std::pair<std::int64_t, gf::FieldVector>> probe(const CodedSymbol& s) const;

  private:
    struct Row {
        gf::FieldVector coef;  // coef[0] is the pivot entry, normalized to 1
        std::vector<std::uint8_t> payload;
    };

    // Forward elimination common to ingest/probe. Returns false if the symbol
    // is stale, poisoned by lost packets, or non-innovative.
    bool reduce(const CodedSymbol& s, std::int64_t& pivot, gf::FieldVector& vec,
                std::vector<std::uint8_t>& payload, std::uint64_t* ops) const;

    CodecParams params_;
    std::map<std::int64_t, Row> rows_;                          // pivot -> row
    std::map<std::int64_t, std::vector<std::uint8_t>> decoded_;  // id -> payload
    std::set<std::int64_t> lost_;
    std::int64_t front_{0};
    std::int64_t last_slot_{0};
    std::int64_t prune_horizon_{0};
    std::uint64_t g_{0}, i_{0}, d_{0}, ops_{0};
};

}  // namespace mwnc
