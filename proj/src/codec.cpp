#include "mwnc/codec.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace mwnc {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::vector<std::uint8_t>& in, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
    return v;
}

// payload ^= scale * other, byte-wise over GF(2^8).
void payload_axpy(std::vector<std::uint8_t>& payload, const std::vector<std::uint8_t>& other,
                  gf::FieldElement scale) {
    for (std::size_t i = 0; i < payload.size(); ++i)
        payload[i] = gf::add(payload[i], gf::mul(scale, other[i]));
}

}  // namespace

WindowBounds window_bounds(std::int64_t t, const CodecParams& params) {
    if (t < 1) throw std::domain_error("window_bounds: slot index must be >= 1");
    const std::int64_t hi = params.speed.ceil_mul(t);
    const std::int64_t lo = std::max<std::int64_t>(1, hi - params.window + 1);
    return {lo, hi};
}

std::vector<std::uint8_t> serialize_symbol(const CodedSymbol& s) {
    std::vector<std::uint8_t> out;
    out.reserve(24 + s.coefficients.size() + s.payload.size());
    put_u64(out, static_cast<std::uint64_t>(s.slot));
    put_u64(out, static_cast<std::uint64_t>(s.window_lo));
    put_u64(out, static_cast<std::uint64_t>(s.window_hi));
    out.insert(out.end(), s.coefficients.begin(), s.coefficients.end());
    out.insert(out.end(), s.payload.begin(), s.payload.end());
    return out;
}

CodedSymbol parse_symbol(const std::vector<std::uint8_t>& bytes, std::size_t payload_len) {
    if (bytes.size() < 24 + payload_len) throw std::domain_error("parse_symbol: truncated frame");
    CodedSymbol s;
    s.slot = static_cast<std::int64_t>(get_u64(bytes, 0));
    s.window_lo = static_cast<std::int64_t>(get_u64(bytes, 8));
    s.window_hi = static_cast<std::int64_t>(get_u64(bytes, 16));
    const std::size_t span = bytes.size() - 24 - payload_len;
    if (s.window_hi - s.window_lo + 1 != static_cast<std::int64_t>(span))
        throw std::domain_error("parse_symbol: span/length mismatch");
    s.coefficients.assign(bytes.begin() + 24, bytes.begin() + 24 + span);
    s.payload.assign(bytes.begin() + 24 + span, bytes.end());
    return s;
}

std::vector<std::uint8_t> DeterministicPacketSource::packet(std::int64_t id) const {
    Rng rng = Rng::stream(seed_, static_cast<std::uint64_t>(id));
    std::vector<std::uint8_t> p(payload_len_);
    for (auto& b : p) b = rng.byte();
    return p;
}

CodedSymbol encode(std::int64_t t, const PacketSource& packets, const CodecParams& params,
                   Rng& rng) {
    const auto [lo, hi] = window_bounds(t, params);
    CodedSymbol s;
    s.slot = t;
    s.window_lo = lo;
    s.window_hi = hi;
    const std::size_t span = static_cast<std::size_t>(hi - lo + 1);
    s.coefficients.resize(span);
    bool nonzero = false;
    while (!nonzero) {
        for (auto& c : s.coefficients) {
            c = rng.byte();
            nonzero |= c != 0;
        }
    }
    s.payload.assign(params.payload_len, 0);
    for (std::size_t i = 0; i < span; ++i) {
        if (s.coefficients[i] == 0) continue;
        payload_axpy(s.payload, packets.packet(lo + static_cast<std::int64_t>(i)),
                     s.coefficients[i]);
    }
    return s;
}

bool Decoder::reduce(const CodedSymbol& s, std::int64_t& pivot, gf::FieldVector& vec,
                     std::vector<std::uint8_t>& payload, std::uint64_t* ops) const {
    if (s.window_hi < s.window_lo || s.window_lo < 1)
        throw std::domain_error("ingest: bad symbol span");
    if (static_cast<std::int64_t>(s.coefficients.size()) != s.window_hi - s.window_lo + 1)
        throw std::domain_error("ingest: span/coefficient length mismatch");
    if (s.payload.size() != params_.payload_len)
        throw std::domain_error("ingest: payload length mismatch");
    if (s.window_hi > params_.speed.ceil_mul(s.slot))
        throw std::domain_error("ingest: symbol span ahead of its slot");
    if (s.window_lo <= prune_horizon_) return false;  // stale, ledger pruned past it

    vec = s.coefficients;
    payload = s.payload;
    const std::int64_t lo = s.window_lo;
    const std::int64_t hi = s.window_hi;

    // Substitute already-decoded packets (unit rows, one multiply-add each).
    for (std::int64_t id = lo; id <= hi; ++id) {
        auto& c = vec[static_cast<std::size_t>(id - lo)];
        if (c == 0) continue;
        auto it = decoded_.find(id);
        if (it != decoded_.end()) {
            payload_axpy(payload, it->second, c);
            c = 0;
            if (ops) ++*ops;
        }
    }
    // A symbol touching a lost packet can never resolve; drop it.
    for (std::int64_t id = lo; id <= hi; ++id) {
        if (vec[static_cast<std::size_t>(id - lo)] != 0 && lost_.count(id)) return false;
    }
    // Forward elimination against retained rows, left to right.
    std::int64_t p = lo;
    while (true) {
        while (p <= hi && vec[static_cast<std::size_t>(p - lo)] == 0) ++p;
        if (p > hi) return false;  // reduced to zero: non-innovative
        auto it = rows_.find(p);
        if (it == rows_.end()) break;
        const Row& row = it->second;
        const gf::FieldElement scale = vec[static_cast<std::size_t>(p - lo)];
        const std::size_t len = row.coef.size();
        const std::size_t off = static_cast<std::size_t>(p - lo);
        // Row support never extends past the current head, so it fits.
        const std::size_t n = gf::row_axpy({vec.data() + off, len}, row.coef, scale);
        if (ops) *ops += n;
        payload_axpy(payload, row.payload, scale);
    }
    pivot = p;
    return true;
}

std::optional<std::pair<std::int64_t, gf::FieldVector>> Decoder::probe(
    const CodedSymbol& s) const {
    std::int64_t pivot = 0;
    gf::FieldVector vec;
    std::vector<std::uint8_t> payload;
    if (!reduce(s, pivot, vec, payload, nullptr)) return std::nullopt;
    gf::FieldVector run(vec.begin() + static_cast<std::ptrdiff_t>(pivot - s.window_lo), vec.end());
    while (!run.empty() && run.back() == 0) run.pop_back();
    return std::make_pair(pivot, std::move(run));
}

std::optional<DecodeEvent> Decoder::ingest(const CodedSymbol& symbol) {
    if (symbol.slot < last_slot_)
        throw std::domain_error("ingest: symbol slots must be non-decreasing");
    last_slot_ = symbol.slot;

    std::int64_t pivot = 0;
    gf::FieldVector vec;
    std::vector<std::uint8_t> payload;
    if (!reduce(symbol, pivot, vec, payload, &ops_)) return std::nullopt;

    Row row;
    row.coef.assign(vec.begin() + static_cast<std::ptrdiff_t>(pivot - symbol.window_lo),
                    vec.end());
    while (row.coef.size() > 1 && row.coef.back() == 0) row.coef.pop_back();
    const gf::FieldElement lead = row.coef[0];
    if (lead != 1) {
        gf::row_scale(row.coef, gf::inv(lead));
        gf::row_scale(payload, gf::inv(lead));
    }
    row.payload = std::move(payload);
    rows_.emplace(pivot, std::move(row));
    ++i_;

    // Full rank over the live span: back-substitute and release everything.
    const std::int64_t head = params_.speed.ceil_mul(symbol.slot);
    if (head <= front_ || static_cast<std::int64_t>(rows_.size()) != head - front_)
        return std::nullopt;

    DecodeEvent event;
    event.slot = symbol.slot;
    for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) {
        const std::int64_t piv = it->first;
        Row& r = it->second;
        for (std::size_t k = 1; k < r.coef.size(); ++k) {
            const gf::FieldElement c = r.coef[k];
            if (c == 0) continue;
            payload_axpy(r.payload, decoded_.at(piv + static_cast<std::int64_t>(k)), c);
            ++ops_;
        }
        decoded_.emplace(piv, r.payload);
    }
    for (std::int64_t id = front_ + 1; id <= head; ++id)
        event.packets.emplace_back(id, decoded_.at(id));
    rows_.clear();
    front_ = head;
    return event;
}

std::optional<LossEvent> Decoder::advance(std::int64_t t) {
    const std::int64_t head_next = params_.speed.ceil_mul(t + 1);
    const std::int64_t tail_next = std::max<std::int64_t>(1, head_next - params_.window + 1);

    // Loss fires when the first unseen packet falls behind the next window
    // tail: nothing before it can ever complete the live prefix again. Seen
    // but undecoded packets behind the tail may still decode later, so the
    // unseen front is the deciding position, not the decoded front.
    std::optional<LossEvent> event;
    if (first_unseen() <= tail_next - 1) {
        event.emplace();
        event->slot = t;
        for (std::int64_t id = front_ + 1; id <= tail_next - 1; ++id) {
            event->packets.push_back(id);
            lost_.insert(id);
            ++g_;
        }
        // Rows whose pivot fell behind the tail can never decode; they are
        // exactly what D counts.
        for (auto it = rows_.begin(); it != rows_.end() && it->first < tail_next;) {
            it = rows_.erase(it);
            ++d_;
        }
        front_ = tail_next - 1;
    }

    // Bound ledger memory; anything this old can no longer appear in a span.
    const std::int64_t horizon = tail_next - 2 * params_.window;
    if (horizon > prune_horizon_) {
        prune_horizon_ = horizon;
        decoded_.erase(decoded_.begin(), decoded_.lower_bound(horizon));
        lost_.erase(lost_.begin(), lost_.lower_bound(horizon));
    }
    return event;
}

Rational Decoder::particle(std::int64_t t) const {
    const std::int64_t seen = static_cast<std::int64_t>(g_ + i_ - d_);
    return Rational(params_.speed.num * t - seen * params_.speed.den, params_.speed.den);
}

std::int64_t Decoder::first_unseen() const {
    std::int64_t p = front_ + 1;
    while (rows_.count(p)) ++p;
    return p;
}

std::optional<CodedSymbol> Decoder::recode(std::int64_t t, Rng& rng) const {
    const auto [lo, hi] = window_bounds(t, params_);

    std::vector<std::int64_t> dec_ids;
    for (auto it = decoded_.lower_bound(lo); it != decoded_.end() && it->first <= hi; ++it)
        dec_ids.push_back(it->first);
    std::vector<const std::map<std::int64_t, Row>::value_type*> live;
    for (const auto& kv : rows_) {
        const std::int64_t r_lo = kv.first;
        const std::int64_t r_hi = kv.first + static_cast<std::int64_t>(kv.second.coef.size()) - 1;
        if (r_lo <= hi && r_hi >= lo) live.push_back(&kv);
    }
    if (dec_ids.empty() && live.empty()) return std::nullopt;

    std::int64_t span_lo = lo;
    for (const auto* kv : live) span_lo = std::min(span_lo, kv->first);

    CodedSymbol s;
    s.slot = t;
    s.window_lo = span_lo;
    s.window_hi = hi;
    const std::size_t span = static_cast<std::size_t>(hi - span_lo + 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        s.coefficients.assign(span, 0);
        s.payload.assign(params_.payload_len, 0);
        bool nonzero = false;
        for (const std::int64_t id : dec_ids) {
            const gf::FieldElement c = rng.byte();
            if (c == 0) continue;
            s.coefficients[static_cast<std::size_t>(id - span_lo)] =
                gf::add(s.coefficients[static_cast<std::size_t>(id - span_lo)], c);
            payload_axpy(s.payload, decoded_.at(id), c);
            nonzero = true;
        }
        for (const auto* kv : live) {
            const gf::FieldElement c = rng.byte();
            if (c == 0) continue;
            const std::size_t off = static_cast<std::size_t>(kv->first - span_lo);
            gf::row_axpy({s.coefficients.data() + off, kv->second.coef.size()}, kv->second.coef,
                         c);
            payload_axpy(s.payload, kv->second.payload, c);
        }
        for (const auto c : s.coefficients) nonzero |= c != 0;
        if (nonzero) return s;
    }
    return std::nullopt;  // vanishing combination 64 times in a row: stay silent
}

DecoderCounters Decoder::counters() const {
    DecoderCounters c;
    c.lost = g_;
    c.innovative = i_;
    c.discarded = d_;
    c.ops = ops_;
    for (const auto& kv : rows_) {
        std::size_t nz = 0;
        for (const auto v : kv.second.coef) nz += v != 0;
        c.row_nonzeros.push_back(nz);
    }
    return c;
}

}  // namespace mwnc
