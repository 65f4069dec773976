#include "ciphermatch/matcher.hpp"

#include <algorithm>
#include <stdexcept>

namespace ciphermatch::matcher {

namespace {

// Database partitions as t_bits-wide values, first bit in the MSB, tail
// zero-padded. Written out longhand so the oracle does not lean on the
// packing module it is meant to cross-check.
std::vector<std::uint64_t> partition_bits(const BitString& bits,
                                          const HeParams& params) {
    const std::uint32_t t = params.t_bits;
    std::vector<std::uint64_t> chunks((bits.size() + t - 1) / t, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i])
            chunks[i / t] |= std::uint64_t{1} << (t - 1 - i % t);
    return chunks;
}

}  // namespace

std::uint32_t cyclic_period(const BitString& bits) {
    const std::size_t y = bits.size();
    if (y == 0) throw std::invalid_argument("cyclic_period: empty string");
    for (std::size_t d = 1; d <= y; ++d) {
        if (y % d != 0) continue;
        bool periodic = true;
        for (std::size_t i = 0; i < y && periodic; ++i)
            periodic = bits[i] == bits[(i + d) % y];
        if (periodic) return static_cast<std::uint32_t>(d);
    }
    return static_cast<std::uint32_t>(y);
}

QueryMeta query_meta(const BitString& query_bits, const HeParams& params) {
    const std::uint64_t y = query_bits.size();
    if (y == 0) throw std::invalid_argument("query_meta: empty query");
    if (y > params.n * params.t_bits)
        throw std::invalid_argument("query_meta: query longer than one polynomial");
    QueryMeta meta;
    meta.query_bit_len = y;
    meta.period = cyclic_period(query_bits);
    meta.span_coeffs =
        static_cast<std::uint32_t>((y + params.t_bits - 1) / params.t_bits);
    meta.shift_count =
        std::min(meta.period, params.t_bits * meta.span_coeffs);
    return meta;
}

ring::PolyT replicated_query_plaintext(const BitString& query_bits,
                                       std::uint32_t shift,
                                       const HeParams& params) {
    const std::uint64_t y = query_bits.size();
    const std::uint32_t t = params.t_bits;
    ring::PolyT p = ring::zero_poly_t(params);
    for (std::size_t c = 0; c < params.n; ++c) {
        std::uint64_t v = 0;
        for (std::uint32_t b = 0; b < t; ++b) {
            const std::uint64_t bit =
                query_bits[(c * t + b + shift) % y] ^ 1;  // negated
            v |= bit << (t - 1 - b);
        }
        p.coeffs[c] = v;
    }
    return p;
}

EncryptedDatabase prepare_database(const BitString& bits,
                                   const bfv::PublicKey& pk,
                                   const HeParams& params, Rng& rng,
                                   bfv::EncryptMode mode) {
    if (bits.empty())
        throw std::invalid_argument("prepare_database: empty database");
    const packing::PackedMessage pm = packing::pack(bits, params);
    const std::vector<ring::PolyT> polys = packing::to_plaintexts(pm, params);
    EncryptedDatabase db;
    db.bit_len = bits.size();
    db.params = params;
    db.cts.reserve(polys.size());
    for (const auto& p : polys)
        db.cts.push_back(bfv::encrypt(p, pk, params, rng, mode));
    return db;
}

PreparedQuerySet prepare_query(const BitString& query_bits,
                               const bfv::PublicKey& pk,
                               const HeParams& params, Rng& rng,
                               bfv::EncryptMode mode) {
    PreparedQuerySet set;
    set.meta = query_meta(query_bits, params);
    set.shifts.reserve(set.meta.shift_count);
    for (std::uint32_t s = 0; s < set.meta.shift_count; ++s) {
        const ring::PolyT p = replicated_query_plaintext(query_bits, s, params);
        set.shifts.push_back(PreparedQuery{
            s, bfv::encrypt(p, pk, params, rng, mode), set.meta.query_bit_len});
    }
    return set;
}

std::vector<bfv::Ciphertext> secure_search(const EncryptedDatabase& db,
                                           const PreparedQuery& query) {
    if (query.ct.c0.coeffs.size() != db.params.n)
        throw std::invalid_argument("secure_search: parameter mismatch");
    std::vector<bfv::Ciphertext> results;
    results.reserve(db.cts.size());
    for (const auto& ct : db.cts)
        results.push_back(bfv::hom_add(ct, query.ct));
    return results;
}

MatchPolynomialKit make_match_kit(const bfv::PublicKey& pk,
                                  const HeParams& params, Rng& rng,
                                  bfv::EncryptMode mode) {
    MatchPolynomialKit kit;
    kit.plain = ring::zero_poly_t(params);
    for (auto& c : kit.plain.coeffs) c = params.plain_mask();
    kit.encrypted = bfv::encrypt(kit.plain, pk, params, rng, mode);
    // Sum form: E(match) + E(0), assembled directly so kit construction does
    // not show up in the homomorphic operation counters.
    const bfv::Ciphertext zero =
        bfv::encrypt(ring::zero_poly_t(params), pk, params, rng, mode);
    kit.encrypted_sum_form =
        bfv::Ciphertext{ring::poly_add(kit.encrypted.c0, zero.c0),
                        ring::poly_add(kit.encrypted.c1, zero.c1), 1};
    return kit;
}

std::vector<MatchIndex> generate_indices(const std::vector<ShiftResults>& results,
                                         const MatchPolynomialKit& kit,
                                         std::uint64_t db_bit_len,
                                         const QueryMeta& meta,
                                         const bfv::SecretKey* sk, IndexMode mode,
                                         const HeParams& params) {
    if (mode != IndexMode::CiphertextCompare && sk == nullptr)
        throw std::invalid_argument(
            "generate_indices: decrypting mode needs the secret key");

    const std::uint32_t t = params.t_bits;
    const std::uint64_t total_chunks = (db_bit_len + t - 1) / t;
    const std::uint32_t w = meta.span_coeffs;
    const std::uint32_t p = meta.period;
    std::vector<MatchIndex> out;

    for (const auto& shift_res : results) {
        // Per-coefficient match flags across the whole result sequence,
        // global coefficient indexing (runs may cross ciphertext bounds).
        std::vector<std::uint8_t> flags;
        flags.reserve(shift_res.cts.size() * params.n);
        for (const auto& ct : shift_res.cts) {
            switch (mode) {
                case IndexMode::ClientDecrypt: {
                    const ring::PolyT m = bfv::decrypt(ct, *sk, params);
                    for (std::uint64_t c : m.coeffs)
                        flags.push_back(c == params.plain_mask());
                    break;
                }
                case IndexMode::SubtractThenDecrypt: {
                    const ring::PolyT d = bfv::decrypt(
                        bfv::hom_sub(ct, kit.encrypted), *sk, params);
                    for (std::uint64_t c : d.coeffs) flags.push_back(c == 0);
                    break;
                }
                case IndexMode::CiphertextCompare: {
                    const auto& ref = kit.encrypted_sum_form;
                    for (std::size_t i = 0; i < params.n; ++i)
                        flags.push_back(ct.c0.coeffs[i] == ref.c0.coeffs[i] &&
                                        ct.c1.coeffs[i] == ref.c1.coeffs[i]);
                    break;
                }
            }
        }

        if (total_chunks < w || flags.size() < total_chunks) continue;
        for (std::uint64_t c = 0; c + w <= total_chunks; ++c) {
            bool all = true;
            for (std::uint32_t j = 0; j < w && all; ++j) all = flags[c + j];
            if (!all) continue;
            const std::uint32_t sigma =
                static_cast<std::uint32_t>((c * t + shift_res.shift) % p);
            const std::uint64_t bit_offset = c * t + (p - sigma) % p;
            if (bit_offset + meta.query_bit_len <= db_bit_len)
                out.push_back(MatchIndex{bit_offset, sigma, meta.query_bit_len});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<MatchIndex> plaintext_oracle(const BitString& bits,
                                         const BitString& query_bits,
                                         const HeParams& params) {
    const QueryMeta meta = query_meta(query_bits, params);
    const std::uint32_t t = params.t_bits;
    const std::uint32_t w = meta.span_coeffs;
    const std::uint32_t p = meta.period;
    const std::uint64_t y = meta.query_bit_len;
    const std::uint64_t total_chunks = (bits.size() + t - 1) / t;

    const std::vector<std::uint64_t> db_chunks = partition_bits(bits, params);

    // Pattern partitions for every rotation: rot_chunks[sigma][j] holds bits
    // Q[(j*t + b + sigma) mod y] of the span, packed like a database chunk.
    std::vector<std::vector<std::uint64_t>> rot_chunks(p);
    for (std::uint32_t sigma = 0; sigma < p; ++sigma) {
        rot_chunks[sigma].assign(w, 0);
        for (std::uint32_t j = 0; j < w; ++j)
            for (std::uint32_t b = 0; b < t; ++b)
                if (query_bits[(j * t + b + sigma) % y])
                    rot_chunks[sigma][j] |= std::uint64_t{1} << (t - 1 - b);
    }

    std::vector<MatchIndex> out;
    for (std::uint64_t c = 0; c + w <= total_chunks; ++c) {
        for (std::uint32_t sigma = 0; sigma < p; ++sigma) {
            bool all = true;
            for (std::uint32_t j = 0; j < w && all; ++j)
                all = db_chunks[c + j] == rot_chunks[sigma][j];
            if (!all) continue;
            const std::uint64_t bit_offset = c * t + (p - sigma) % p;
            if (bit_offset + y <= bits.size())
                out.push_back(MatchIndex{bit_offset, sigma, y});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ciphermatch::matcher
