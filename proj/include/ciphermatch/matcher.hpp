#pragma once

#include <cstdint>
#include <vector>

#include "ciphermatch/bfv.hpp"
#include "ciphermatch/packing.hpp"
#include "ciphermatch/params.hpp"
#include "ciphermatch/rng.hpp"

namespace ciphermatch::matcher {

using packing::BitString;

struct EncryptedDatabase {
    std::vector<bfv::Ciphertext> cts;
    std::uint64_t bit_len = 0;
    HeParams params;
};

// Shift-variant bookkeeping for one query. The negated query is replicated
// cyclically across the whole coefficient space; rotating that pattern left
// by one bit per variant covers every alignment the construction can
// distinguish. Distinct variants = the cyclic period of the query, which is
// never more than t_bits * span_coeffs.
struct QueryMeta {
    std::uint64_t query_bit_len = 0;
    std::uint32_t period = 0;
    std::uint32_t span_coeffs = 0;  // ceil(query_bit_len / t_bits)
    std::uint32_t shift_count = 0;
};

struct PreparedQuery {
    std::uint32_t shift = 0;
    bfv::Ciphertext ct;
    std::uint64_t query_bit_len = 0;
};

struct PreparedQuerySet {
    QueryMeta meta;
    std::vector<PreparedQuery> shifts;
};

// Plaintext whose every coefficient is 2^t_bits - 1 plus its encryptions.
// encrypted_sum_form carries the same noise shape as a fresh hom-add result
// and is what the ciphertext-compare mode matches against.
struct MatchPolynomialKit {
    ring::PolyT plain;
    bfv::Ciphertext encrypted;
    bfv::Ciphertext encrypted_sum_form;
};

// A reported match. bit_offset points at the database bit where the
// unrotated query pattern begins inside the matched span; shift is the
// rotation of the pattern relative to the start of the span (so an aligned
// occurrence of the query itself is always reported with shift 0).
struct MatchIndex {
    std::uint64_t bit_offset = 0;
    std::uint32_t shift = 0;
    std::uint64_t span = 0;

    bool operator==(const MatchIndex&) const = default;
    bool operator<(const MatchIndex& o) const {
        if (bit_offset != o.bit_offset) return bit_offset < o.bit_offset;
        if (shift != o.shift) return shift < o.shift;
        return span < o.span;
    }
};

enum class IndexMode {
    ClientDecrypt,        // decrypt results, look for all-ones coefficients
    SubtractThenDecrypt,  // subtract encrypted match polynomial, test zero
    CiphertextCompare,    // compare ciphertext bytes; requires PaperLiteral
};

struct ShiftResults {
    std::uint32_t shift = 0;
    std::vector<bfv::Ciphertext> cts;
};

// Smallest d such that rotating the string left by d bits reproduces it
// (always a divisor of the length).
std::uint32_t cyclic_period(const BitString& bits);

QueryMeta query_meta(const BitString& query_bits, const HeParams& params);

// Negated query, replicated cyclically to fill all n coefficients, rotated
// left by `shift` bits.
ring::PolyT replicated_query_plaintext(const BitString& query_bits,
                                       std::uint32_t shift,
                                       const HeParams& params);

EncryptedDatabase prepare_database(
    const BitString& bits, const bfv::PublicKey& pk, const HeParams& params,
    Rng& rng, bfv::EncryptMode mode = bfv::EncryptMode::Standard);

PreparedQuerySet prepare_query(
    const BitString& query_bits, const bfv::PublicKey& pk,
    const HeParams& params, Rng& rng,
    bfv::EncryptMode mode = bfv::EncryptMode::Standard);

// One hom_add per database ciphertext; nothing else ever touches the
// homomorphic operation counters.
std::vector<bfv::Ciphertext> secure_search(const EncryptedDatabase& db,
                                           const PreparedQuery& query);

MatchPolynomialKit make_match_kit(
    const bfv::PublicKey& pk, const HeParams& params, Rng& rng,
    bfv::EncryptMode mode = bfv::EncryptMode::Standard);

// Turns per-shift search results into match indices. sk may be null only in
// CiphertextCompare mode.
std::vector<MatchIndex> generate_indices(const std::vector<ShiftResults>& results,
                                         const MatchPolynomialKit& kit,
                                         std::uint64_t db_bit_len,
                                         const QueryMeta& meta,
                                         const bfv::SecretKey* sk, IndexMode mode,
                                         const HeParams& params);

// Ground truth for the scheme's matching semantics, computed from the bits
// alone: a match is reported wherever consecutive database partitions equal
// the rotated replicated query pattern over the query's span.
std::vector<MatchIndex> plaintext_oracle(const BitString& bits,
                                         const BitString& query_bits,
                                         const HeParams& params);

}  // namespace ciphermatch::matcher
