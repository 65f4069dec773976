#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ciphermatch/params.hpp"
#include "ciphermatch/ring.hpp"

namespace ciphermatch::packing {

// One symbol per element, each 0 or 1; index 0 is the first bit of the string.
using BitString = std::vector<std::uint8_t>;

// t_bits-wide partitions of a bit string. The first bit of the string is the
// most significant bit of chunk 0; the final chunk is zero-padded on the low
// side. original_bit_len records the exact pre-padding length.
struct PackedMessage {
    std::vector<std::uint64_t> chunks;
    std::uint64_t original_bit_len = 0;
};

struct FootprintReport {
    std::uint64_t plain_bytes = 0;
    std::uint64_t encrypted_bytes = 0;
    double expansion_factor = 0.0;  // encrypted bits / plain bits
    std::uint64_t polynomials = 0;
    // Polynomial count a one-bit-per-coefficient packing of the same input
    // would need, for comparison against earlier schemes.
    std::uint64_t single_bit_polynomials = 0;
};

PackedMessage pack(const BitString& bits, const HeParams& params);

// Plaintext j holds coefficient i = chunk (j*n + i); missing tail
// coefficients are zero.
std::vector<ring::PolyT> to_plaintexts(const PackedMessage& pm,
                                       const HeParams& params);

// Exact inverse of pack + to_plaintexts, truncated to original_bit_len.
BitString unpack(const std::vector<ring::PolyT>& plaintexts,
                 std::uint64_t original_bit_len, const HeParams& params);

BitString negate_bits(const BitString& bits);

FootprintReport footprint_report(const BitString& bits, const HeParams& params);

std::uint64_t chunk_count(std::uint64_t bit_len, const HeParams& params);
std::uint64_t polynomial_count(std::uint64_t bit_len, const HeParams& params);

// Input/output helpers for the CLI surface.
BitString bits_from_ascii01(std::string_view text);      // '0'/'1' characters
BitString bits_from_bytes(const std::vector<std::uint8_t>& bytes);  // MSB first
std::vector<std::uint8_t> bits_to_bytes(const BitString& bits);     // zero-padded
std::string bits_to_ascii01(const BitString& bits);
BitString bits_from_dna(std::string_view acgt);  // A=00 C=01 G=10 T=11

}  // namespace ciphermatch::packing
