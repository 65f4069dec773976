#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ciphermatch/bfv.hpp"
#include "ciphermatch/params.hpp"
#include "ciphermatch/ring.hpp"

namespace ciphermatch::io {

// Thrown on magic/field mismatches and truncated inputs.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binary records. Every record starts with a 16-byte header: a 4-byte magic
// followed by n, q_bits, t_bits as 32-bit little-endian fields.
//
//   "CMPL"  polynomial: header + n coefficients, fixed width
//           ceil(q_bits/8) bytes each, little-endian
//   "CMSK"  secret key: header + s as a CMPL record
//   "CMPK"  public key: header + pk0 + pk1 as CMPL records
//   "CMCT"  ciphertext: header + level (u32 LE) + c0 + c1 as CMPL records
//   "CMPM"  packed plaintexts: header + original_bit_len (u64 LE) +
//           poly_count (u32 LE) + poly_count * n coefficients, fixed width
//           ceil(t_bits/8) bytes each, little-endian

void write_poly(std::ostream& os, const ring::PolyQ& p, const HeParams& params);
ring::PolyQ read_poly(std::istream& is, const HeParams& params);

void write_secret_key(std::ostream& os, const bfv::SecretKey& sk,
                      const HeParams& params);
bfv::SecretKey read_secret_key(std::istream& is, const HeParams& params);

void write_public_key(std::ostream& os, const bfv::PublicKey& pk,
                      const HeParams& params);
bfv::PublicKey read_public_key(std::istream& is, const HeParams& params);

void write_ciphertext(std::ostream& os, const bfv::Ciphertext& ct,
                      const HeParams& params);
bfv::Ciphertext read_ciphertext(std::istream& is, const HeParams& params);

void write_packed_plaintexts(std::ostream& os,
                             const std::vector<ring::PolyT>& polys,
                             std::uint64_t original_bit_len,
                             const HeParams& params);
std::vector<ring::PolyT> read_packed_plaintexts(std::istream& is,
                                                std::uint64_t& original_bit_len,
                                                const HeParams& params);

// Serialized payload size of one ciphertext's coefficient data, headers and
// level metadata excluded (what the memory-footprint accounting measures).
std::uint64_t ciphertext_coeff_bytes(const HeParams& params);

// File helpers; throw std::runtime_error on I/O failure.
std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path,
                      const std::vector<std::uint8_t>& bytes);
std::string read_file_text(const std::string& path);
void write_file_text(const std::string& path, const std::string& text);

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t len);

}  // namespace ciphermatch::io
