#include "ciphermatch/packing.hpp"

#include <algorithm>
#include <stdexcept>

namespace ciphermatch::packing {

std::uint64_t chunk_count(std::uint64_t bit_len, const HeParams& params) {
    return (bit_len + params.t_bits - 1) / params.t_bits;
}

std::uint64_t polynomial_count(std::uint64_t bit_len, const HeParams& params) {
    return (chunk_count(bit_len, params) + params.n - 1) / params.n;
}

PackedMessage pack(const BitString& bits, const HeParams& params) {
    if (bits.empty())
        throw std::invalid_argument("pack: empty bit string");
    const std::uint32_t t = params.t_bits;
    PackedMessage pm;
    pm.original_bit_len = bits.size();
    pm.chunks.assign(chunk_count(bits.size(), params), 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] > 1)
            throw std::invalid_argument("pack: bit values must be 0 or 1");
        if (bits[i])
            pm.chunks[i / t] |= std::uint64_t{1} << (t - 1 - i % t);
    }
    return pm;
}

std::vector<ring::PolyT> to_plaintexts(const PackedMessage& pm,
                                       const HeParams& params) {
    const std::size_t n = params.n;
    const std::size_t count = (pm.chunks.size() + n - 1) / n;
    std::vector<ring::PolyT> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        ring::PolyT p = ring::zero_poly_t(params);
        const std::size_t base = j * n;
        const std::size_t upto = std::min(n, pm.chunks.size() - base);
        for (std::size_t i = 0; i < upto; ++i)
            p.coeffs[i] = pm.chunks[base + i];
        out.push_back(std::move(p));
    }
    return out;
}

BitString unpack(const std::vector<ring::PolyT>& plaintexts,
                 std::uint64_t original_bit_len, const HeParams& params) {
    if (original_bit_len == 0)
        throw std::invalid_argument("unpack: zero bit length");
    if (polynomial_count(original_bit_len, params) != plaintexts.size())
        throw std::invalid_argument(
            "unpack: bit length inconsistent with polynomial count");
    const std::uint32_t t = params.t_bits;
    BitString bits(original_bit_len, 0);
    for (std::uint64_t i = 0; i < original_bit_len; ++i) {
        const std::uint64_t chunk = i / t;
        const std::uint64_t coeff = plaintexts[chunk / params.n].coeffs[chunk % params.n];
        bits[i] = static_cast<std::uint8_t>((coeff >> (t - 1 - i % t)) & 1);
    }
    return bits;
}

BitString negate_bits(const BitString& bits) {
    BitString r(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) r[i] = bits[i] ^ 1;
    return r;
}

FootprintReport footprint_report(const BitString& bits, const HeParams& params) {
    FootprintReport rep;
    const std::uint64_t k = bits.size();
    rep.plain_bytes = (k + 7) / 8;
    rep.polynomials = polynomial_count(k, params);
    rep.single_bit_polynomials = (k + params.n - 1) / params.n;
    rep.encrypted_bytes =
        rep.polynomials * 2 * params.n * ((params.q_bits + 7) / 8);
    rep.expansion_factor =
        k == 0 ? 0.0 : static_cast<double>(rep.encrypted_bytes) * 8.0 /
                           static_cast<double>(k);
    return rep;
}

BitString bits_from_ascii01(std::string_view text) {
    BitString bits;
    bits.reserve(text.size());
    for (char ch : text) {
        if (ch == '0' || ch == '1') {
            bits.push_back(static_cast<std::uint8_t>(ch - '0'));
        } else if (ch == '\n' || ch == '\r' || ch == ' ' || ch == '\t') {
            continue;
        } else {
            throw std::invalid_argument("bits_from_ascii01: invalid character");
        }
    }
    return bits;
}

BitString bits_from_bytes(const std::vector<std::uint8_t>& bytes) {
    BitString bits(bytes.size() * 8);
    for (std::size_t i = 0; i < bytes.size(); ++i)
        for (int b = 0; b < 8; ++b)
            bits[i * 8 + b] = (bytes[i] >> (7 - b)) & 1;
    return bits;
}

std::vector<std::uint8_t> bits_to_bytes(const BitString& bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= std::uint8_t(1) << (7 - i % 8);
    return bytes;
}

std::string bits_to_ascii01(const BitString& bits) {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

BitString bits_from_dna(std::string_view acgt) {
    BitString bits;
    bits.reserve(acgt.size() * 2);
    for (char ch : acgt) {
        switch (ch) {
            case 'A': case 'a': bits.push_back(0); bits.push_back(0); break;
            case 'C': case 'c': bits.push_back(0); bits.push_back(1); break;
            case 'G': case 'g': bits.push_back(1); bits.push_back(0); break;
            case 'T': case 't': bits.push_back(1); bits.push_back(1); break;
            case '\n': case '\r': case ' ': case '\t': break;
            default:
                throw std::invalid_argument("bits_from_dna: invalid base");
        }
    }
    return bits;
}

}  // namespace ciphermatch::packing
