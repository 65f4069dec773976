#include "ciphermatch/serialize.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace ciphermatch::io {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b.data(), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b.data(), 8);
}

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 4))
        throw FormatError("truncated record");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 8))
        throw FormatError("truncated record");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
    return v;
}

void write_header(std::ostream& os, const char magic[4], const HeParams& p) {
    os.write(magic, 4);
    put_u32(os, static_cast<std::uint32_t>(p.n));
    put_u32(os, p.q_bits);
    put_u32(os, p.t_bits);
}

void read_header(std::istream& is, const char magic[4], const HeParams& p) {
    std::array<char, 4> m{};
    if (!is.read(m.data(), 4)) throw FormatError("truncated header");
    if (std::memcmp(m.data(), magic, 4) != 0)
        throw FormatError(std::string("bad magic, expected ") +
                          std::string(magic, 4));
    const std::uint32_t n = get_u32(is);
    const std::uint32_t qb = get_u32(is);
    const std::uint32_t tb = get_u32(is);
    if (n != p.n || qb != p.q_bits || tb != p.t_bits)
        throw FormatError("header parameters do not match expected params");
}

void write_coeffs(std::ostream& os, const std::vector<std::uint64_t>& coeffs,
                  std::uint32_t width_bytes) {
    std::vector<char> buf(coeffs.size() * width_bytes);
    std::size_t o = 0;
    for (std::uint64_t c : coeffs)
        for (std::uint32_t b = 0; b < width_bytes; ++b)
            buf[o++] = static_cast<char>((c >> (8 * b)) & 0xff);
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<std::uint64_t> read_coeffs(std::istream& is, std::size_t count,
                                       std::uint32_t width_bytes) {
    std::vector<unsigned char> buf(count * width_bytes);
    if (!is.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size())))
        throw FormatError("truncated coefficient data");
    std::vector<std::uint64_t> coeffs(count, 0);
    std::size_t o = 0;
    for (std::size_t i = 0; i < count; ++i)
        for (std::uint32_t b = 0; b < width_bytes; ++b)
            coeffs[i] |= std::uint64_t{buf[o++]} << (8 * b);
    return coeffs;
}

std::uint32_t q_width(const HeParams& p) { return (p.q_bits + 7) / 8; }
std::uint32_t t_width(const HeParams& p) { return (p.t_bits + 7) / 8; }

}  // namespace

void write_poly(std::ostream& os, const ring::PolyQ& p, const HeParams& params) {
    write_header(os, "CMPL", params);
    write_coeffs(os, p.coeffs, q_width(params));
}

ring::PolyQ read_poly(std::istream& is, const HeParams& params) {
    read_header(is, "CMPL", params);
    ring::PolyQ p{params.q_bits, read_coeffs(is, params.n, q_width(params))};
    for (std::uint64_t c : p.coeffs)
        if (c > params.coeff_mask()) throw FormatError("coefficient out of range");
    return p;
}

void write_secret_key(std::ostream& os, const bfv::SecretKey& sk,
                      const HeParams& params) {
    write_header(os, "CMSK", params);
    write_poly(os, sk.s, params);
}

bfv::SecretKey read_secret_key(std::istream& is, const HeParams& params) {
    read_header(is, "CMSK", params);
    return bfv::SecretKey{read_poly(is, params)};
}

void write_public_key(std::ostream& os, const bfv::PublicKey& pk,
                      const HeParams& params) {
    write_header(os, "CMPK", params);
    write_poly(os, pk.pk0, params);
    write_poly(os, pk.pk1, params);
}

bfv::PublicKey read_public_key(std::istream& is, const HeParams& params) {
    read_header(is, "CMPK", params);
    bfv::PublicKey pk;
    pk.pk0 = read_poly(is, params);
    pk.pk1 = read_poly(is, params);
    return pk;
}

void write_ciphertext(std::ostream& os, const bfv::Ciphertext& ct,
                      const HeParams& params) {
    write_header(os, "CMCT", params);
    put_u32(os, ct.level);
    write_poly(os, ct.c0, params);
    write_poly(os, ct.c1, params);
}

bfv::Ciphertext read_ciphertext(std::istream& is, const HeParams& params) {
    read_header(is, "CMCT", params);
    bfv::Ciphertext ct;
    ct.level = get_u32(is);
    ct.c0 = read_poly(is, params);
    ct.c1 = read_poly(is, params);
    return ct;
}

void write_packed_plaintexts(std::ostream& os,
                             const std::vector<ring::PolyT>& polys,
                             std::uint64_t original_bit_len,
                             const HeParams& params) {
    write_header(os, "CMPM", params);
    put_u64(os, original_bit_len);
    put_u32(os, static_cast<std::uint32_t>(polys.size()));
    for (const auto& p : polys) write_coeffs(os, p.coeffs, t_width(params));
}

std::vector<ring::PolyT> read_packed_plaintexts(std::istream& is,
                                                std::uint64_t& original_bit_len,
                                                const HeParams& params) {
    read_header(is, "CMPM", params);
    original_bit_len = get_u64(is);
    const std::uint32_t count = get_u32(is);
    std::vector<ring::PolyT> polys;
    polys.reserve(count);
    for (std::uint32_t j = 0; j < count; ++j)
        polys.push_back(
            ring::PolyT{params.t_bits, read_coeffs(is, params.n, t_width(params))});
    return polys;
}

std::uint64_t ciphertext_coeff_bytes(const HeParams& params) {
    return 2ull * params.n * q_width(params);
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f),
                                     std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path,
                      const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return std::string(std::istreambuf_iterator<char>(f),
                       std::istreambuf_iterator<char>());
}

void write_file_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace ciphermatch::io
