#include "ciphermatch/packing.hpp"
#include "ciphermatch/rng.hpp"
#include "doctest.h"

using namespace ciphermatch;
using packing::BitString;

namespace {

BitString random_bits(std::size_t len, Rng& rng) {
    BitString b(len);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng.next_u64() & 1);
    return b;
}

}  // namespace

TEST_SUITE_BEGIN("packing");

TEST_CASE("pack splits into 16-bit partitions, first bit at the MSB") {
    const HeParams p;
    Rng rng(31);
    const BitString bits = random_bits(32, rng);
    const packing::PackedMessage pm = packing::pack(bits, p);
    REQUIRE(pm.chunks.size() == 2);
    for (int j = 0; j < 2; ++j) {
        std::uint64_t expect = 0;
        for (int b = 0; b < 16; ++b)
            expect |= std::uint64_t{bits[16 * j + b]} << (15 - b);
        CHECK(pm.chunks[j] == expect);
    }
    CHECK(pm.original_bit_len == 32);

    CHECK(packing::pack(BitString(16, 1), p).chunks ==
          std::vector<std::uint64_t>{0xFFFF});
    CHECK_THROWS_AS(packing::pack(BitString{}, p), std::invalid_argument);
}

TEST_CASE("final chunk is zero-padded on the low side") {
    const HeParams p;
    BitString bits(20, 1);
    const packing::PackedMessage pm = packing::pack(bits, p);
    REQUIRE(pm.chunks.size() == 2);
    CHECK(pm.chunks[0] == 0xFFFF);
    CHECK(pm.chunks[1] == 0xF000);
}

TEST_CASE("to_plaintexts boundary cases") {
    const HeParams p;
    packing::PackedMessage pm;
    pm.original_bit_len = 1024 * 16;
    pm.chunks.assign(1024, 7);
    CHECK(packing::to_plaintexts(pm, p).size() == 1);

    pm.chunks.push_back(42);
    pm.original_bit_len += 16;
    const auto polys = packing::to_plaintexts(pm, p);
    REQUIRE(polys.size() == 2);
    CHECK(polys[1].coeffs[0] == 42);
    std::size_t nonzero = 0;
    for (std::uint64_t c : polys[1].coeffs) nonzero += c != 0;
    CHECK(nonzero == 1);
}

TEST_CASE("to_plaintexts placement matches index arithmetic") {
    const HeParams p;
    Rng rng(32);
    packing::PackedMessage pm;
    pm.chunks.resize(3000);
    for (auto& c : pm.chunks) c = rng.next_u64() & p.plain_mask();
    pm.original_bit_len = pm.chunks.size() * 16;
    const auto polys = packing::to_plaintexts(pm, p);
    REQUIRE(polys.size() == 3);
    for (std::size_t idx = 0; idx < pm.chunks.size(); ++idx)
        CHECK(polys[idx / p.n].coeffs[idx % p.n] == pm.chunks[idx]);
    for (std::size_t i = pm.chunks.size(); i < 3 * p.n; ++i)
        CHECK(polys[i / p.n].coeffs[i % p.n] == 0);
}

TEST_CASE("pack/unpack round trip") {
    const HeParams p;
    Rng rng(33);
    const BitString bits = random_bits(1000, rng);
    const auto polys = packing::to_plaintexts(packing::pack(bits, p), p);
    CHECK(packing::unpack(polys, 1000, p) == bits);

    CHECK_THROWS_AS(packing::unpack(polys, 17000 * 16, p),
                    std::invalid_argument);
}

TEST_CASE("round trip holds across random lengths") {
    const HeParams p;
    Rng rng(34);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t len = 1 + rng.next_below(100000);
        const BitString bits = random_bits(len, rng);
        const auto polys = packing::to_plaintexts(packing::pack(bits, p), p);
        CHECK(packing::unpack(polys, len, p) == bits);
    }
}

TEST_CASE("negate_bits") {
    const HeParams p;
    Rng rng(35);
    CHECK(packing::negate_bits(BitString(40, 1)) == BitString(40, 0));
    const BitString bits = random_bits(333, rng);
    CHECK(packing::negate_bits(packing::negate_bits(bits)) == bits);

    // chunk-level identity: pack(~x) = 0xFFFF - pack(x), full chunks
    const BitString full = random_bits(64, rng);
    const auto a = packing::pack(full, p);
    const auto b = packing::pack(packing::negate_bits(full), p);
    for (std::size_t i = 0; i < a.chunks.size(); ++i)
        CHECK(b.chunks[i] == 0xFFFF - a.chunks[i]);
}

TEST_CASE("footprint report") {
    const HeParams p;
    Rng rng(36);
    // exactly n*t bits -> one polynomial -> exactly 4x
    const BitString bits = random_bits(p.n * p.t_bits, rng);
    const auto rep = packing::footprint_report(bits, p);
    CHECK(rep.plain_bytes == 2048);
    CHECK(rep.encrypted_bytes == 8192);
    CHECK(rep.expansion_factor == 4.0);
    CHECK(rep.polynomials == 1);
    CHECK(rep.single_bit_polynomials == 16);

    // degenerate 1-bit input
    const auto tiny = packing::footprint_report(BitString(1, 1), p);
    CHECK(tiny.expansion_factor == static_cast<double>(2 * p.n * p.q_bits));

    // multiples of n*t stay exactly 4x and keep the 16x polynomial ratio
    for (int mult : {2, 5}) {
        const BitString big = random_bits(p.n * p.t_bits * mult, rng);
        const auto r = packing::footprint_report(big, p);
        CHECK(r.expansion_factor == 4.0);
        CHECK(r.single_bit_polynomials == 16 * r.polynomials);
    }
}

TEST_CASE("text and byte converters") {
    const HeParams p;
    CHECK(packing::bits_from_ascii01("0110 1\n0") ==
          BitString{0, 1, 1, 0, 1, 0});
    CHECK_THROWS_AS(packing::bits_from_ascii01("01x"), std::invalid_argument);
    CHECK(packing::bits_to_ascii01(BitString{1, 0, 1}) == "101");

    Rng rng(37);
    std::vector<std::uint8_t> bytes(257);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.next_u64());
    CHECK(packing::bits_to_bytes(packing::bits_from_bytes(bytes)) == bytes);

    CHECK(packing::bits_from_dna("ACGT") ==
          BitString{0, 0, 0, 1, 1, 0, 1, 1});
    CHECK_THROWS_AS(packing::bits_from_dna("ACGX"), std::invalid_argument);
}

TEST_SUITE_END();
