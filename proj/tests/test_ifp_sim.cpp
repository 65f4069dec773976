#include "ciphermatch/ifp_sim.hpp"
#include "ciphermatch/rng.hpp"
#include "doctest.h"

using namespace ciphermatch;
using ifp::BitVec;
using ifp::MicroOp;
using ifp::OpKind;

namespace {

BitVec random_vec(std::size_t n, Rng& rng) {
    BitVec v(n);
    for (std::size_t i = 0; i < n; ++i) v.set(i, rng.next_u64() & 1);
    return v;
}

std::vector<std::uint64_t> random_words(std::size_t count, std::uint32_t bits,
                                        Rng& rng) {
    std::vector<std::uint64_t> w(count);
    const std::uint64_t mask =
        bits >= 64 ? ~0ull : (std::uint64_t{1} << bits) - 1;
    for (auto& x : w) x = rng.next_u64() & mask;
    return w;
}

}  // namespace

TEST_SUITE_BEGIN("ifp_sim");

TEST_CASE("latch op identities") {
    ifp::PlaneState st(ifp::PlaneConfig{64, 8});
    ifp::PlaneIo io;
    Rng rng(71);

    st.s_latch = random_vec(64, rng);
    const BitVec s_before = st.s_latch;
    for (std::size_t i = 0; i < 64; ++i) st.d_latch[0].set(i, true);
    ifp::apply(st, {OpKind::AndSD, 0}, io);
    CHECK(st.s_latch == s_before);  // AND with all ones

    st.s_latch = BitVec(64);  // zeros
    st.d_latch[1] = random_vec(64, rng);
    const BitVec d_before = st.d_latch[1];
    ifp::apply(st, {OpKind::OrSD, 1}, io);
    CHECK(st.d_latch[1] == d_before);  // OR with all zeros
}

TEST_CASE("latch ops match the per-bitline truth table") {
    const std::size_t n = 128;
    Rng rng(72);
    for (int trial = 0; trial < 10; ++trial) {
        ifp::PlaneState st(ifp::PlaneConfig{n, 4});
        ifp::PlaneIo io;
        st.s_latch = random_vec(n, rng);
        for (auto& d : st.d_latch) d = random_vec(n, rng);
        const BitVec s = st.s_latch;
        const auto d = st.d_latch;

        SUBCASE("and") {
            ifp::apply(st, {OpKind::AndSD, 2}, io);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(st.s_latch.get(i) == (s.get(i) && d[2].get(i)));
            CHECK(st.d_latch[2] == d[2]);
        }
        SUBCASE("or") {
            ifp::apply(st, {OpKind::OrSD, 1}, io);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(st.d_latch[1].get(i) == (s.get(i) || d[1].get(i)));
            CHECK(st.s_latch == s);
        }
        SUBCASE("xor") {
            ifp::apply(st, {OpKind::XorD1D2, 0}, io);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(st.d_latch[1].get(i) == (d[1].get(i) != d[2].get(i)));
            CHECK(st.d_latch[2] == d[2]);
        }
    }
}

TEST_CASE("each op mutates exactly one latch vector") {
    const std::size_t n = 32;
    Rng rng(73);
    ifp::PlaneState st(ifp::PlaneConfig{n, 4});
    st.cells[2] = random_vec(n, rng);
    st.s_latch = random_vec(n, rng);
    for (auto& d : st.d_latch) d = random_vec(n, rng);

    const std::vector<MicroOp> ops = {
        {OpKind::ReadWL, 2},  {OpKind::LoadInput, 0}, {OpKind::CopyS2D, 1},
        {OpKind::CopyD2S, 2}, {OpKind::AndSD, 0},     {OpKind::OrSD, 2},
        {OpKind::XorD1D2, 0}, {OpKind::OutputD, 1},
    };
    for (const auto& op : ops) {
        ifp::PlaneIo io;
        io.inputs.push_back(random_vec(n, rng));
        const BitVec s = st.s_latch;
        const auto d = st.d_latch;
        const auto cells = st.cells;
        ifp::apply(st, op, io);
        int changed = 0;
        changed += !(st.s_latch == s);
        for (int i = 0; i < 3; ++i) changed += !(st.d_latch[i] == d[i]);
        CHECK(changed <= 1);
        CHECK(st.cells == cells);  // latch ops never touch the array
        if (op.kind == OpKind::OutputD) CHECK(io.outputs.size() == 1);
    }
    CHECK(st.op_trace.size() == ops.size());
}

TEST_CASE("bounds are enforced") {
    ifp::PlaneState st(ifp::PlaneConfig{16, 4});
    ifp::PlaneIo io;
    CHECK_THROWS_AS(ifp::apply(st, {OpKind::ReadWL, 9}, io), std::out_of_range);
    CHECK_THROWS_AS(ifp::apply(st, {OpKind::CopyS2D, 3}, io), std::out_of_range);
    CHECK_THROWS_AS(ifp::apply(st, {OpKind::LoadInput, 0}, io),
                    std::out_of_range);
}

TEST_CASE("bit_add_step: exhaustive full-adder truth table") {
    // 8 bitlines, one per (A, B, C) combination.
    ifp::PlaneState st(ifp::PlaneConfig{8, 2});
    BitVec b_page(8);
    for (std::size_t lane = 0; lane < 8; ++lane) {
        st.cells[0].set(lane, (lane >> 0) & 1);      // A
        b_page.set(lane, (lane >> 1) & 1);           // B
        st.d_latch[2].set(lane, (lane >> 2) & 1);    // carry-in
    }
    const BitVec sum = ifp::bit_add_step(st, b_page, 0);
    for (std::size_t lane = 0; lane < 8; ++lane) {
        const int a = (lane >> 0) & 1, b = (lane >> 1) & 1, c = (lane >> 2) & 1;
        CHECK(static_cast<int>(sum.get(lane)) == (a ^ b ^ c));
        CHECK(static_cast<int>(st.d_latch[2].get(lane)) ==
              (((a ^ c) & b) | (a & c)));
    }

    // Trace shape of one step: 1 read, 1 load, 2 XOR, 5 transfers; the
    // simulator performs 3 AND/OR ops (2 AND + 1 OR).
    const ifp::TraceCounts tc = ifp::count_trace(st.op_trace);
    CHECK(st.op_trace.size() == 13);
    CHECK(tc.reads == 1);
    CHECK(tc.loads == 1);
    CHECK(tc.xors == 2);
    CHECK(tc.transfers == 5);
    CHECK(tc.ands == 2);
    CHECK(tc.ors == 1);
    CHECK(tc.outputs == 1);
}

TEST_CASE("bit_serial_add: exhaustive at 8-bit width") {
    // All 65536 (A, B) pairs, batched across 32768 bitlines.
    const std::size_t lanes = 32768;
    for (int batch = 0; batch < 2; ++batch) {
        std::vector<std::uint64_t> a(lanes), b(lanes);
        for (std::size_t i = 0; i < lanes; ++i) {
            const std::size_t pair = batch * lanes + i;
            a[i] = pair & 0xFF;
            b[i] = (pair >> 8) & 0xFF;
        }
        ifp::PlaneState st(ifp::PlaneConfig{lanes, 8});
        const ifp::VerticalLayout layout{0, 8};
        ifp::store_words_vertical(st, layout, a);
        const auto sums = ifp::bit_serial_add(st, layout, b);
        for (std::size_t i = 0; i < lanes; ++i)
            REQUIRE(sums[i] == ((a[i] + b[i]) & 0xFF));
    }
}

TEST_CASE("bit_serial_add: identity and 32-bit random vectors") {
    Rng rng(74);
    const std::size_t lanes = 2048;
    ifp::PlaneState st(ifp::PlaneConfig{lanes, 32});
    const ifp::VerticalLayout layout{0, 32};

    const auto a = random_words(lanes, 32, rng);
    ifp::store_words_vertical(st, layout, a);
    CHECK(ifp::bit_serial_add(st, layout,
                              std::vector<std::uint64_t>(lanes, 0)) == a);

    for (int trial = 0; trial < 5; ++trial) {
        const auto x = random_words(lanes, 32, rng);
        const auto y = random_words(lanes, 32, rng);
        ifp::PlaneState plane(ifp::PlaneConfig{lanes, 32});
        ifp::store_words_vertical(plane, layout, x);
        const auto sums = ifp::bit_serial_add(plane, layout, y);
        for (std::size_t i = 0; i < lanes; ++i)
            REQUIRE(sums[i] == ((x[i] + y[i]) & 0xFFFFFFFFull));
    }
}

TEST_CASE("vertical store/load round trip") {
    Rng rng(75);
    ifp::PlaneState st(ifp::PlaneConfig{512, 40});
    const ifp::VerticalLayout layout{4, 32};
    const auto words = random_words(512, 32, rng);
    ifp::store_words_vertical(st, layout, words);
    CHECK(ifp::load_words_vertical(st, layout) == words);
}

TEST_CASE("hom_add_in_flash equals bfv::hom_add") {
    const HeParams p;
    Rng rng(76);
    const bfv::KeyPair kp = bfv::keygen(p, rng);
    ring::PolyT m = ring::zero_poly_t(p);
    for (auto& c : m.coeffs) c = rng.next_u64() & p.plain_mask();
    const bfv::Ciphertext ca = bfv::encrypt(m, kp.pk, p, rng);

    // zero query ciphertext leaves the database ciphertext unchanged
    const bfv::Ciphertext zero{ring::zero_poly_q(p), ring::zero_poly_q(p), 0};
    const bfv::Ciphertext same = ifp::hom_add_in_flash(ca, zero, p);
    CHECK(same.c0 == ca.c0);
    CHECK(same.c1 == ca.c1);

    for (int trial = 0; trial < 5; ++trial) {
        for (auto& c : m.coeffs) c = rng.next_u64() & p.plain_mask();
        const bfv::Ciphertext x = bfv::encrypt(m, kp.pk, p, rng);
        for (auto& c : m.coeffs) c = rng.next_u64() & p.plain_mask();
        const bfv::Ciphertext y = bfv::encrypt(m, kp.pk, p, rng);
        const bfv::Ciphertext flash = ifp::hom_add_in_flash(x, y, p);
        const bfv::Ciphertext soft = bfv::hom_add(x, y);
        CHECK(flash.c0 == soft.c0);
        CHECK(flash.c1 == soft.c1);
        CHECK(flash.level == soft.level);
    }

    // small planes force multi-batch processing
    const bfv::Ciphertext cb = bfv::encrypt(m, kp.pk, p, rng);
    const bfv::Ciphertext multi =
        ifp::hom_add_in_flash(ca, cb, p, ifp::PlaneConfig{256, 32});
    const bfv::Ciphertext ref = bfv::hom_add(ca, cb);
    CHECK(multi.c0 == ref.c0);
    CHECK(multi.c1 == ref.c1);
}

TEST_CASE("page transposition") {
    Rng rng(77);
    // involution on random pages
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::uint8_t> page(ifp::kPageBytes);
        for (auto& b : page) b = static_cast<std::uint8_t>(rng.next_u64());
        CHECK(ifp::transpose_to_horizontal(ifp::transpose_to_vertical(page)) ==
              page);
        CHECK(ifp::transpose_to_vertical(ifp::transpose_to_horizontal(page)) ==
              page);
    }

    // all-zero fixed point
    const std::vector<std::uint8_t> zeros(ifp::kPageBytes, 0);
    CHECK(ifp::transpose_to_vertical(zeros) == zeros);

    // single set bit lands at its transposed coordinate
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t word = rng.next_below(ifp::kTransposeCols);
        const std::size_t bit = rng.next_below(ifp::kTransposeRows);
        std::vector<std::uint8_t> page(ifp::kPageBytes, 0);
        const std::size_t h = word * ifp::kTransposeRows + bit;
        page[h / 8] |= std::uint8_t(1) << (h % 8);
        const auto vert = ifp::transpose_to_vertical(page);
        const std::size_t v = bit * ifp::kTransposeCols + word;
        for (std::size_t i = 0; i < 8 * ifp::kPageBytes; ++i)
            CHECK(static_cast<bool>((vert[i / 8] >> (i % 8)) & 1) == (i == v));
    }

    CHECK_THROWS_AS(ifp::transpose_to_vertical(std::vector<std::uint8_t>(100)),
                    std::invalid_argument);
}

TEST_CASE("microprogram text format") {
    const std::string text =
        "# one bit of the adder\n"
        "LOAD page=0\n"
        "COPY_S2D d=1\n"
        "AND_SD d=2\n"
        "XOR_D1D2\n"
        "READ wl=3\n"
        "AND_SD\n"          // defaults to d=0
        "OUTPUT d=1\n";
    const auto ops = ifp::parse_microprogram(text);
    REQUIRE(ops.size() == 7);
    CHECK(ops[0] == MicroOp{OpKind::LoadInput, 0});
    CHECK(ops[2] == MicroOp{OpKind::AndSD, 2});
    CHECK(ops[4] == MicroOp{OpKind::ReadWL, 3});
    CHECK(ops[5] == MicroOp{OpKind::AndSD, 0});

    // format -> parse round trip
    std::string rendered;
    for (const auto& op : ops) rendered += ifp::format_microop(op) + "\n";
    CHECK(ifp::parse_microprogram(rendered) == ops);

    CHECK(ifp::trace_json_line(ops[4]) == R"({"op":"READ","wl":3})");
    CHECK(ifp::trace_json_line(ops[3]) == R"({"op":"XOR_D1D2"})");
}

TEST_CASE("microprogram parse errors carry line numbers") {
    try {
        ifp::parse_microprogram("READ wl=0\nFROB\n");
        FAIL("expected ParseError");
    } catch (const ifp::ParseError& e) {
        CHECK(e.line == 2);
    }
    try {
        ifp::parse_microprogram("READ\n");
        FAIL("expected ParseError");
    } catch (const ifp::ParseError& e) {
        CHECK(e.line == 1);
    }
    CHECK_THROWS_AS(ifp::parse_microprogram("COPY_S2D d=5\n"), ifp::ParseError);
    CHECK_THROWS_AS(ifp::parse_microprogram("XOR_D1D2 d=1\n"), ifp::ParseError);
}

TEST_CASE("bit_add_step_ops matches the executed trace") {
    ifp::PlaneState st(ifp::PlaneConfig{8, 2});
    const BitVec b(8);
    (void)ifp::bit_add_step(st, b, 1);
    CHECK(st.op_trace == ifp::bit_add_step_ops(0, 1));
}

TEST_SUITE_END();
