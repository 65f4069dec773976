#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciphermatch/bfv.hpp"
#include "ciphermatch/params.hpp"

namespace ciphermatch::ifp {

// Packed bit vector, one bit per bitline.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return nbits_; }
    bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }
    void set(std::size_t i, bool v) {
        const std::uint64_t m = std::uint64_t{1} << (i % 64);
        if (v) words_[i / 64] |= m; else words_[i / 64] &= ~m;
    }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    void and_with(const BitVec& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    }
    void or_with(const BitVec& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    }
    void xor_with(const BitVec& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    }

    bool operator==(const BitVec& o) const {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

// Latch-level micro-operations. AND stores into the S-latch only, OR into
// the D-latch only, XOR runs between D-latches 1 and 2 into D-latch 1.
enum class OpKind : std::uint8_t {
    ReadWL,     // S := cells[wl]
    LoadInput,  // S := io.inputs[page]
    CopyS2D,    // D[i] := S
    CopyD2S,    // S := D[i]
    AndSD,      // S := S & D[i]
    OrSD,       // D[i] := S | D[i]
    XorD1D2,    // D[1] := D[1] ^ D[2]
    OutputD,    // io.outputs.push_back(D[i])
};

struct MicroOp {
    OpKind kind = OpKind::XorD1D2;
    std::uint32_t arg = 0;  // wordline, input page index, or latch index

    bool operator==(const MicroOp&) const = default;
};

struct PlaneConfig {
    std::size_t bitlines = 32768;  // 4 KiB page
    std::size_t wordlines = 64;
};

// One flash plane in SLC mode: the cell array plus the sensing latch and
// three data latches, all bitline-wide. Single-owner mutable; simulate
// multiple planes concurrently by giving each thread its own state.
struct PlaneState {
    PlaneConfig cfg;
    std::vector<BitVec> cells;
    BitVec s_latch;
    std::array<BitVec, 3> d_latch;
    std::vector<MicroOp> op_trace;

    explicit PlaneState(const PlaneConfig& config);
};

struct PlaneIo {
    std::vector<BitVec> inputs;
    std::vector<BitVec> outputs;
};

// Executes one micro-op: exactly one latch vector mutates (or one output
// page is emitted) and the op is appended to the trace.
void apply(PlaneState& state, const MicroOp& op, PlaneIo& io);

void run_program(PlaneState& state, const std::vector<MicroOp>& ops, PlaneIo& io);

// Coefficients along bitlines, bit i of each word on wordline
// base_wordline + i.
struct VerticalLayout {
    std::size_t base_wordline = 0;
    std::uint32_t word_bits = 32;
};

void store_words_vertical(PlaneState& state, const VerticalLayout& layout,
                          const std::vector<std::uint64_t>& words);
std::vector<std::uint64_t> load_words_vertical(const PlaneState& state,
                                               const VerticalLayout& layout);

// The 13-op sequence producing one sum bit: B_i arrives from the controller,
// A_i is read from the scheduled wordline, the carry lives in D-latch 2
// across calls. Returns the emitted sum page.
BitVec bit_add_step(PlaneState& state, const BitVec& b_page,
                    std::size_t a_wordline);

// The micro-op sequence of one bit_add_step, with the B page at input index
// `page` and A at wordline `wl`.
std::vector<MicroOp> bit_add_step_ops(std::uint32_t page, std::uint32_t wl);

// Per bitline: sum = (A + B) mod 2^word_bits, operand A already stored
// vertically. D-latch 2 is reset (carry = 0) before the first bit; the final
// carry-out is discarded, which is exactly ring addition mod 2^word_bits.
std::vector<std::uint64_t> bit_serial_add(PlaneState& state,
                                          const VerticalLayout& layout,
                                          const std::vector<std::uint64_t>& b_words);

// Homomorphic addition routed through the plane simulator: coefficient for
// coefficient identical to bfv::hom_add on the same ciphertexts.
bfv::Ciphertext hom_add_in_flash(const bfv::Ciphertext& a,
                                 const bfv::Ciphertext& b,
                                 const HeParams& params,
                                 const PlaneConfig& cfg = PlaneConfig{});

// 4 KiB page transposition between the horizontal layout (1024 consecutive
// 32-bit little-endian words) and the vertical layout (32 bit-planes of 1024
// bitline bits each). The two functions are mutual inverses.
inline constexpr std::size_t kPageBytes = 4096;
inline constexpr std::size_t kTransposeRows = 32;
inline constexpr std::size_t kTransposeCols = 8 * kPageBytes / kTransposeRows;

std::vector<std::uint8_t> transpose_to_vertical(const std::vector<std::uint8_t>& page);
std::vector<std::uint8_t> transpose_to_horizontal(const std::vector<std::uint8_t>& page);

// Text micro-program format: one op per line, `#` starts a comment.
//   READ wl=<k> | LOAD page=<k> | COPY_S2D d=<i> | COPY_D2S d=<i> |
//   AND_SD [d=<i>] | OR_SD [d=<i>] | XOR_D1D2 | OUTPUT d=<i>
// The latch operand defaults to d=0 when omitted.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg),
          line(line_no) {}
};

std::vector<MicroOp> parse_microprogram(const std::string& text);
std::string format_microop(const MicroOp& op);
std::string trace_json_line(const MicroOp& op);

struct TraceCounts {
    std::size_t reads = 0;
    std::size_t loads = 0;
    std::size_t transfers = 0;  // CopyS2D + CopyD2S
    std::size_t ands = 0;
    std::size_t ors = 0;
    std::size_t xors = 0;
    std::size_t outputs = 0;
};

TraceCounts count_trace(const std::vector<MicroOp>& trace);

}  // namespace ciphermatch::ifp
