#include "ciphermatch/ifp_sim.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace ciphermatch::ifp {

PlaneState::PlaneState(const PlaneConfig& config)
    : cfg(config),
      cells(config.wordlines, BitVec(config.bitlines)),
      s_latch(config.bitlines),
      d_latch{BitVec(config.bitlines), BitVec(config.bitlines),
              BitVec(config.bitlines)} {
    if (config.bitlines == 0 || config.wordlines == 0)
        throw std::invalid_argument("PlaneState: empty plane");
}

void apply(PlaneState& state, const MicroOp& op, PlaneIo& io) {
    switch (op.kind) {
        case OpKind::ReadWL:
            if (op.arg >= state.cfg.wordlines)
                throw std::out_of_range("apply: wordline out of range");
            state.s_latch = state.cells[op.arg];
            break;
        case OpKind::LoadInput:
            if (op.arg >= io.inputs.size())
                throw std::out_of_range("apply: input page out of range");
            if (io.inputs[op.arg].size() != state.cfg.bitlines)
                throw std::invalid_argument("apply: input page width mismatch");
            state.s_latch = io.inputs[op.arg];
            break;
        case OpKind::CopyS2D:
            if (op.arg > 2) throw std::out_of_range("apply: latch index");
            state.d_latch[op.arg] = state.s_latch;
            break;
        case OpKind::CopyD2S:
            if (op.arg > 2) throw std::out_of_range("apply: latch index");
            state.s_latch = state.d_latch[op.arg];
            break;
        case OpKind::AndSD:
            if (op.arg > 2) throw std::out_of_range("apply: latch index");
            state.s_latch.and_with(state.d_latch[op.arg]);
            break;
        case OpKind::OrSD:
            if (op.arg > 2) throw std::out_of_range("apply: latch index");
            state.d_latch[op.arg].or_with(state.s_latch);
            break;
        case OpKind::XorD1D2:
            state.d_latch[1].xor_with(state.d_latch[2]);
            break;
        case OpKind::OutputD:
            if (op.arg > 2) throw std::out_of_range("apply: latch index");
            io.outputs.push_back(state.d_latch[op.arg]);
            break;
    }
    state.op_trace.push_back(op);
}

void run_program(PlaneState& state, const std::vector<MicroOp>& ops, PlaneIo& io) {
    for (const auto& op : ops) apply(state, op, io);
}

void store_words_vertical(PlaneState& state, const VerticalLayout& layout,
                          const std::vector<std::uint64_t>& words) {
    if (words.size() > state.cfg.bitlines)
        throw std::invalid_argument("store_words_vertical: too many words");
    if (layout.base_wordline + layout.word_bits > state.cfg.wordlines)
        throw std::invalid_argument("store_words_vertical: wordlines exceeded");
    for (std::uint32_t i = 0; i < layout.word_bits; ++i) {
        BitVec& row = state.cells[layout.base_wordline + i];
        for (std::size_t j = 0; j < words.size(); ++j)
            row.set(j, (words[j] >> i) & 1);
    }
}

std::vector<std::uint64_t> load_words_vertical(const PlaneState& state,
                                               const VerticalLayout& layout) {
    std::vector<std::uint64_t> words(state.cfg.bitlines, 0);
    for (std::uint32_t i = 0; i < layout.word_bits; ++i) {
        const BitVec& row = state.cells[layout.base_wordline + i];
        for (std::size_t j = 0; j < words.size(); ++j)
            if (row.get(j)) words[j] |= std::uint64_t{1} << i;
    }
    return words;
}

std::vector<MicroOp> bit_add_step_ops(std::uint32_t page, std::uint32_t wl) {
    return {
        {OpKind::LoadInput, page},  // 1: B into S
        {OpKind::CopyS2D, 1},       // 2: D1 := B
        {OpKind::AndSD, 2},         // 3: S := B & C
        {OpKind::XorD1D2, 0},       // 4: D1 := B ^ C
        {OpKind::CopyS2D, 0},       // 5: D0 := B & C
        {OpKind::ReadWL, wl},       // 6: S := A
        {OpKind::CopyS2D, 2},       // 7: D2 := A
        {OpKind::AndSD, 1},         // 8: S := A & (B ^ C)
        {OpKind::XorD1D2, 0},       // 9: D1 := A ^ B ^ C (sum)
        {OpKind::CopyS2D, 2},       // 10: D2 := A & (B ^ C)
        {OpKind::CopyD2S, 0},       // 11: S := B & C
        {OpKind::OrSD, 2},          // 12: D2 := carry-out
        {OpKind::OutputD, 1},       // 13: emit sum
    };
}

BitVec bit_add_step(PlaneState& state, const BitVec& b_page,
                    std::size_t a_wordline) {
    PlaneIo io;
    io.inputs.push_back(b_page);
    run_program(state,
                bit_add_step_ops(0, static_cast<std::uint32_t>(a_wordline)), io);
    return io.outputs.at(0);
}

std::vector<std::uint64_t> bit_serial_add(PlaneState& state,
                                          const VerticalLayout& layout,
                                          const std::vector<std::uint64_t>& b_words) {
    if (b_words.size() > state.cfg.bitlines)
        throw std::invalid_argument("bit_serial_add: too many operand words");
    if (layout.base_wordline + layout.word_bits > state.cfg.wordlines)
        throw std::invalid_argument("bit_serial_add: layout exceeds wordlines");

    state.d_latch[2].clear();  // carry-in reset (RST_D on D-latch 2)

    std::vector<std::uint64_t> sums(b_words.size(), 0);
    BitVec b_plane(state.cfg.bitlines);
    for (std::uint32_t i = 0; i < layout.word_bits; ++i) {
        for (std::size_t j = 0; j < b_words.size(); ++j)
            b_plane.set(j, (b_words[j] >> i) & 1);
        const BitVec sum = bit_add_step(state, b_plane, layout.base_wordline + i);
        for (std::size_t j = 0; j < b_words.size(); ++j)
            if (sum.get(j)) sums[j] |= std::uint64_t{1} << i;
    }
    return sums;
}

bfv::Ciphertext hom_add_in_flash(const bfv::Ciphertext& a,
                                 const bfv::Ciphertext& b,
                                 const HeParams& params,
                                 const PlaneConfig& cfg) {
    if (a.c0.coeffs.size() != params.n || b.c0.coeffs.size() != params.n)
        throw std::invalid_argument("hom_add_in_flash: parameter mismatch");
    if (cfg.wordlines < params.q_bits)
        throw std::invalid_argument("hom_add_in_flash: too few wordlines");

    const VerticalLayout layout{0, params.q_bits};
    auto add_poly = [&](const std::vector<std::uint64_t>& av,
                        const std::vector<std::uint64_t>& bv) {
        std::vector<std::uint64_t> out(av.size());
        for (std::size_t base = 0; base < av.size(); base += cfg.bitlines) {
            const std::size_t len = std::min(cfg.bitlines, av.size() - base);
            PlaneState plane(cfg);
            store_words_vertical(
                plane, layout,
                std::vector<std::uint64_t>(av.begin() + base,
                                           av.begin() + base + len));
            const std::vector<std::uint64_t> sums = bit_serial_add(
                plane, layout,
                std::vector<std::uint64_t>(bv.begin() + base,
                                           bv.begin() + base + len));
            std::copy(sums.begin(), sums.begin() + len, out.begin() + base);
        }
        return out;
    };

    bfv::Ciphertext r;
    r.c0 = ring::PolyQ{params.q_bits, add_poly(a.c0.coeffs, b.c0.coeffs)};
    r.c1 = ring::PolyQ{params.q_bits, add_poly(a.c1.coeffs, b.c1.coeffs)};
    r.level = std::max(a.level, b.level) + 1;
    return r;
}

namespace {

bool page_bit(const std::vector<std::uint8_t>& page, std::size_t i) {
    return (page[i / 8] >> (i % 8)) & 1;
}

void set_page_bit(std::vector<std::uint8_t>& page, std::size_t i, bool v) {
    if (v) page[i / 8] |= std::uint8_t(1) << (i % 8);
}

}  // namespace

std::vector<std::uint8_t> transpose_to_vertical(const std::vector<std::uint8_t>& page) {
    if (page.size() != kPageBytes)
        throw std::invalid_argument("transpose: page must be 4096 bytes");
    std::vector<std::uint8_t> out(kPageBytes, 0);
    // Horizontal bit (word j, bit i) -> vertical bit (row i, column j).
    for (std::size_t j = 0; j < kTransposeCols; ++j)
        for (std::size_t i = 0; i < kTransposeRows; ++i)
            set_page_bit(out, i * kTransposeCols + j,
                         page_bit(page, j * kTransposeRows + i));
    return out;
}

std::vector<std::uint8_t> transpose_to_horizontal(const std::vector<std::uint8_t>& page) {
    if (page.size() != kPageBytes)
        throw std::invalid_argument("transpose: page must be 4096 bytes");
    std::vector<std::uint8_t> out(kPageBytes, 0);
    for (std::size_t j = 0; j < kTransposeCols; ++j)
        for (std::size_t i = 0; i < kTransposeRows; ++i)
            set_page_bit(out, j * kTransposeRows + i,
                         page_bit(page, i * kTransposeCols + j));
    return out;
}

namespace {

struct Mnemonic {
    const char* name;
    OpKind kind;
    const char* key;   // required/optional key, or nullptr
    bool key_required;
};

constexpr Mnemonic kMnemonics[] = {
    {"READ", OpKind::ReadWL, "wl", true},
    {"LOAD", OpKind::LoadInput, "page", true},
    {"COPY_S2D", OpKind::CopyS2D, "d", true},
    {"COPY_D2S", OpKind::CopyD2S, "d", true},
    {"AND_SD", OpKind::AndSD, "d", false},
    {"OR_SD", OpKind::OrSD, "d", false},
    {"XOR_D1D2", OpKind::XorD1D2, nullptr, false},
    {"OUTPUT", OpKind::OutputD, "d", true},
};

}  // namespace

std::vector<MicroOp> parse_microprogram(const std::string& text) {
    std::vector<MicroOp> ops;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;  // blank line
        std::transform(word.begin(), word.end(), word.begin(), ::toupper);

        const Mnemonic* mn = nullptr;
        for (const auto& m : kMnemonics)
            if (word == m.name) { mn = &m; break; }
        if (!mn) throw ParseError(line_no, "unknown op '" + word + "'");

        MicroOp op{mn->kind, 0};
        std::string arg;
        if (ls >> arg) {
            if (!mn->key)
                throw ParseError(line_no, word + " takes no operand");
            const std::string prefix = std::string(mn->key) + "=";
            if (arg.rfind(prefix, 0) != 0)
                throw ParseError(line_no, "expected " + prefix + "<value>");
            try {
                op.arg = static_cast<std::uint32_t>(
                    std::stoul(arg.substr(prefix.size())));
            } catch (const std::exception&) {
                throw ParseError(line_no, "bad operand value '" + arg + "'");
            }
            std::string extra;
            if (ls >> extra)
                throw ParseError(line_no, "trailing token '" + extra + "'");
        } else if (mn->key && mn->key_required) {
            throw ParseError(line_no, word + " needs " + mn->key + "=<value>");
        }
        if ((op.kind == OpKind::CopyS2D || op.kind == OpKind::CopyD2S ||
             op.kind == OpKind::AndSD || op.kind == OpKind::OrSD ||
             op.kind == OpKind::OutputD) &&
            op.arg > 2)
            throw ParseError(line_no, "latch index must be 0..2");
        ops.push_back(op);
    }
    return ops;
}

std::string format_microop(const MicroOp& op) {
    switch (op.kind) {
        case OpKind::ReadWL: return "READ wl=" + std::to_string(op.arg);
        case OpKind::LoadInput: return "LOAD page=" + std::to_string(op.arg);
        case OpKind::CopyS2D: return "COPY_S2D d=" + std::to_string(op.arg);
        case OpKind::CopyD2S: return "COPY_D2S d=" + std::to_string(op.arg);
        case OpKind::AndSD: return "AND_SD d=" + std::to_string(op.arg);
        case OpKind::OrSD: return "OR_SD d=" + std::to_string(op.arg);
        case OpKind::XorD1D2: return "XOR_D1D2";
        case OpKind::OutputD: return "OUTPUT d=" + std::to_string(op.arg);
    }
    return "?";
}

std::string trace_json_line(const MicroOp& op) {
    switch (op.kind) {
        case OpKind::ReadWL:
            return R"({"op":"READ","wl":)" + std::to_string(op.arg) + "}";
        case OpKind::LoadInput:
            return R"({"op":"LOAD","page":)" + std::to_string(op.arg) + "}";
        case OpKind::CopyS2D:
            return R"({"op":"COPY_S2D","d":)" + std::to_string(op.arg) + "}";
        case OpKind::CopyD2S:
            return R"({"op":"COPY_D2S","d":)" + std::to_string(op.arg) + "}";
        case OpKind::AndSD:
            return R"({"op":"AND_SD","d":)" + std::to_string(op.arg) + "}";
        case OpKind::OrSD:
            return R"({"op":"OR_SD","d":)" + std::to_string(op.arg) + "}";
        case OpKind::XorD1D2:
            return R"({"op":"XOR_D1D2"})";
        case OpKind::OutputD:
            return R"({"op":"OUTPUT","d":)" + std::to_string(op.arg) + "}";
    }
    return "{}";
}

TraceCounts count_trace(const std::vector<MicroOp>& trace) {
    TraceCounts c;
    for (const auto& op : trace) {
        switch (op.kind) {
            case OpKind::ReadWL: ++c.reads; break;
            case OpKind::LoadInput: ++c.loads; break;
            case OpKind::CopyS2D:
            case OpKind::CopyD2S: ++c.transfers; break;
            case OpKind::AndSD: ++c.ands; break;
            case OpKind::OrSD: ++c.ors; break;
            case OpKind::XorD1D2: ++c.xors; break;
            case OpKind::OutputD: ++c.outputs; break;
        }
    }
    return c;
}

}  // namespace ciphermatch::ifp
