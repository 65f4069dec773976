// ciphermatch: secure exact string matching on encrypted data.
//
// Subcommands cover the whole flow: key generation, bit packing, database
// encryption, shifted-query preparation, addition-only search, oracle
// verification, latch-level flash simulation, and latency/energy sweeps.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ciphermatch/cost_model.hpp"
#include "ciphermatch/ifp_sim.hpp"
#include "ciphermatch/pipeline.hpp"
#include "ciphermatch/serialize.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace ciphermatch;

namespace {

// Exit codes, one per failure class.
constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;    // verify found a divergence
constexpr int kExitIo = 2;          // missing/unreadable/unwritable file
constexpr int kExitFormat = 3;      // bad magic, truncation, bad json
constexpr int kExitParams = 4;      // parameter/manifest mismatch
constexpr int kExitMicroParse = 5;  // microprogram syntax error

struct ParamMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string params_path;
    std::uint64_t seed = 1;
    std::string mode = "client-decrypt";
};

HeParams load_params(const std::string& explicit_path) {
    std::string path = explicit_path;
    if (path.empty()) {
        if (const char* dir = std::getenv("CIPHERMATCH_CONFIG_DIR")) {
            const std::string candidate = std::string(dir) + "/params.json";
            if (std::ifstream probe(candidate); probe) path = candidate;
        }
    }
    HeParams p;
    if (!path.empty()) {
        json j;
        try {
            j = json::parse(io::read_file_text(path));
        } catch (const json::exception& e) {
            throw io::FormatError(std::string("params json: ") + e.what());
        }
        p.n = j.value("n", p.n);
        p.q_bits = j.value("q_bits", p.q_bits);
        p.t_bits = j.value("t_bits", p.t_bits);
        p.noise_stddev = j.value("noise_stddev", p.noise_stddev);
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ParamMismatch(e.what());
    }
    return p;
}

json params_json(const HeParams& p) {
    return json{{"n", p.n},
                {"q_bits", p.q_bits},
                {"t_bits", p.t_bits},
                {"noise_stddev", p.noise_stddev}};
}

bfv::EncryptMode encrypt_mode_of(const std::string& mode) {
    if (mode == "paper-literal-encrypt") return bfv::EncryptMode::PaperLiteral;
    if (mode == "client-decrypt" || mode == "subtract")
        return bfv::EncryptMode::Standard;
    throw ParamMismatch("unknown mode: " + mode);
}

matcher::IndexMode index_mode_of(const std::string& mode) {
    if (mode == "client-decrypt") return matcher::IndexMode::ClientDecrypt;
    if (mode == "subtract") return matcher::IndexMode::SubtractThenDecrypt;
    if (mode == "paper-literal-encrypt")
        return matcher::IndexMode::CiphertextCompare;
    throw ParamMismatch("unknown mode: " + mode);
}

const char* encrypt_mode_name(bfv::EncryptMode m) {
    return m == bfv::EncryptMode::PaperLiteral ? "paper-literal" : "standard";
}

packing::BitString load_bits(const std::string& path, const std::string& format) {
    if (format == "ascii01")
        return packing::bits_from_ascii01(io::read_file_text(path));
    if (format == "dna")
        return packing::bits_from_dna(io::read_file_text(path));
    if (format == "raw")
        return packing::bits_from_bytes(io::read_file_bytes(path));
    throw ParamMismatch("unknown input format: " + format);
}

std::string manifest_path_for(const std::string& out) {
    return out + ".manifest.json";
}

// Run manifest written next to every produced artifact.
json write_manifest(const std::string& command, const HeParams& params,
                    std::uint64_t seed,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs,
                    const json& extra = json::object()) {
    json m;
    m["command"] = command;
    m["params"] = params_json(params);
    m["seed"] = seed;
    json in = json::array();
    for (const auto& path : inputs) {
        const auto bytes = io::read_file_bytes(path);
        in.push_back({{"path", path},
                      {"fnv1a64", io::fnv1a64(bytes.data(), bytes.size())}});
    }
    m["inputs"] = in;
    m["outputs"] = outputs;
    m["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = *it;
    if (!outputs.empty())
        io::write_file_text(manifest_path_for(outputs.front()), m.dump(2) + "\n");
    return m;
}

void check_manifest_params(const json& m, const HeParams& p,
                           const std::string& what) {
    const json jp = m.at("params");
    if (jp.at("n") != p.n || jp.at("q_bits") != p.q_bits ||
        jp.at("t_bits") != p.t_bits)
        throw ParamMismatch(what + ": parameters do not match");
}

json load_json_file(const std::string& path) {
    try {
        return json::parse(io::read_file_text(path));
    } catch (const json::exception& e) {
        throw io::FormatError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------- keygen

int cmd_keygen(const CommonOpts& common, const std::string& out_secret,
               const std::string& out_public) {
    const HeParams p = load_params(common.params_path);
    Rng rng(common.seed);
    const bfv::KeyPair kp = bfv::keygen(p, rng);
    {
        std::ofstream f(out_secret, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + out_secret);
        io::write_secret_key(f, kp.sk, p);
    }
    {
        std::ofstream f(out_public, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + out_public);
        io::write_public_key(f, kp.pk, p);
    }
    write_manifest("keygen", p, common.seed, {}, {out_secret, out_public});
    std::cout << "wrote " << out_secret << " and " << out_public << "\n";
    return kExitOk;
}

// ------------------------------------------------------------ pack/unpack

int cmd_pack(const CommonOpts& common, const std::string& input,
             const std::string& format, const std::string& out) {
    const HeParams p = load_params(common.params_path);
    const packing::BitString bits = load_bits(input, format);
    const packing::PackedMessage pm = packing::pack(bits, p);
    const auto polys = packing::to_plaintexts(pm, p);
    {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + out);
        io::write_packed_plaintexts(f, polys, pm.original_bit_len, p);
    }
    const auto rep = packing::footprint_report(bits, p);
    write_manifest("pack", p, common.seed, {input}, {out},
                   {{"bit_len", pm.original_bit_len},
                    {"polynomial_count", polys.size()},
                    {"expansion_factor_if_encrypted", rep.expansion_factor}});
    std::cout << "packed " << pm.original_bit_len << " bits into "
              << polys.size() << " plaintext polynomial(s)\n";
    return kExitOk;
}

int cmd_unpack(const CommonOpts& common, const std::string& input,
               const std::string& format, const std::string& out) {
    const HeParams p = load_params(common.params_path);
    std::ifstream f(input, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + input);
    std::uint64_t bit_len = 0;
    const auto polys = io::read_packed_plaintexts(f, bit_len, p);
    const packing::BitString bits = packing::unpack(polys, bit_len, p);
    if (format == "ascii01") {
        io::write_file_text(out, packing::bits_to_ascii01(bits));
    } else if (format == "raw") {
        io::write_file_bytes(out, packing::bits_to_bytes(bits));
    } else {
        throw ParamMismatch("unknown output format: " + format);
    }
    write_manifest("unpack", p, common.seed, {input}, {out},
                   {{"bit_len", bit_len}});
    std::cout << "unpacked " << bit_len << " bits to " << out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------- encrypt-db

int cmd_encrypt_db(const CommonOpts& common, const std::string& input,
                   const std::string& format, const std::string& pk_path,
                   const std::string& out) {
    const HeParams p = load_params(common.params_path);
    const bfv::EncryptMode emode = encrypt_mode_of(common.mode);
    std::ifstream pkf(pk_path, std::ios::binary);
    if (!pkf) throw std::runtime_error("cannot open for reading: " + pk_path);
    const bfv::PublicKey pk = io::read_public_key(pkf, p);

    const packing::BitString bits = load_bits(input, format);
    Rng rng(common.seed);
    const matcher::EncryptedDatabase db =
        matcher::prepare_database(bits, pk, p, rng, emode);

    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + out);
    for (const auto& ct : db.cts) io::write_ciphertext(f, ct, p);
    f.close();

    const auto rep = packing::footprint_report(bits, p);
    write_manifest("encrypt-db", p, common.seed, {input, pk_path}, {out},
                   {{"bit_len", db.bit_len},
                    {"polynomial_count", db.cts.size()},
                    {"encrypt_mode", encrypt_mode_name(emode)},
                    {"plain_bytes", rep.plain_bytes},
                    {"encrypted_bytes", rep.encrypted_bytes},
                    {"expansion_factor", rep.expansion_factor}});
    std::cout << "encrypted " << db.bit_len << " bits into " << db.cts.size()
              << " ciphertext(s), expansion " << rep.expansion_factor << "x\n";
    return kExitOk;
}

// ---------------------------------------------------------- prepare-query

int cmd_prepare_query(const CommonOpts& common, const std::string& input,
                      const std::string& format, const std::string& pk_path,
                      const std::string& out) {
    const HeParams p = load_params(common.params_path);
    const bfv::EncryptMode emode = encrypt_mode_of(common.mode);
    std::ifstream pkf(pk_path, std::ios::binary);
    if (!pkf) throw std::runtime_error("cannot open for reading: " + pk_path);
    const bfv::PublicKey pk = io::read_public_key(pkf, p);

    const packing::BitString qbits = load_bits(input, format);
    Rng rng(common.seed);
    const matcher::PreparedQuerySet qs =
        matcher::prepare_query(qbits, pk, p, rng, emode);
    const matcher::MatchPolynomialKit kit =
        matcher::make_match_kit(pk, p, rng, emode);

    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + out);
    for (const auto& pq : qs.shifts) io::write_ciphertext(f, pq.ct, p);
    io::write_ciphertext(f, kit.encrypted, p);
    io::write_ciphertext(f, kit.encrypted_sum_form, p);
    f.close();

    write_manifest("prepare-query", p, common.seed, {input, pk_path}, {out},
                   {{"query_bit_len", qs.meta.query_bit_len},
                    {"period", qs.meta.period},
                    {"span_coeffs", qs.meta.span_coeffs},
                    {"shift_count", qs.meta.shift_count},
                    {"encrypt_mode", encrypt_mode_name(emode)}});
    std::cout << "prepared " << qs.shifts.size()
              << " shifted encrypted quer(ies) plus match kit\n";
    return kExitOk;
}

// ----------------------------------------------------------------- search

int cmd_search(const CommonOpts& common, const std::string& db_path,
               const std::string& query_path, const std::string& sk_path,
               const std::string& out, unsigned threads) {
    const HeParams p = load_params(common.params_path);
    const matcher::IndexMode imode = index_mode_of(common.mode);

    const json db_manifest = load_json_file(manifest_path_for(db_path));
    const json q_manifest = load_json_file(manifest_path_for(query_path));
    check_manifest_params(db_manifest, p, "database");
    check_manifest_params(q_manifest, p, "query");

    const std::string db_enc = db_manifest.value("encrypt_mode", "standard");
    const std::string q_enc = q_manifest.value("encrypt_mode", "standard");
    if (imode == matcher::IndexMode::CiphertextCompare &&
        (db_enc != "paper-literal" || q_enc != "paper-literal"))
        throw ParamMismatch(
            "paper-literal-encrypt search needs a paper-literal database and "
            "query");
    if (db_enc != q_enc)
        throw ParamMismatch("database and query encryption modes differ");

    matcher::EncryptedDatabase db;
    db.params = p;
    db.bit_len = db_manifest.at("bit_len").get<std::uint64_t>();
    {
        std::ifstream f(db_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for reading: " + db_path);
        const std::size_t count =
            db_manifest.at("polynomial_count").get<std::size_t>();
        for (std::size_t i = 0; i < count; ++i)
            db.cts.push_back(io::read_ciphertext(f, p));
    }

    matcher::QueryMeta meta;
    meta.query_bit_len = q_manifest.at("query_bit_len").get<std::uint64_t>();
    meta.period = q_manifest.at("period").get<std::uint32_t>();
    meta.span_coeffs = q_manifest.at("span_coeffs").get<std::uint32_t>();
    meta.shift_count = q_manifest.at("shift_count").get<std::uint32_t>();

    std::vector<matcher::PreparedQuery> shifts;
    matcher::MatchPolynomialKit kit;
    {
        std::ifstream f(query_path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open for reading: " + query_path);
        for (std::uint32_t s = 0; s < meta.shift_count; ++s)
            shifts.push_back(
                {s, io::read_ciphertext(f, p), meta.query_bit_len});
        kit.plain = ring::zero_poly_t(p);
        for (auto& c : kit.plain.coeffs) c = p.plain_mask();
        kit.encrypted = io::read_ciphertext(f, p);
        kit.encrypted_sum_form = io::read_ciphertext(f, p);
    }

    std::optional<bfv::SecretKey> sk;
    if (imode != matcher::IndexMode::CiphertextCompare) {
        if (sk_path.empty())
            throw std::runtime_error(
                "missing input: --secret-key is required for mode " +
                common.mode);
        std::ifstream f(sk_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for reading: " + sk_path);
        sk = io::read_secret_key(f, p);
    }

    bfv::reset_op_counts();
    std::vector<matcher::ShiftResults> results(shifts.size());
    pipeline::parallel_for(
        shifts.size(),
        [&](std::size_t i) {
            results[i] = {shifts[i].shift,
                          matcher::secure_search(db, shifts[i])};
        },
        threads);
    const std::vector<matcher::MatchIndex> indices = matcher::generate_indices(
        results, kit, db.bit_len, meta, sk ? &*sk : nullptr, imode, p);
    const bfv::OpCounts ops = bfv::op_counts();

    json matches = json::array();
    for (const auto& m : indices)
        matches.push_back({{"bit_offset", m.bit_offset},
                           {"shift", m.shift},
                           {"span", m.span}});
    json result;
    result["matches"] = matches;
    result["db_ciphertexts"] = db.cts.size();
    result["shift_count"] = meta.shift_count;
    result["hom_adds"] = ops.additions;
    result["hom_multiplications"] = ops.multiplications;
    result["hom_rotations"] = ops.rotations;
    result["mode"] = common.mode;
    result["manifest"] = manifest_path_for(out);
    io::write_file_text(out, result.dump(2) + "\n");
    write_manifest("search", p, common.seed, {db_path, query_path}, {out},
                   {{"match_count", indices.size()}});
    std::cout << indices.size() << " match(es), " << ops.additions
              << " hom-adds\n";
    return kExitOk;
}

// ----------------------------------------------------------------- verify

int cmd_verify(const CommonOpts& common, unsigned cases,
               const std::string& db_path, const std::string& query_path,
               const std::string& format, unsigned threads) {
    const HeParams p = load_params(common.params_path);
    Rng rng(common.seed);
    const bfv::KeyPair kp = bfv::keygen(p, rng);

    pipeline::PipelineOptions opts;
    opts.encrypt_mode = encrypt_mode_of(common.mode);
    opts.index_mode = index_mode_of(common.mode);
    opts.threads = threads;

    auto run_case = [&](const packing::BitString& db_bits,
                        const packing::BitString& q_bits) {
        const auto got = pipeline::run_search(db_bits, q_bits, kp, p, rng, opts);
        const auto want = matcher::plaintext_oracle(db_bits, q_bits, p);
        return got.indices == want;
    };

    if (!db_path.empty()) {
        const bool ok =
            run_case(load_bits(db_path, format), load_bits(query_path, format));
        std::cout << (ok ? "verify: OK\n" : "verify: MISMATCH\n");
        return ok ? kExitOk : kExitMismatch;
    }

    unsigned failures = 0;
    for (unsigned i = 0; i < cases; ++i) {
        const std::size_t len = 64 + rng.next_below(6000);
        packing::BitString db_bits(len);
        for (auto& b : db_bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
        const std::size_t y = 16u << rng.next_below(3);
        packing::BitString q_bits(std::min(y, len), 0);
        for (auto& b : q_bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
        if (len > q_bits.size() + 32) {
            const std::size_t at =
                16 * rng.next_below((len - q_bits.size()) / 16);
            std::copy(q_bits.begin(), q_bits.end(), db_bits.begin() + at);
        }
        if (!run_case(db_bits, q_bits)) ++failures;
    }
    std::cout << "verify: " << (cases - failures) << "/" << cases
              << " cases matched the oracle\n";
    return failures == 0 ? kExitOk : kExitMismatch;
}

// --------------------------------------------------------------- simulate

std::vector<ifp::BitVec> load_bitvec_lines(const std::string& path,
                                           std::size_t width) {
    std::istringstream in(io::read_file_text(path));
    std::vector<ifp::BitVec> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.size() != width)
            throw io::FormatError(path + ": line width " +
                                  std::to_string(line.size()) + " != bitlines " +
                                  std::to_string(width));
        ifp::BitVec v(width);
        for (std::size_t i = 0; i < width; ++i) {
            if (line[i] != '0' && line[i] != '1')
                throw io::FormatError(path + ": expected 0/1 characters");
            v.set(i, line[i] == '1');
        }
        rows.push_back(std::move(v));
    }
    return rows;
}

std::string bitvec_to_string(const ifp::BitVec& v) {
    std::string s(v.size(), '0');
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.get(i)) s[i] = '1';
    return s;
}

std::vector<std::uint64_t> parse_u64_csv(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoull(tok));
    }
    return out;
}

int cmd_simulate(const std::string& program_path, bool builtin_add,
                 std::size_t bitlines, std::size_t wordlines,
                 std::uint32_t width, const std::string& a_csv,
                 const std::string& b_csv, const std::string& cells_path,
                 const std::string& inputs_path, const std::string& trace_path,
                 const std::string& out) {
    if (builtin_add) {
        const std::vector<std::uint64_t> a = parse_u64_csv(a_csv);
        const std::vector<std::uint64_t> b = parse_u64_csv(b_csv);
        if (a.size() != b.size())
            throw ParamMismatch("--a and --b must have the same length");
        if (a.empty()) throw ParamMismatch("--add needs operands in --a/--b");
        const std::size_t lanes = std::max(bitlines, a.size());
        ifp::PlaneState plane(ifp::PlaneConfig{lanes, std::max<std::size_t>(
                                                           wordlines, width)});
        const ifp::VerticalLayout layout{0, width};
        ifp::store_words_vertical(plane, layout, a);
        std::vector<std::uint64_t> bw = b;
        bw.resize(lanes, 0);
        const auto sums = ifp::bit_serial_add(plane, layout, bw);

        std::ostringstream os;
        os << "lane,a,b,sum\n";
        const std::uint64_t mask =
            width >= 64 ? ~0ull : (std::uint64_t{1} << width) - 1;
        for (std::size_t i = 0; i < a.size(); ++i)
            os << i << ',' << a[i] << ',' << b[i] << ','
               << (sums[i] & mask) << '\n';
        if (out.empty())
            std::cout << os.str();
        else
            io::write_file_text(out, os.str());
        if (!trace_path.empty()) {
            std::string t;
            for (const auto& op : plane.op_trace)
                t += ifp::trace_json_line(op) + "\n";
            io::write_file_text(trace_path, t);
        }
        return kExitOk;
    }

    if (program_path.empty())
        throw std::runtime_error("missing input: give a program file or --add");
    const auto ops = ifp::parse_microprogram(io::read_file_text(program_path));

    ifp::PlaneState plane(ifp::PlaneConfig{bitlines, wordlines});
    ifp::PlaneIo io_pages;
    if (!cells_path.empty()) {
        const auto rows = load_bitvec_lines(cells_path, bitlines);
        if (rows.size() > wordlines)
            throw ParamMismatch("cells file has more rows than wordlines");
        for (std::size_t i = 0; i < rows.size(); ++i) plane.cells[i] = rows[i];
    }
    if (!inputs_path.empty())
        io_pages.inputs = load_bitvec_lines(inputs_path, bitlines);

    ifp::run_program(plane, ops, io_pages);

    json dump;
    dump["executed_ops"] = plane.op_trace.size();
    dump["s_latch"] = bitvec_to_string(plane.s_latch);
    dump["d_latch"] = json::array({bitvec_to_string(plane.d_latch[0]),
                                   bitvec_to_string(plane.d_latch[1]),
                                   bitvec_to_string(plane.d_latch[2])});
    json outs = json::array();
    for (const auto& page : io_pages.outputs)
        outs.push_back(bitvec_to_string(page));
    dump["outputs"] = outs;
    if (out.empty())
        std::cout << dump.dump(2) << "\n";
    else
        io::write_file_text(out, dump.dump(2) + "\n");
    if (!trace_path.empty()) {
        std::string t;
        for (const auto& op : plane.op_trace)
            t += ifp::trace_json_line(op) + "\n";
        io::write_file_text(trace_path, t);
    }
    return kExitOk;
}

// ------------------------------------------------------------------ bench

struct BenchRow {
    std::string mode;  // functional | analytic
    std::string workload;
    std::string system;
    std::uint64_t db_bytes = 0;
    std::uint64_t db_bits = 0;
    std::uint64_t query_bits = 0;
    std::uint64_t num_queries = 0;
    std::uint64_t shifts = 0;
    std::uint64_t ciphertexts = 0;
    std::uint64_t hom_adds = 0;
    std::uint64_t matches = 0;
    double latency_ns = 0.0;
    double energy_nj = 0.0;
    double speedup_vs_cmsw = 0.0;
    std::int64_t wall_ns = -1;
};

std::string bench_csv(const std::vector<BenchRow>& rows, bool timings) {
    std::ostringstream os;
    os << "mode,workload,system,db_bytes,db_bits,query_bits,num_queries,"
          "shifts,ciphertexts,hom_adds,matches,latency_ns,energy_nj,"
          "speedup_vs_cmsw";
    if (timings) os << ",wall_ns";
    os << "\n";
    os.precision(6);
    os << std::fixed;
    for (const auto& r : rows) {
        os << r.mode << ',' << r.workload << ',' << r.system << ','
           << r.db_bytes << ',' << r.db_bits << ',' << r.query_bits << ','
           << r.num_queries << ',' << r.shifts << ',' << r.ciphertexts << ','
           << r.hom_adds << ',' << r.matches << ',' << r.latency_ns << ','
           << r.energy_nj << ',' << r.speedup_vs_cmsw;
        if (timings) os << ',' << r.wall_ns;
        os << "\n";
    }
    return os.str();
}

int cmd_bench(const CommonOpts& common, const std::string& workload,
              const std::string& out, const std::string& json_out,
              bool timings, unsigned threads) {
    const HeParams p = load_params(common.params_path);
    if (workload != "dna" && workload != "dbsearch")
        throw ParamMismatch("unknown workload: " + workload);

    Rng rng(common.seed);
    const bfv::KeyPair kp = bfv::keygen(p, rng);
    pipeline::PipelineOptions opts;
    opts.threads = threads;

    std::vector<BenchRow> rows;

    // Functional, desk-scale: the real pipeline on KB-scale data.
    auto functional_case = [&](std::uint64_t db_bits_len,
                               std::uint64_t query_bits_len,
                               const packing::BitString& db_bits,
                               const packing::BitString& q_bits) {
        const auto t0 = std::chrono::steady_clock::now();
        bfv::reset_op_counts();
        const auto res = pipeline::run_search(db_bits, q_bits, kp, p, rng, opts);
        const auto wall = std::chrono::duration_cast<std::chrono::nanoseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        BenchRow row;
        row.mode = "functional";
        row.workload = workload;
        row.system = "pipeline";
        row.db_bits = db_bits_len;
        row.db_bytes = (db_bits_len + 7) / 8;
        row.query_bits = query_bits_len;
        row.num_queries = 1;
        row.shifts = res.shift_count;
        row.ciphertexts = res.db_ciphertexts;
        row.hom_adds = bfv::op_counts().additions;
        row.matches = res.indices.size();
        if (timings) row.wall_ns = wall;
        rows.push_back(row);
    };

    if (workload == "dna") {
        // 32768-base (65536-bit) reference string, queries drawn from it.
        static const char kBases[] = {'A', 'C', 'G', 'T'};
        std::string seq(32768, 'A');
        for (auto& ch : seq) ch = kBases[rng.next_below(4)];
        const packing::BitString db_bits = packing::bits_from_dna(seq);
        for (std::uint64_t y : {16, 32, 64, 128, 256}) {
            const std::size_t at = 16 * rng.next_below((db_bits.size() - y) / 16);
            packing::BitString q(db_bits.begin() + at, db_bits.begin() + at + y);
            functional_case(db_bits.size(), y, db_bits, q);
        }
    } else {
        for (std::uint64_t kb : {8, 16, 32}) {
            const std::size_t len = kb * 1024 * 8;
            packing::BitString db_bits(len);
            for (auto& b : db_bits)
                b = static_cast<std::uint8_t>(rng.next_u64() & 1);
            const std::size_t at = 16 * rng.next_below(len / 16 - 1);
            packing::BitString q(db_bits.begin() + at, db_bits.begin() + at + 16);
            functional_case(len, 16, db_bits, q);
        }
    }

    // Analytic, paper-scale: the latency/energy model on GB-scale workloads.
    const cost::SystemConfigs cfg;
    const auto workloads =
        workload == "dna" ? cost::dna_preset() : cost::dbsearch_preset();
    const auto sweep_rows = cost::sweep(
        workloads,
        {cost::SystemKind::CmSw, cost::SystemKind::CmPum,
         cost::SystemKind::CmPumSsd, cost::SystemKind::CmIfp},
        cfg);
    for (const auto& r : sweep_rows) {
        BenchRow row;
        row.mode = "analytic";
        row.workload = workload;
        row.system = cost::system_name(r.system);
        row.db_bytes = r.workload.encrypted_db_bytes;
        row.query_bits = r.workload.query_bits;
        row.num_queries = r.workload.num_queries;
        row.shifts = r.workload.shift_count;
        row.latency_ns = r.latency_ns;
        row.energy_nj = r.energy_nj;
        row.speedup_vs_cmsw = r.speedup_vs_cmsw;
        rows.push_back(row);
    }

    const std::string csv = bench_csv(rows, timings);
    if (out.empty())
        std::cout << csv;
    else
        io::write_file_text(out, csv);

    if (!json_out.empty()) {
        json j;
        j["workload"] = workload;
        j["seed"] = common.seed;
        json jrows = json::array();
        for (const auto& r : rows) {
            jrows.push_back({{"mode", r.mode},
                             {"system", r.system},
                             {"db_bytes", r.db_bytes},
                             {"db_bits", r.db_bits},
                             {"query_bits", r.query_bits},
                             {"num_queries", r.num_queries},
                             {"shifts", r.shifts},
                             {"ciphertexts", r.ciphertexts},
                             {"hom_adds", r.hom_adds},
                             {"matches", r.matches},
                             {"latency_ns", r.latency_ns},
                             {"energy_nj", r.energy_nj},
                             {"speedup_vs_cmsw", r.speedup_vs_cmsw}});
        }
        j["rows"] = jrows;
        json assumptions = json::object();
        for (auto kind : {cost::SystemKind::CmSw, cost::SystemKind::CmPum,
                          cost::SystemKind::CmPumSsd, cost::SystemKind::CmIfp})
            assumptions[cost::system_name(kind)] =
                cost::cost(kind, workloads.front(), cfg).assumptions;
        j["model_assumptions"] = assumptions;
        io::write_file_text(json_out, j.dump(2) + "\n");
    }
    if (!out.empty())
        write_manifest("bench", p, common.seed, {}, {out},
                       {{"workload", workload}});
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ciphermatch: secure exact string matching on encrypted data"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts common;
    app.add_option("--params", common.params_path,
                   "params json (default: $CIPHERMATCH_CONFIG_DIR/params.json)");
    app.add_option("--seed", common.seed, "rng seed (default 1)");
    app.add_option("--mode", common.mode,
                   "client-decrypt | subtract | paper-literal-encrypt")
        ->check(CLI::IsMember(
            {"client-decrypt", "subtract", "paper-literal-encrypt"}));

    std::function<int()> run;

    // keygen
    auto* keygen = app.add_subcommand("keygen", "generate a key pair");
    {
        auto out_secret = std::make_shared<std::string>("secret.cmsk");
        auto out_public = std::make_shared<std::string>("public.cmpk");
        keygen->add_option("--out-secret", *out_secret, "secret key file");
        keygen->add_option("--out-public", *out_public, "public key file");
        keygen->callback([&, out_secret, out_public] {
            run = [&, out_secret, out_public] {
                return cmd_keygen(common, *out_secret, *out_public);
            };
        });
    }

    // pack / unpack
    auto* pack = app.add_subcommand("pack", "pack bits into plaintext polynomials");
    {
        auto input = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("raw");
        auto out = std::make_shared<std::string>("packed.cmpm");
        pack->add_option("--input", *input, "input file")->required();
        pack->add_option("--format", *format, "raw | ascii01 | dna");
        pack->add_option("--out", *out, "output file");
        pack->callback([&, input, format, out] {
            run = [&, input, format, out] {
                return cmd_pack(common, *input, *format, *out);
            };
        });
    }
    auto* unpack = app.add_subcommand("unpack", "recover bits from packed polynomials");
    {
        auto input = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("raw");
        auto out = std::make_shared<std::string>();
        unpack->add_option("--input", *input, "packed file")->required();
        unpack->add_option("--format", *format, "raw | ascii01");
        unpack->add_option("--out", *out, "output file")->required();
        unpack->callback([&, input, format, out] {
            run = [&, input, format, out] {
                return cmd_unpack(common, *input, *format, *out);
            };
        });
    }

    // encrypt-db (alias prepare-db)
    auto* encdb = app.add_subcommand("encrypt-db",
                                     "pack and encrypt a database");
    encdb->alias("prepare-db");
    {
        auto input = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("raw");
        auto pk = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("db.cmdb");
        encdb->add_option("--input", *input, "database bits")->required();
        encdb->add_option("--format", *format, "raw | ascii01 | dna");
        encdb->add_option("--public-key", *pk, "public key file")->required();
        encdb->add_option("--out", *out, "encrypted database file");
        encdb->callback([&, input, format, pk, out] {
            run = [&, input, format, pk, out] {
                return cmd_encrypt_db(common, *input, *format, *pk, *out);
            };
        });
    }

    // prepare-query
    auto* prepq = app.add_subcommand("prepare-query",
                                     "negate, replicate, shift and encrypt a query");
    {
        auto input = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("ascii01");
        auto pk = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("query.cmq");
        prepq->add_option("--input", *input, "query bits")->required();
        prepq->add_option("--format", *format, "raw | ascii01 | dna");
        prepq->add_option("--public-key", *pk, "public key file")->required();
        prepq->add_option("--out", *out, "prepared query file");
        prepq->callback([&, input, format, pk, out] {
            run = [&, input, format, pk, out] {
                return cmd_prepare_query(common, *input, *format, *pk, *out);
            };
        });
    }

    // search
    auto* search = app.add_subcommand("search", "run the addition-only search");
    {
        auto db = std::make_shared<std::string>();
        auto query = std::make_shared<std::string>();
        auto sk = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("results.json");
        auto threads = std::make_shared<unsigned>(0u);
        search->add_option("--db", *db, "encrypted database")->required();
        search->add_option("--query", *query, "prepared query")->required();
        search->add_option("--secret-key", *sk,
                           "secret key (decrypting modes)");
        search->add_option("--out", *out, "results json");
        search->add_option("--threads", *threads, "worker threads (0 = auto)");
        search->callback([&, db, query, sk, out, threads] {
            run = [&, db, query, sk, out, threads] {
                return cmd_search(common, *db, *query, *sk, *out, *threads);
            };
        });
    }

    // verify
    auto* verify = app.add_subcommand(
        "verify", "diff the encrypted pipeline against the plaintext oracle");
    {
        auto cases = std::make_shared<unsigned>(20u);
        auto db = std::make_shared<std::string>();
        auto query = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("ascii01");
        auto threads = std::make_shared<unsigned>(0u);
        verify->add_option("--random-cases", *cases,
                           "number of seeded random instances");
        verify->add_option("--db", *db, "explicit database bits file");
        verify->add_option("--query", *query, "explicit query bits file");
        verify->add_option("--format", *format, "raw | ascii01 | dna");
        verify->add_option("--threads", *threads, "worker threads (0 = auto)");
        verify->callback([&, cases, db, query, format, threads] {
            run = [&, cases, db, query, format, threads] {
                if (!db->empty() != !query->empty())
                    throw ParamMismatch("--db and --query go together");
                return cmd_verify(common, *cases, *db, *query, *format,
                                  *threads);
            };
        });
    }

    // simulate
    auto* sim = app.add_subcommand("simulate",
                                   "run a latch-level flash plane simulation");
    {
        auto program = std::make_shared<std::string>();
        auto add = std::make_shared<bool>(false);
        auto bitlines = std::make_shared<std::size_t>(64);
        auto wordlines = std::make_shared<std::size_t>(64);
        auto width = std::make_shared<std::uint32_t>(32);
        auto a = std::make_shared<std::string>();
        auto b = std::make_shared<std::string>();
        auto cells = std::make_shared<std::string>();
        auto inputs = std::make_shared<std::string>();
        auto trace = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        sim->add_option("program", *program, "micro-program file");
        sim->add_flag("--add", *add, "run the built-in bit-serial add");
        sim->add_option("--bitlines", *bitlines, "plane width");
        sim->add_option("--wordlines", *wordlines, "plane depth");
        sim->add_option("--width", *width, "word width for --add");
        sim->add_option("--a", *a, "comma-separated operand words (--add)");
        sim->add_option("--b", *b, "comma-separated operand words (--add)");
        sim->add_option("--cells", *cells, "initial cell rows, 0/1 lines");
        sim->add_option("--inputs", *inputs, "input pages, 0/1 lines");
        sim->add_option("--trace", *trace, "write op trace as json lines");
        sim->add_option("--out", *out, "output file (default stdout)");
        sim->callback([&, program, add, bitlines, wordlines, width, a, b, cells,
                       inputs, trace, out] {
            run = [&, program, add, bitlines, wordlines, width, a, b, cells,
                   inputs, trace, out] {
                return cmd_simulate(*program, *add, *bitlines, *wordlines,
                                    *width, *a, *b, *cells, *inputs, *trace,
                                    *out);
            };
        });
    }

    // bench
    auto* bench = app.add_subcommand(
        "bench", "functional desk-scale runs plus analytic paper-scale sweeps");
    {
        auto workload = std::make_shared<std::string>("dna");
        auto out = std::make_shared<std::string>();
        auto json_out = std::make_shared<std::string>();
        auto timings = std::make_shared<bool>(false);
        auto threads = std::make_shared<unsigned>(0u);
        bench->add_option("--workload", *workload, "dna | dbsearch");
        bench->add_option("--out", *out, "csv output (default stdout)");
        bench->add_option("--json", *json_out, "json output file");
        bench->add_flag("--timings", *timings,
                        "include wall-clock column (non-deterministic)");
        bench->add_option("--threads", *threads, "worker threads (0 = auto)");
        bench->callback([&, workload, out, json_out, timings, threads] {
            run = [&, workload, out, json_out, timings, threads] {
                return cmd_bench(common, *workload, *out, *json_out, *timings,
                                 *threads);
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        return run ? run() : kExitOk;
    } catch (const ifp::ParseError& e) {
        std::cerr << "error: microprogram " << e.what() << "\n";
        return kExitMicroParse;
    } catch (const io::FormatError& e) {
        std::cerr << "error: format: " << e.what() << "\n";
        return kExitFormat;
    } catch (const ParamMismatch& e) {
        std::cerr << "error: params: " << e.what() << "\n";
        return kExitParams;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: params: " << e.what() << "\n";
        return kExitParams;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
