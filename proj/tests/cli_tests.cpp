// End-to-end tests that drive the ciphermatch binary (path in the
// CIPHERMATCH_CLI environment variable) through its file-based interface.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ciphermatch/matcher.hpp"
#include "ciphermatch/serialize.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ciphermatch;

namespace {

std::string cli_path() {
    const char* p = std::getenv("CIPHERMATCH_CLI");
    REQUIRE_MESSAGE(p != nullptr, "CIPHERMATCH_CLI must point at the binary");
    return p;
}

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("ciphermatch-cli-test-" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = "cd " + work_dir().string() + " && " + cli_path() +
                            " " + args + " >> cli.log 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

}  // namespace

TEST_CASE("keygen, encrypt-db, prepare-query, search match the oracle") {
    const fs::path dir = work_dir();
    REQUIRE(run_cli("keygen --seed 7 --out-secret sk.bin --out-public pk.bin") ==
            0);

    // 2000-bit database with the query planted at bit 160
    Rng rng(1234);
    packing::BitString db_bits(2000);
    for (auto& b : db_bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
    packing::BitString q_bits(32);
    for (auto& b : q_bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
    std::copy(q_bits.begin(), q_bits.end(), db_bits.begin() + 160);

    write_text(dir / "db.txt", packing::bits_to_ascii01(db_bits));
    write_text(dir / "q.txt", packing::bits_to_ascii01(q_bits));

    REQUIRE(run_cli("encrypt-db --seed 8 --input db.txt --format ascii01 "
                    "--public-key pk.bin --out db.cmdb") == 0);
    REQUIRE(run_cli("prepare-query --seed 9 --input q.txt --format ascii01 "
                    "--public-key pk.bin --out query.cmq") == 0);
    REQUIRE(run_cli("search --db db.cmdb --query query.cmq --secret-key sk.bin "
                    "--out results.json") == 0);

    const json results = json::parse(slurp(dir / "results.json"));
    const HeParams params;
    const auto oracle = matcher::plaintext_oracle(db_bits, q_bits, params);
    REQUIRE(results.at("matches").size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        CHECK(results["matches"][i]["bit_offset"] == oracle[i].bit_offset);
        CHECK(results["matches"][i]["shift"] == oracle[i].shift);
        CHECK(results["matches"][i]["span"] == oracle[i].span);
    }
    CHECK(results.at("hom_adds").get<std::uint64_t>() ==
          results.at("db_ciphertexts").get<std::uint64_t>() *
              results.at("shift_count").get<std::uint64_t>());
    CHECK(results.at("hom_multiplications") == 0);
    CHECK(results.at("hom_rotations") == 0);

    // manifests exist and reference the produced artifacts
    CHECK(fs::exists(dir / "db.cmdb.manifest.json"));
    const json m = json::parse(slurp(dir / "db.cmdb.manifest.json"));
    CHECK(m.at("command") == "encrypt-db");
    CHECK(m.at("outputs")[0] == "db.cmdb");
}

TEST_CASE("subtract mode gives the same matches") {
    const fs::path dir = work_dir();
    REQUIRE(run_cli("search --mode subtract --db db.cmdb --query query.cmq "
                    "--secret-key sk.bin --out results_sub.json") == 0);
    CHECK(json::parse(slurp(dir / "results_sub.json"))["matches"] ==
          json::parse(slurp(dir / "results.json"))["matches"]);
}

TEST_CASE("paper-literal mode searches without the secret key") {
    const fs::path dir = work_dir();
    REQUIRE(run_cli("encrypt-db --mode paper-literal-encrypt --seed 8 "
                    "--input db.txt --format ascii01 --public-key pk.bin "
                    "--out db_lit.cmdb") == 0);
    REQUIRE(run_cli("prepare-query --mode paper-literal-encrypt --seed 9 "
                    "--input q.txt --format ascii01 --public-key pk.bin "
                    "--out query_lit.cmq") == 0);
    REQUIRE(run_cli("search --mode paper-literal-encrypt --db db_lit.cmdb "
                    "--query query_lit.cmq --out results_lit.json") == 0);
    CHECK(json::parse(slurp(dir / "results_lit.json"))["matches"] ==
          json::parse(slurp(dir / "results.json"))["matches"]);

    // mixing paper-literal search with standard artifacts is a param error
    CHECK(run_cli("search --mode paper-literal-encrypt --db db.cmdb "
                  "--query query.cmq --out mixed.json") == 4);
}

TEST_CASE("missing inputs and bad files map to distinct exit codes") {
    const fs::path dir = work_dir();
    // missing secret key in a decrypting mode
    CHECK(run_cli("search --db db.cmdb --query query.cmq --out x.json") == 2);
    // missing database file
    CHECK(run_cli("search --db nosuch.cmdb --query query.cmq "
                  "--secret-key sk.bin --out x.json") == 2);
    // corrupted database record
    write_text(dir / "garbage.cmdb", "XXXXGARBAGE");
    fs::copy_file(dir / "db.cmdb.manifest.json",
                  dir / "garbage.cmdb.manifest.json",
                  fs::copy_options::overwrite_existing);
    CHECK(run_cli("search --db garbage.cmdb --query query.cmq "
                  "--secret-key sk.bin --out x.json") == 3);
    // params mismatch between configured params and stored artifacts
    write_text(dir / "p512.json", R"({"n":512})");
    CHECK(run_cli("--params p512.json search --db db.cmdb --query query.cmq "
                  "--secret-key sk.bin --out x.json") == 4);
}

TEST_CASE("pack/unpack file round trip is byte-identical") {
    const fs::path dir = work_dir();
    Rng rng(55);
    std::vector<std::uint8_t> payload(1337);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next_u64());
    io::write_file_bytes((dir / "payload.bin").string(), payload);

    REQUIRE(run_cli("pack --input payload.bin --format raw --out packed.cmpm") ==
            0);
    REQUIRE(run_cli("unpack --input packed.cmpm --format raw --out back.bin") ==
            0);
    CHECK(io::read_file_bytes((dir / "back.bin").string()) == payload);
}

TEST_CASE("verify runs seeded random cases") {
    CHECK(run_cli("verify --random-cases 10 --seed 99") == 0);
}

TEST_CASE("simulate: built-in add and micro-programs") {
    const fs::path dir = work_dir();
    REQUIRE(run_cli("simulate --add --width 8 --a 3,250,17 --b 9,6,255 "
                    "--out sums.csv --trace trace.jsonl") == 0);
    const std::string sums = slurp(dir / "sums.csv");
    CHECK(sums.find("0,3,9,12") != std::string::npos);
    CHECK(sums.find("1,250,6,0") != std::string::npos);    // mod 256
    CHECK(sums.find("2,17,255,16") != std::string::npos);  // mod 256

    // 8 bits x 13 micro-ops per bit step
    std::istringstream trace(slurp(dir / "trace.jsonl"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(trace, line)) ++lines;
    CHECK(lines == 8 * 13);

    // empty program leaves the latches untouched
    write_text(dir / "empty.uprog", "# nothing here\n");
    REQUIRE(run_cli("simulate empty.uprog --bitlines 8 --wordlines 4 "
                    "--out empty.json") == 0);
    const json dump = json::parse(slurp(dir / "empty.json"));
    CHECK(dump.at("executed_ops") == 0);
    CHECK(dump.at("s_latch") == "00000000");

    // trace length equals program length
    write_text(dir / "prog.uprog",
               "LOAD page=0\nCOPY_S2D d=1\nXOR_D1D2\nOUTPUT d=1\n");
    write_text(dir / "pages.txt", "10101010\n");
    REQUIRE(run_cli("simulate prog.uprog --bitlines 8 --wordlines 4 "
                    "--inputs pages.txt --trace ptrace.jsonl "
                    "--out prog.json") == 0);
    std::istringstream ptrace(slurp(dir / "ptrace.jsonl"));
    lines = 0;
    while (std::getline(ptrace, line)) ++lines;
    CHECK(lines == 4);
    const json pdump = json::parse(slurp(dir / "prog.json"));
    CHECK(pdump.at("outputs")[0] == "10101010");

    // parse errors carry the line number and a dedicated exit code
    write_text(dir / "bad.uprog", "READ wl=0\nBOGUS_OP\n");
    CHECK(run_cli("simulate bad.uprog") == 5);
}

TEST_CASE("bench is deterministic for a fixed seed") {
    const fs::path dir = work_dir();
    REQUIRE(run_cli("bench --workload dna --seed 5 --threads 2 "
                    "--out bench1.csv") == 0);
    REQUIRE(run_cli("bench --workload dna --seed 5 --threads 2 "
                    "--out bench2.csv") == 0);
    CHECK(slurp(dir / "bench1.csv") == slurp(dir / "bench2.csv"));

    const std::string csv = slurp(dir / "bench1.csv");
    std::istringstream in(csv);
    std::string line;
    std::size_t functional_rows = 0, analytic_rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("functional,", 0) == 0) ++functional_rows;
        if (line.rfind("analytic,", 0) == 0) ++analytic_rows;
    }
    CHECK(functional_rows == 5);      // one per query size 16..256
    CHECK(analytic_rows == 4 * 5);    // four systems x five workloads

    REQUIRE(run_cli("bench --workload dbsearch --seed 5 --threads 2 "
                    "--out bench_db.csv --json bench_db.json") == 0);
    const json j = json::parse(slurp(dir / "bench_db.json"));
    CHECK(j.at("rows").size() > 0);
    CHECK(j.at("model_assumptions").contains("CM-IFP"));
}
