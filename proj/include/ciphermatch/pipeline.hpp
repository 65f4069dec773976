#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ciphermatch/ifp_sim.hpp"
#include "ciphermatch/matcher.hpp"

namespace ciphermatch::pipeline {

// Runs fn(i) for i in [0, count) across up to max_threads workers.
// fn must be safe to call concurrently for distinct i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned max_threads = 0);

enum class AdderRoute {
    Software,  // bfv::hom_add
    InFlash,   // ifp::hom_add_in_flash (bit-serial plane simulation)
};

struct PipelineOptions {
    bfv::EncryptMode encrypt_mode = bfv::EncryptMode::Standard;
    matcher::IndexMode index_mode = matcher::IndexMode::ClientDecrypt;
    AdderRoute route = AdderRoute::Software;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct PipelineResult {
    std::vector<matcher::MatchIndex> indices;
    std::size_t db_ciphertexts = 0;
    std::size_t shift_count = 0;
};

// Full search flow: prepare database, prepare query, hom-add per
// (ciphertext, shift) pair, generate indices. Deterministic for a fixed
// seed-derived rng regardless of thread count.
PipelineResult run_search(const matcher::BitString& db_bits,
                          const matcher::BitString& query_bits,
                          const bfv::KeyPair& keys, const HeParams& params,
                          Rng& rng, const PipelineOptions& opts = {});

}  // namespace ciphermatch::pipeline
