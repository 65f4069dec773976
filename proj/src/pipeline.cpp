#include "ciphermatch/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace ciphermatch::pipeline {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned max_threads) {
    if (max_threads == 0) max_threads = std::thread::hardware_concurrency();
    if (max_threads == 0) max_threads = 1;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(max_threads, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

PipelineResult run_search(const matcher::BitString& db_bits,
                          const matcher::BitString& query_bits,
                          const bfv::KeyPair& keys, const HeParams& params,
                          Rng& rng, const PipelineOptions& opts) {
    const matcher::EncryptedDatabase db =
        matcher::prepare_database(db_bits, keys.pk, params, rng, opts.encrypt_mode);
    const matcher::PreparedQuerySet qs =
        matcher::prepare_query(query_bits, keys.pk, params, rng, opts.encrypt_mode);
    const matcher::MatchPolynomialKit kit =
        matcher::make_match_kit(keys.pk, params, rng, opts.encrypt_mode);

    std::vector<std::vector<matcher::MatchIndex>> per_shift(qs.shifts.size());
    parallel_for(
        qs.shifts.size(),
        [&](std::size_t i) {
            const matcher::PreparedQuery& pq = qs.shifts[i];
            matcher::ShiftResults res;
            res.shift = pq.shift;
            if (opts.route == AdderRoute::Software) {
                res.cts = matcher::secure_search(db, pq);
            } else {
                res.cts.reserve(db.cts.size());
                for (const auto& ct : db.cts)
                    res.cts.push_back(ifp::hom_add_in_flash(ct, pq.ct, params));
            }
            per_shift[i] = matcher::generate_indices(
                {res}, kit, db.bit_len, qs.meta, &keys.sk, opts.index_mode,
                params);
        },
        opts.threads);

    PipelineResult out;
    out.db_ciphertexts = db.cts.size();
    out.shift_count = qs.shifts.size();
    for (auto& part : per_shift)
        out.indices.insert(out.indices.end(), part.begin(), part.end());
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

}  // namespace ciphermatch::pipeline
