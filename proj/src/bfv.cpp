#include "ciphermatch/bfv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace ciphermatch::bfv {

namespace {

std::atomic<std::uint64_t> g_additions{0};
std::atomic<std::uint64_t> g_subtractions{0};
std::atomic<std::uint64_t> g_negations{0};

// delta * m lifted into the ciphertext space.
ring::PolyQ scale_plaintext(const ring::PolyT& m, const HeParams& params) {
    if (m.coeffs.size() != params.n || m.modulus_bits != params.t_bits)
        throw std::invalid_argument("bfv: plaintext does not match params");
    const std::uint64_t delta = params.scaling_factor();
    ring::PolyQ r{params.q_bits, std::vector<std::uint64_t>(params.n)};
    for (std::size_t i = 0; i < params.n; ++i)
        r.coeffs[i] = (m.coeffs[i] * delta) & params.coeff_mask();
    return r;
}

std::uint64_t fnv1a64(const std::vector<std::uint64_t>& v, std::uint64_t h) {
    for (std::uint64_t x : v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (x >> (8 * b)) & 0xff;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

// Per-key seed for the deterministic errors of EncryptMode::PaperLiteral.
std::uint64_t key_error_seed(const PublicKey& pk) {
    std::uint64_t h = fnv1a64(pk.pk0.coeffs, 0xcbf29ce484222325ull);
    return fnv1a64(pk.pk1.coeffs, h);
}

}  // namespace

KeyPair keygen(const HeParams& params, Rng& rng) {
    params.validate();
    const ring::PolyQ s = ring::sample_ternary(params, rng);
    const ring::PolyQ pk1 = ring::sample_uniform(params, rng);

    // Redraw e until pk0 + pk1*s is within 6 sigma everywhere, so the stated
    // public-key bound holds unconditionally (expected iterations: ~1).
    const auto bound = static_cast<std::uint64_t>(6.0 * params.noise_stddev);
    for (;;) {
        const ring::PolyQ e = ring::sample_error(params, rng);
        bool ok = true;
        for (std::uint64_t c : e.coeffs) {
            if (ring::centered_magnitude(c, params.q_bits) > bound) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        ring::PolyQ pk0 =
            ring::poly_neg(ring::poly_add(ring::poly_mul_negacyclic(s, pk1), e));
        return KeyPair{SecretKey{s}, PublicKey{std::move(pk0), pk1}};
    }
}

Ciphertext encrypt(const ring::PolyT& m, const PublicKey& pk,
                   const HeParams& params, Rng& rng, EncryptMode mode) {
    const ring::PolyQ dm = scale_plaintext(m, params);
    if (mode == EncryptMode::PaperLiteral) {
        Rng key_rng(key_error_seed(pk));
        const ring::PolyQ e0 = ring::sample_error(params, key_rng);
        const ring::PolyQ e1 = ring::sample_error(params, key_rng);
        return Ciphertext{ring::poly_add(ring::poly_add(pk.pk0, e0), dm),
                          ring::poly_add(pk.pk1, e1), 0};
    }
    const ring::PolyQ u = ring::sample_ternary(params, rng);
    const ring::PolyQ e0 = ring::sample_error(params, rng);
    const ring::PolyQ e1 = ring::sample_error(params, rng);
    ring::PolyQ c0 = ring::poly_add(
        ring::poly_add(ring::poly_mul_negacyclic(u, pk.pk0), e0), dm);
    ring::PolyQ c1 =
        ring::poly_add(ring::poly_mul_negacyclic(u, pk.pk1), e1);
    return Ciphertext{std::move(c0), std::move(c1), 0};
}

ring::PolyT decrypt(const Ciphertext& ct, const SecretKey& sk,
                    const HeParams& params) {
    const ring::PolyQ w =
        ring::poly_add(ct.c0, ring::poly_mul_negacyclic(sk.s, ct.c1));
    const std::uint32_t shift = params.q_bits - params.t_bits;
    const std::uint64_t half_delta = std::uint64_t{1} << (shift - 1);
    ring::PolyT m{params.t_bits, std::vector<std::uint64_t>(params.n)};
    for (std::size_t i = 0; i < params.n; ++i)
        m.coeffs[i] = (((w.coeffs[i] + half_delta) & params.coeff_mask()) >> shift) &
                      params.plain_mask();
    return m;
}

Ciphertext hom_add(const Ciphertext& a, const Ciphertext& b) {
    g_additions.fetch_add(1, std::memory_order_relaxed);
    return Ciphertext{ring::poly_add(a.c0, b.c0), ring::poly_add(a.c1, b.c1),
                      std::max(a.level, b.level) + 1};
}

Ciphertext hom_neg(const Ciphertext& a) {
    g_negations.fetch_add(1, std::memory_order_relaxed);
    return Ciphertext{ring::poly_neg(a.c0), ring::poly_neg(a.c1), a.level};
}

Ciphertext hom_sub(const Ciphertext& a, const Ciphertext& b) {
    g_subtractions.fetch_add(1, std::memory_order_relaxed);
    return Ciphertext{ring::poly_add(a.c0, ring::poly_neg(b.c0)),
                      ring::poly_add(a.c1, ring::poly_neg(b.c1)),
                      std::max(a.level, b.level) + 1};
}

double noise_budget_bits(const Ciphertext& ct, const SecretKey& sk,
                         const HeParams& params) {
    const ring::PolyQ w =
        ring::poly_add(ct.c0, ring::poly_mul_negacyclic(sk.s, ct.c1));
    const ring::PolyT m = decrypt(ct, sk, params);
    const std::uint64_t delta = params.scaling_factor();
    std::uint64_t max_mag = 0;
    for (std::size_t i = 0; i < params.n; ++i) {
        const std::uint64_t noise =
            (w.coeffs[i] - m.coeffs[i] * delta) & params.coeff_mask();
        max_mag = std::max(max_mag, ring::centered_magnitude(noise, params.q_bits));
    }
    const double cap = static_cast<double>(params.q_bits - params.t_bits - 1);
    if (max_mag <= 1) return cap;
    return cap - std::log2(static_cast<double>(max_mag));
}

OpCounts op_counts() {
    OpCounts c;
    c.additions = g_additions.load(std::memory_order_relaxed);
    c.subtractions = g_subtractions.load(std::memory_order_relaxed);
    c.negations = g_negations.load(std::memory_order_relaxed);
    return c;
}

void reset_op_counts() {
    g_additions.store(0, std::memory_order_relaxed);
    g_subtractions.store(0, std::memory_order_relaxed);
    g_negations.store(0, std::memory_order_relaxed);
}

}  // namespace ciphermatch::bfv
