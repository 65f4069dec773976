#pragma once

#include <cstdint>

#include "ciphermatch/params.hpp"
#include "ciphermatch/ring.hpp"
#include "ciphermatch/rng.hpp"

namespace ciphermatch::bfv {

struct SecretKey {
    ring::PolyQ s;  // ternary: coefficients in {0, 1, q-1}
};

struct PublicKey {
    ring::PolyQ pk0;  // -(pk1*s + e) mod (q, X^n + 1)
    ring::PolyQ pk1;
};

struct KeyPair {
    SecretKey sk;
    PublicKey pk;
};

struct Ciphertext {
    ring::PolyQ c0;
    ring::PolyQ c1;
    std::uint32_t level = 0;  // homomorphic additions applied (metadata)
};

enum class EncryptMode {
    // c0 = pk0*u + e0 + delta*m, c1 = pk1*u + e1 with fresh ternary u.
    Standard,
    // c0 = pk0 + e0 + delta*m, c1 = pk1 + e1, with e0/e1 derived
    // deterministically from the public key. Every encryption of m under a
    // given key yields the same ciphertext, which is what makes server-side
    // ciphertext comparison meaningful -- and is also why this mode is not
    // semantically secure. Intended for fidelity experiments only.
    PaperLiteral,
};

KeyPair keygen(const HeParams& params, Rng& rng);

Ciphertext encrypt(const ring::PolyT& m, const PublicKey& pk,
                   const HeParams& params, Rng& rng,
                   EncryptMode mode = EncryptMode::Standard);

// m[i] = round((t/q) * centered(c0 + c1*s)[i]) mod 2^t_bits
ring::PolyT decrypt(const Ciphertext& ct, const SecretKey& sk,
                    const HeParams& params);

Ciphertext hom_add(const Ciphertext& a, const Ciphertext& b);
Ciphertext hom_neg(const Ciphertext& a);
Ciphertext hom_sub(const Ciphertext& a, const Ciphertext& b);

// Remaining margin before noise corrupts decryption:
// log2(delta/2) - log2(max centered noise magnitude), in bits.
// Positive guarantees correct decryption; capped at log2(delta/2) for
// noiseless ciphertexts.
double noise_budget_bits(const Ciphertext& ct, const SecretKey& sk,
                         const HeParams& params);

// Invocation counters for the homomorphic operations. The scheme exposes no
// multiplication or rotation at all, so those two stay zero by construction;
// they are tracked anyway so the search path can prove it is addition-only.
struct OpCounts {
    std::uint64_t additions = 0;
    std::uint64_t subtractions = 0;
    std::uint64_t negations = 0;
    std::uint64_t multiplications = 0;
    std::uint64_t rotations = 0;
};

OpCounts op_counts();
void reset_op_counts();

}  // namespace ciphermatch::bfv
