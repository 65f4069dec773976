#pragma once

#include <cstdint>
#include <vector>

#include "ciphermatch/params.hpp"
#include "ciphermatch/rng.hpp"

namespace ciphermatch::ring {

// Polynomial over Z_{2^modulus_bits}[X]/(X^n + 1). The same representation
// backs both the ciphertext space (modulus_bits = q_bits) and the plaintext
// space (modulus_bits = t_bits); the two aliases below keep call sites typed.
struct Poly {
    std::uint32_t modulus_bits = 0;
    std::vector<std::uint64_t> coeffs;

    std::size_t size() const { return coeffs.size(); }
    std::uint64_t mask() const { return (std::uint64_t{1} << modulus_bits) - 1; }

    bool operator==(const Poly& o) const {
        return modulus_bits == o.modulus_bits && coeffs == o.coeffs;
    }
};

using PolyQ = Poly;
using PolyT = Poly;

PolyQ zero_poly_q(const HeParams& params);
PolyT zero_poly_t(const HeParams& params);

// result[i] = (a[i] + b[i]) mod 2^q_bits
PolyQ poly_add(const PolyQ& a, const PolyQ& b);

// result[i] = (2^q_bits - a[i]) mod 2^q_bits
PolyQ poly_neg(const PolyQ& a);

// Schoolbook product reduced by X^n == -1, coefficients mod 2^q_bits.
// Rows whose coefficient is 0, 1 or -1 degenerate to skips/adds/subs, which
// makes products against ternary polynomials (the only hot case) cheap.
PolyQ poly_mul_negacyclic(const PolyQ& a, const PolyQ& b);

// Uniform over Z_{2^q_bits}.
PolyQ sample_uniform(const HeParams& params, Rng& rng);

// Uniform over {-1, 0, 1} embedded in Z_{2^q_bits}.
PolyQ sample_ternary(const HeParams& params, Rng& rng);

// Centered discrete Gaussian (rounded continuous Gaussian) with
// params.noise_stddev, reduced mod 2^q_bits.
PolyQ sample_error(const HeParams& params, Rng& rng);

// |centered(v)| for a residue v mod 2^bits, i.e. min(v, 2^bits - v).
std::uint64_t centered_magnitude(std::uint64_t v, std::uint32_t modulus_bits);

}  // namespace ciphermatch::ring
