#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace ciphermatch {

// Scheme parameters for the power-of-two moduli variant used throughout:
// ciphertext coefficients live in Z_{2^q_bits}, plaintext coefficients in
// Z_{2^t_bits}, polynomials in Z[X]/(X^n + 1). Because both moduli are
// powers of two the scaling factor delta = 2^(q_bits - t_bits) is exact.
struct HeParams {
    std::size_t n = 1024;
    std::uint32_t q_bits = 32;
    std::uint32_t t_bits = 16;
    double noise_stddev = 3.2;

    void validate() const {
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("HeParams: n must be a power of two >= 8");
        if (q_bits < 2 || q_bits > 63)
            throw std::invalid_argument("HeParams: q_bits must be in [2, 63]");
        if (t_bits < 1 || t_bits >= q_bits)
            throw std::invalid_argument("HeParams: need 1 <= t_bits < q_bits");
        if (noise_stddev <= 0.0)
            throw std::invalid_argument("HeParams: noise_stddev must be positive");
    }

    std::uint64_t coeff_modulus() const { return std::uint64_t{1} << q_bits; }
    std::uint64_t plain_modulus() const { return std::uint64_t{1} << t_bits; }
    std::uint64_t coeff_mask() const { return coeff_modulus() - 1; }
    std::uint64_t plain_mask() const { return plain_modulus() - 1; }

    // delta = q / t, the plaintext scaling factor.
    std::uint64_t scaling_factor() const {
        return std::uint64_t{1} << (q_bits - t_bits);
    }

    bool operator==(const HeParams& o) const {
        return n == o.n && q_bits == o.q_bits && t_bits == o.t_bits &&
               noise_stddev == o.noise_stddev;
    }
};

}  // namespace ciphermatch
