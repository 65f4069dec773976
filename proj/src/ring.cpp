#include "ciphermatch/ring.hpp"

#include <cmath>
#include <stdexcept>

namespace ciphermatch::ring {

namespace {

void ensure_compatible(const Poly& a, const Poly& b) {
    if (a.coeffs.size() != b.coeffs.size())
        throw std::invalid_argument("ring: polynomial dimension mismatch");
    if (a.modulus_bits != b.modulus_bits)
        throw std::invalid_argument("ring: polynomial modulus mismatch");
}

}  // namespace

PolyQ zero_poly_q(const HeParams& params) {
    return Poly{params.q_bits, std::vector<std::uint64_t>(params.n, 0)};
}

PolyT zero_poly_t(const HeParams& params) {
    return Poly{params.t_bits, std::vector<std::uint64_t>(params.n, 0)};
}

PolyQ poly_add(const PolyQ& a, const PolyQ& b) {
    ensure_compatible(a, b);
    const std::uint64_t mask = a.mask();
    Poly r{a.modulus_bits, std::vector<std::uint64_t>(a.size())};
    for (std::size_t i = 0; i < a.size(); ++i)
        r.coeffs[i] = (a.coeffs[i] + b.coeffs[i]) & mask;
    return r;
}

PolyQ poly_neg(const PolyQ& a) {
    const std::uint64_t mask = a.mask();
    Poly r{a.modulus_bits, std::vector<std::uint64_t>(a.size())};
    for (std::size_t i = 0; i < a.size(); ++i)
        r.coeffs[i] = (0 - a.coeffs[i]) & mask;
    return r;
}

PolyQ poly_mul_negacyclic(const PolyQ& a, const PolyQ& b) {
    ensure_compatible(a, b);
    const std::size_t n = a.size();
    const std::uint64_t mask = a.mask();
    const std::uint64_t minus_one = mask;  // -1 mod 2^bits

    // Accumulate mod 2^64; 2^modulus_bits divides 2^64, so the final mask
    // yields the exact result.
    std::vector<std::uint64_t> acc(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t ai = a.coeffs[i];
        if (ai == 0) continue;
        const std::size_t head = n - i;  // products landing at i+j < n
        const std::uint64_t* bp = b.coeffs.data();
        std::uint64_t* lo = acc.data() + i;
        std::uint64_t* hi = acc.data();
        if (ai == 1) {
            for (std::size_t j = 0; j < head; ++j) lo[j] += bp[j];
            for (std::size_t j = head; j < n; ++j) hi[j - head] -= bp[j];
        } else if (ai == minus_one) {
            for (std::size_t j = 0; j < head; ++j) lo[j] -= bp[j];
            for (std::size_t j = head; j < n; ++j) hi[j - head] += bp[j];
        } else {
            for (std::size_t j = 0; j < head; ++j) lo[j] += ai * bp[j];
            for (std::size_t j = head; j < n; ++j) hi[j - head] -= ai * bp[j];
        }
    }
    Poly r{a.modulus_bits, std::move(acc)};
    for (auto& c : r.coeffs) c &= mask;
    return r;
}

PolyQ sample_uniform(const HeParams& params, Rng& rng) {
    Poly r{params.q_bits, std::vector<std::uint64_t>(params.n)};
    const std::uint64_t mask = params.coeff_mask();
    for (auto& c : r.coeffs) c = rng.next_u64() & mask;
    return r;
}

PolyQ sample_ternary(const HeParams& params, Rng& rng) {
    Poly r{params.q_bits, std::vector<std::uint64_t>(params.n)};
    const std::uint64_t mask = params.coeff_mask();
    for (auto& c : r.coeffs) {
        const std::uint64_t v = rng.next_below(3);  // 0, 1, 2
        c = (v == 2) ? mask : v;                    // 2 -> -1 mod 2^q_bits
    }
    return r;
}

PolyQ sample_error(const HeParams& params, Rng& rng) {
    Poly r{params.q_bits, std::vector<std::uint64_t>(params.n)};
    const std::uint64_t mask = params.coeff_mask();
    for (auto& c : r.coeffs) {
        const double g = rng.next_gaussian() * params.noise_stddev;
        const auto v = static_cast<std::int64_t>(std::llround(g));
        c = static_cast<std::uint64_t>(v) & mask;
    }
    return r;
}

std::uint64_t centered_magnitude(std::uint64_t v, std::uint32_t modulus_bits) {
    const std::uint64_t m = std::uint64_t{1} << modulus_bits;
    v &= m - 1;
    return v <= m / 2 ? v : m - v;
}

}  // namespace ciphermatch::ring
