#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace htpq {

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

// nth_prime(0) == 2.  Grows an internal sieve on demand; thread-safe.
std::uint64_t nth_prime(std::size_t i);

// odd_prime(0) == 3; odd_prime(e) is the e-th odd prime, used as q_e throughout.
std::uint64_t odd_prime(std::size_t e);

// Inverse of nth_prime.  Throws std::invalid_argument if p is not prime.
std::size_t prime_index(std::uint64_t p);

// Legendre symbol (a|p) for odd prime p, via GMP.  Throws on invalid p.
int legendre(const mpz_class& a, std::uint64_t p);

// Independent oracle: Euler's criterion by 64-bit modular exponentiation.
// Used as the second evaluation path and in tests; no GMP involvement.
int legendre_euler(std::uint64_t a, std::uint64_t p);

// Slow residue-scan oracle for tests: counts x with x^2 = a (mod p).
int legendre_bruteforce(std::int64_t a, std::uint64_t p);

// p is q-appropriate iff p is an odd prime, p != q, and (-q|p) = 1.
// Direct Legendre evaluation path.
bool is_q_appropriate(std::uint64_t p, std::uint64_t q);

// Equivalent evaluation by quadratic reciprocity: decides via p mod 4 and the
// residue class of p mod q.  Must agree with is_q_appropriate everywhere.
bool is_q_appropriate_criteria(std::uint64_t p, std::uint64_t q);

// First `count` primes p (ascending) with p q_e-appropriate and p not
// q_i-appropriate for every i in avoid.  Indices, not primes, are passed.
// Throws CapExceeded if the scan would pass scan_cap.
std::vector<std::uint64_t> find_appropriate_primes(std::uint64_t e,
                                                   const std::vector<std::uint64_t>& avoid,
                                                   std::size_t count,
                                                   std::uint64_t scan_cap = 100'000'000ull);

// Ascending prime support of n >= 1 by trial division; optionally reports
// whether n is squarefree.  Throws CapExceeded if a residual cofactor does
// not fit 64 bits, std::invalid_argument when n < 1.
std::vector<std::uint64_t> prime_support(const mpz_class& n, bool* squarefree = nullptr);

// Residue class n mod m whose prime members all satisfy the
// find_appropriate_primes(e, avoid, ...) predicate; existence by Dirichlet.
struct CrtWitness {
    mpz_class n;
    mpz_class m;
};
CrtWitness crt_residue_witness(std::uint64_t e, const std::vector<std::uint64_t>& avoid);

// Primitive solution of a^2 + q b^2 = p^(2k) with p not dividing b, minimal k
// then minimal b.  Returns nullopt when p is not q-appropriate (no k works).
struct ConicSolution {
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    unsigned k = 0;
    mpz_class a;
    mpz_class b;
};
std::optional<ConicSolution> conic_primitive_solution(std::uint64_t p, std::uint64_t q,
                                                      unsigned k_max = 8);

// (x, y) = (a/p^k, b/p^k): a point on x^2 + q y^2 = 1 with y > 0 whose only
// denominator prime is p.  Throws InvariantViolation if the identity fails.
std::pair<mpq_class, mpq_class> solution_in_localization(const ConicSolution& s);

// Lagrange decomposition n = a^2 + b^2 + c^2 + d^2, a >= b >= c >= d >= 0,
// chosen greedily largest-first (ties resolved by backtracking).
std::array<mpz_class, 4> four_square_decomposition(const mpz_class& n);

// Witness that y > 0 in the localization: least s >= 0 with y(1+s) >= 1,
// z with sum z_i^2 = s, and w with sum w_i^2 = y(1+s) - 1.  Every prime of
// den(y) must divide `denominator`; the w_i keep that property.
struct PositivityWitness {
    mpz_class s;
    std::array<mpq_class, 4> z;
    std::array<mpq_class, 4> w;
};
PositivityWitness positivity_witness(const mpq_class& y, const mpz_class& denominator);

} // namespace htpq
