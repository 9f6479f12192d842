#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "htpq/dyadic.hpp"

namespace htpq {

// Coded blocks of consecutive primes whose inversion chances multiply toward
// the target 1/2: with q_k = 1/2 - 2^-(k+2), exponent n_k is least such that
// P_k = P_{k-1} (1 - 2^-n_k) >= 1 - q_k, and x_k is the product of the next
// n_k primes.  The provable envelope 1 - q_k <= P_k < 1 - q_k + 2^-n_k is
// asserted for every block (minimality gives the upper bound); violating it
// raises InvariantViolation.
struct BlockSequence {
    std::vector<unsigned> n;
    std::vector<mpz_class> x;
    std::vector<Dyadic> partial; // P_k after each block
};
BlockSequence nk_sequence(std::size_t count);

// 1 - prod(1 - 2^-n_k): the chance that some block is fully inverted when the
// supports are disjoint of sizes n_k.
Dyadic alpha_closed_form(const std::vector<unsigned>& n);

// The same chance over the finite universe of the first `universe` primes,
// computed by two independent routes: direct enumeration of all subsets
// (universe <= 24) and inclusion-exclusion over the blocks (<= 20 blocks).
// When both routes run they must agree (InvariantViolation otherwise); when
// neither fits its cap, CapExceeded.  Every block must be squarefree with all
// prime factors inside the universe (std::invalid_argument).
Dyadic alpha_bruteforce(const std::vector<mpz_class>& blocks, unsigned universe);

// Stage bounds u_s in (0, 1) for the green-red construction.
class USeq {
  public:
    // u_s = U (1 - 2^-(s+1)), so u_0 = U/2 and u_s rises to U; 0 < U < 1.
    static USeq preset(const mpq_class& U);
    // Explicit values; reading past the end throws std::invalid_argument.
    static USeq custom(std::vector<mpq_class> vals);

    mpq_class at(std::uint64_t s) const;
    bool is_preset() const { return preset_; }
    const mpq_class& preset_u() const { return U_; }

  private:
    bool preset_ = false;
    mpq_class U_;
    std::vector<mpq_class> vals_;
};

// Requirement chips c(s), s >= 1.  Slots 2, 4, 8, ..., 256 deliver the first
// eight positive rationals below v (denominator then numerator ascending)
// once each; all remaining slots cycle through the rationals of [v, q') with
// q' = (v + (1 - u)) / 2 in round-robin blocks r1; r1 r2; r1 r2 r3; ...  Thus
// any threshold below v is undercut by at most eight chips, while every value
// in [v, q') recurs infinitely often.  Requires 0 < v, 0 < u, v + u < 1.
class ChipFunction {
  public:
    ChipFunction(const mpq_class& v, const mpq_class& u);

    mpq_class at(std::uint64_t s) const;
    const mpq_class& v() const { return v_; }
    const mpq_class& qprime() const { return qprime_; }

  private:
    void grow_ladder(std::size_t k) const;

    mpq_class v_, qprime_;
    std::vector<mpq_class> below_;          // the eight one-shot values
    mutable std::vector<mpq_class> ladder_; // rationals of [v, q'), on demand
    mutable unsigned long next_den_ = 2;
};

} // namespace htpq
