#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "htpq/dyadic.hpp"
#include "htpq/poly.hpp"

namespace htpq {

enum class Tri { False, True, Unknown };

// A subring of the rationals given by which primes are inverted.
struct RingDescriptor {
    enum class Kind { InvertedFinite, InvertedCofinite, BitstringPrefix };

    Kind kind = Kind::InvertedFinite;
    std::set<std::uint64_t> primes; // inverted set (finite) or excluded set (cofinite)
    std::vector<bool> prefix;       // position i refers to nth_prime(i)

    // Validate primality of every listed prime; throw std::invalid_argument.
    static RingDescriptor inverted_finite(std::set<std::uint64_t> inverted);
    static RingDescriptor inverted_cofinite(std::set<std::uint64_t> excluded);
    static RingDescriptor bitstring_prefix(const std::string& bits); // '0'/'1' word

    bool fully_specified() const { return kind != Kind::BitstringPrefix; }
    // Is p inverted?  Unknown only for primes beyond a bitstring prefix.
    Tri inverts(std::uint64_t p) const;
};

// True iff every prime factor of r's denominator is inverted; Unknown when a
// factor lies beyond a bitstring prefix (and no factor is a known 0).
Tri ring_contains(const RingDescriptor& ring, const mpq_class& r);

// The 10-variable polynomial (X^2 + q_e Y^2 - 1)^2 + (Y(1+Z1^2+..+Z4^2) -
// (1+W1^2+..+W4^2))^2 with variables X=0, Y=1, Z=2..5, W=6..9.  Its rational
// zeros are exactly the points on x^2 + q_e y^2 = 1 with y > 0 such that all
// square-sum witnesses lie in the ring; solvability in R_W is equivalent to
// some q_e-appropriate prime being inverted in W.
IntPoly build_fe(std::uint64_t e);

// Solvability families with decidable verdicts.
struct FamilyPoly {
    enum class Kind { Fe, Ge, ProductCoded };

    Kind kind = Kind::Fe;
    std::uint64_t e = 0;
    std::vector<mpz_class> blocks; // squarefree positive integers

    static FamilyPoly fe(std::uint64_t e);
    static FamilyPoly ge(std::uint64_t e);
    // Validates each block squarefree and positive; throws std::invalid_argument.
    static FamilyPoly product_coded(std::vector<mpz_class> blocks);
};

enum class Verdict { In, Out, NoWitnessYet };

// Decides membership of the family polynomial in HTP(ring):
//   Fe(e): In iff some q_e-appropriate prime is inverted (cofinite rings are
//          always In); prefixes give NoWitnessYet when undetermined.
//   Ge(e): same, but the witness must avoid qe_semilocal_excluded(e).
//   ProductCoded: In iff some block's full support is inverted; a prefix is
//          Out only when every block is killed by a known 0.
Verdict family_verdict(const FamilyPoly& fp, const RingDescriptor& ring);

// {pet(j, t) : j + t <= e}: the primes not inverted in the semilocal ring Q_e.
// Sorted ascending; always (e+1)(e+2)/2 elements (pet values are distinct).
std::vector<std::uint64_t> qe_semilocal_excluded(std::uint64_t e);

enum class BoundaryClass { A, C, B };

// A = solvable in the ring; C = no extension of any finite part is solvable
// (empty for these families, whose witness sets are extendable prefixes);
// B = boundary: not solvable, but every finite prefix of the ring extends to
// a solvable ring.  Requires a fully specified ring (std::invalid_argument).
BoundaryClass boundary_classify(const FamilyPoly& fp, const RingDescriptor& ring);

struct MeasureTriple {
    Dyadic alpha, beta, gamma;
};

// Exact measures of {W : solvable}, boundary, and {W : hopeless}: Fe and Ge
// give (1, 0, 0); ProductCoded with pairwise disjoint supports gives
// alpha = 1 - prod(1 - 2^-n_k), beta = the product, gamma = 0 (blocks are an
// extendable prefix).  Overlapping supports throw std::invalid_argument.
MeasureTriple measure_triple(const FamilyPoly& fp);

// Assignment indexed by variable id.
using Assignment = std::vector<mpq_class>;

// Bounded brute-force zero search over the ring's elements with numerator and
// denominator magnitude <= height.  Enumeration: values ordered by height,
// then denominator, then |numerator|, positive before negative; tuples by
// maximal value index, lexicographic within.  The f_e family is recognized
// structurally and searched through its witness construction instead.  Ring
// must be InvertedFinite (std::invalid_argument); generic path refuses more
// than 6 variables or more than 2^26 tuples (CapExceeded).
std::optional<Assignment> search_solution(const IntPoly& f, const RingDescriptor& ring,
                                          std::uint64_t height);

// Same search over rationals whose denominators avoid the primes in A0.
std::optional<Assignment> solvable_excluding(const IntPoly& f,
                                             const std::set<std::uint64_t>& A0,
                                             std::uint64_t height);

// F(n) = G(n)^2 + X0^(2n), after shifting all variables up by one when any
// G(n) uses variable 0.  Injective in n (the exponents differ), and F(n) is
// solvable in a ring iff G(n) is (set X0 = 0).  Keys must be >= 1.
std::map<std::uint64_t, IntPoly> pad_injective(const std::map<std::uint64_t, IntPoly>& code_table);

} // namespace htpq
