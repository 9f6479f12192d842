#include "htpq/boundary.hpp"

#include <numeric>
#include <stdexcept>

#include "htpq/errors.hpp"
#include "htpq/numtheory.hpp"

namespace htpq {

namespace {

// Least integer >= q.
mpz_class ceil_of(const mpq_class& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

} // namespace

BlockSequence nk_sequence(std::size_t count) {
    BlockSequence bs;
    Dyadic P(1L);
    const Dyadic one(1L);
    std::size_t prime_idx = 0;
    for (std::size_t k = 0; k < count; ++k) {
        // 1 - q_k = 1/2 + 2^-(k+2).
        const Dyadic target = Dyadic::half_pow(1) + Dyadic::half_pow(k + 2);
        unsigned nk = 1;
        while (!(P * (one - Dyadic::half_pow(nk)) >= target)) {
            if (++nk > 64) throw InvariantViolation("block exponent runaway");
        }
        P *= one - Dyadic::half_pow(nk);
        if (!(P >= target && P < target + Dyadic::half_pow(nk)))
            throw InvariantViolation("block envelope failed");
        mpz_class xk = 1;
        for (unsigned i = 0; i < nk; ++i)
            xk *= static_cast<unsigned long>(nth_prime(prime_idx++));
        bs.n.push_back(nk);
        bs.x.push_back(xk);
        bs.partial.push_back(P);
    }
    return bs;
}

Dyadic alpha_closed_form(const std::vector<unsigned>& n) {
    Dyadic prod(1L);
    for (unsigned nk : n) prod *= Dyadic(1L) - Dyadic::half_pow(nk);
    return Dyadic(1L) - prod;
}

Dyadic alpha_bruteforce(const std::vector<mpz_class>& blocks, unsigned universe) {
    if (universe > 63) throw CapExceeded("universe is limited to 63 primes");
    std::vector<std::uint64_t> masks;
    for (const mpz_class& b : blocks) {
        bool squarefree = true;
        std::uint64_t mask = 0;
        for (std::uint64_t p : prime_support(b, &squarefree)) {
            bool inside = false;
            for (unsigned i = 0; i < universe; ++i) {
                if (nth_prime(i) == p) {
                    mask |= std::uint64_t(1) << i;
                    inside = true;
                    break;
                }
            }
            if (!inside) throw std::invalid_argument("block factor outside the universe");
        }
        if (!squarefree) throw std::invalid_argument("blocks must be squarefree");
        masks.push_back(mask);
    }

    const bool enum_ok = universe <= 24;
    const bool ie_ok = masks.size() <= 20;
    if (!enum_ok && !ie_ok) throw CapExceeded("both brute-force routes exceed their caps");

    Dyadic by_enum, by_ie;
    if (enum_ok) {
        // Mark each mask, then spread to supersets one bit at a time.
        std::vector<char> good(std::size_t(1) << universe, 0);
        for (std::uint64_t m : masks) good[m] = 1;
        for (unsigned b = 0; b < universe; ++b) {
            const std::uint64_t bit = std::uint64_t(1) << b;
            for (std::uint64_t w = 0; w < good.size(); ++w)
                if (!(w & bit) && good[w]) good[w | bit] = 1;
        }
        unsigned long count = 0;
        for (char g : good) count += g;
        by_enum = Dyadic(mpz_class(count), universe);
    }
    if (ie_ok) {
        for (std::uint64_t sub = 1; sub < (std::uint64_t(1) << masks.size()); ++sub) {
            std::uint64_t joint = 0;
            unsigned parity = 0;
            for (std::size_t i = 0; i < masks.size(); ++i)
                if (sub & (std::uint64_t(1) << i)) {
                    joint |= masks[i];
                    ++parity;
                }
            Dyadic term = Dyadic::half_pow(static_cast<unsigned long>(__builtin_popcountll(joint)));
            if (parity % 2 == 0) term = -term;
            by_ie += term;
        }
    }
    if (enum_ok && ie_ok && by_enum != by_ie)
        throw InvariantViolation("brute-force routes disagree");
    return enum_ok ? by_enum : by_ie;
}

USeq USeq::preset(const mpq_class& U) {
    if (U <= 0 || U >= 1) throw std::invalid_argument("preset bound needs 0 < U < 1");
    USeq u;
    u.preset_ = true;
    u.U_ = U;
    u.U_.canonicalize();
    return u;
}

USeq USeq::custom(std::vector<mpq_class> vals) {
    for (const mpq_class& v : vals)
        if (v <= 0 || v >= 1) throw std::invalid_argument("stage bounds must be in (0, 1)");
    USeq u;
    u.vals_ = std::move(vals);
    return u;
}

mpq_class USeq::at(std::uint64_t s) const {
    if (preset_) {
        // U (1 - 2^-(s+1)).
        mpz_class denom = 1;
        mpz_mul_2exp(denom.get_mpz_t(), denom.get_mpz_t(), s + 1);
        mpq_class scale(denom - 1, denom);
        scale.canonicalize();
        return U_ * scale;
    }
    if (s >= vals_.size()) throw std::invalid_argument("stage bound out of range");
    return vals_[s];
}

ChipFunction::ChipFunction(const mpq_class& v, const mpq_class& u) : v_(v) {
    v_.canonicalize();
    mpq_class uu = u;
    uu.canonicalize();
    if (v_ <= 0 || uu <= 0 || v_ + uu >= 1)
        throw std::invalid_argument("chip function needs 0 < v, 0 < u, v + u < 1");
    qprime_ = (v_ + (1 - uu)) / 2;
    qprime_.canonicalize();

    // First eight positive rationals below v, denominator then numerator.
    for (unsigned long den = 2; below_.size() < 8; ++den) {
        mpz_class top = ceil_of(v_ * mpq_class(den)); // num < v*den, i.e. num <= top-1
        for (mpz_class num = 1; num < top; ++num) {
            if (gcd(num, mpz_class(den)) != 1) continue;
            mpq_class w(num, mpz_class(den));
            w.canonicalize();
            below_.push_back(w);
            if (below_.size() == 8) break;
        }
    }
}

void ChipFunction::grow_ladder(std::size_t k) const {
    while (ladder_.size() <= k) {
        const unsigned long den = next_den_++;
        mpz_class lo = ceil_of(v_ * mpq_class(den));       // num/den >= v
        mpz_class hi = ceil_of(qprime_ * mpq_class(den));  // num/den < q': num <= hi-1
        for (mpz_class num = lo; num < hi; ++num) {
            if (num <= 0 || gcd(num, mpz_class(den)) != 1) continue;
            mpq_class r(num, mpz_class(den));
            r.canonicalize();
            ladder_.push_back(r);
        }
    }
}

mpq_class ChipFunction::at(std::uint64_t s) const {
    if (s == 0) throw std::invalid_argument("chips start at stage 1");
    for (unsigned long j = 1; j <= 8; ++j)
        if (s == (std::uint64_t(1) << j)) return below_[j - 1];
    // Index into the round-robin stream, skipping the one-shot slots.
    std::uint64_t skipped = 0;
    for (unsigned long j = 1; j <= 8; ++j)
        if ((std::uint64_t(1) << j) < s) ++skipped;
    std::uint64_t g = s - 1 - skipped;
    std::uint64_t block = 1;
    while (g >= block) g -= block++;
    grow_ladder(g);
    return ladder_[g];
}

} // namespace htpq
