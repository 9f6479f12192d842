#include "htpq/rings.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "htpq/errors.hpp"
#include "htpq/injury.hpp"
#include "htpq/numtheory.hpp"

namespace htpq {

namespace {

void check_all_prime(const std::set<std::uint64_t>& ps) {
    for (std::uint64_t p : ps)
        if (!is_prime_u64(p))
            throw std::invalid_argument("not a prime: " + std::to_string(p));
}

} // namespace

RingDescriptor RingDescriptor::inverted_finite(std::set<std::uint64_t> inverted) {
    check_all_prime(inverted);
    RingDescriptor rd;
    rd.kind = Kind::InvertedFinite;
    rd.primes = std::move(inverted);
    return rd;
}

RingDescriptor RingDescriptor::inverted_cofinite(std::set<std::uint64_t> excluded) {
    check_all_prime(excluded);
    RingDescriptor rd;
    rd.kind = Kind::InvertedCofinite;
    rd.primes = std::move(excluded);
    return rd;
}

RingDescriptor RingDescriptor::bitstring_prefix(const std::string& bits) {
    RingDescriptor rd;
    rd.kind = Kind::BitstringPrefix;
    rd.prefix.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("prefix must be a word over {0,1}");
        rd.prefix.push_back(c == '1');
    }
    return rd;
}

Tri RingDescriptor::inverts(std::uint64_t p) const {
    if (!is_prime_u64(p)) throw std::invalid_argument("inverts expects a prime");
    switch (kind) {
    case Kind::InvertedFinite:
        return primes.count(p) ? Tri::True : Tri::False;
    case Kind::InvertedCofinite:
        return primes.count(p) ? Tri::False : Tri::True;
    case Kind::BitstringPrefix: {
        std::size_t idx = prime_index(p);
        if (idx < prefix.size()) return prefix[idx] ? Tri::True : Tri::False;
        return Tri::Unknown;
    }
    }
    throw std::logic_error("unreachable ring kind");
}

Tri ring_contains(const RingDescriptor& ring, const mpq_class& r) {
    mpq_class rc = r;
    if (rc.get_den() == 0) throw std::invalid_argument("ring_contains expects a rational");
    rc.canonicalize();
    Tri acc = Tri::True;
    for (std::uint64_t p : prime_support(rc.get_den())) {
        Tri t = ring.inverts(p);
        if (t == Tri::False) return Tri::False;
        if (t == Tri::Unknown) acc = Tri::Unknown;
    }
    return acc;
}

IntPoly build_fe(std::uint64_t e) {
    static std::map<std::uint64_t, IntPoly> memo;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = memo.find(e);
    if (it != memo.end()) return it->second;

    const IntPoly one = IntPoly::constant(1);
    const IntPoly X = IntPoly::variable(0);
    const IntPoly Y = IntPoly::variable(1);
    IntPoly conic = X * X + IntPoly::constant(mpz_class(static_cast<unsigned long>(odd_prime(e)))) * Y * Y - one;
    IntPoly zsum = one, wsum = one;
    for (unsigned i = 0; i < 4; ++i) {
        IntPoly Z = IntPoly::variable(2 + i);
        IntPoly W = IntPoly::variable(6 + i);
        zsum += Z * Z;
        wsum += W * W;
    }
    IntPoly positive = Y * zsum - wsum;
    IntPoly f = conic.pow(2) + positive.pow(2);
    memo.emplace(e, f);
    return f;
}

FamilyPoly FamilyPoly::fe(std::uint64_t e) {
    FamilyPoly fp;
    fp.kind = Kind::Fe;
    fp.e = e;
    return fp;
}

FamilyPoly FamilyPoly::ge(std::uint64_t e) {
    FamilyPoly fp;
    fp.kind = Kind::Ge;
    fp.e = e;
    return fp;
}

FamilyPoly FamilyPoly::product_coded(std::vector<mpz_class> blocks) {
    for (const mpz_class& b : blocks) {
        if (b < 1) throw std::invalid_argument("blocks must be positive");
        bool squarefree = true;
        prime_support(b, &squarefree);
        if (!squarefree) throw std::invalid_argument("blocks must be squarefree");
    }
    FamilyPoly fp;
    fp.kind = Kind::ProductCoded;
    fp.blocks = std::move(blocks);
    return fp;
}

Verdict family_verdict(const FamilyPoly& fp, const RingDescriptor& ring) {
    switch (fp.kind) {
    case FamilyPoly::Kind::Fe:
    case FamilyPoly::Kind::Ge: {
        const std::uint64_t q = odd_prime(fp.e);
        std::vector<std::uint64_t> excluded;
        if (fp.kind == FamilyPoly::Kind::Ge) excluded = qe_semilocal_excluded(fp.e);
        auto eligible = [&](std::uint64_t p) {
            return is_q_appropriate(p, q) &&
                   !std::binary_search(excluded.begin(), excluded.end(), p);
        };
        switch (ring.kind) {
        case RingDescriptor::Kind::InvertedFinite:
            for (std::uint64_t p : ring.primes)
                if (eligible(p)) return Verdict::In;
            return Verdict::Out;
        case RingDescriptor::Kind::InvertedCofinite:
            // Infinitely many eligible primes exist (a fixed residue class
            // mod 4q supplies them) while only finitely many are excluded
            // from the ring or from the semilocal set, so one is inverted.
            return Verdict::In;
        case RingDescriptor::Kind::BitstringPrefix:
            for (std::size_t i = 0; i < ring.prefix.size(); ++i)
                if (ring.prefix[i] && eligible(nth_prime(i))) return Verdict::In;
            // The undetermined tail may still invert an eligible prime.
            return Verdict::NoWitnessYet;
        }
        throw std::logic_error("unreachable ring kind");
    }
    case FamilyPoly::Kind::ProductCoded: {
        bool any_open = false;
        for (const mpz_class& b : fp.blocks) {
            bool all_inverted = true;
            bool killed = false;
            for (std::uint64_t p : prime_support(b)) {
                Tri t = ring.inverts(p);
                if (t != Tri::True) all_inverted = false;
                if (t == Tri::False) {
                    killed = true;
                    break;
                }
            }
            if (all_inverted) return Verdict::In;
            if (!killed) any_open = true;
        }
        return any_open ? Verdict::NoWitnessYet : Verdict::Out;
    }
    }
    throw std::logic_error("unreachable family kind");
}

std::vector<std::uint64_t> qe_semilocal_excluded(std::uint64_t e) {
    std::vector<std::uint64_t> out;
    out.reserve((e + 1) * (e + 2) / 2);
    for (std::uint64_t j = 0; j <= e; ++j)
        for (std::uint64_t t = 0; j + t <= e; ++t)
            out.push_back(pet(j, t));
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end())
        throw InvariantViolation("pet values in the exclusion set must be distinct");
    return out;
}

BoundaryClass boundary_classify(const FamilyPoly& fp, const RingDescriptor& ring) {
    if (!ring.fully_specified())
        throw std::invalid_argument("classification needs a fully specified ring");
    // The witness families are extendable: past any finite part of the ring
    // there is another eligible prime (or completable block), and inverting it
    // yields a solvable extension.  So the hopeless class is empty and every
    // unsolvable ring lies on the boundary.
    return family_verdict(fp, ring) == Verdict::In ? BoundaryClass::A : BoundaryClass::B;
}

MeasureTriple measure_triple(const FamilyPoly& fp) {
    MeasureTriple m;
    switch (fp.kind) {
    case FamilyPoly::Kind::Fe:
    case FamilyPoly::Kind::Ge:
        // Almost every ring inverts some eligible prime: the eligible set is
        // infinite and each prime is inverted independently with measure 1/2.
        m.alpha = Dyadic(1);
        return m;
    case FamilyPoly::Kind::ProductCoded: {
        std::set<std::uint64_t> seen;
        Dyadic beta(1);
        for (const mpz_class& b : fp.blocks) {
            auto sup = prime_support(b);
            for (std::uint64_t p : sup)
                if (!seen.insert(p).second)
                    throw std::invalid_argument("block supports must be pairwise disjoint");
            beta *= Dyadic(1) - Dyadic::half_pow(sup.size());
        }
        m.alpha = Dyadic(1) - beta;
        m.beta = beta;
        return m;
    }
    }
    throw std::logic_error("unreachable family kind");
}

} // namespace htpq
