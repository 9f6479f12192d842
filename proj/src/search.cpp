#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "htpq/errors.hpp"
#include "htpq/numtheory.hpp"
#include "htpq/rings.hpp"

namespace htpq {

namespace {

constexpr std::uint64_t kHeightCap = 1'000'000;
constexpr unsigned long kTupleCap = 1ul << 26;

mpz_class height_of(const mpq_class& v) {
    mpz_class n = abs(v.get_num());
    mpz_class d = v.get_den();
    return n >= d ? n : d;
}

// All products of powers of `primes` that stay <= limit, ascending.
std::vector<std::uint64_t> denominators_from(const std::set<std::uint64_t>& primes,
                                             std::uint64_t limit) {
    std::vector<std::uint64_t> dens{1};
    for (std::uint64_t p : primes) {
        std::size_t n = dens.size();
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t d = dens[i];
            while (d <= limit / p) {
                d *= p;
                dens.push_back(d);
            }
        }
    }
    std::sort(dens.begin(), dens.end());
    return dens;
}

bool support_avoids(std::uint64_t d, const std::set<std::uint64_t>& banned) {
    for (std::uint64_t p = 2; p * p <= d; ++p) {
        if (d % p) continue;
        if (banned.count(p)) return false;
        while (d % p == 0) d /= p;
    }
    return d == 1 || !banned.count(d);
}

// Candidate values ordered by height (max of |numerator| and denominator),
// then denominator, then |numerator|, positive before negative.
std::vector<mpq_class> build_values(const std::vector<std::uint64_t>& dens,
                                    std::uint64_t height) {
    std::vector<mpq_class> vals;
    for (std::uint64_t h = 1; h <= height; ++h) {
        for (std::uint64_t d : dens) {
            if (d > h) break;
            if (d < h) {
                if (std::gcd(h, d) == 1) {
                    vals.emplace_back(static_cast<long>(h), static_cast<unsigned long>(d));
                    vals.emplace_back(-static_cast<long>(h), static_cast<unsigned long>(d));
                }
            } else {
                for (std::uint64_t n = (d == 1 ? 0 : 1); n <= h; ++n) {
                    if (n == 0) {
                        vals.emplace_back(0);
                        continue;
                    }
                    if (std::gcd(n, d) != 1) continue;
                    vals.emplace_back(static_cast<long>(n), static_cast<unsigned long>(d));
                    vals.emplace_back(-static_cast<long>(n), static_cast<unsigned long>(d));
                }
            }
        }
        if (vals.size() > kTupleCap) throw CapExceeded("value set passed the search cap");
    }
    return vals;
}

// Tuples bucketed by their maximal value index, lexicographic inside a bucket,
// so small combinations come first and the order is deterministic.
std::optional<Assignment> generic_search(const IntPoly& f, const std::vector<mpq_class>& vals) {
    const std::set<unsigned> used = f.used_vars();
    const std::size_t n = used.size();
    if (n == 0) {
        if (f.eval({}) == 0) return Assignment{};
        return std::nullopt;
    }
    if (n > 6) throw CapExceeded("generic search handles at most 6 variables");
    mpz_class total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= static_cast<unsigned long>(vals.size());
    if (total > kTupleCap) throw CapExceeded("assignment count passed the search cap");

    const std::vector<unsigned> uvec(used.begin(), used.end());
    Assignment point(uvec.back() + 1, mpq_class(0));
    std::vector<std::size_t> idx(n, 0);

    for (std::size_t bucket = 0; bucket < vals.size(); ++bucket) {
        std::fill(idx.begin(), idx.end(), 0);
        for (;;) {
            if (std::find(idx.begin(), idx.end(), bucket) != idx.end()) {
                for (std::size_t i = 0; i < n; ++i) point[uvec[i]] = vals[idx[i]];
                if (f.eval(point) == 0) return point;
            }
            std::size_t i = n;
            while (i > 0 && idx[i - 1] == bucket) idx[--i] = 0;
            if (i == 0) break;
            ++idx[i - 1];
        }
    }
    return std::nullopt;
}

// Is f one of the conic family polynomials, structurally?
std::optional<std::uint64_t> fe_index_of(const IntPoly& f) {
    for (std::uint64_t e = 0; e < 64; ++e)
        if (f == build_fe(e)) return e;
    return std::nullopt;
}

// The family polynomial vanishes at a point built from any inverted
// appropriate prime: a conic solution gives (x, y), a positivity witness
// supplies the square sums.  Candidates come in ascending, so the first
// witness inside the height bound wins.
std::optional<Assignment> structured_fe_search(std::uint64_t e,
                                               const std::vector<std::uint64_t>& candidates,
                                               std::uint64_t height) {
    const std::uint64_t q = odd_prime(e);
    const IntPoly f = build_fe(e);
    const mpz_class bound(static_cast<unsigned long>(height));
    for (std::uint64_t p : candidates) {
        if (!is_q_appropriate(p, q)) continue;
        auto conic = conic_primitive_solution(p, q);
        if (!conic) continue;
        auto [x, y] = solution_in_localization(*conic);
        PositivityWitness w = positivity_witness(y, mpz_class(static_cast<unsigned long>(p)));
        Assignment point(10, mpq_class(0));
        point[0] = x;
        point[1] = y;
        for (int i = 0; i < 4; ++i) point[2 + i] = w.z[i];
        for (int i = 0; i < 4; ++i) point[6 + i] = w.w[i];
        bool within = true;
        for (const auto& c : point) {
            if (height_of(c) > bound) {
                within = false;
                break;
            }
        }
        if (!within) continue;
        if (f.eval(point) != 0)
            throw InvariantViolation("constructed witness must solve the family polynomial");
        return point;
    }
    return std::nullopt;
}

} // namespace

std::optional<Assignment> search_solution(const IntPoly& f, const RingDescriptor& ring,
                                          std::uint64_t height) {
    if (ring.kind != RingDescriptor::Kind::InvertedFinite)
        throw std::invalid_argument("search needs an explicit finite inverted set");
    if (height == 0) throw std::invalid_argument("height must be >= 1");

    if (auto e = fe_index_of(f)) {
        std::vector<std::uint64_t> cands(ring.primes.begin(), ring.primes.end());
        return structured_fe_search(*e, cands, height);
    }
    if (height > kHeightCap) throw CapExceeded("height passed the search cap");
    return generic_search(f, build_values(denominators_from(ring.primes, height), height));
}

std::optional<Assignment> solvable_excluding(const IntPoly& f,
                                             const std::set<std::uint64_t>& A0,
                                             std::uint64_t height) {
    for (std::uint64_t p : A0)
        if (!is_prime_u64(p))
            throw std::invalid_argument("excluded set must consist of primes");
    if (height == 0) throw std::invalid_argument("height must be >= 1");
    if (height > kHeightCap) throw CapExceeded("height passed the search cap");

    if (auto e = fe_index_of(f)) {
        // Any witness prime p shows up in the denominators, so p <= height.
        std::vector<std::uint64_t> cands;
        for (std::size_t i = 0;; ++i) {
            std::uint64_t p = nth_prime(i);
            if (p > height) break;
            if (!A0.count(p)) cands.push_back(p);
        }
        return structured_fe_search(*e, cands, height);
    }
    std::vector<std::uint64_t> dens;
    for (std::uint64_t d = 1; d <= height; ++d)
        if (support_avoids(d, A0)) dens.push_back(d);
    return generic_search(f, build_values(dens, height));
}

std::map<std::uint64_t, IntPoly> pad_injective(const std::map<std::uint64_t, IntPoly>& code_table) {
    bool uses0 = false;
    for (const auto& [n, g] : code_table) {
        if (n < 1) throw std::invalid_argument("pad keys must be >= 1");
        if (n > (1u << 20)) throw CapExceeded("pad key passed the exponent cap");
        if (g.used_vars().count(0)) uses0 = true;
    }
    std::map<std::uint64_t, IntPoly> out;
    const IntPoly x0 = IntPoly::variable(0);
    for (const auto& [n, g] : code_table) {
        const IntPoly gg = uses0 ? g.shift_vars(1) : g;
        out.emplace(n, gg.pow(2) + x0.pow(static_cast<unsigned>(2 * n)));
    }
    return out;
}

} // namespace htpq
