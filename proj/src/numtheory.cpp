#include "htpq/numtheory.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include "htpq/errors.hpp"

namespace htpq {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

bool miller_rabin(std::uint64_t n, std::uint64_t a) {
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

// Shared prime table, grown by sieving on demand.
std::mutex g_prime_mutex;
std::vector<std::uint64_t> g_primes;
std::uint64_t g_sieved_to = 0;

void grow_sieve_locked(std::uint64_t limit) {
    if (limit <= g_sieved_to) return;
    std::vector<bool> composite(limit, false);
    g_primes.clear();
    for (std::uint64_t n = 2; n < limit; ++n) {
        if (composite[n]) continue;
        g_primes.push_back(n);
        for (std::uint64_t m = n * n; m < limit; m += n) composite[m] = true;
    }
    g_sieved_to = limit;
}

void ensure_prime_count_locked(std::size_t count) {
    std::uint64_t limit = std::max<std::uint64_t>(g_sieved_to, 1u << 20);
    while (g_primes.size() < count) {
        limit *= 2;
        grow_sieve_locked(limit);
    }
}

void ensure_sieved_past_locked(std::uint64_t value) {
    std::uint64_t limit = std::max<std::uint64_t>(g_sieved_to, 1u << 20);
    while (g_sieved_to <= value) {
        limit *= 2;
        grow_sieve_locked(limit);
    }
}

void require_odd_prime(std::uint64_t p, const char* role) {
    if (p == 2 || !is_prime_u64(p))
        throw std::invalid_argument(std::string(role) + " must be an odd prime");
}

// Criteria-path appropriateness for known primes; no validation, no allocation.
bool appropriate_fast(std::uint64_t p, std::uint64_t q) {
    if (p == 2 || p == q) return false;
    int pq = legendre_euler(p % q, q);
    if (q % 4 == 3) return pq == 1;
    return (p % 4 == 1) ? pq == 1 : pq == -1;
}

} // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (!miller_rabin(n, a)) return false;
    }
    return true;
}

std::uint64_t nth_prime(std::size_t i) {
    std::lock_guard<std::mutex> lock(g_prime_mutex);
    ensure_prime_count_locked(i + 1);
    return g_primes[i];
}

std::uint64_t odd_prime(std::size_t e) {
    return nth_prime(e + 1);
}

std::size_t prime_index(std::uint64_t p) {
    if (!is_prime_u64(p)) throw std::invalid_argument("prime_index: not a prime");
    std::lock_guard<std::mutex> lock(g_prime_mutex);
    ensure_sieved_past_locked(p);
    auto it = std::lower_bound(g_primes.begin(), g_primes.end(), p);
    return static_cast<std::size_t>(it - g_primes.begin());
}

int legendre(const mpz_class& a, std::uint64_t p) {
    require_odd_prime(p, "legendre: p");
    mpz_class pz(static_cast<unsigned long>(p));
    return mpz_legendre(a.get_mpz_t(), pz.get_mpz_t());
}

int legendre_euler(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    std::uint64_t r = powmod(a, (p - 1) / 2, p);
    return r == 1 ? 1 : -1;
}

int legendre_bruteforce(std::int64_t a, std::uint64_t p) {
    std::int64_t pi = static_cast<std::int64_t>(p);
    std::int64_t r = ((a % pi) + pi) % pi;
    if (r == 0) return 0;
    for (std::uint64_t x = 1; x < p; ++x) {
        if (mulmod(x, x, p) == static_cast<std::uint64_t>(r)) return 1;
    }
    return -1;
}

bool is_q_appropriate(std::uint64_t p, std::uint64_t q) {
    require_odd_prime(q, "is_q_appropriate: q");
    if (!is_prime_u64(p)) throw std::invalid_argument("is_q_appropriate: p must be prime");
    if (p == 2 || p == q) return false;
    mpz_class mq(-static_cast<long>(q));
    mpz_class pz(static_cast<unsigned long>(p));
    return mpz_legendre(mq.get_mpz_t(), pz.get_mpz_t()) == 1;
}

bool is_q_appropriate_criteria(std::uint64_t p, std::uint64_t q) {
    require_odd_prime(q, "is_q_appropriate_criteria: q");
    if (!is_prime_u64(p)) throw std::invalid_argument("is_q_appropriate_criteria: p must be prime");
    return appropriate_fast(p, q);
}

std::vector<std::uint64_t> find_appropriate_primes(std::uint64_t e,
                                                   const std::vector<std::uint64_t>& avoid,
                                                   std::size_t count,
                                                   std::uint64_t scan_cap) {
    for (std::uint64_t i : avoid) {
        if (i == e) throw std::invalid_argument("find_appropriate_primes: e listed in avoid");
    }
    std::uint64_t qe = odd_prime(e);
    std::vector<std::uint64_t> qs;
    qs.reserve(avoid.size());
    for (std::uint64_t i : avoid) qs.push_back(odd_prime(i));

    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; out.size() < count; ++i) {
        std::uint64_t p = nth_prime(i);
        if (p > scan_cap)
            throw CapExceeded("find_appropriate_primes: scan cap reached; raise scan_cap");
        if (!appropriate_fast(p, qe)) continue;
        bool ok = true;
        for (std::uint64_t q : qs) {
            if (appropriate_fast(p, q)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(p);
    }
    return out;
}

CrtWitness crt_residue_witness(std::uint64_t e, const std::vector<std::uint64_t>& avoid) {
    std::vector<std::uint64_t> idx(avoid);
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (std::uint64_t i : idx) {
        if (i == e) throw std::invalid_argument("crt_residue_witness: e listed in avoid");
    }

    // Moduli: 4, q_e, and each avoided q_i; all pairwise coprime.
    // p = 1 (mod 4) makes the mod-4 branch of the criteria uniform; p = 1 (mod q_e)
    // is a nonzero square; p = (least non-residue) (mod q_i) kills appropriateness.
    std::vector<std::pair<mpz_class, mpz_class>> congruences;
    congruences.emplace_back(1, 4);
    congruences.emplace_back(1, static_cast<unsigned long>(odd_prime(e)));
    for (std::uint64_t i : idx) {
        std::uint64_t q = odd_prime(i);
        std::uint64_t d = 2;
        while (legendre_euler(d, q) != -1) ++d;
        congruences.emplace_back(static_cast<unsigned long>(d), static_cast<unsigned long>(q));
    }

    mpz_class n = congruences[0].first, m = congruences[0].second;
    for (std::size_t i = 1; i < congruences.size(); ++i) {
        const mpz_class& a2 = congruences[i].first;
        const mpz_class& m2 = congruences[i].second;
        mpz_class inv;
        if (mpz_invert(inv.get_mpz_t(), m.get_mpz_t(), m2.get_mpz_t()) == 0)
            throw InvariantViolation("crt_residue_witness: moduli not coprime");
        mpz_class t = ((a2 - n) * inv) % m2;
        if (t < 0) t += m2;
        n += m * t;
        m *= m2;
    }
    n %= m;
    if (n < 0) n += m;
    return {n, m};
}

std::optional<ConicSolution> conic_primitive_solution(std::uint64_t p, std::uint64_t q,
                                                      unsigned k_max) {
    require_odd_prime(p, "conic_primitive_solution: p");
    require_odd_prime(q, "conic_primitive_solution: q");
    if (p == q) throw std::invalid_argument("conic_primitive_solution: p == q");

    // a^2 = p^(2k) - q b^2 with p not dividing b forces (-q|p) = 1; without it
    // no k admits a primitive solution, so bail out before any scanning.
    mpz_class mq(-static_cast<long>(q));
    mpz_class pz(static_cast<unsigned long>(p));
    if (mpz_legendre(mq.get_mpz_t(), pz.get_mpz_t()) != 1) return std::nullopt;

    for (unsigned k = 1; k <= k_max; ++k) {
        mpz_class target;
        mpz_ui_pow_ui(target.get_mpz_t(), p, 2 * k);
        mpz_class bmax = sqrt((target - 1) / q);
        mpz_class t = target - q; // target - q*b^2 at b = 1
        mpz_class step;           // q*(2b+1), to move from b to b+1
        for (mpz_class b = 1; b <= bmax; ++b) {
            if (mpz_divisible_ui_p(b.get_mpz_t(), p) == 0 && t >= 0 &&
                mpz_perfect_square_p(t.get_mpz_t())) {
                ConicSolution s;
                s.p = p;
                s.q = q;
                s.k = k;
                s.a = sqrt(t);
                s.b = b;
                return s;
            }
            step = 2 * b + 1;
            step *= q;
            t -= step;
        }
    }
    return std::nullopt;
}

std::pair<mpq_class, mpq_class> solution_in_localization(const ConicSolution& s) {
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), s.p, s.k);
    mpq_class x(s.a, pk), y(s.b, pk);
    x.canonicalize();
    y.canonicalize();
    if (x * x + s.q * y * y != 1)
        throw InvariantViolation("solution_in_localization: point not on the conic");
    if (y <= 0) throw InvariantViolation("solution_in_localization: y not positive");
    return {x, y};
}

namespace {

// Fills out[idx..3] with a descending decomposition of n into (4-idx) squares,
// each part <= cap.  Greedy largest-first with backtracking.
bool four_square_rec(const mpz_class& n, int idx, const mpz_class& cap,
                     std::array<mpz_class, 4>& out) {
    int parts = 4 - idx;
    if (n == 0) {
        for (int i = idx; i < 4; ++i) out[i] = 0;
        return true;
    }
    if (parts == 0) return false;
    if (parts == 1) {
        if (!mpz_perfect_square_p(n.get_mpz_t())) return false;
        mpz_class r = sqrt(n);
        if (r > cap) return false;
        out[idx] = r;
        return true;
    }
    if (parts == 3) {
        // Three squares represent n iff n != 4^a (8b+7).
        mpz_class m = n;
        while (m % 4 == 0) m /= 4;
        if (m % 8 == 7) return false;
    }
    mpz_class hi = sqrt(n);
    if (hi > cap) hi = cap;
    for (mpz_class v = hi; v >= 0; --v) {
        mpz_class vv = v * v;
        if (vv * parts < n) break; // descending parts cannot reach n any more
        out[idx] = v;
        if (four_square_rec(n - vv, idx + 1, v, out)) return true;
    }
    return false;
}

} // namespace

std::array<mpz_class, 4> four_square_decomposition(const mpz_class& n) {
    if (n < 0) throw std::invalid_argument("four_square_decomposition: negative input");
    std::array<mpz_class, 4> out;
    if (!four_square_rec(n, 0, n + 1, out))
        throw InvariantViolation("four_square_decomposition: search failed");
    return out;
}

PositivityWitness positivity_witness(const mpq_class& y, const mpz_class& denominator) {
    if (y <= 0) throw std::invalid_argument("positivity_witness: y must be positive");
    if (denominator < 1) throw std::invalid_argument("positivity_witness: denominator must be >= 1");

    mpq_class yc(y);
    yc.canonicalize();
    mpz_class den = yc.get_den();
    // Every prime of den(y) must divide `denominator`.
    mpz_class d = den, g;
    while (d > 1) {
        g = gcd(d, denominator);
        if (g == 1) throw std::invalid_argument("positivity_witness: denominator does not cover den(y)");
        while (mpz_divisible_p(d.get_mpz_t(), g.get_mpz_t())) d /= g;
    }

    // Least s >= 0 with y(1+s) >= 1: 1+s = ceil(den/num) when y < 1.
    mpz_class s = 0;
    if (yc < 1) {
        mpz_class num = yc.get_num(), q;
        mpz_cdiv_q(q.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
        s = q - 1;
    }

    PositivityWitness w;
    w.s = s;
    std::array<mpz_class, 4> zs = four_square_decomposition(s);
    for (int i = 0; i < 4; ++i) w.z[i] = mpq_class(zs[i]);

    mpq_class delta = yc * (1 + mpq_class(s)) - 1;
    delta.canonicalize();
    mpz_class N = delta.get_num(), D = delta.get_den();
    // N/D = (N*D)/D^2, so four squares of N*D over the common denominator D work.
    std::array<mpz_class, 4> cs = four_square_decomposition(N * D);
    for (int i = 0; i < 4; ++i) {
        w.w[i] = mpq_class(cs[i], D);
        w.w[i].canonicalize();
    }

    mpq_class zsum = 0, wsum = 0;
    for (int i = 0; i < 4; ++i) {
        zsum += w.z[i] * w.z[i];
        wsum += w.w[i] * w.w[i];
    }
    if (zsum != mpq_class(s) || wsum != delta)
        throw InvariantViolation("positivity_witness: decomposition identities failed");
    return w;
}

std::vector<std::uint64_t> prime_support(const mpz_class& n, bool* squarefree) {
    if (n < 1) throw std::invalid_argument("prime_support expects n >= 1");
    if (squarefree) *squarefree = true;
    std::vector<std::uint64_t> out;
    mpz_class m = n;
    for (std::size_t idx = 0; m > 1; ++idx) {
        std::uint64_t p = nth_prime(idx);
        mpz_class sq = mpz_class(static_cast<unsigned long>(p));
        sq *= sq;
        if (sq > m) {
            // The residual cofactor is prime.
            if (!m.fits_ulong_p()) throw CapExceeded("prime factor beyond 64 bits");
            out.push_back(mpz_get_ui(m.get_mpz_t()));
            break;
        }
        if (!mpz_divisible_ui_p(m.get_mpz_t(), p)) continue;
        unsigned count = 0;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
            ++count;
        }
        if (count > 1 && squarefree) *squarefree = false;
        out.push_back(p);
    }
    return out;
}

} // namespace htpq
