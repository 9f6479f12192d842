#include "htpq/greenred.hpp"

#include "htpq/errors.hpp"
#include "htpq/numtheory.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <utility>

namespace htpq {

namespace {

mpz_class shl(const mpz_class& v, unsigned long k) {
    mpz_class r;
    mpz_mul_2exp(r.get_mpz_t(), v.get_mpz_t(), k);
    return r;
}

mpq_class half_pow_q(unsigned long k) {
    mpq_class q(mpz_class(1), shl(mpz_class(1), k));
    q.canonicalize();
    return q;
}

} // namespace

ChipSeq ChipSeq::canonical(const ChipFunction& f) {
    ChipSeq c;
    c.canonical_ = true;
    c.fn_.push_back(f);
    return c;
}

ChipSeq ChipSeq::custom(std::vector<mpq_class> vals) {
    for (mpq_class& v : vals) {
        v.canonicalize();
        if (v <= 0 || v >= 1) throw std::invalid_argument("chip values must lie in (0, 1)");
    }
    ChipSeq c;
    c.vals_ = std::move(vals);
    return c;
}

mpq_class ChipSeq::at(std::uint64_t s) const {
    if (s == 0) throw std::invalid_argument("chips are indexed from stage 1");
    if (canonical_) return fn_.front().at(s);
    if (s > vals_.size()) throw std::invalid_argument("custom chip list exhausted");
    return vals_[static_cast<std::size_t>(s - 1)];
}

GreenRedEngine::GreenRedEngine(USeq u, ChipSeq chips)
    : u_(std::move(u)), chips_(std::move(chips)) {
    u_.at(0); // must exist; a_0 = 0 sits below it
    classes_.push_back(ClassRec{0, -1, {}});
    live_.push_back(Live{0, mpz_class(0), mpz_class(1)});
}

const StageRecord& GreenRedEngine::last() const {
    if (history_.empty()) throw std::invalid_argument("no stages executed");
    return history_.back();
}

std::vector<GreenRedEngine::LivePart> GreenRedEngine::live_classes() const {
    std::vector<LivePart> out;
    out.reserve(live_.size());
    for (const Live& lv : live_)
        out.push_back(LivePart{classes_[lv.cls].level, lv.hi - lv.lo});
    return out;
}

void GreenRedEngine::enumerate_class(int cls, const mpz_class& lo, const mpz_class& hi,
                                     const WordFn& fn) const {
    const ClassRec& rec = classes_[static_cast<std::size_t>(cls)];
    if (rec.pool < 0) {
        if (lo <= 0 && hi >= 1) fn(rec.spine);
        return;
    }
    enumerate_pool(rec.pool, lo, hi, [&](const std::vector<bool>& base) {
        std::vector<bool> w = base;
        w.insert(w.end(), rec.spine.begin(), rec.spine.end());
        fn(w);
    });
}

void GreenRedEngine::enumerate_pool(int pool, const mpz_class& lo, const mpz_class& hi,
                                    const WordFn& fn) const {
    const Pool& p = pools_[static_cast<std::size_t>(pool)];
    for (std::size_t k = 0; k < p.sources.size(); ++k) {
        const PoolSource& src = p.sources[k];
        const unsigned long kappa = src.ext_bits;
        const mpz_class src_size = shl(src.hi - src.lo, kappa);
        mpz_class a = lo - p.cum[k];
        mpz_class b = hi - p.cum[k];
        if (b <= 0 || a >= src_size) continue;
        if (a < 0) a = 0;
        if (b > src_size) b = src_size;
        const mpz_class bm1 = b - 1;
        mpz_class pa, pb;
        mpz_tdiv_q_2exp(pa.get_mpz_t(), a.get_mpz_t(), kappa);
        mpz_tdiv_q_2exp(pb.get_mpz_t(), bm1.get_mpz_t(), kappa);
        const mpz_class full = shl(mpz_class(1), kappa);
        for (mpz_class pi = pa; pi <= pb; ++pi) {
            // Extension values are assigned most significant bit first, so
            // ext order refines pointwise containment of the appended bits.
            const mpz_class e0 = (pi == pa) ? mpz_class(a - shl(pa, kappa)) : mpz_class(0);
            const mpz_class e1 = (pi == pb) ? mpz_class(bm1 - shl(pb, kappa) + 1) : full;
            enumerate_class(src.cls, src.lo + pi, src.lo + pi + 1,
                            [&](const std::vector<bool>& parent) {
                                for (mpz_class e = e0; e < e1; ++e) {
                                    std::vector<bool> w = parent;
                                    w.reserve(w.size() + kappa);
                                    for (unsigned long i = 0; i < kappa; ++i)
                                        w.push_back(mpz_tstbit(e.get_mpz_t(), kappa - 1 - i) != 0);
                                    fn(w);
                                }
                            });
        }
    }
}

std::vector<bool> GreenRedEngine::resolve_class_member(int cls, const mpz_class& idx) const {
    std::vector<bool> out;
    bool hit = false;
    enumerate_class(cls, idx, idx + 1, [&](const std::vector<bool>& w) {
        out = w;
        hit = true;
    });
    if (!hit) throw InvariantViolation("class member index out of range");
    return out;
}

std::vector<bool> GreenRedEngine::resolve_pool_member(int pool, const mpz_class& idx) const {
    std::vector<bool> out;
    bool hit = false;
    enumerate_pool(pool, idx, idx + 1, [&](const std::vector<bool>& w) {
        out = w;
        hit = true;
    });
    if (!hit) throw InvariantViolation("pool member index out of range");
    return out;
}

void GreenRedEngine::run(std::uint64_t stages) {
    for (std::uint64_t i = 0; i < stages; ++i) step();
}

void GreenRedEngine::step() {
    const std::uint64_t s1 = stage_ + 1;
    const mpq_class u_prev = u_.at(stage_);
    const mpq_class u1 = u_.at(s1);
    if (u1 <= u_prev) throw std::invalid_argument("stage bounds must be strictly increasing");
    const mpq_class c = chips_.at(s1);
    if (c >= 1 - u1)
        throw std::invalid_argument("chip filter violated: need c(s+1) < 1 - u(s+1)");

    // Longest prefix of the minimal red nodes, in priority (level-ascending,
    // genealogical) order, whose total measure stays strictly below the chip.
    Dyadic prio_measure;
    std::vector<Live> prio;
    std::vector<Live> processed;
    bool cut_found = false;
    for (const Live& lv : live_) {
        if (cut_found) {
            processed.push_back(lv);
            continue;
        }
        const std::uint64_t lam = classes_[static_cast<std::size_t>(lv.cls)].level;
        const mpz_class count = lv.hi - lv.lo;
        mpq_class room = c - prio_measure.to_mpq();
        room *= mpq_class(shl(mpz_class(1), static_cast<unsigned long>(lam)));
        mpz_class n;
        mpz_cdiv_q(n.get_mpz_t(), room.get_num_mpz_t(), room.get_den_mpz_t());
        n -= 1; // largest n with prio_measure + n 2^-lam < c
        if (n < 0) n = 0;
        if (n >= count) {
            prio.push_back(lv);
            prio_measure += Dyadic(count, static_cast<unsigned long>(lam));
        } else {
            if (n > 0) {
                prio.push_back(Live{lv.cls, lv.lo, lv.lo + n});
                prio_measure += Dyadic(n, static_cast<unsigned long>(lam));
            }
            processed.push_back(Live{lv.cls, lv.lo + n, lv.hi});
            cut_found = true;
        }
    }
    if (!cut_found || processed.empty())
        throw InvariantViolation("chip swallowed the whole red boundary");
    if (prio_measure.cmp(c) >= 0)
        throw InvariantViolation("prioritized measure reached the chip");

    const std::uint64_t l0 = level_;
    Dyadic M;
    mpz_class processed_nodes = 0;
    for (const Live& lv : processed) {
        const std::uint64_t lam = classes_[static_cast<std::size_t>(lv.cls)].level;
        M += Dyadic(lv.hi - lv.lo, static_cast<unsigned long>(lam));
        processed_nodes += shl(lv.hi - lv.lo, static_cast<unsigned long>(l0 - lam));
    }
    if (M.sign() <= 0) throw InvariantViolation("processed measure must be positive");
    if (Dyadic(processed_nodes, static_cast<unsigned long>(l0)) != M)
        throw InvariantViolation("processed node count disagrees with its measure");

    // Greedy dyadic greening fraction: accept 2^-f while a + M(d + 2^-f)
    // stays below u_{s+1}, stop once a + M d clears the left window edge.
    const mpq_class left = u1 - half_pow_q(static_cast<unsigned long>(s1));
    Dyadic d;
    for (unsigned long f = 1;; ++f) {
        if (f > 200000) throw InvariantViolation("greening fraction failed to converge");
        const Dyadic trial = d + Dyadic::half_pow(f);
        if ((a_ + M * trial).cmp(u1) < 0) d = trial;
        if (!d.is_zero() && (a_ + M * d).cmp(left) > 0) break;
    }

    // d = sum_j 2^-b_j with b strictly increasing; marks sit at b_j - 1 for
    // every accepted bit except the last.
    std::vector<unsigned> b;
    {
        const std::size_t nbits = mpz_sizeinbase(d.num().get_mpz_t(), 2);
        for (std::size_t pos = nbits; pos-- > 0;)
            if (mpz_tstbit(d.num().get_mpz_t(), pos))
                b.push_back(static_cast<unsigned>(d.exp() - pos));
    }
    const unsigned bJ = b.back();
    if (bJ != d.exp() || b.front() < 1)
        throw InvariantViolation("greening fraction out of canonical form");
    const std::size_t J = b.size();
    std::vector<char> mark(bJ, 0);
    for (std::size_t j = 0; j + 1 < J; ++j) mark[b[j] - 1] = 1;

    // The processed parts become a pool: the ordered universe of level-l_s
    // nodes that every fresh minimal red class extends.
    Pool pool;
    pool.level = l0;
    mpz_class cum = 0;
    for (const Live& lv : processed) {
        const unsigned long kappa =
            static_cast<unsigned long>(l0 - classes_[static_cast<std::size_t>(lv.cls)].level);
        pool.cum.push_back(cum);
        cum += shl(lv.hi - lv.lo, kappa);
        pool.sources.push_back(PoolSource{lv.cls, lv.lo, lv.hi, kappa});
    }
    pool.size = cum;
    if (pool.size != processed_nodes) throw InvariantViolation("pool size mismatch");
    const int pool_idx = static_cast<int>(pools_.size());
    pools_.push_back(std::move(pool));

    // Fresh minimal red classes: one staircase spine per non-mark length.
    std::vector<Live> fresh;
    for (unsigned r = 1; r <= bJ; ++r) {
        if (mark[r - 1]) continue;
        std::vector<bool> spine(r);
        for (unsigned i = 0; i + 1 < r; ++i) spine[i] = !mark[i];
        spine[r - 1] = false;
        const int cls_idx = static_cast<int>(classes_.size());
        classes_.push_back(ClassRec{l0 + r, pool_idx, std::move(spine)});
        fresh.push_back(Live{cls_idx, mpz_class(0), processed_nodes});
    }

    a_ += M * d;
    level_ = l0 + bJ;
    stage_ = s1;
    live_ = prio;
    live_.insert(live_.end(), fresh.begin(), fresh.end());

    if (!(a_.cmp(left) > 0 && a_.cmp(u1) < 0))
        throw InvariantViolation("green measure left the stage window");
    Dyadic total = a_;
    for (const Live& lv : live_)
        total += Dyadic(lv.hi - lv.lo,
                        static_cast<unsigned long>(classes_[static_cast<std::size_t>(lv.cls)].level));
    if (total != Dyadic(mpz_class(1)))
        throw InvariantViolation("red classes do not complement the green measure");

    last_prio_ = prio;
    last_pool_ = pool_idx;

    StageRecord rec;
    rec.stage = s1;
    rec.window_start = l0;
    rec.level = level_;
    rec.chip = c;
    rec.u = u1;
    for (const Live& lv : prio) rec.prioritized_members += lv.hi - lv.lo;
    rec.prioritized_measure = prio_measure;
    rec.processed_nodes = processed_nodes;
    rec.processed_measure = M;
    rec.b = b;
    rec.d = d;
    rec.a = a_;

    bool mirrored = false;
    if (mirror_alive_) mirrored = run_mirror_stage(rec, mark);
    rec.mirror_alive = mirror_alive_;
    if (!mirrored) {
        for (const auto& rho : last_prioritized_words())
            for (const auto& sig : last_processed_words())
                if (!lemma_pair_ok(rho, sig))
                    throw InvariantViolation("red-node lemma failed on sampled words");
        rec.lemma_ok = true;
    }
    history_.push_back(std::move(rec));
}

void GreenRedEngine::kill_mirror(std::uint64_t death_stage) {
    mirror_alive_ = false;
    mirror_death_ = death_stage;
    std::vector<mpz_class>().swap(mirror_D_);
    std::vector<std::uint64_t>().swap(mirror_masks_);
    std::vector<std::vector<bool>>().swap(mirror_sigma_);
}

bool GreenRedEngine::run_mirror_stage(StageRecord& rec, const std::vector<char>& mark) {
    const std::uint64_t L = level_; // post-stage working level
    const std::size_t J = rec.b.size();
    const mpz_class gain = rec.processed_nodes * static_cast<unsigned long>(J);
    if (L > 24 || mpz_class(static_cast<unsigned long>(mirror_D_.size())) + gain > 100000) {
        kill_mirror(rec.stage);
        return false;
    }
    const std::uint64_t l0 = rec.window_start;

    // Staircase windows A_j as bitmasks relative to position l0: everything
    // below b_j except earlier marks, always keeping b_j - 1 itself.
    std::vector<std::uint64_t> wmask(J, 0);
    for (std::size_t j = 0; j < J; ++j) {
        const unsigned bj = rec.b[j];
        for (unsigned i = 0; i < bj; ++i)
            if (i + 1 == bj || !mark[i]) wmask[j] |= std::uint64_t(1) << i;
        if (static_cast<std::size_t>(std::popcount(wmask[j])) + j != bj)
            throw InvariantViolation("staircase window has the wrong width");
    }

    // Materialize this stage's processed words in pool order.
    mirror_sigma_.clear();
    std::vector<std::uint64_t> smask;
    enumerate_pool(last_pool_, mpz_class(0), pools_[static_cast<std::size_t>(last_pool_)].size,
                   [&](const std::vector<bool>& w) {
                       if (w.size() != l0) throw InvariantViolation("pool word has the wrong length");
                       std::uint64_t m = 0;
                       for (std::size_t i = 0; i < w.size(); ++i)
                           if (w[i]) m |= std::uint64_t(1) << i;
                       mirror_sigma_.push_back(w);
                       smask.push_back(m);
                   });
    if (mpz_class(static_cast<unsigned long>(mirror_sigma_.size())) != rec.processed_nodes)
        throw InvariantViolation("pool enumeration count mismatch");

    // New blocks: each processed support extended by each staircase window
    // over the fresh primes at positions l0 .. L-1.
    for (std::size_t si = 0; si < mirror_sigma_.size(); ++si) {
        mpz_class base = 1;
        for (std::size_t i = 0; i < l0; ++i)
            if (mirror_sigma_[si][i]) base *= nth_prime(i);
        for (std::size_t j = 0; j < J; ++j) {
            mpz_class x = base;
            for (unsigned i = 0; i < rec.b[j]; ++i)
                if ((wmask[j] >> i) & 1) x *= nth_prime(l0 + i);
            mirror_D_.push_back(x);
            mirror_masks_.push_back(smask[si] | (wmask[j] << l0));
        }
    }

    // Literal green closure over the level-L cube, and its exact measure.
    const std::size_t full = std::size_t(1) << L;
    std::vector<char> green(full, 0);
    for (std::uint64_t m : mirror_masks_) green[static_cast<std::size_t>(m)] = 1;
    for (std::uint64_t bit = 0; bit < L; ++bit) {
        const std::size_t stepmask = std::size_t(1) << bit;
        for (std::size_t m = 0; m < full; ++m)
            if ((m & stepmask) && green[m ^ stepmask]) green[m] = 1;
    }
    unsigned long greens = 0;
    for (std::size_t m = 0; m < full; ++m) greens += static_cast<unsigned long>(green[m]);
    if (Dyadic(mpz_class(greens), static_cast<unsigned long>(L)) != a_)
        throw InvariantViolation("literal green measure disagrees with a");

    // Doomed-prefix tables: allred[len][v] = no green level-L extension.
    std::vector<std::vector<char>> allred(static_cast<std::size_t>(L) + 1);
    allred[static_cast<std::size_t>(L)].assign(full, 0);
    for (std::size_t m = 0; m < full; ++m)
        allred[static_cast<std::size_t>(L)][m] = static_cast<char>(!green[m]);
    for (std::uint64_t len = L; len-- > 0;) {
        const std::size_t half = std::size_t(1) << len;
        const auto& below = allred[static_cast<std::size_t>(len) + 1];
        auto& here = allred[static_cast<std::size_t>(len)];
        here.assign(half, 0);
        for (std::size_t v = 0; v < half; ++v)
            here[v] = static_cast<char>(below[v] && below[v | half]);
    }
    if (allred[0][0]) throw InvariantViolation("empty word became doomed");

    std::set<std::pair<std::uint64_t, std::uint64_t>> literal;
    for (std::uint64_t len = 1; len <= L; ++len) {
        const std::size_t sz = std::size_t(1) << len;
        const std::size_t pmask = (std::size_t(1) << (len - 1)) - 1;
        const auto& here = allred[static_cast<std::size_t>(len)];
        const auto& above = allred[static_cast<std::size_t>(len) - 1];
        for (std::size_t v = 0; v < sz; ++v)
            if (here[v] && !above[v & pmask]) literal.emplace(len, static_cast<std::uint64_t>(v));
    }

    // The symbolic classes must resolve to exactly the literal minimal reds.
    std::set<std::pair<std::uint64_t, std::uint64_t>> symbolic;
    mpz_class live_total = 0;
    for (const Live& lv : live_) {
        live_total += lv.hi - lv.lo;
        enumerate_class(lv.cls, lv.lo, lv.hi, [&](const std::vector<bool>& w) {
            std::uint64_t v = 0;
            for (std::size_t i = 0; i < w.size(); ++i)
                if (w[i]) v |= std::uint64_t(1) << i;
            symbolic.emplace(static_cast<std::uint64_t>(w.size()), v);
        });
    }
    if (mpz_class(static_cast<unsigned long>(literal.size())) != live_total)
        throw InvariantViolation("minimal red count mismatch");
    if (symbolic != literal)
        throw InvariantViolation("symbolic minimal reds diverge from literal recomputation");

    // Block mask-words must stay pairwise prefix-incomparable.
    if (mirror_masks_.size() <= 20000) {
        const std::size_t n = mirror_masks_.size();
        std::vector<unsigned> len(n);
        for (std::size_t i = 0; i < n; ++i)
            len[i] = static_cast<unsigned>(std::bit_width(mirror_masks_[i]));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const std::size_t s = len[i] <= len[j] ? i : j;
                const std::size_t t = s == i ? j : i;
                if ((mirror_masks_[t] & ((std::uint64_t(1) << len[s]) - 1)) == mirror_masks_[s])
                    throw InvariantViolation("block mask-words are not prefix-incomparable");
            }
    }

    // Full pairwise red-node lemma on literal masks.
    std::vector<std::pair<unsigned, std::uint64_t>> prio_words;
    for (const Live& lv : last_prio_)
        enumerate_class(lv.cls, lv.lo, lv.hi, [&](const std::vector<bool>& w) {
            std::uint64_t v = 0;
            for (std::size_t i = 0; i < w.size(); ++i)
                if (w[i]) v |= std::uint64_t(1) << i;
            prio_words.emplace_back(static_cast<unsigned>(w.size()), v);
        });
    for (const auto& [rlen, rmask] : prio_words) {
        const std::uint64_t low = (std::uint64_t(1) << rlen) - 1;
        for (std::uint64_t sm : smask)
            if ((sm & ~rmask & low) == 0) throw InvariantViolation("red-node lemma failed");
    }
    rec.lemma_ok = true;
    return true;
}

std::vector<std::vector<bool>> GreenRedEngine::last_prioritized_words() const {
    std::vector<std::vector<bool>> out;
    if (last_pool_ < 0) return out;
    for (const Live& lv : last_prio_) {
        if (mirror_alive_) {
            enumerate_class(lv.cls, lv.lo, lv.hi,
                            [&](const std::vector<bool>& w) { out.push_back(w); });
        } else {
            out.push_back(resolve_class_member(lv.cls, lv.lo));
            if (lv.hi - lv.lo > 1)
                out.push_back(resolve_class_member(lv.cls, mpz_class(lv.hi - 1)));
        }
    }
    return out;
}

std::vector<std::vector<bool>> GreenRedEngine::last_processed_words() const {
    std::vector<std::vector<bool>> out;
    if (last_pool_ < 0) return out;
    if (mirror_alive_) return mirror_sigma_;
    const Pool& p = pools_[static_cast<std::size_t>(last_pool_)];
    out.push_back(resolve_pool_member(last_pool_, mpz_class(0)));
    if (p.size > 1) out.push_back(resolve_pool_member(last_pool_, mpz_class(p.size - 1)));
    for (std::size_t k = 1; k < p.cum.size() && k < 5; ++k)
        out.push_back(resolve_pool_member(last_pool_, p.cum[k]));
    return out;
}

bool lemma_pair_ok(const std::vector<bool>& rho, const std::vector<bool>& sigma) {
    for (std::size_t q = 0; q < rho.size() && q < sigma.size(); ++q)
        if (!rho[q] && sigma[q]) return true;
    return false;
}

bool lemma_red_check(const GreenRedEngine& eng) {
    const auto prio = eng.last_prioritized_words();
    if (prio.empty()) return true;
    const auto procd = eng.last_processed_words();
    for (const auto& rho : prio)
        for (const auto& sig : procd)
            if (!lemma_pair_ok(rho, sig)) return false;
    return true;
}

} // namespace htpq
