#pragma once
// Exact stage simulator for the chip-driven green/red coloring of Cantor
// space over the primes.  A node is a finite binary word; position i stands
// for the i-th prime.  A node is green once the product of its 1-positions
// is divisible by some enumerated block; red nodes are those with no green
// extension.  Each stage prioritizes an initial segment of the minimal red
// nodes (total measure below the stage chip), greens every other red node
// at the working level through a uniform staircase of fresh-prime blocks,
// and lands the green measure a_s exactly inside (u_s - 2^-s, u_s).
//
// The state is symbolic: minimal red nodes are tracked as classes (one per
// level, with exact member counts) plus genealogy records that can resolve
// any member index back to a literal word.  While the working level and
// block count stay small, an explicit mirror also materializes the block
// set D and revalidates the symbolic state against literal recomputation.

#include "htpq/boundary.hpp"
#include "htpq/dyadic.hpp"

#include <cstdint>
#include <functional>
#include <vector>

#include <gmpxx.h>

namespace htpq {

// Stage-indexed chip values c(1), c(2), ...: either the canonical schedule
// of a ChipFunction or an explicit list (vals[i] = c(i+1), each in (0,1)).
class ChipSeq {
public:
    static ChipSeq canonical(const ChipFunction& f);
    static ChipSeq custom(std::vector<mpq_class> vals);

    // Chip for stage s >= 1; a custom list throws past its end.
    mpq_class at(std::uint64_t s) const;

private:
    ChipSeq() = default;
    bool canonical_ = false;
    std::vector<ChipFunction> fn_; // empty or singleton (ChipFunction has no default ctor)
    std::vector<mpq_class> vals_;
};

struct StageRecord {
    std::uint64_t stage = 0;        // s+1, the stage just executed
    std::uint64_t window_start = 0; // l_s: working level during the stage
    std::uint64_t level = 0;        // l_{s+1} = window_start + b.back()
    mpq_class chip;                 // c(s+1)
    mpq_class u;                    // u_{s+1}
    mpz_class prioritized_members;  // minimal red nodes kept red by priority
    Dyadic prioritized_measure;     // their total measure, < chip
    mpz_class processed_nodes;      // level-l_s red nodes greened this stage
    Dyadic processed_measure;       // M: their total measure
    std::vector<unsigned> b;        // accepted dyadic bits: d = sum 2^-b_j
    Dyadic d;                       // greened fraction above each processed node
    Dyadic a;                       // a_{s+1} = a_s + M*d
    bool mirror_alive = false;      // explicit mirror ran through this stage
    bool lemma_ok = false;          // red-node lemma check (full when mirrored)

    bool operator==(const StageRecord&) const = default;
};

class GreenRedEngine {
public:
    // Requires u strictly increasing as consumed and c(s+1) < 1 - u_{s+1} at
    // every executed stage (automatic for a canonical chip paired with a
    // preset bound sequence of the same limit).
    GreenRedEngine(USeq u, ChipSeq chips);

    void step();                     // execute stage s+1
    void run(std::uint64_t stages);  // step() that many times

    std::uint64_t stage() const { return stage_; }
    std::uint64_t level() const { return level_; }
    Dyadic a() const { return a_; }
    const std::vector<StageRecord>& history() const { return history_; }
    const StageRecord& last() const;

    // Minimal red classes, level ascending; levels are pairwise distinct.
    struct LivePart {
        std::uint64_t level;
        mpz_class count;
        bool operator==(const LivePart&) const = default;
    };
    std::vector<LivePart> live_classes() const;

    // Explicit mirror: alive while level <= 24 and |D| <= 100000.
    bool mirror_alive() const { return mirror_alive_; }
    std::uint64_t mirror_death_stage() const { return mirror_death_; }
    const std::vector<mpz_class>& mirror_blocks() const { return mirror_D_; }

    // Literal words from the last executed stage, for the red-node lemma:
    // every prioritized minimal red (mirror) or boundary samples (symbolic),
    // and the processed level-l_s nodes (mirror) or per-source samples.
    std::vector<std::vector<bool>> last_prioritized_words() const;
    std::vector<std::vector<bool>> last_processed_words() const;

private:
    struct ClassRec {
        std::uint64_t level;     // member word length
        int pool;                // parent pool index, -1 for the root class
        std::vector<bool> spine; // suffix appended to each pool member
    };
    struct PoolSource {
        int cls;                 // class the processed part came from
        mpz_class lo, hi;        // member range of that class
        unsigned long ext_bits;  // pool level - class level
    };
    struct Pool {
        std::uint64_t level;     // l_s: length of every pool member
        std::vector<PoolSource> sources; // class-level ascending
        std::vector<mpz_class> cum;      // cumulative member counts
        mpz_class size;
    };
    struct Live {
        int cls;
        mpz_class lo, hi;        // live member range
    };

    using WordFn = std::function<void(const std::vector<bool>&)>;
    void enumerate_class(int cls, const mpz_class& lo, const mpz_class& hi,
                         const WordFn& fn) const;
    void enumerate_pool(int pool, const mpz_class& lo, const mpz_class& hi,
                        const WordFn& fn) const;
    std::vector<bool> resolve_class_member(int cls, const mpz_class& idx) const;
    std::vector<bool> resolve_pool_member(int pool, const mpz_class& idx) const;

    bool run_mirror_stage(StageRecord& rec, const std::vector<char>& mark);
    void kill_mirror(std::uint64_t death_stage);

    USeq u_;
    ChipSeq chips_;
    std::uint64_t stage_ = 0;
    std::uint64_t level_ = 0;
    Dyadic a_;
    std::vector<ClassRec> classes_; // append-only genealogy
    std::vector<Pool> pools_;       // append-only
    std::vector<Live> live_;        // level ascending
    std::vector<StageRecord> history_;

    // last-stage snapshot for the lemma interface
    std::vector<Live> last_prio_;
    int last_pool_ = -1;

    bool mirror_alive_ = true;
    std::uint64_t mirror_death_ = 0;
    std::vector<mpz_class> mirror_D_;
    std::vector<std::uint64_t> mirror_masks_;
    std::vector<std::vector<bool>> mirror_sigma_; // processed words, pool order
};

// True iff some position q has rho(q) = 0 and sigma(q) = 1, so that greening
// sigma cannot green any extension of rho.
bool lemma_pair_ok(const std::vector<bool>& rho, const std::vector<bool>& sigma);

// Red-node lemma over the last executed stage: pairwise over all prioritized
// and processed words when the mirror is alive, over genealogy samples
// otherwise. True before any stage has run.
bool lemma_red_check(const GreenRedEngine& eng);

} // namespace htpq
