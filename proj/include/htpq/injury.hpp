#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace htpq {

// pet(e, t): the t-th protection candidate of requirement e.  Defined by
// pet(e, -1) = e and pet(e, t) = least prime p > pet(e, t-1) such that for
// every i <= e+t, p is q_i-appropriate exactly when i = e.  Strictly
// increasing in t; all values across all (e, t) are pairwise distinct.
// Throws CapExceeded when the scan passes scan_cap.
std::uint64_t pet(std::uint64_t e, std::uint64_t t, std::uint64_t scan_cap = 100'000'000ull);

struct PetEntry {
    std::uint64_t value = 0;
    std::uint64_t e = 0;
    std::uint64_t t = 0;
    friend bool operator==(const PetEntry&, const PetEntry&) = default;
};

// Enumerates all pet values in ascending order with their (e, t) labels by a
// single ascending prime scan: a prime p belongs to chain j iff j is the least
// index with p q_j-appropriate and p is q_i-inappropriate for every
// j < i <= j + t, where t is the count of chain-j values already enumerated.
// At most one chain can claim a given prime, so the enumeration is total.
class PetScanner {
  public:
    explicit PetScanner(std::uint64_t scan_cap = 100'000'000ull) : cap_(scan_cap) {}

    // 1-based: the k-th smallest pet value overall.
    const PetEntry& kth(std::size_t k);
    // Number of pet values <= x.
    std::size_t count_up_to(std::uint64_t x);
    // The (e, t) label of p if p is a pet value, nullopt otherwise.
    std::optional<PetEntry> label_of(std::uint64_t p);
    const std::vector<PetEntry>& enumerated() const { return found_; }

  private:
    void advance();

    std::uint64_t cap_;
    std::size_t cursor_ = 0; // nth_prime index of the next prime to examine
    std::vector<PetEntry> found_;
    std::map<std::uint64_t, std::uint64_t> chain_next_t_;
};

// e -> stage at which the modeled oracle computation halts; absent means it
// never halts within any budget under consideration.
struct HaltSchedule {
    std::map<std::uint64_t, std::uint64_t> converges;

    std::optional<std::uint64_t> stage_of(std::uint64_t e) const {
        auto it = converges.find(e);
        if (it == converges.end()) return std::nullopt;
        return it->second;
    }
    // Converged at 1-based stage r iff the halt stage is <= r-1 (stage r acts
    // on the (r-1)-step approximation).
    bool converged_at(std::uint64_t e, std::uint64_t stage) const {
        auto s = stage_of(e);
        return s.has_value() && *s < stage;
    }
};

struct StageEvent {
    std::uint64_t stage = 0; // 1-based
    std::uint64_t e = 0;
    std::uint64_t t = 0;
    std::uint64_t prime = 0;
    bool converged = false;
    std::vector<std::uint64_t> protected_now; // full protected set of R_e, ascending
    std::vector<std::uint64_t> deleted_now;   // newly removed this stage, ascending
    friend bool operator==(const StageEvent&, const StageEvent&) = default;
};

struct ConstructionTrace {
    std::vector<StageEvent> events;
};

struct ConstructionState {
    std::uint64_t stage = 0;
    std::vector<PetEntry> considered; // in consideration order
    std::map<std::uint64_t, std::set<std::uint64_t>> protected_sets;
    std::set<std::uint64_t> removed;
    bool tie_warning = false; // set if two chains ever claimed one prime (provably never)
};

// Least pet value not yet considered, with its labels.  The state must have
// been produced by run(): its considered list is a prefix of the ascending
// pet enumeration (throws std::invalid_argument otherwise).
PetEntry next_considered(const ConstructionState& state);

// Deterministic replay of the finite-injury construction.  Stage r considers
// the r-th smallest pet value (e, t, p).  If the schedule has R_e converged,
// R_e keeps protecting its set and additionally protects p; otherwise R_e
// protects nothing and removes every prime p' with e < p' < p that is
// q_e-appropriate, not protected by any R_i with i < e, and not yet removed.
// Removing any currently protected prime throws InvariantViolation.
std::pair<ConstructionTrace, ConstructionState> run(const HaltSchedule& schedule,
                                                    std::uint64_t stages);

// Limit membership of p in V = primes minus removed, decided without running
// unboundedly many stages: p is out iff it is never protected and some R_e
// with e < p, p q_e-appropriate, gets a diverged consideration whose window
// covers p.  Agrees with run() membership at any stage where every relevant
// consideration has happened.  Throws std::invalid_argument if p is not prime.
bool decide_membership(std::uint64_t p, const HaltSchedule& schedule);

enum class RequirementStatus { SatisfiedIn, Pending, NoWitnessOnWindow, Violation };

struct RequirementReport {
    std::uint64_t e = 0;
    bool halted = false;
    RequirementStatus status = RequirementStatus::Pending;
    std::uint64_t witness = 0;          // least protected pet(e,t), t >= 1, when SatisfiedIn
    std::uint64_t window_end = 0;       // largest considered pet of chain e (Never case)
    std::uint64_t considered_count = 0; // considerations of chain e in the trace
    std::vector<std::uint64_t> violations;
};

// Per-requirement verification over a finished trace.  Halted e: SatisfiedIn
// iff some pet(e, t) with t >= 1 is protected (t = 0 is excluded from the
// semilocal ring, so it cannot witness); Pending otherwise.  Never e: every
// q_e-appropriate prime strictly inside (e, window_end) must be removed or
// excluded; any survivor is reported as a Violation.
std::vector<RequirementReport> verify_requirements(const ConstructionTrace& trace,
                                                   const HaltSchedule& schedule,
                                                   std::uint64_t e_max);

} // namespace htpq
