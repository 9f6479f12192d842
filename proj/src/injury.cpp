#include "htpq/injury.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "htpq/errors.hpp"
#include "htpq/numtheory.hpp"
#include "htpq/rings.hpp"

namespace htpq {

namespace {

// p belongs to chain e at width t iff p is q_e-appropriate and
// q_i-inappropriate for every other index i <= e + t.
bool matches_pattern(std::uint64_t p, std::uint64_t e, std::uint64_t t) {
    if (!is_q_appropriate(p, odd_prime(e))) return false;
    for (std::uint64_t i = 0; i <= e + t; ++i) {
        if (i == e) continue;
        if (is_q_appropriate(p, odd_prime(i))) return false;
    }
    return true;
}

std::uint64_t next_prime_above(std::uint64_t x) {
    mpz_class cur = mpz_class(static_cast<unsigned long>(x)), nxt;
    mpz_nextprime(nxt.get_mpz_t(), cur.get_mpz_t());
    return mpz_get_ui(nxt.get_mpz_t());
}

} // namespace

std::uint64_t pet(std::uint64_t e, std::uint64_t t, std::uint64_t scan_cap) {
    static std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> memo;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);

    auto hit = memo.find({e, t});
    if (hit != memo.end()) return hit->second;

    // Resume the chain from the largest memoized width below t; base pet(e,-1)=e.
    std::uint64_t start_t = 0;
    std::uint64_t prev = e;
    for (std::uint64_t tt = t; tt-- > 0;) {
        auto it = memo.find({e, tt});
        if (it != memo.end()) {
            start_t = tt + 1;
            prev = it->second;
            break;
        }
    }
    for (std::uint64_t tt = start_t; tt <= t; ++tt) {
        std::uint64_t p = prev;
        for (;;) {
            p = next_prime_above(p);
            if (p > scan_cap) throw CapExceeded("pet scan passed its cap");
            if (matches_pattern(p, e, tt)) break;
        }
        memo[{e, tt}] = p;
        prev = p;
    }
    return prev;
}

void PetScanner::advance() {
    std::uint64_t p = nth_prime(cursor_);
    if (p > cap_) throw CapExceeded("pet enumeration passed its cap");
    ++cursor_;

    // Least index whose modulus makes p appropriate.  A chain starts above its
    // own index, so only chains below p can claim p; indices after the least
    // appropriate one are ruled out by their inappropriateness requirement.
    std::uint64_t j = p;
    for (std::uint64_t i = 0; i < p; ++i) {
        if (is_q_appropriate(p, odd_prime(i))) {
            j = i;
            break;
        }
    }
    if (j == p) return; // no chain wants p (e.g. p = 2)

    std::uint64_t t = 0;
    auto it = chain_next_t_.find(j);
    if (it != chain_next_t_.end()) t = it->second;
    // Chain j claims p iff no second appropriate index lies inside its current
    // pattern width.
    for (std::uint64_t i = j + 1; i <= j + t; ++i) {
        if (is_q_appropriate(p, odd_prime(i))) return;
    }
    found_.push_back(PetEntry{p, j, t});
    chain_next_t_[j] = t + 1;
}

const PetEntry& PetScanner::kth(std::size_t k) {
    if (k == 0) throw std::invalid_argument("kth is 1-based");
    while (found_.size() < k) advance();
    return found_[k - 1];
}

std::size_t PetScanner::count_up_to(std::uint64_t x) {
    while (nth_prime(cursor_) <= x) advance();
    std::size_t n = 0;
    for (const auto& pe : found_) {
        if (pe.value > x) break;
        ++n;
    }
    return n;
}

std::optional<PetEntry> PetScanner::label_of(std::uint64_t p) {
    while (nth_prime(cursor_) <= p) advance();
    for (const auto& pe : found_) {
        if (pe.value == p) return pe;
        if (pe.value > p) break;
    }
    return std::nullopt;
}

PetEntry next_considered(const ConstructionState& state) {
    PetScanner scanner;
    for (std::size_t k = 0; k < state.considered.size(); ++k) {
        if (!(scanner.kth(k + 1) == state.considered[k]))
            throw std::invalid_argument("state not reachable by the construction");
    }
    return scanner.kth(state.considered.size() + 1);
}

std::pair<ConstructionTrace, ConstructionState> run(const HaltSchedule& schedule,
                                                    std::uint64_t stages) {
    ConstructionTrace trace;
    ConstructionState state;
    PetScanner scanner;

    for (std::uint64_t r = 1; r <= stages; ++r) {
        const PetEntry pe = scanner.kth(r);
        state.stage = r;
        state.considered.push_back(pe);

        StageEvent ev;
        ev.stage = r;
        ev.e = pe.e;
        ev.t = pe.t;
        ev.prime = pe.value;
        ev.converged = schedule.converged_at(pe.e, r);

        if (ev.converged) {
            state.protected_sets[pe.e].insert(pe.value);
        } else {
            // Sweep every q_e-appropriate prime strictly between e and the
            // considered value.  Primes protected by stronger requirements
            // survive; any other protected prime in range is a construction bug.
            for (std::size_t idx = 0;; ++idx) {
                std::uint64_t pp = nth_prime(idx);
                if (pp >= pe.value) break;
                if (pp <= pe.e) continue;
                if (!is_q_appropriate(pp, odd_prime(pe.e))) continue;
                if (state.removed.count(pp)) continue;
                bool shielded = false;
                for (const auto& [i, s] : state.protected_sets) {
                    if (!s.count(pp)) continue;
                    if (i < pe.e) {
                        shielded = true;
                        break;
                    }
                    throw InvariantViolation("construction would remove a protected prime");
                }
                if (shielded) continue;
                state.removed.insert(pp);
                ev.deleted_now.push_back(pp);
            }
        }

        auto ps = state.protected_sets.find(pe.e);
        if (ps != state.protected_sets.end())
            ev.protected_now.assign(ps->second.begin(), ps->second.end());
        trace.events.push_back(std::move(ev));
    }
    return {std::move(trace), std::move(state)};
}

bool decide_membership(std::uint64_t p, const HaltSchedule& schedule) {
    if (!is_prime_u64(p)) throw std::invalid_argument("decide_membership expects a prime");

    PetScanner scanner;
    // Protection in the limit: p is some chain's value and that requirement
    // halts before p's consideration stage, which is p's rank in pet order.
    if (auto label = scanner.label_of(p)) {
        std::uint64_t rank = scanner.count_up_to(p);
        if (schedule.converged_at(label->e, rank)) return true;
    }

    std::size_t cnt = scanner.count_up_to(p);
    for (std::uint64_t e = 0; e < p; ++e) {
        if (!is_q_appropriate(p, odd_prime(e))) continue;
        auto sigma = schedule.stage_of(e);
        // A never-halting requirement sweeps arbitrarily far: some diverged
        // consideration of chain e eventually covers p.
        if (!sigma) return false;
        // Diverged considerations of chain e are exactly those of rank
        // <= sigma.  The sweep that can reach p is at chain e's first value
        // above p; with at most cnt pets below or at p, its rank exceeds cnt.
        if (*sigma <= cnt) continue;
        std::uint64_t cap = scanner.kth(*sigma).value;
        try {
            for (std::uint64_t t = 0;; ++t) {
                std::uint64_t v = pet(e, t, cap);
                if (v > cap) break;      // memo hit past the cap: same as below
                if (v > p) return false; // v <= cap, so its rank is <= sigma
            }
        } catch (const CapExceeded&) {
        }
        // Chain e's first value above p lies beyond the sigma-th pet, so every
        // diverged consideration of R_e stays below p.
    }
    return true;
}

std::vector<RequirementReport> verify_requirements(const ConstructionTrace& trace,
                                                   const HaltSchedule& schedule,
                                                   std::uint64_t e_max) {
    std::set<std::uint64_t> removed;
    for (const auto& ev : trace.events)
        removed.insert(ev.deleted_now.begin(), ev.deleted_now.end());

    std::vector<RequirementReport> reports;
    reports.reserve(e_max + 1);
    for (std::uint64_t e = 0; e <= e_max; ++e) {
        RequirementReport rep;
        rep.e = e;
        rep.halted = schedule.stage_of(e).has_value();

        std::uint64_t frontier = 0;
        std::uint64_t witness = 0;
        for (const auto& ev : trace.events) {
            if (ev.e != e) continue;
            ++rep.considered_count;
            frontier = std::max(frontier, ev.prime);
            if (ev.converged && ev.t >= 1 && witness == 0) witness = ev.prime;
        }

        if (rep.halted) {
            // A width-0 value sits in the semilocal exclusion set, so only a
            // later protected value witnesses solvability.
            if (witness != 0) {
                rep.status = RequirementStatus::SatisfiedIn;
                rep.witness = witness;
            } else {
                rep.status = RequirementStatus::Pending;
            }
        } else {
            rep.window_end = frontier;
            if (frontier > 0) {
                auto excluded = qe_semilocal_excluded(e);
                for (std::size_t idx = 0;; ++idx) {
                    std::uint64_t pp = nth_prime(idx);
                    if (pp >= frontier) break;
                    if (pp <= e) continue;
                    if (!is_q_appropriate(pp, odd_prime(e))) continue;
                    if (removed.count(pp)) continue;
                    if (std::binary_search(excluded.begin(), excluded.end(), pp)) continue;
                    rep.violations.push_back(pp);
                }
            }
            rep.status = rep.violations.empty() ? RequirementStatus::NoWitnessOnWindow
                                                : RequirementStatus::Violation;
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

} // namespace htpq
