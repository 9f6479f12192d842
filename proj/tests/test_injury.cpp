#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "htpq/errors.hpp"
#include "htpq/injury.hpp"
#include "htpq/numtheory.hpp"

using namespace htpq;

namespace {

// Frozen ascending enumeration of the first 30 pet values with labels.
const std::vector<PetEntry> kFirst30 = {
    {3, 1, 0},    {5, 3, 0},    {7, 0, 0},    {11, 2, 0},   {13, 0, 1},   {17, 4, 0},
    {19, 0, 2},   {41, 1, 1},   {73, 0, 3},   {83, 1, 2},   {131, 5, 0},  {139, 0, 4},
    {173, 4, 1},  {197, 2, 1},  {251, 3, 1},  {293, 5, 1},  {461, 1, 3},  {491, 2, 2},
    {563, 1, 4},  {659, 2, 3},  {677, 4, 2},  {853, 0, 5},  {941, 1, 5},  {971, 3, 2},
    {1091, 5, 2}, {1217, 6, 0}, {1511, 3, 3}, {1553, 7, 0}, {1811, 6, 1}, {1877, 2, 4},
};

// Independent re-statement of the chain predicate through the reciprocity
// evaluation path.
bool chain_pattern(std::uint64_t p, std::uint64_t e, std::uint64_t t) {
    for (std::uint64_t i = 0; i <= e + t; ++i)
        if (is_q_appropriate_criteria(p, odd_prime(i)) != (i == e)) return false;
    return true;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t x) {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0;; ++i) {
        std::uint64_t p = nth_prime(i);
        if (p > x) break;
        out.push_back(p);
    }
    return out;
}

} // namespace

TEST_CASE("pet values match the frozen table") {
    for (const PetEntry& pe : kFirst30) CHECK(pet(pe.e, pe.t) == pe.value);
    CHECK(pet(0, 6) == 2917);
    CHECK(pet(0, 7) == 3373);
    CHECK(pet(0, 8) == 4597);
    CHECK(pet(1, 4) == 563);
    CHECK(pet(2, 3) == 659);
    CHECK(pet(3, 3) == 1511);
    CHECK(pet(3, 4) == 2777);
    CHECK(pet(9, 0) == 2273);
}

TEST_CASE("pet satisfies its defining minimality") {
    for (std::uint64_t e = 0; e <= 6; ++e) {
        std::uint64_t prev = e;
        for (std::uint64_t t = 0; e + t <= 6; ++t) {
            std::uint64_t v = pet(e, t);
            CHECK(v > prev);
            CHECK(is_prime_u64(v));
            CHECK(chain_pattern(v, e, t));
            for (std::uint64_t p : primes_up_to(v - 1))
                if (p > prev) CHECK_FALSE(chain_pattern(p, e, t));
            prev = v;
        }
    }
}

TEST_CASE("pet scan respects its cap") {
    // Chain 50 needs simultaneous inappropriateness for 50 moduli; its first
    // value is far beyond 1000, and nothing else ever computes it.
    CHECK_THROWS_AS(pet(50, 0, 1000), CapExceeded);
    CHECK(pet(0, 0, 7) == 7);
}

TEST_CASE("scanner enumerates pets ascending with labels") {
    PetScanner scanner;
    for (std::size_t k = 1; k <= kFirst30.size(); ++k) {
        const PetEntry& got = scanner.kth(k);
        CHECK(got == kFirst30[k - 1]);
        CHECK(pet(got.e, got.t) == got.value);
    }
    CHECK(scanner.count_up_to(2) == 0);
    CHECK(scanner.count_up_to(7) == 3);
    CHECK(scanner.count_up_to(500) == 18);
    CHECK(scanner.count_up_to(1877) == 30);
    CHECK(scanner.label_of(7) == PetEntry{7, 0, 0});
    CHECK(scanner.label_of(853) == PetEntry{853, 0, 5});
    CHECK(scanner.label_of(23) == std::nullopt);
    CHECK(scanner.label_of(2) == std::nullopt);
    CHECK_THROWS_AS(scanner.kth(0), std::invalid_argument);
    CHECK(PetScanner(100).kth(10) == PetEntry{83, 1, 2}); // 83 is the last pet under 100
    CHECK_THROWS_AS(PetScanner(100).kth(11), CapExceeded);
}

TEST_CASE("convergence convention: stage acts on the previous approximation") {
    HaltSchedule s{{{0, 2}}};
    CHECK_FALSE(s.converged_at(0, 1));
    CHECK_FALSE(s.converged_at(0, 2));
    CHECK(s.converged_at(0, 3));
    CHECK_FALSE(s.converged_at(1, 100));
    CHECK(s.stage_of(0) == 2);
    CHECK(s.stage_of(1) == std::nullopt);
}

TEST_CASE("replay: requirement zero halts at stage zero") {
    auto [trace, state] = run(HaltSchedule{{{0, 0}}}, 3);
    std::vector<StageEvent> expect = {
        {1, 1, 0, 3, false, {}, {}},
        {2, 3, 0, 5, false, {}, {}},
        {3, 0, 0, 7, true, {7}, {}},
    };
    CHECK(trace.events == expect);
    CHECK(state.removed.empty());
    CHECK(state.protected_sets.at(0) == std::set<std::uint64_t>{7});
    CHECK_FALSE(state.tie_warning);
}

TEST_CASE("replay: nothing halts") {
    auto [trace, state] = run(HaltSchedule{}, 5);
    std::vector<StageEvent> expect = {
        {1, 1, 0, 3, false, {}, {}},  {2, 3, 0, 5, false, {}, {}},
        {3, 0, 0, 7, false, {}, {}},  {4, 2, 0, 11, false, {}, {}},
        {5, 0, 1, 13, false, {}, {7}},
    };
    CHECK(trace.events == expect);
    CHECK(state.removed == std::set<std::uint64_t>{7});
    CHECK(state.protected_sets.empty());
}

TEST_CASE("replay: requirement one halts immediately") {
    auto [trace, state] = run(HaltSchedule{{{1, 0}}}, 1);
    std::vector<StageEvent> expect = {{1, 1, 0, 3, true, {3}, {}}};
    CHECK(trace.events == expect);
    CHECK(state.removed.empty());
}

TEST_CASE("replay is deterministic") {
    HaltSchedule sched{{{0, 2}, {3, 5}}};
    auto [t1, s1] = run(sched, 12);
    auto [t2, s2] = run(sched, 12);
    CHECK(t1.events == t2.events);
    CHECK(s1.considered == s2.considered);
    CHECK(s1.removed == s2.removed);
}

TEST_CASE("forty-stage replay with two halting requirements") {
    HaltSchedule sched{{{0, 2}, {3, 5}}};
    auto [trace, state] = run(sched, 40);
    REQUIRE(trace.events.size() == 40);

    std::vector<StageEvent> first8 = {
        {1, 1, 0, 3, false, {}, {}},
        {2, 3, 0, 5, false, {}, {}},
        {3, 0, 0, 7, true, {7}, {}},
        {4, 2, 0, 11, false, {}, {}},
        {5, 0, 1, 13, true, {7, 13}, {}},
        {6, 4, 0, 17, false, {}, {11}},
        {7, 0, 2, 19, true, {7, 13, 19}, {}},
        {8, 1, 1, 41, false, {}, {3, 23, 29}},
    };
    for (std::size_t i = 0; i < first8.size(); ++i) CHECK(trace.events[i] == first8[i]);

    CHECK(state.protected_sets.at(0) ==
          std::set<std::uint64_t>{7, 13, 19, 73, 139, 853, 2917, 3373, 4597});
    CHECK(state.protected_sets.at(3) == std::set<std::uint64_t>{251, 971, 1511, 2777});
    CHECK(state.protected_sets.size() == 2);

    CHECK(trace.events[9].deleted_now == std::vector<std::uint64_t>{41, 43, 47, 61, 67});
    CHECK(trace.events[12].deleted_now ==
          std::vector<std::uint64_t>{17, 59, 83, 113, 151, 157, 163, 167});
    CHECK(state.removed.size() == 525);

    // Tail of the consideration order.
    CHECK(state.considered[35] == PetEntry{3299, 2, 6});
    CHECK(state.considered[36] == PetEntry{3373, 0, 7});
    CHECK(state.considered[37] == PetEntry{3533, 4, 3});
    CHECK(state.considered[38] == PetEntry{4597, 0, 8});
    CHECK(state.considered[39] == PetEntry{4817, 2, 7});

    // Survivors among the small primes.
    std::vector<std::uint64_t> survivors;
    for (std::uint64_t p : primes_up_to(50))
        if (!state.removed.count(p)) survivors.push_back(p);
    CHECK(survivors == std::vector<std::uint64_t>{2, 5, 7, 13, 19});

    // Protection is permanent and never contradicted by a deletion.
    std::set<std::uint64_t> all_protected;
    std::map<std::uint64_t, std::vector<std::uint64_t>> last_seen;
    for (const StageEvent& ev : trace.events) {
        for (std::uint64_t p : ev.deleted_now) CHECK_FALSE(all_protected.count(p));
        if (ev.converged) {
            const auto& prev = last_seen[ev.e];
            CHECK(std::includes(ev.protected_now.begin(), ev.protected_now.end(), prev.begin(),
                                prev.end()));
            last_seen[ev.e] = ev.protected_now;
            all_protected.insert(ev.protected_now.begin(), ev.protected_now.end());
        }
    }

    // The closed-form decision agrees with the finished replay everywhere.
    for (std::uint64_t p : primes_up_to(50))
        CHECK(decide_membership(p, sched) == !state.removed.count(p));
}

TEST_CASE("limit membership for other schedules") {
    auto Vcap50 = [](const HaltSchedule& sched) {
        std::vector<std::uint64_t> v;
        for (std::uint64_t p : primes_up_to(50))
            if (decide_membership(p, sched)) v.push_back(p);
        return v;
    };
    CHECK(Vcap50(HaltSchedule{}) == std::vector<std::uint64_t>{2});
    CHECK(Vcap50(HaltSchedule{{{1, 0}}}) == std::vector<std::uint64_t>{2, 3, 41});
    CHECK(Vcap50(HaltSchedule{{{0, 7}, {1, 1}, {4, 3}}}) ==
          std::vector<std::uint64_t>{2, 3, 17, 41});
    CHECK(Vcap50(HaltSchedule{{{2, 4}, {5, 1}, {1, 9}}}) == std::vector<std::uint64_t>{2});
    CHECK_THROWS_AS(decide_membership(4, HaltSchedule{}), std::invalid_argument);

    // Replay agreement for a never-halting schedule over a longer horizon.
    auto [trace, state] = run(HaltSchedule{}, 60);
    for (std::uint64_t p : primes_up_to(50))
        CHECK(decide_membership(p, HaltSchedule{}) == !state.removed.count(p));
}

TEST_CASE("next considered value continues the enumeration") {
    CHECK(next_considered(ConstructionState{}) == PetEntry{3, 1, 0});
    auto [trace, state] = run(HaltSchedule{{{0, 2}, {3, 5}}}, 8);
    CHECK(next_considered(state) == PetEntry{73, 0, 3});
    CHECK_FALSE(state.tie_warning);

    ConstructionState bad = state;
    bad.considered[1].value = 7;
    CHECK_THROWS_AS(next_considered(bad), std::invalid_argument);
}

TEST_CASE("requirement verification over the forty-stage trace") {
    HaltSchedule sched{{{0, 2}, {3, 5}}};
    auto [trace, state] = run(sched, 40);
    auto reports = verify_requirements(trace, sched, 5);
    REQUIRE(reports.size() == 6);

    CHECK(reports[0].halted);
    CHECK(reports[0].status == RequirementStatus::SatisfiedIn);
    CHECK(reports[0].witness == 13);
    CHECK(reports[0].considered_count == 9);

    CHECK_FALSE(reports[1].halted);
    CHECK(reports[1].status == RequirementStatus::NoWitnessOnWindow);
    CHECK(reports[1].window_end == 2903);
    CHECK(reports[1].considered_count == 7);
    CHECK(reports[1].violations.empty());

    CHECK(reports[2].status == RequirementStatus::NoWitnessOnWindow);
    CHECK(reports[2].window_end == 4817);

    CHECK(reports[3].halted);
    CHECK(reports[3].status == RequirementStatus::SatisfiedIn);
    CHECK(reports[3].witness == 251);
    CHECK(reports[3].considered_count == 5);

    CHECK(reports[4].status == RequirementStatus::NoWitnessOnWindow);
    CHECK(reports[4].window_end == 3533);

    CHECK(reports[5].status == RequirementStatus::NoWitnessOnWindow);
    CHECK(reports[5].window_end == 1091);
}

TEST_CASE("requirement verification: pending and empty windows") {
    // Halted far in the future: its early considerations all diverge.
    HaltSchedule sched{{{0, 50}}};
    auto [trace, state] = run(sched, 3);
    auto reports = verify_requirements(trace, sched, 6);
    CHECK(reports[0].halted);
    CHECK(reports[0].status == RequirementStatus::Pending);
    CHECK(reports[0].witness == 0);
    // Chain 6 was never considered in three stages: vacuous window.
    CHECK_FALSE(reports[6].halted);
    CHECK(reports[6].status == RequirementStatus::NoWitnessOnWindow);
    CHECK(reports[6].window_end == 0);
    CHECK(reports[6].considered_count == 0);
}
