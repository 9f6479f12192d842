#pragma once
// JSON-lines trace formats.  Every trace file is a header line followed by
// one JSON object per line; the header embeds the schema tag, the artifact
// version, and the complete run configuration, so a trace alone suffices to
// replay the run.  All emission is deterministic: identical configurations
// yield byte-identical files.  Numbers that can exceed 2^53 travel as
// decimal strings; rationals as "a/b"; dyadics as "n/2^k" (or "n").

#include "htpq/greenred.hpp"
#include "htpq/injury.hpp"

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace htpq {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kConstructSchema = "htpq.construct/1";
inline constexpr const char* kGreenRedSchema = "htpq.greenred/1";

// Schedule files: a JSON object mapping requirement index to halt stage, with
// null for "never halts" ({"0": 2, "3": 5, "7": null}).  Null entries are
// normalized away on input; serialization emits converging entries only, in
// ascending index order.  Malformed input throws ParseError.
HaltSchedule parse_schedule(const std::string& json_text);
std::string schedule_json(const HaltSchedule& schedule);

// Construction traces.  Header:
//   {"schema","version","config":{"schedule":{...},"stages":N}}
// followed by one event line per stage:
//   {"stage","e","t","prime","converged","protected":[...],"deleted":[...]}
// where "protected" is the full protected set of R_e after the stage and
// "deleted" the primes removed at this stage, both ascending.
std::string construct_header_line(const HaltSchedule& schedule, std::uint64_t stages);
std::string construct_event_line(const StageEvent& event);
std::string construct_trace_text(const HaltSchedule& schedule, std::uint64_t stages,
                                 const ConstructionTrace& trace);

struct ConstructRun {
    HaltSchedule schedule;
    std::uint64_t stages = 0;
    ConstructionTrace trace;
};

// Inverse of construct_trace_text; validates schema and version and that the
// event count matches the configured stage count.  Throws ParseError.
ConstructRun parse_construct_trace(const std::string& text);

// Green-red traces.  Header:
//   {"schema","version","config":{"v","u","horizon"}}
// (u is the preset limit of the bound sequence), then one line per stage:
//   {"s","l","next_level","chip","u","processed","processed_measure",
//    "d","d_bits":[b_j...],"blocks","a","prioritized","prioritized_measure",
//    "mirror","lemma"}
// with "l" the working level, "processed" the count k_s of minimal red
// nodes greened, "blocks" the cumulative block count |D_s|, and a final
//   {"summary":true,"stages","level","a","u","window_ok",...}
// record.  Counts are decimal strings (they overflow 2^53 quickly).
std::string greenred_header_line(const mpq_class& v, const mpq_class& u, std::uint64_t horizon);
std::string greenred_stage_line(const StageRecord& rec, const mpz_class& blocks_total);
std::string greenred_summary_line(const GreenRedEngine& engine);

} // namespace htpq
