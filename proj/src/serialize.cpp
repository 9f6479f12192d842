#include "htpq/serialize.hpp"

#include "htpq/errors.hpp"

#include <charconv>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace htpq {

using json = nlohmann::ordered_json;

namespace {

std::string qstr(const mpq_class& r) { return r.get_str(); }

json schedule_obj(const HaltSchedule& schedule) {
    json obj = json::object();
    // std::map orders by index, so emission order is canonical.
    for (const auto& [e, stage] : schedule.converges) obj[std::to_string(e)] = stage;
    return obj;
}

std::uint64_t parse_index(const std::string& key) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), value);
    if (ec != std::errc{} || ptr != key.data() + key.size())
        throw ParseError("schedule key is not a requirement index: '" + key + "'");
    return value;
}

HaltSchedule schedule_from_obj(const json& obj) {
    if (!obj.is_object()) throw ParseError("schedule must be a JSON object");
    HaltSchedule schedule;
    for (const auto& [key, value] : obj.items()) {
        std::uint64_t e = parse_index(key);
        if (value.is_null()) continue; // never halts
        if (!value.is_number_unsigned())
            throw ParseError("schedule entry for " + key + " must be a stage or null");
        schedule.converges[e] = value.get<std::uint64_t>();
    }
    return schedule;
}

const json& need(const json& obj, const char* key, const char* where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(std::string(where) + ": missing field '" + key + "'");
    return *it;
}

std::uint64_t need_u64(const json& obj, const char* key, const char* where) {
    const json& v = need(obj, key, where);
    if (!v.is_number_unsigned())
        throw ParseError(std::string(where) + ": field '" + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool need_bool(const json& obj, const char* key, const char* where) {
    const json& v = need(obj, key, where);
    if (!v.is_boolean())
        throw ParseError(std::string(where) + ": field '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::vector<std::uint64_t> need_u64_list(const json& obj, const char* key, const char* where) {
    const json& v = need(obj, key, where);
    if (!v.is_array())
        throw ParseError(std::string(where) + ": field '" + key + "' must be an array");
    std::vector<std::uint64_t> out;
    out.reserve(v.size());
    for (const json& x : v) {
        if (!x.is_number_unsigned())
            throw ParseError(std::string(where) + ": field '" + key + "' must hold integers");
        out.push_back(x.get<std::uint64_t>());
    }
    return out;
}

json parse_line(const std::string& line, const char* where) {
    try {
        return json::parse(line);
    } catch (const json::exception& ex) {
        throw ParseError(std::string(where) + ": " + ex.what());
    }
}

} // namespace

HaltSchedule parse_schedule(const std::string& json_text) {
    return schedule_from_obj(parse_line(json_text, "schedule"));
}

std::string schedule_json(const HaltSchedule& schedule) { return schedule_obj(schedule).dump(); }

std::string construct_header_line(const HaltSchedule& schedule, std::uint64_t stages) {
    json header;
    header["schema"] = kConstructSchema;
    header["version"] = kArtifactVersion;
    header["config"] = {{"schedule", schedule_obj(schedule)}, {"stages", stages}};
    return header.dump();
}

std::string construct_event_line(const StageEvent& event) {
    json line;
    line["stage"] = event.stage;
    line["e"] = event.e;
    line["t"] = event.t;
    line["prime"] = event.prime;
    line["converged"] = event.converged;
    line["protected"] = event.protected_now;
    line["deleted"] = event.deleted_now;
    return line.dump();
}

std::string construct_trace_text(const HaltSchedule& schedule, std::uint64_t stages,
                                 const ConstructionTrace& trace) {
    std::ostringstream out;
    out << construct_header_line(schedule, stages) << '\n';
    for (const StageEvent& event : trace.events) out << construct_event_line(event) << '\n';
    return out.str();
}

ConstructRun parse_construct_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trace: empty input");

    json header = parse_line(line, "trace header");
    const json& schema = need(header, "schema", "trace header");
    if (schema != kConstructSchema)
        throw ParseError("trace header: schema is " + schema.dump() + ", expected \"" +
                         kConstructSchema + "\"");
    const json& version = need(header, "version", "trace header");
    if (version != kArtifactVersion)
        throw ParseError("trace header: version is " + version.dump() + ", expected \"" +
                         kArtifactVersion + "\"");
    const json& config = need(header, "config", "trace header");

    ConstructRun run;
    run.schedule = schedule_from_obj(need(config, "schedule", "trace config"));
    run.stages = need_u64(config, "stages", "trace config");

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj = parse_line(line, "trace event");
        StageEvent event;
        event.stage = need_u64(obj, "stage", "trace event");
        event.e = need_u64(obj, "e", "trace event");
        event.t = need_u64(obj, "t", "trace event");
        event.prime = need_u64(obj, "prime", "trace event");
        event.converged = need_bool(obj, "converged", "trace event");
        event.protected_now = need_u64_list(obj, "protected", "trace event");
        event.deleted_now = need_u64_list(obj, "deleted", "trace event");
        run.trace.events.push_back(std::move(event));
    }
    if (run.trace.events.size() != run.stages)
        throw ParseError("trace: header announces " + std::to_string(run.stages) +
                         " stages but " + std::to_string(run.trace.events.size()) +
                         " events follow");
    return run;
}

std::string greenred_header_line(const mpq_class& v, const mpq_class& u, std::uint64_t horizon) {
    json header;
    header["schema"] = kGreenRedSchema;
    header["version"] = kArtifactVersion;
    header["config"] = {{"v", qstr(v)}, {"u", qstr(u)}, {"horizon", horizon}};
    return header.dump();
}

std::string greenred_stage_line(const StageRecord& rec, const mpz_class& blocks_total) {
    json line;
    line["s"] = rec.stage;
    line["l"] = rec.window_start;
    line["next_level"] = rec.level;
    line["chip"] = qstr(rec.chip);
    line["u"] = qstr(rec.u);
    line["processed"] = rec.processed_nodes.get_str();
    line["processed_measure"] = rec.processed_measure.str();
    line["d"] = rec.d.str();
    line["d_bits"] = rec.b;
    line["blocks"] = blocks_total.get_str();
    line["a"] = rec.a.str();
    line["prioritized"] = rec.prioritized_members.get_str();
    line["prioritized_measure"] = rec.prioritized_measure.str();
    line["mirror"] = rec.mirror_alive;
    line["lemma"] = rec.lemma_ok;
    return line.dump();
}

std::string greenred_summary_line(const GreenRedEngine& engine) {
    const StageRecord& last = engine.last(); // throws before the first stage
    mpq_class left = last.u - mpq_class(mpz_class(1), mpz_class(mpz_class(1) << last.stage));
    bool window_ok = engine.a().cmp(left) > 0 && engine.a().cmp(last.u) < 0;

    json line;
    line["summary"] = true;
    line["stages"] = engine.stage();
    line["level"] = engine.level();
    line["a"] = engine.a().str();
    line["u"] = qstr(last.u);
    line["window_ok"] = window_ok;
    line["live_classes"] = engine.live_classes().size();
    line["mirror_alive"] = engine.mirror_alive();
    if (engine.mirror_alive())
        line["mirror_death_stage"] = nullptr;
    else
        line["mirror_death_stage"] = engine.mirror_death_stage();
    return line.dump();
}

} // namespace htpq
