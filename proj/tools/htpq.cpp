// Command-line front end: exact number-theoretic diagnostics, the bounded
// solvability search, the finite-injury construction with JSONL traces, and
// the green-red stage engine.  Every subcommand is deterministic and all
// numeric output is exact (rationals "a/b", dyadics "n/2^k").
// Exit codes: 0 success, 1 invariant violation, 2 input error, 3 cap exceeded.

#include "htpq/boundary.hpp"
#include "htpq/errors.hpp"
#include "htpq/greenred.hpp"
#include "htpq/injury.hpp"
#include "htpq/numtheory.hpp"
#include "htpq/poly.hpp"
#include "htpq/rings.hpp"
#include "htpq/serialize.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

using namespace htpq;

mpq_class parse_rational(const std::string& s) {
    mpq_class r;
    if (r.set_str(s, 10) != 0 || r.get_den() == 0)
        throw std::invalid_argument("not a rational: '" + s + "'");
    r.canonicalize();
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

void cmd_primes(std::uint64_t e, const std::vector<std::uint64_t>& avoid, std::size_t count,
                std::uint64_t cap) {
    std::uint64_t q = odd_prime(e);
    std::cout << "q_" << e << " = " << q << "; avoiding";
    if (avoid.empty()) {
        std::cout << " nothing";
    } else {
        for (std::uint64_t i : avoid) std::cout << " q_" << i << " = " << odd_prime(i);
    }
    std::cout << '\n';

    CrtWitness w = crt_residue_witness(e, avoid);
    std::cout << "residue class " << w.n << " mod " << w.m
              << " consists of appropriate primes\n";

    for (std::uint64_t p : find_appropriate_primes(e, avoid, count, cap)) {
        int leg = legendre(-mpz_class(q), p);
        bool direct = is_q_appropriate(p, q);
        bool criteria = is_q_appropriate_criteria(p, q);
        std::cout << p << ": legendre(-" << q << ", " << p << ") = " << leg
                  << ", p mod 4 = " << p % 4 << ", criteria path "
                  << (direct == criteria ? "agrees" : "DISAGREES");
        for (std::uint64_t i : avoid)
            std::cout << ", not " << odd_prime(i) << "-appropriate";
        std::cout << '\n';
        if (direct != criteria)
            throw InvariantViolation("evaluation paths disagree at p = " + std::to_string(p));
    }
}

void cmd_conic(std::uint64_t p, std::uint64_t q, unsigned k_max) {
    std::optional<ConicSolution> sol = conic_primitive_solution(p, q, k_max);
    if (!sol) {
        if (is_q_appropriate(p, q))
            std::cout << "no primitive solution with k <= " << k_max
                      << " (p is " << q << "-appropriate; a larger k exists)\n";
        else
            std::cout << "no solution at any k: " << p << " is not " << q << "-appropriate\n";
        return;
    }
    std::cout << sol->a << "^2 + " << q << "*" << sol->b << "^2 = " << p << "^" << 2 * sol->k
              << "  (primitive, least k, then least b)\n";
    auto [x, y] = solution_in_localization(*sol);
    std::cout << "point on x^2 + " << q << "y^2 = 1: x = " << x << ", y = " << y << '\n';

    mpz_class pk = 1;
    for (unsigned i = 0; i < sol->k; ++i) pk *= p;
    PositivityWitness pos = positivity_witness(y, pk);
    std::cout << "positivity: s = " << pos.s << ", z = (" << pos.z[0] << ", " << pos.z[1] << ", "
              << pos.z[2] << ", " << pos.z[3] << "), w = (" << pos.w[0] << ", " << pos.w[1]
              << ", " << pos.w[2] << ", " << pos.w[3] << ")\n";
}

void cmd_search(const std::string& poly_text, std::optional<std::uint64_t> fe,
                const std::vector<std::uint64_t>& invert, std::uint64_t height) {
    RingDescriptor ring =
        RingDescriptor::inverted_finite(std::set<std::uint64_t>(invert.begin(), invert.end()));

    IntPoly f;
    if (fe) {
        f = build_fe(*fe);
        Verdict v = family_verdict(FamilyPoly::fe(*fe), ring);
        std::cout << "family verdict: "
                  << (v == Verdict::In ? "In" : v == Verdict::Out ? "Out" : "NoWitnessYet")
                  << '\n';
    } else {
        f = IntPoly::parse(poly_text);
    }

    std::optional<Assignment> zero = search_solution(f, ring, height);
    if (!zero) {
        std::cout << "no zero with height <= " << height << '\n';
        return;
    }
    std::cout << "zero found:";
    for (unsigned id : f.used_vars()) std::cout << " x" << id << " = " << (*zero)[id];
    std::cout << '\n';
    if (f.eval(*zero) != 0) throw InvariantViolation("reported zero does not evaluate to 0");
    std::cout << "evaluates to 0 exactly\n";
}

void print_verification(const ConstructionTrace& trace, const HaltSchedule& schedule,
                        std::uint64_t e_max) {
    bool violated = false;
    for (const RequirementReport& r : verify_requirements(trace, schedule, e_max)) {
        std::cout << "R_" << r.e << ": " << (r.halted ? "halts" : "never halts") << ", ";
        switch (r.status) {
        case RequirementStatus::SatisfiedIn:
            std::cout << "satisfied, witness " << r.witness;
            break;
        case RequirementStatus::Pending:
            std::cout << "pending (no protected witness yet)";
            break;
        case RequirementStatus::NoWitnessOnWindow:
            std::cout << "no witness on the inspected window (end " << r.window_end << ")";
            break;
        case RequirementStatus::Violation:
            std::cout << "VIOLATION, surviving witnesses:";
            for (std::uint64_t p : r.violations) std::cout << ' ' << p;
            violated = true;
            break;
        }
        std::cout << ", considered " << r.considered_count << " primes\n";
    }
    if (violated) throw InvariantViolation("verification found a violated requirement");
}

void cmd_construct(const std::string& sched_path, const std::string& sched_inline,
                   std::uint64_t stages, const std::string& out_path,
                   const std::string& replay_path, std::uint64_t survivors) {
    if (!replay_path.empty()) {
        std::string text = read_file(replay_path);
        ConstructRun parsed = parse_construct_trace(text);
        std::string header = construct_header_line(parsed.schedule, parsed.stages);
        std::cout << "header matches config: "
                  << (text.compare(0, header.size(), header) == 0 ? "yes" : "NO") << '\n';
        auto [trace, state] = run(parsed.schedule, parsed.stages);
        std::string again = construct_trace_text(parsed.schedule, parsed.stages, trace);
        if (again != text)
            throw InvariantViolation("replay of " + replay_path + " is not byte-identical");
        std::cout << "replay: byte-identical (" << parsed.stages << " stages, " << again.size()
                  << " bytes)\n";
        return;
    }

    if (stages == 0) throw std::invalid_argument("--stages must be at least 1");
    HaltSchedule schedule; // no entries: nothing ever halts
    if (!sched_path.empty()) schedule = parse_schedule(read_file(sched_path));
    if (!sched_inline.empty()) schedule = parse_schedule(sched_inline);

    auto [trace, state] = run(schedule, stages);
    std::string text = construct_trace_text(schedule, stages, trace);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
        std::cout << "wrote " << out_path << " (" << stages << " events)\n";
    }

    std::uint64_t e_max = 0;
    for (const auto& [e, _] : schedule.converges) e_max = std::max(e_max, e);
    for (const StageEvent& ev : trace.events) e_max = std::max(e_max, ev.e);
    print_verification(trace, schedule, e_max);

    std::cout << "removed " << state.removed.size() << " primes in " << stages << " stages\n";
    std::cout << "limit membership up to " << survivors << ":";
    for (std::uint64_t p = 2; p <= survivors; ++p)
        if (is_prime_u64(p) && decide_membership(p, schedule)) std::cout << ' ' << p;
    std::cout << '\n';
}

void cmd_blocks(std::size_t count) {
    BlockSequence seq = nk_sequence(count);
    for (std::size_t k = 0; k < count; ++k)
        std::cout << "k = " << k + 1 << ": n = " << seq.n[k] << ", x = " << seq.x[k]
                  << ", P = " << seq.partial[k].str() << '\n';
    std::cout << "alpha (closed form, disjoint supports): " << alpha_closed_form(seq.n).str()
              << '\n';
}

void cmd_greenred(const std::string& v_text, const std::string& u_text, std::uint64_t stages,
                  const std::string& out_path) {
    if (stages == 0) throw std::invalid_argument("--stages must be at least 1");
    mpq_class v = parse_rational(v_text);
    mpq_class u = parse_rational(u_text);
    ChipFunction chip(v, u); // rejects v + u >= 1
    GreenRedEngine engine(USeq::preset(u), ChipSeq::canonical(chip));

    std::ostringstream trace;
    trace << greenred_header_line(v, u, stages) << '\n';
    mpz_class blocks_total = 0;
    for (std::uint64_t s = 1; s <= stages; ++s) {
        engine.step();
        blocks_total += engine.last().processed_nodes;
        trace << greenred_stage_line(engine.last(), blocks_total) << '\n';
    }
    std::string summary = greenred_summary_line(engine);
    trace << summary << '\n';

    if (out_path.empty()) {
        std::cout << trace.str();
    } else {
        write_file(out_path, trace.str());
        std::cout << "wrote " << out_path << " (" << stages << " stages)\n" << summary << '\n';
    }
}

void cmd_pad(std::size_t count, const std::string& poly_text, std::uint64_t n) {
    std::map<std::uint64_t, IntPoly> table;
    if (!poly_text.empty()) {
        if (n == 0) throw std::invalid_argument("--n must be at least 1");
        table[n] = IntPoly::parse(poly_text);
    } else {
        // Demo family G(n) = x1 - n: solvable over any ring, distinct per n.
        for (std::uint64_t k = 1; k <= count; ++k)
            table[k] = IntPoly::variable(1) - IntPoly::constant(k);
    }
    std::map<std::uint64_t, IntPoly> padded = pad_injective(table);
    std::set<std::string> distinct;
    for (const auto& [key, F] : padded) {
        std::cout << "F(" << key << ") = " << F.str() << '\n';
        distinct.insert(F.str());
    }
    std::cout << "distinct outputs: " << distinct.size() << " of " << padded.size() << '\n';
    if (distinct.size() != padded.size())
        throw InvariantViolation("padding failed to separate the table");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact toolkit for Hilbert's tenth problem over subrings of the rationals: "
                 "appropriate primes, conic points, bounded solvability search, the "
                 "finite-injury construction, and the green-red boundary engine."};
    app.require_subcommand(1);

    auto* primes = app.add_subcommand("primes", "First appropriate primes for an index");
    std::uint64_t pr_e = 0, pr_cap = 100'000'000ull;
    std::vector<std::uint64_t> pr_avoid;
    std::size_t pr_count = 1;
    primes->add_option("--e", pr_e, "Requirement index (q_e = e-th odd prime)")->required();
    primes->add_option("--not", pr_avoid, "Indices whose appropriateness must fail");
    primes->add_option("--count", pr_count, "How many primes to list");
    primes->add_option("--cap", pr_cap, "Scan cap");
    primes->callback([&] { cmd_primes(pr_e, pr_avoid, pr_count, pr_cap); });

    auto* conic = app.add_subcommand("conic", "Primitive solution of a^2 + q b^2 = p^2k");
    std::uint64_t co_p = 0, co_q = 0;
    unsigned co_kmax = 8;
    conic->add_option("--p", co_p, "Odd prime p")->required();
    conic->add_option("--q", co_q, "Odd prime q, q != p")->required();
    conic->add_option("--kmax", co_kmax, "Largest exponent k to try");
    conic->callback([&] { cmd_conic(co_p, co_q, co_kmax); });

    auto* search = app.add_subcommand("search", "Bounded zero search over a subring");
    std::string se_poly;
    std::uint64_t se_fe = 0, se_height = 40;
    std::vector<std::uint64_t> se_invert;
    auto* se_poly_opt = search->add_option("--poly", se_poly, "Polynomial, e.g. \"x1^2 + -2\"");
    auto* se_fe_opt =
        search->add_option("--fe", se_fe, "Use the e-th conic family polynomial instead");
    se_poly_opt->excludes(se_fe_opt);
    search->add_option("--invert", se_invert, "Primes inverted in the ring");
    search->add_option("--height", se_height, "Numerator/denominator height bound");
    search->callback([&] {
        if (se_poly.empty() && se_fe_opt->count() == 0)
            throw std::invalid_argument("need --poly or --fe");
        cmd_search(se_poly,
                   se_fe_opt->count() ? std::optional<std::uint64_t>(se_fe) : std::nullopt,
                   se_invert, se_height);
    });

    auto* construct = app.add_subcommand("construct", "Replay the finite-injury construction");
    std::string cn_sched, cn_inline, cn_out, cn_replay;
    std::uint64_t cn_stages = 0, cn_survivors = 50;
    auto* cn_sched_opt = construct->add_option("--schedule", cn_sched, "Schedule file {e: stage|null}")
                             ->check(CLI::ExistingFile);
    auto* cn_inline_opt =
        construct->add_option("--schedule-json", cn_inline, "Inline schedule JSON");
    cn_sched_opt->excludes(cn_inline_opt);
    construct->add_option("--stages", cn_stages, "Number of stages to run");
    construct->add_option("--out", cn_out, "Trace output path (default: stdout)");
    auto* cn_replay_opt =
        construct->add_option("--replay", cn_replay, "Verify an emitted trace file byte-for-byte")
            ->check(CLI::ExistingFile);
    cn_replay_opt->excludes(cn_sched_opt);
    cn_replay_opt->excludes(cn_inline_opt);
    construct->add_option("--survivors", cn_survivors, "Report limit membership up to this bound");
    construct->callback(
        [&] { cmd_construct(cn_sched, cn_inline, cn_stages, cn_out, cn_replay, cn_survivors); });

    auto* blocks = app.add_subcommand("blocks", "Coded blocks with measures approaching 1/2");
    std::size_t bl_count = 4;
    blocks->add_option("--count", bl_count, "How many blocks");
    blocks->callback([&] { cmd_blocks(bl_count); });

    auto* greenred = app.add_subcommand("greenred", "Green-red stage engine with JSONL trace");
    std::string gr_v = "1/4", gr_u = "3/10", gr_out;
    std::uint64_t gr_stages = 0;
    greenred->add_option("--v", gr_v, "Permanent red measure target (rational)");
    greenred->add_option("--u", gr_u, "Green measure limit, preset bound sequence (rational)");
    greenred->add_option("--stages", gr_stages, "Horizon: number of stages")->required();
    greenred->add_option("--out", gr_out, "Trace output path (default: stdout)");
    greenred->callback([&] { cmd_greenred(gr_v, gr_u, gr_stages, gr_out); });

    auto* pad = app.add_subcommand("pad", "Injective padding of a code table");
    std::size_t pa_count = 3;
    std::string pa_poly;
    std::uint64_t pa_n = 0;
    pad->add_option("--count", pa_count, "Pad the demo family for keys 1..count");
    pad->add_option("--poly", pa_poly, "Pad this polynomial instead");
    pad->add_option("--n", pa_n, "Key for --poly");
    pad->callback([&] { cmd_pad(pa_count, pa_poly, pa_n); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const htpq::InvariantViolation& ex) {
        std::cerr << "invariant violation: " << ex.what() << '\n';
        return 1;
    } catch (const htpq::CapExceeded& ex) {
        std::cerr << "cap exceeded: " << ex.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "input error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
