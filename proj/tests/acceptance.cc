/// Acceptance checks: one PASS or FAIL line per criterion, nonzero exit if any fails.

#include "oracle.hh"

#include <fraisse/bundle.hh>
#include <fraisse/cli.hh>
#include <fraisse/fixtures.hh>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace fraisse;

namespace
{
    using Clock = std::chrono::steady_clock;

    auto seconds_since(Clock::time_point start) -> double
    {
        return std::chrono::duration<double>(Clock::now() - start).count();
    }

    struct Check
    {
        bool pass = false;
        std::string detail;
    };

    auto fixture(const std::string & name) -> std::string
    {
        return std::string(FRAISSE_FIXTURE_DIR) + "/" + name + ".json";
    }

    auto fmt(double x) -> std::string
    {
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "%.2f", x);
        return buffer;
    }

    /// Backtracking embedding search written against instance sets only.
    auto embeds_by_backtracking(const FinStructure & a, const FinStructure & b) -> bool
    {
        auto source = oracle::instance_set(a);
        auto target = oracle::instance_set(b);
        std::vector<std::vector<Instance>> source_at(a.size()), target_at(b.size());
        for (auto & i : a.instances())
            source_at[*std::max_element(i.begin(), i.end())].push_back(i);
        for (auto & i : b.instances())
            for (int e : std::set<int>(i.begin(), i.end()))
                target_at[e].push_back(i);
        std::vector<int> map(a.size(), -1), inverse(b.size(), -1);
        auto consistent = [&] (int v, int w) {
            for (auto & i : source_at[v])
                if (! target.count(oracle::mapped(b, i, map)))
                    return false;
            for (auto & j : target_at[w]) {
                if (! std::all_of(j.begin(), j.end(), [&] (int e) { return inverse[e] != -1; }))
                    continue;
                if (! source.count(oracle::mapped(a, j, inverse)))
                    return false;
            }
            return true;
        };
        auto rec = [&] (auto & self, int v) -> bool {
            if (v == a.size())
                return true;
            for (int w = 0 ; w < b.size() ; ++w) {
                if (inverse[w] != -1)
                    continue;
                map[v] = w;
                inverse[w] = v;
                if (consistent(v, w) && self(self, v + 1))
                    return true;
                inverse[w] = -1;
                map[v] = -1;
            }
            return false;
        };
        return rec(rec, 0);
    }

    auto chain_lengths(const std::vector<std::string> & ages, int sockel_bound, int size_bound,
            const std::vector<int> & expected, double limit) -> Check
    {
        Check v{ true, "" };
        for (std::size_t i = 0 ; i < ages.size() ; ++i) {
            auto start = Clock::now();
            auto age = resolve_age(fixture(ages[i]));
            auto r = classify(*age, sockel_bound, size_bound);
            double took = seconds_since(start);
            bool ok = r.verdict == Verdict::IndivisibleCertified && r.chain_length == expected[i] && took < limit;
            v.pass = v.pass && ok;
            v.detail += ages[i] + " chain " + std::to_string(r.chain_length) + " (want " + std::to_string(expected[i])
                + ", " + verdict_name(r.verdict) + ", " + fmt(took) + "s) ";
        }
        return v;
    }

    auto criterion_1() -> Check
    {
        return chain_lengths({ "k3free", "k4free", "k5free" }, 3, 5, { 2, 3, 4 }, 60);
    }

    auto criterion_2() -> Check
    {
        return chain_lengths({ "knfree-3-5", "knfree-3-6" }, 4, 6, { 3, 4 }, 300);
    }

    auto criterion_3() -> Check
    {
        auto start = Clock::now();
        auto age = resolve_age(fixture("twtriangle"));
        auto r = classify(*age, 2, 5);
        if (r.verdict != Verdict::Divisible || ! r.witness)
            return { false, "classifier verdict " + verdict_name(r.verdict) };
        bool witness = verify_witness(*age, *r.witness);

        GenericStructure g(age, GeneratorConfig{ 0 });
        g.advance_until([] (const GenericStructure & x) { return x.size() >= 60; }, 100000);
        auto p = build_pqr(g, r.witness->t, r.witness->s, 60, 2);
        std::vector<int> head{ 0, 1, 2, 3, 4, 5 };
        auto source = g.indexed().induced(head);
        auto q = g.indexed().induced(p.members(PQRClass::Q));
        bool into_q = embeds_by_backtracking(source, q);
        bool library = embeds(source, q);
        double took = seconds_since(start);
        std::ostringstream d;
        d << "witness verified " << witness << ", |P|=" << p.members(PQRClass::P).size() << " |Q|="
          << p.members(PQRClass::Q).size() << " |R|=" << p.members(PQRClass::R).size()
          << ", prefix embeds into Q " << into_q << " (library " << library << "), " << fmt(took) << "s";
        return { witness && ! into_q && ! library && took < 120, d.str() };
    }

    auto criterion_4() -> Check
    {
        auto start = Clock::now();
        int pairs = 0, mismatches = 0, comparisons = 0;
        for (int clique : { 4, 5 }) {
            GenericStructure g(clique_free_age(clique), { std::uint64_t(clique), GenerationMode::Random, 2 });
            g.advance(150);
            auto & age = *g.age();
            auto members = age_members_up_to(age, 4);
            std::mt19937_64 rng(clique * 7 + 1);
            int checked = 0;
            for (int round = 0 ; round < 20000 && checked < 50 ; ++round) {
                int base = int(rng() % 30), c = int(rng() % 60), s = int(rng() % 60);
                int x = int(rng() % 120), y = int(rng() % 120);
                std::set<int> distinct{ base, c, s };
                if (distinct.size() < 3 || distinct.count(x) || distinct.count(y))
                    continue;
                auto t = g.type_of({ base, c }, x);
                auto u = g.type_of({ base, s }, y);
                if (free_position_violation(g.indexed(), t, u))
                    continue;
                auto j = join(g.indexed(), age, t, u);
                for (auto & a : members) {
                    bool lhs = rank_contains(age, j, a, RankSearch::Exhaustive);
                    bool rhs = rank_contains(age, t, a, RankSearch::Exhaustive) && rank_contains(age, u, a, RankSearch::Exhaustive);
                    mismatches += lhs != rhs;
                    ++comparisons;
                }
                ++checked;
            }
            pairs += checked;
        }
        double took = seconds_since(start);
        return { pairs == 100 && mismatches == 0 && took < 300,
                std::to_string(pairs) + " pairs, " + std::to_string(comparisons) + " comparisons, "
                + std::to_string(mismatches) + " mismatches, " + fmt(took) + "s" };
    }

    /// A random well-formed script of one to three steps over the type t.
    auto random_script(GenericStructure & g, const TypeDescriptor & t, std::mt19937_64 & rng) -> FormScript
    {
        static const std::vector<std::string> shapes{ "+", ">", "++", "+>", ">+", ">>", "+++", "++>", "+>+", ">++",
                "+>>", ">+>", ">>+", ">>>", "[+]", "[>]" };
        auto shape = shapes[rng() % shapes.size()];
        std::set<int> used(t.sockel.begin(), t.sockel.end());
        auto fresh = [&] {
            while (true) {
                int e = int(rng() % std::uint64_t(g.size()));
                if (used.insert(e).second)
                    return e;
            }
        };
        auto sig = g.age()->signature();
        FormScript script;
        std::optional<TypeDescriptor> at_open;
        for (char ch : shape) {
            if (ch == '+') {
                FinStructure tmpl(sig, 2);
                if (rng() & 1)
                    tmpl.add(Instance(0, { 0, 1 }));
                script.steps.push_back(FormStep{ FormSymbol::Plus, TypeDescriptor{ { fresh() }, tmpl }, {} });
            }
            else if (ch == '>') {
                std::vector<int> e{ fresh() };
                if (rng() & 1)
                    e.push_back(fresh());
                std::sort(e.begin(), e.end());
                script.steps.push_back(FormStep{ FormSymbol::Free, std::nullopt, e });
            }
            else if (ch == '[') {
                at_open = apply_form(g.indexed(), *g.age(), t, script).type;
                script.steps.push_back(FormStep{ FormSymbol::Open, std::nullopt, {} });
            }
            else {
                auto operand = free_successor(g.indexed(), *g.age(), *at_open, { fresh() });
                script.steps.push_back(FormStep{ FormSymbol::Close, operand, {} });
            }
        }
        return script;
    }

    auto criterion_5() -> Check
    {
        auto start = Clock::now();
        int scripts = 0, failures = 0, rejected = 0, most_advanced = 0;
        std::string first_failure;
        for (auto name : { "rado", "k3free" }) {
            GenericStructure g(named_age(name), GeneratorConfig{ 1 });
            g.advance(200);
            std::mt19937_64 rng(name[0]);
            int done = 0;
            while (done < 25) {
                int base = int(rng() % 40), x = int(rng() % 40);
                if (base == x)
                    continue;
                auto t = g.type_of({ base }, x);
                FormedType formed;
                FormScript script;
                try {
                    script = random_script(g, t, rng);
                    formed = apply_form(g.indexed(), *g.age(), t, script);
                }
                catch (const TypeError &) {
                    ++rejected;
                    continue;
                }
                auto c = make_bundle(t.sockel, { t });
                auto b = make_bundle(formed.type.sockel, { formed.type });
                auto verdict = melding_probe(g, c, b, ProbeConfig{ 3, 4, 12, 2000, 500 });
                most_advanced = std::max(most_advanced, verdict.advanced);
                if (! verdict.pass || verdict.advanced > 500) {
                    ++failures;
                    if (first_failure.empty())
                        first_failure = std::string(" first: ") + name + " " + script.text() + ": " + verdict.reason;
                }
                ++done;
                ++scripts;
            }
        }
        double took = seconds_since(start);
        return { scripts == 50 && failures == 0,
                std::to_string(scripts) + " scripts, " + std::to_string(failures) + " failures, " + std::to_string(rejected)
                + " ill-typed drafts redrawn, most advanced " + std::to_string(most_advanced) + ", " + fmt(took) + "s"
                + first_failure };
    }

    auto criterion_6() -> Check
    {
        int runs = 0, good = 0, sides = 0;
        double slowest = 0;
        std::string bad;
        for (auto & kind : builtin_oracle_kinds())
            for (std::uint64_t seed = 0 ; seed < 4 ; ++seed) {
                auto start = Clock::now();
                GenericStructure g(rado_age(), GeneratorConfig{ seed });
                auto o = make_oracle(builtin_oracle(kind, seed));
                ConstructConfig c;
                c.target = 40;
                c.seed = seed;
                auto r = monochromatic_construct(g, *o, c);
                double took = seconds_since(start);
                slowest = std::max(slowest, took);
                auto w = r.winner();
                bool ok = w && w->verified && int(w->images.size()) >= 40 && took < 5
                    && verify_prefix(g, *o, w->prefix, w->images, w->colour);
                ++runs;
                good += ok;

                GenericStructure h(rado_age(), GeneratorConfig{ seed });
                auto d = rado_dichotomy(h, *o, 40, {}, seed);
                auto dw = d.side == blue && d.run.counter ? d.run.counter.get() : &d.run;
                bool side = d.side != -1 && dw->verified && dw->colour == d.side
                    && verify_prefix(h, *o, dw->prefix, dw->images, dw->colour);
                sides += side;
                if ((! ok || ! side) && bad.empty())
                    bad = " first failure: " + kind + " seed " + std::to_string(seed);
            }
        return { good == runs && sides == runs,
                std::to_string(good) + "/" + std::to_string(runs) + " verified copies, " + std::to_string(sides) + "/"
                + std::to_string(runs) + " dichotomy sides, slowest " + fmt(slowest) + "s" + bad };
    }

    auto criterion_7() -> Check
    {
        int ok = 0, direct = 0, countered = 0, inconclusive = 0;
        double slowest = 0;
        for (std::uint64_t seed = 0 ; seed < 10 ; ++seed) {
            auto start = Clock::now();
            GenericStructure g(clique_free_age(3), GeneratorConfig{ seed });
            OracleSpec spec;
            spec.kind = "adjacent";
            spec.seed = seed;
            spec.element = int(seed % 5);
            auto o = make_oracle(spec);
            ConstructConfig c;
            c.target = 25;
            c.seed = seed;
            c.colour = int(seed % 2);
            auto r = monochromatic_construct(g, *o, c);
            double took = seconds_since(start);
            slowest = std::max(slowest, took);
            inconclusive += r.outcome == Outcome::Inconclusive;
            bool good = false;
            if (r.outcome == Outcome::Success && r.verified) {
                good = true;
                ++direct;
            }
            else if (r.outcome == Outcome::Obstruction && r.obstruction && r.counter && r.counter->outcome == Outcome::Success
                    && r.counter->verified) {
                good = true;
                ++countered;
            }
            if (auto w = r.winner())
                good = good && verify_prefix(g, *o, w->prefix, w->images, w->colour) && int(w->images.size()) == 25;
            ok += good && took < 30;
        }
        return { ok == 10 && inconclusive == 0,
                std::to_string(ok) + "/10 verified (" + std::to_string(direct) + " direct, " + std::to_string(countered)
                + " after an obstruction), " + std::to_string(inconclusive) + " inconclusive, slowest " + fmt(slowest) + "s" };
    }

    auto criterion_8() -> Check
    {
        auto start = Clock::now();
        std::mt19937_64 rng(11);
        int valid = 0, audits = 0, witnesses = 0;
        for (std::uint64_t seed = 0 ; seed < 200 ; ++seed) {
            auto inst = random_mho(seed);
            bool shape = ! validate_mho(inst) && inst.sorts() <= 6 && inst.ranks <= 3 && inst.ground <= 8;
            valid += shape;
            std::vector<bool> s(inst.ground);
            for (int e = 0 ; e < inst.ground ; ++e)
                s[e] = rng() & 1;
            audits += audit_mho(inst, s).ok();
            auto large = largeness_dichotomy(inst, s);
            bool member_wise = large.computed && large.phi_verified && large.intersection_verified;
            std::vector<bool> w(inst.sorts(), false);
            for (int x : large.witness)
                w[x] = true;
            for (int x : large.witness)
                member_wise = member_wise && small_phi(inst, w, x);
            witnesses += member_wise;
        }
        double took = seconds_since(start);
        return { valid == 200 && audits == 200 && witnesses == 200 && took < 60,
                std::to_string(valid) + " valid, " + std::to_string(audits) + " audits hold, " + std::to_string(witnesses)
                + " witnesses verify, " + fmt(took) + "s" };
    }

    auto criterion_9() -> Check
    {
        auto start = Clock::now();
        GenericStructure g(rado_age(), GeneratorConfig{ 0 });
        auto o = make_oracle(OracleSpec{ "edge-free-red" });
        auto w = weak_indivisibility_run(g, *o, complete_graph(2), red, 40);
        double took = seconds_since(start);
        bool blue_ok = w.run.outcome == Outcome::Success && w.run.colour == blue && w.run.verified
            && int(w.run.images.size()) >= 40 && verify_prefix(g, *o, w.run.prefix, w.run.images, blue);
        // The red class omits an edge in the final snapshot as well.
        bool red_free = true;
        auto snapshot = g.snapshot();
        for (auto & i : snapshot.instances())
            red_free = red_free && ! (o->colour(g.indexed(), i.entries[0]) == red && o->colour(g.indexed(), i.entries[1]) == red);
        return { blue_ok && ! w.audit_failed && red_free && took < 10,
                "blue prefix " + std::to_string(w.run.images.size()) + ", " + std::to_string(w.audits) + " audits, red edge-free "
                + (red_free ? "yes" : "no") + ", " + fmt(took) + "s" };
    }

    auto criterion_10() -> Check
    {
        auto start = Clock::now();
        auto age = clique_free_age(3);
        GenericStructure g(age, GeneratorConfig{ 4 });
        g.advance(400);
        auto b = make_bundle({ 0 }, { TypeDescriptor{ { 0 }, FinStructure(age->signature(), 2) } });
        int found = 0;
        for (std::uint64_t seed = 0 ; seed < 20 ; ++seed) {
            auto r = bundle_colouring_select(g, b, [&] (int y) { return int(mix_hash(seed, std::uint64_t(y)) >> 63); }, 2, 3);
            found += bool(r.epsilon);
        }
        double took = seconds_since(start);
        return { found == 20 && took < 120, std::to_string(found) + "/20 partitions with a passing selection, " + fmt(took) + "s" };
    }

    auto criterion_11() -> Check
    {
        auto dir = std::filesystem::temp_directory_path() / "fraisse-acceptance";
        std::filesystem::create_directories(dir);
        std::vector<RunConfig> configs;
        auto add = [&] (RunConfig c) { configs.push_back(std::move(c)); };

        RunConfig c;
        c.command = "classify";
        c.inputs = { fixture("k3free") };
        add(c);
        c = {};
        c.command = "sample";
        c.inputs = { fixture("k4free") };
        c.steps = 60;
        c.seed = 3;
        add(c);
        c = {};
        c.command = "types";
        c.inputs = { fixture("rado") };
        c.steps = 40;
        c.sockel = { 0, 1 };
        add(c);
        c = {};
        c.command = "game";
        c.inputs = { fixture("k3free") };
        c.oracle = "random";
        c.seed = 2;
        c.target = 25;
        add(c);
        c = {};
        c.command = "dichotomy";
        c.inputs = { fixture("rado") };
        c.oracle = "degree";
        c.seed = 1;
        add(c);
        c = {};
        c.command = "mho";
        c.seed = 17;
        add(c);
        c = {};
        c.command = "divide";
        c.inputs = { fixture("twtriangle") };
        add(c);
        c = {};
        c.command = "weak";
        c.inputs = { fixture("rado") };
        c.oracle = "edge-free-red";
        add(c);
        c = {};
        c.command = "sample";
        c.inputs = { fixture("k3free") };
        c.steps = 30;
        auto sample_path = (dir / "sample.json").string();
        write_json(sample_path, run_command(c));
        c = {};
        c.command = "export-dot";
        c.inputs = { sample_path };
        add(c);

        int identical = 0;
        std::string differing;
        for (auto & config : configs) {
            auto first = canonical(without_timing(run_command(config)));
            auto second = canonical(without_timing(run_command(config)));
            if (first == second)
                ++identical;
            else
                differing += " " + config.command;
        }
        return { identical == int(configs.size()),
                std::to_string(identical) + "/" + std::to_string(configs.size()) + " commands replay identically" + differing };
    }
}

auto main() -> int
{
    std::vector<std::function<Check ()>> criteria{ criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10, criterion_11 };
    int failed = 0;
    for (std::size_t i = 0 ; i < criteria.size() ; ++i) {
        Check v;
        try {
            v = criteria[i]();
        }
        catch (const std::exception & e) {
            v = { false, std::string("threw: ") + e.what() };
        }
        failed += ! v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << v.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass" << std::endl;
    return failed == 0 ? 0 : 1;
}
