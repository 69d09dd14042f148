#include <doctest.h>

#include "oracle.hh"

#include <fraisse/types.hh>

using namespace fraisse;

namespace
{
    auto graph_age(int clique) -> AgePtr
    {
        if (clique == 0)
            return explicit_age(uniform_signature(2), {});
        return explicit_age(uniform_signature(2), { complete_graph(clique) });
    }

    auto twtriangle_age() -> AgePtr
    {
        auto sig = make_signature({ RelationSymbol{ "R", 2, Mode::Set }, RelationSymbol{ "B", 2, Mode::Set } });
        FinStructure red(sig, 3, { Instance(0, { 0, 1 }), Instance(0, { 0, 2 }), Instance(0, { 1, 2 }) });
        FinStructure blue(sig, 3, { Instance(1, { 0, 1 }), Instance(1, { 0, 2 }), Instance(1, { 1, 2 }) });
        FinStructure both(sig, 2, { Instance(0, { 0, 1 }), Instance(1, { 0, 1 }) });
        return explicit_age(sig, { red, blue, both });
    }

    /// Template on a sockel clique of size f with the star joined to the first `joined` sockel elements.
    auto clique_type(int f, int joined) -> TypeDescriptor
    {
        FinStructure s(uniform_signature(2), f + 1);
        for (int a = 0 ; a < f ; ++a)
            for (int b = a + 1 ; b < f ; ++b)
                s.add(Instance(0, { a, b }));
        for (int a = 0 ; a < joined ; ++a)
            s.add(Instance(0, { a, f }));
        return abstract_type(s);
    }

    auto edge() -> FinStructure
    {
        return complete_graph(2);
    }

    /// Finds k pairwise-nonadjacent elements avoiding `avoid`, all free of `avoid`.
    auto independent(const GenericStructure & g, const std::vector<int> & avoid, int k, int from = 0) -> std::vector<int>
    {
        std::vector<int> out;
        for (int v = from ; v < g.size() && int(out.size()) < k ; ++v) {
            bool ok = std::find(avoid.begin(), avoid.end(), v) == avoid.end();
            for (int w : avoid)
                ok = ok && ! g.indexed().adjacent(v, w);
            for (int w : out)
                ok = ok && ! g.indexed().adjacent(v, w);
            if (ok)
                out.push_back(v);
        }
        return out;
    }
}

TEST_CASE("types over a sockel")
{
    GenericStructure rado(graph_age(0));
    rado.advance(30);
    CHECK(types_over(rado, { 0 }).size() == 2);
    CHECK(types_over(rado, {}).size() == 1);

    GenericStructure k3(graph_age(3));
    k3.advance(60);
    int b = k3.indexed().neighbours(0).front();
    auto pair_types = types_over(k3, { 0, b });
    CHECK(pair_types.size() == 3);
    for (auto & t : pair_types)
        CHECK(t.tmpl.instances().size() <= 2);

    // Every element outside F lies in exactly one typeset.
    for (auto & sockel : std::vector<std::vector<int>>{ { 0 }, { 0, b }, { 1, 2 } }) {
        auto types = types_over(k3, sockel);
        for (int y = 0 ; y < k3.size() ; ++y) {
            if (std::find(sockel.begin(), sockel.end(), y) != sockel.end())
                continue;
            int hits = 0;
            for (auto & t : types)
                hits += k3.typeset_contains(t, y);
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("typeset membership")
{
    GenericStructure rado(graph_age(0));
    rado.advance(40);
    auto types = types_over(rado, { 0 });
    auto adjacent = types[0].tmpl.instances().empty() ? types[1] : types[0];
    for (int y = 1 ; y < rado.size() ; ++y)
        CHECK(rado.typeset_contains(adjacent, y) == rado.indexed().adjacent(0, y));
    CHECK(! rado.typeset_contains(adjacent, 0));
}

TEST_CASE("restriction and free successors")
{
    GenericStructure g(graph_age(5));
    g.advance(100);
    auto t = g.type_of({ 0, 1 }, 5);
    auto bottom = restrict_type(t, {});
    CHECK(bottom.sockel.empty());
    CHECK(bottom.tmpl == FinStructure(uniform_signature(2), 1));

    auto t0 = restrict_type(t, { 0 });
    CHECK(t0.sockel == std::vector<int>{ 0 });
    CHECK(g.typeset(t0).size() >= g.typeset(t).size());
    for (int y : g.typeset(t))
        CHECK(g.typeset_contains(t0, y));

    auto extra = independent(g, {}, 1, 10);
    REQUIRE(extra.size() == 1);
    auto free = free_successor(g.indexed(), *g.age(), t0, extra);
    CHECK(free.sockel.size() == 2);
    CHECK(restrict_type(free, { 0 }) == t0);
    for (auto & i : free.tmpl.instances())
        CHECK(! (i.contains(free.star()) && i.contains(free.sockel[0] == 0 ? 1 : 0)));
    CHECK_THROWS_AS(free_successor(g.indexed(), *g.age(), t0, { 0 }), TypeError);

    // Free successors keep the rank.
    auto cmp = rank_compare(*g.age(), t0, free, 4);
    CHECK(cmp.leq);
    CHECK(cmp.geq);
}

TEST_CASE("free successors keep the rank on random fixtures")
{
    for (int clique : { 4, 5 }) {
        GenericStructure g(graph_age(clique), { 11, GenerationMode::Random, 2 });
        g.advance(120);
        std::mt19937_64 rng(clique);
        for (int round = 0 ; round < 10 ; ++round) {
            int a = int(rng() % 40), b = int(rng() % 40), y = int(rng() % 40);
            if (a == b || y == a || y == b)
                continue;
            auto t = g.type_of({ a, b }, y);
            std::vector<int> e{ int(40 + rng() % 60) };
            auto free = free_successor(g.indexed(), *g.age(), t, e);
            auto cmp = rank_compare(*g.age(), t, free, 4);
            CHECK(cmp.leq);
            CHECK(cmp.geq);
        }
    }
}

TEST_CASE("sum, join and image")
{
    GenericStructure g(graph_age(5));
    g.advance(200);
    auto age = g.age();

    // Two edge types over non-adjacent singletons.
    auto pair = independent(g, {}, 2);
    REQUIRE(pair.size() == 2);
    int a = pair[0], b = pair[1];
    TypeDescriptor ta{ { a }, edge() };
    TypeDescriptor tb{ { b }, edge() };
    auto joined = sum(g.indexed(), *age, ta, tb);
    CHECK(joined.sockel == std::vector<int>{ std::min(a, b), std::max(a, b) });
    CHECK(joined.tmpl.instances().size() == 2);
    CHECK(restrict_type(joined, { a }) == ta);
    CHECK(restrict_type(joined, { b }) == tb);

    // The join's typeset is non-empty once realized fixing its sockel.
    auto images = g.exists_fixing({}, { a }, TargetFilter{ {}, { joined } }, true);
    REQUIRE(images);
    CHECK(g.typeset_contains(ta, (*images)[0]));
    CHECK(g.typeset_contains(tb, (*images)[0]));

    int c = g.indexed().neighbours(a).front();
    TypeDescriptor tc{ { c }, FinStructure(uniform_signature(2), 2) };
    CHECK(free_position_violation(g.indexed(), ta, tc));
    CHECK_THROWS_AS(sum(g.indexed(), *age, ta, tc), TypeError);
    CHECK_THROWS_AS(sum(g.indexed(), *age, ta, ta), TypeError);

    // Join over a shared sockel element.
    auto others = independent(g, { a }, 2, 5);
    REQUIRE(others.size() == 2);
    auto s1 = g.type_of({ a, others[0] }, others[1]);
    auto s2 = TypeDescriptor{ { a }, s1.tmpl.size() ? restrict_type(s1, { a }).tmpl : edge() };
    CHECK(join(g.indexed(), *age, s1, s2) == s1);

    auto moved = image(g.indexed(), ta, { { a, b } });
    CHECK(moved == tb);
    CHECK_THROWS_AS(image(g.indexed(), joined, { { a, a }, { b, c } }), TypeError);
}

TEST_CASE("rank containment examples")
{
    auto k3 = graph_age(3);
    CHECK(! rank_contains(*k3, clique_type(1, 1), edge()));
    CHECK(rank_contains(*k3, clique_type(1, 0), edge()));
    auto witness = rank_witness(*k3, clique_type(1, 0), edge());
    REQUIRE(witness);
    CHECK(witness->size() == 3);
    CHECK(oracle::in_age({ complete_graph(3) }, *witness));

    auto knf = schematic_age(RuleKind::IrreducibleUniformMinN, 3, 5);
    FinStructure pair(uniform_signature(3), 3, { Instance(0, { 0, 1, 2 }) });
    CHECK(! rank_contains(*knf, abstract_type(pair), complete_uniform(3, 3)));
    CHECK(rank_contains(*knf, abstract_type(FinStructure(uniform_signature(3), 3)), complete_uniform(3, 3)));
}

TEST_CASE("rank comparison examples")
{
    auto tw = twtriangle_age();
    auto sig = tw->signature();
    auto red = abstract_type(FinStructure(sig, 2, { Instance(0, { 0, 1 }) }));
    auto blue = abstract_type(FinStructure(sig, 2, { Instance(1, { 0, 1 }) }));
    auto cmp = rank_compare(*tw, red, blue, 3);
    CHECK(! cmp.leq);
    CHECK(! cmp.geq);
    REQUIRE(cmp.witness_ts);
    REQUIRE(cmp.witness_st);
    CHECK(rank_contains(*tw, red, *cmp.witness_ts));
    CHECK(! rank_contains(*tw, blue, *cmp.witness_ts));
    CHECK(cmp.witness_ts->instances().front().symbol == 1);
    CHECK(cmp.witness_st->instances().front().symbol == 0);

    auto self = rank_compare(*tw, red, red, 3);
    CHECK(self.leq);
    CHECK(self.geq);
    CHECK(! self.witness_ts);

    auto k5 = graph_age(5);
    auto one = rank_compare(*k5, clique_type(1, 1), clique_type(2, 2), 4);
    CHECK(! one.leq);
    CHECK(one.geq);
    REQUIRE(one.witness_ts);
    CHECK(oracle::isomorphic(*one.witness_ts, complete_graph(3)));
}

TEST_CASE("K_n-free ranks follow the clique number of the star neighbourhood")
{
    for (int n : { 3, 4, 5 }) {
        auto age = graph_age(n);
        auto members = age_members_up_to(*age, 5);
        for (int f = 0 ; f <= 3 ; ++f)
            for (int joined = 0 ; joined <= f && joined <= n - 2 ; ++joined) {
                auto t = clique_type(f, joined);
                if (! age->contains(t.tmpl))
                    continue;
                auto profile = rank_profile(*age, t, members);
                for (std::size_t i = 0 ; i < members.size() ; ++i)
                    CHECK(profile[i] == (oracle::omega(members[i]) < n - joined));
            }
    }
}

TEST_CASE("hypergraph ranks agree with an independent construction")
{
    auto sig = uniform_signature(3);
    std::mt19937_64 rng(13);
    for (int n : { 4, 5 }) {
        auto age = schematic_age(RuleKind::IrreducibleUniformMinN, 3, n);
        for (int round = 0 ; round < 40 ; ++round) {
            int f = 1 + int(rng() % 3);
            auto tmpl = oracle::random_structure(rng, sig, f + 1, 0.5);
            if (! age->contains(tmpl))
                continue;
            auto t = abstract_type(tmpl);
            auto a = oracle::random_structure(rng, sig, 1 + int(rng() % 4), 0.4);
            if (! age->contains(a))
                continue;
            // The structure on F and A whose only cross hyperedges come from the template.
            FinStructure m(sig, f + a.size());
            for (auto & i : tmpl.instances())
                if (! i.contains(f))
                    m.add(i);
            for (auto & i : a.instances())
                m.add(Instance(0, { i.entries[0] + f, i.entries[1] + f, i.entries[2] + f }));
            for (auto & i : tmpl.instances())
                if (i.contains(f))
                    for (int j = 0 ; j < a.size() ; ++j) {
                        std::vector<int> t3;
                        for (int v : i)
                            t3.push_back(v == f ? f + j : v);
                        m.add(Instance(0, t3));
                    }
            bool expected = oracle::omega(m) < n;
            CHECK(rank_contains(*age, t, a) == expected);
            if (f * a.size() * (a.size() - 1) / 2 <= mixed_tuple_cap)
                CHECK(rank_contains(*age, t, a, RankSearch::Exhaustive) == expected);
        }
    }
}

TEST_CASE("rank search shortcut matches the exhaustive search")
{
    std::mt19937_64 rng(2);
    for (int clique : { 3, 4 }) {
        auto age = graph_age(clique);
        for (int round = 0 ; round < 60 ; ++round) {
            auto tmpl = oracle::random_structure(rng, uniform_signature(2), 1 + int(rng() % 4), 0.4);
            auto a = oracle::random_structure(rng, uniform_signature(2), 1 + int(rng() % 4), 0.4);
            if (! age->contains(tmpl) || ! age->contains(a))
                continue;
            auto t = abstract_type(tmpl);
            CHECK(rank_contains(*age, t, a) == rank_contains(*age, t, a, RankSearch::Exhaustive));
        }
    }
}

TEST_CASE("join rank law on K4- and K5-free fixtures")
{
    for (int clique : { 4, 5 }) {
        GenericStructure g(graph_age(clique), { 5, GenerationMode::Random, 2 });
        g.advance(150);
        auto & age = *g.age();
        auto members = age_members_up_to(age, 4);
        std::mt19937_64 rng(clique * 7);
        int checked = 0;
        for (int round = 0 ; round < 200 && checked < 10 ; ++round) {
            int base = int(rng() % 30), c = int(rng() % 60), s = int(rng() % 60);
            int x = int(rng() % 120), y = int(rng() % 120);
            std::set<int> distinct{ base, c, s };
            if (distinct.size() < 3 || g.indexed().adjacent(c, s))
                continue;
            if (x == base || x == c || y == base || y == s)
                continue;
            auto t = g.type_of({ base, c }, x);
            auto u = g.type_of({ base, s }, y);
            if (free_position_violation(g.indexed(), t, u))
                continue;
            auto j = join(g.indexed(), age, t, u);
            for (auto & a : members)
                CHECK(rank_contains(age, j, a, RankSearch::Exhaustive)
                        == (rank_contains(age, t, a, RankSearch::Exhaustive) && rank_contains(age, u, a, RankSearch::Exhaustive)));
            ++checked;
        }
        CHECK(checked == 10);
    }
}

TEST_CASE("form scripts")
{
    GenericStructure g(graph_age(0));
    g.advance(120);
    auto & age = *g.age();
    auto t = g.type_of({ 0 }, 1);

    auto empty = apply_form(g.indexed(), age, t, FormScript{});
    CHECK(empty.type == t);
    CHECK(empty.sequence.empty());

    auto fresh = independent(g, { 0 }, 1, 2);
    REQUIRE(fresh.size() == 1);
    FormScript arrow{ { FormStep{ FormSymbol::Free, std::nullopt, fresh } } };
    auto formed = apply_form(g.indexed(), age, t, arrow);
    CHECK(formed.type == free_successor(g.indexed(), age, t, fresh));
    CHECK(formed.phi == std::vector<std::vector<int>>{ fresh });

    // "+" then "[ -> ]".
    auto picks = independent(g, { 0 }, 3, 2);
    REQUIRE(picks.size() == 3);
    TypeDescriptor summand{ { picks[0] }, edge() };
    auto after_plus = sum(g.indexed(), age, t, summand);
    auto joined_with = free_successor(g.indexed(), age, after_plus, { picks[2] });
    FormScript script{ {
        FormStep{ FormSymbol::Plus, summand, {} },
        FormStep{ FormSymbol::Open, std::nullopt, {} },
        FormStep{ FormSymbol::Free, std::nullopt, { picks[1] } },
        FormStep{ FormSymbol::Close, joined_with, {} } } };
    CHECK(script.text() == "+[->]");
    auto built = apply_form(g.indexed(), age, t, script);
    CHECK(built.type.sockel.size() == 4);
    CHECK(built.phi.size() == 4);
    CHECK(built.phi[1] == built.phi[3]);
    CHECK(built.phi[1] == std::vector<int>{ picks[2] });
    CHECK(built.chain.size() == 4);

    FormScript bad{ { FormStep{ FormSymbol::Open, std::nullopt, {} }, FormStep{ FormSymbol::Close, joined_with, {} } } };
    CHECK(! well_formed(bad));
    CHECK_THROWS_AS(apply_form(g.indexed(), age, t, bad), TypeError);
    FormScript reuse{ { FormStep{ FormSymbol::Free, std::nullopt, { 0 } } } };
    CHECK_THROWS_AS(apply_form(g.indexed(), age, t, reuse), TypeError);
}

TEST_CASE("restriction to a smaller rank")
{
    GenericStructure g(graph_age(5));
    g.advance(150);
    auto & age = *g.age();
    auto top = g.type_of({}, 0);
    int a = 0, b = g.indexed().neighbours(0).front();
    auto edge_type = g.type_of({ a }, b);

    auto restricted = restrict_to_rank(g, top, edge_type, 4);
    auto cmp = rank_compare(age, restricted, edge_type, 4);
    CHECK(cmp.leq);
    CHECK(cmp.geq);
    CHECK(! rank_contains(age, restricted, complete_graph(4)));
    CHECK(rank_contains(age, restricted, complete_graph(3)));

    auto same = restrict_to_rank(g, edge_type, edge_type, 4);
    auto equal = rank_compare(age, same, edge_type, 4);
    CHECK(equal.leq);
    CHECK(equal.geq);

    int common = -1;
    for (int y : g.indexed().neighbours(a))
        if (y != b && g.indexed().adjacent(b, y) && common == -1)
            common = y;
    REQUIRE(common != -1);
    auto smaller = restrict_to_rank(g, edge_type, g.type_of({ a, b }, common), 4);
    auto drop = rank_compare(age, smaller, edge_type, 4);
    CHECK(drop.leq);
    CHECK(! drop.geq);

    CHECK_THROWS_AS(restrict_to_rank(g, edge_type, top, 4), TypeError);
}
