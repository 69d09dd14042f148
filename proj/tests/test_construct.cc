#include <doctest.h>

#include "oracle.hh"

#include <fraisse/construct.hh>
#include <fraisse/fixtures.hh>

using namespace fraisse;

namespace
{
    /// Re-checks a prefix with the brute-force embedding test and the oracle.
    auto independently_verified(const GenericStructure & g, ColouringOracle & o, const ConstructResult & r) -> bool
    {
        auto snapshot = g.snapshot();
        auto source = g.indexed().induced(r.prefix);
        if (! oracle::is_embedding(source, snapshot, r.images))
            return false;
        for (int y : r.images)
            if (o.colour(g.indexed(), y) != r.colour)
                return false;
        return int(r.images.size()) == r.target;
    }
}

TEST_CASE("constant oracle gives a copy without backtracking")
{
    GenericStructure g(rado_age(), GeneratorConfig{ 0 });
    auto o = make_oracle(OracleSpec{ "all", 0, red });
    ConstructConfig c;
    c.target = 30;
    auto r = monochromatic_construct(g, *o, c);
    CHECK(r.outcome == Outcome::Success);
    CHECK(r.verified);
    CHECK(r.backtracks == 0);
    CHECK(independently_verified(g, *o, r));
}

TEST_CASE("the wrong constant colour ends in an obstruction and a counter-run")
{
    GenericStructure g(rado_age(), GeneratorConfig{ 0 });
    auto o = make_oracle(OracleSpec{ "all", 0, blue });
    ConstructConfig c;
    c.target = 20;
    auto r = monochromatic_construct(g, *o, c);
    CHECK(r.outcome == Outcome::Obstruction);
    REQUIRE(r.obstruction);
    CHECK(r.obstruction->monochromatic);
    CHECK(r.obstruction->full_rank);
    REQUIRE(r.counter);
    CHECK(r.counter->colour == blue);
    CHECK(r.succeeded());
    CHECK(r.winner() == r.counter.get());
    CHECK(independently_verified(g, *o, *r.counter));
}

TEST_CASE("built-in adversaries on the random graph")
{
    for (auto & kind : builtin_oracle_kinds())
        for (std::uint64_t seed = 0 ; seed < 2 ; ++seed) {
            GenericStructure g(rado_age(), GeneratorConfig{ seed });
            auto o = make_oracle(builtin_oracle(kind, seed));
            ConstructConfig c;
            c.target = 30;
            c.seed = seed;
            auto r = monochromatic_construct(g, *o, c);
            auto w = r.winner();
            REQUIRE_MESSAGE(w, kind, " seed ", seed);
            CHECK(independently_verified(g, *o, *w));
        }
}

TEST_CASE("runs replay")
{
    auto once = [] {
        GenericStructure g(rado_age(), GeneratorConfig{ 3 });
        auto o = make_oracle(builtin_oracle("degree", 0));
        ConstructConfig c;
        c.target = 25;
        c.seed = 3;
        auto r = monochromatic_construct(g, *o, c);
        std::vector<int> out = r.images;
        for (auto & s : r.trace)
            out.insert(out.end(), { s.step, s.image, s.candidates, s.bundle_size, int(s.fresh), int(s.backtrack) });
        if (r.counter)
            out.insert(out.end(), r.counter->images.begin(), r.counter->images.end());
        return std::make_pair(out, g.size());
    };
    CHECK(once() == once());
}

TEST_CASE("accepted prefix only shrinks at recorded backtracks")
{
    GenericStructure g(clique_free_age(3), GeneratorConfig{ 0 });
    OracleSpec spec;
    spec.kind = "adjacent";
    spec.element = 0;
    auto o = make_oracle(spec);
    ConstructConfig c;
    c.target = 25;
    auto r = monochromatic_construct(g, *o, c);
    int length = 0;
    for (auto & s : r.trace) {
        if (s.backtrack)
            --length;
        else if (s.image >= 0)
            ++length;
        CHECK(length >= 0);
    }
    CHECK(length == int(r.images.size()));
    REQUIRE(r.succeeded());
    CHECK(independently_verified(g, *o, *r.winner()));
}

TEST_CASE("divisible ages are refused")
{
    GenericStructure g(twtriangle_age(), GeneratorConfig{ 0 });
    auto o = make_oracle(OracleSpec{ "all" });
    auto r = monochromatic_construct(g, *o, ConstructConfig{});
    CHECK(r.outcome == Outcome::Refused);
}

TEST_CASE("dichotomy on the random graph")
{
    {
        GenericStructure g(rado_age(), GeneratorConfig{ 1 });
        auto o = make_oracle(OracleSpec{ "all", 0, red });
        auto d = rado_dichotomy(g, *o, 25);
        CHECK(d.side == red);
    }
    {
        GenericStructure g(rado_age(), GeneratorConfig{ 1 });
        OracleSpec spec;
        spec.kind = "first";
        spec.count = 3;
        auto o = make_oracle(spec);
        auto d = rado_dichotomy(g, *o, 25);
        CHECK(d.side == blue);
        CHECK(d.blue_inside);
        REQUIRE(d.run.counter);
        CHECK(independently_verified(g, *o, *d.run.counter));
    }
    {
        GenericStructure g(rado_age(), GeneratorConfig{ 1 });
        auto o = make_oracle(OracleSpec{ "parity" });
        auto d = rado_dichotomy(g, *o, 25);
        CHECK(d.side != -1);
    }
    GenericStructure k3(clique_free_age(3), GeneratorConfig{ 1 });
    auto o = make_oracle(OracleSpec{ "all" });
    CHECK_THROWS_AS(rado_dichotomy(k3, *o, 10), ConstructError);
}

TEST_CASE("weak indivisibility runs")
{
    {
        GenericStructure g(rado_age(), GeneratorConfig{ 0 });
        auto o = make_oracle(OracleSpec{ "edge-free-red" });
        auto w = weak_indivisibility_run(g, *o, complete_graph(2), red, 30);
        CHECK_FALSE(w.audit_failed);
        CHECK(w.run.outcome == Outcome::Success);
        CHECK(w.audits > 30);
        CHECK(independently_verified(g, *o, w.run));
    }
    {
        GenericStructure g(rado_age(), GeneratorConfig{ 0 });
        auto o = make_oracle(OracleSpec{ "all", 0, blue });
        auto w = weak_indivisibility_run(g, *o, FinStructure(uniform_signature(2), 1), red, 20);
        CHECK_FALSE(w.audit_failed);
        CHECK(w.run.outcome == Outcome::Success);
    }
    {
        GenericStructure g(rado_age(), GeneratorConfig{ 0 });
        auto o = make_oracle(OracleSpec{ "parity" });
        auto w = weak_indivisibility_run(g, *o, complete_graph(2), red, 20);
        CHECK(w.audit_failed);
        CHECK(w.run.outcome == Outcome::AuditFailure);
        REQUIRE(w.audit_witness.size() == 2);
        CHECK(g.indexed().adjacent(w.audit_witness[0], w.audit_witness[1]));
    }
}
