#include <doctest.h>

#include <fraisse/mho.hh>

#include <random>
#include <set>

using namespace fraisse;

namespace
{
    /// Ground 0..5, one rank. E and N split the ground, E' refines E.
    auto rado_truncation() -> MhoInstance
    {
        auto inst = make_mho(6, 1, 0, { { 1, 0 }, { 2, 0 }, { 3, 1 } },
                { { 0, 1, 2, 3, 4, 5 }, { 0, 1, 2 }, { 3, 4, 5 }, { 0, 1 } }, { 0, 0, 0, 0 });
        inst.names = { "U", "E", "N", "E'" };
        return inst;
    }

    /// Two ranks. A and B refine U, A0 and B0 restrict them, C is a low
    /// restriction of U on element 5 only.
    auto two_ranks() -> MhoInstance
    {
        auto inst = make_mho(6, 2, 0, { { 1, 0 }, { 2, 0 }, { 3, 1 }, { 4, 2 }, { 5, 0 } },
                { { 0, 1, 2, 3, 4, 5 }, { 0, 1, 2 }, { 3, 4, 5 }, { 0, 1 }, { 3, 4 }, { 5 } },
                { 1, 1, 1, 0, 0, 0 });
        inst.names = { "U", "A", "B", "A0", "B0", "C" };
        return inst;
    }

    auto all_ground(const MhoInstance & inst) -> std::vector<bool>
    {
        return std::vector<bool>(inst.ground, true);
    }

    // Reference evaluation straight from the definitions, with sorts as sets.
    struct Reference
    {
        const MhoInstance & inst;

        auto refinements(int x) const -> std::set<int>
        {
            std::set<int> out;
            for (int y = 0 ; y < inst.sorts() ; ++y)
                if (inst.below[y][x] && inst.rho[y] == inst.rho[x])
                    out.insert(y);
            return out;
        }

        auto restrictions(int x, int r) const -> std::set<int>
        {
            std::set<int> out;
            for (int y = 0 ; y < inst.sorts() ; ++y)
                if (inst.below[y][x] && inst.rho[y] == r)
                    out.insert(y);
            return out;
        }

        auto qualifies(const std::set<int> & labelled, int x) const -> bool
        {
            for (int r = 0 ; r <= inst.rho[x] ; ++r) {
                bool all_y = true;
                for (int y : refinements(x)) {
                    bool some_z = false;
                    for (int z : refinements(y)) {
                        bool all_r = true;
                        for (int q : restrictions(z, r))
                            all_r = all_r && labelled.count(q);
                        some_z = some_z || all_r;
                    }
                    all_y = all_y && some_z;
                }
                if (all_y)
                    return true;
            }
            return false;
        }

        /// Least fixed point, one sort at a time.
        auto labelled(const std::vector<bool> & s) const -> std::set<int>
        {
            std::set<int> out;
            for (int x = 0 ; x < inst.sorts() ; ++x) {
                int outside = 0;
                for (int e : inst.sigma[x])
                    outside += ! s[e];
                if (outside <= inst.threshold)
                    out.insert(x);
            }
            for (bool grew = true ; grew ;) {
                grew = false;
                for (int x = 0 ; x < inst.sorts() ; ++x)
                    if (! out.count(x) && qualifies(out, x)) {
                        out.insert(x);
                        grew = true;
                    }
            }
            return out;
        }
    };

    auto random_subset(std::mt19937_64 & rng, int ground) -> std::vector<bool>
    {
        std::vector<bool> s(ground);
        for (int e = 0 ; e < ground ; ++e)
            s[e] = rng() & 1;
        return s;
    }
}

TEST_CASE("validation finds each violated item")
{
    auto single = make_mho(3, 1, 0, {}, { { 0, 1, 2 } }, { 0 });
    CHECK_FALSE(validate_mho(single));
    CHECK_FALSE(validate_mho(rado_truncation()));
    CHECK_FALSE(validate_mho(two_ranks()));

    auto headless = make_mho(4, 1, 0, {}, { { 0, 1 }, { 2, 3 } }, { 0, 0 });
    auto v = validate_mho(headless);
    REQUIRE(v);
    CHECK(v->item == 4);

    auto wide = make_mho(4, 1, 0, { { 1, 0 } }, { { 0, 1 }, { 1, 2 } }, { 0, 0 });
    REQUIRE(validate_mho(wide));
    CHECK(validate_mho(wide)->item == 1);

    auto climbing = make_mho(3, 2, 0, { { 1, 0 } }, { { 0, 1, 2 }, { 0 } }, { 0, 1 });
    REQUIRE(validate_mho(climbing));
    CHECK(validate_mho(climbing)->item == 2);

    auto gap = make_mho(3, 2, 0, { { 1, 0 } }, { { 0, 1, 2 }, { 0 } }, { 1, 1 });
    REQUIRE(validate_mho(gap));
    CHECK(validate_mho(gap)->item == 3);

    auto partial = make_mho(3, 1, 0, { { 1, 0 } }, { { 0, 1 }, { 0 } }, { 0, 0 });
    REQUIRE(validate_mho(partial));
    CHECK(validate_mho(partial)->item == 4);

    auto thin = make_mho(3, 1, 1, { { 1, 0 } }, { { 0, 1, 2 }, { 0 } }, { 0, 0 });
    REQUIRE(validate_mho(thin));
    CHECK(validate_mho(thin)->item == 0);

    CHECK_THROWS_AS(make_mho(2, 1, 0, {}, { { 0, 5 } }, { 0 }), MhoError);
}

TEST_CASE("labelling of hand instances")
{
    auto inst = rado_truncation();
    auto every = compute_labelling(inst, all_ground(inst));
    CHECK(every.label == std::vector<int>{ 0, 0, 0, 0 });

    auto nothing = compute_labelling(inst, std::vector<bool>(6, false));
    CHECK(nothing.witness().empty());

    auto left = compute_labelling(inst, subset_of(inst, { 0, 1 }));
    CHECK(left.label == std::vector<int>{ -1, 1, -1, 0 });
    CHECK(left.reason[1] == 0);

    auto most = compute_labelling(inst, subset_of(inst, { 0, 1, 3, 4, 5 }));
    CHECK(most.label == std::vector<int>{ 2, 1, 0, 0 });
    CHECK(most.rounds == 1);
}

TEST_CASE("largeness dichotomy on hand instances")
{
    auto inst = rado_truncation();
    auto full = largeness_dichotomy(inst, all_ground(inst));
    CHECK(full.side == Side::Subset);
    CHECK(full.witness == std::vector<int>{ 0, 1, 2, 3 });
    CHECK(full.phi_verified);

    auto empty = largeness_dichotomy(inst, std::vector<bool>(6, false));
    CHECK(empty.side == Side::Complement);
    CHECK(empty.witness.size() == 4);
    CHECK(empty.phi_verified);
    CHECK(empty.intersection_verified);

    auto left = largeness_dichotomy(inst, subset_of(inst, { 0, 1 }));
    CHECK(left.side == Side::Complement);
    CHECK(left.witness == std::vector<int>{ 0, 2 });
    CHECK(left.phi_verified);
    CHECK(left.intersection_verified);
}

TEST_CASE("constructive sets")
{
    auto inst = rado_truncation();
    auto full = largeness_dichotomy(inst, all_ground(inst));
    auto v = constructive_set(inst, full);
    CHECK(v.members == std::vector<int>{ 0, 1, 2, 3 });
    CHECK(v.verified());

    auto two = two_ranks();
    auto large = largeness_dichotomy(two, subset_of(two, { 0, 1, 2, 3, 4 }));
    REQUIRE(large.side == Side::Subset);
    CHECK(large.witness == std::vector<int>{ 0, 1, 2, 3, 4 });
    auto c = constructive_set(two, large);
    CHECK(c.members == std::vector<int>{ 0, 1, 2, 3, 4 });
    CHECK(c.root == 0);
    CHECK(c.verified());

    CHECK_THROWS_AS(constructive_set(two, Largeness{}), MhoError);
}

TEST_CASE("generated instances are valid and reproducible")
{
    for (std::uint64_t seed = 0 ; seed < 50 ; ++seed) {
        auto inst = random_mho(seed);
        CHECK_FALSE(validate_mho(inst));
        CHECK(inst.sorts() <= 6);
        CHECK(inst.ranks <= 3);
        CHECK(inst.ground <= 8);
        auto again = random_mho(seed);
        CHECK(again.sigma == inst.sigma);
        CHECK(again.below == inst.below);
    }
}

TEST_CASE("labelled sorts match the reference fixed point")
{
    std::mt19937_64 rng(7);
    for (std::uint64_t seed = 0 ; seed < 200 ; ++seed) {
        auto inst = random_mho(seed);
        auto s = random_subset(rng, inst.ground);
        auto l = compute_labelling(inst, s);
        auto w = l.witness();
        auto expected = Reference{ inst }.labelled(s);
        CHECK(std::set<int>(w.begin(), w.end()) == expected);
        for (int x = 0 ; x < inst.sorts() ; ++x)
            for (int y = 0 ; y < inst.sorts() ; ++y)
                if (x != y && inst.below[y][x] && l.label[x] > 0 && l.labelled(y))
                    CHECK(l.label[y] < l.label[x]);
    }
}

TEST_CASE("property suite over generated instances")
{
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0 ; seed < 200 ; ++seed) {
        auto inst = random_mho(seed);
        auto s = random_subset(rng, inst.ground);
        auto audit = audit_mho(inst, s);
        CHECK_MESSAGE(audit.ok(), "seed ", seed);

        auto large = largeness_dichotomy(inst, s);
        CHECK(large.phi_verified);
        CHECK(large.intersection_verified);
        auto c = constructive_set(inst, large);
        CHECK_MESSAGE(c.verified(), "seed ", seed);
    }
}
