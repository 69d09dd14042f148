#pragma once

#include <fraisse/generic.hh>
#include <fraisse/types.hh>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fraisse
{
    class BundleError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    /// Pairwise distinct types over one sockel.
    struct Bundle
    {
        std::vector<int> sockel;
        std::vector<TypeDescriptor> members;

        auto size() const -> int { return int(members.size()); }
        auto index_of(const TypeDescriptor & t) const -> std::optional<int>;
    };

    /// Calls f on every subset of `pool` with 1..max_size elements, by size
    /// and then lexicographically; stops when f returns false.
    auto for_each_fragment(const std::vector<int> & pool, int max_size,
            const std::function<bool (const std::vector<int> &)> & f) -> void;

    /// Normalizes the members and rejects sockel mismatches or duplicates.
    auto make_bundle(std::vector<int> sockel, std::vector<TypeDescriptor> members) -> Bundle;

    /// The member whose typeset holds y, if any.
    auto member_containing(const GenericStructure & g, const Bundle & b, int y) -> std::optional<int>;

    /// Realized elements of the union of the member typesets.
    auto bundle_typeset(const GenericStructure & g, const Bundle & b) -> std::vector<int>;

    /// Reason b is not a successor of c, if any.
    auto successor_violation(const Bundle & c, const Bundle & b) -> std::optional<std::string>;

    /// Index in c of the restriction of b's member i.
    auto predecessor(const Bundle & c, const Bundle & b, int i) -> int;

    struct XSuccessor
    {
        Bundle bundle;
        /// Index of the originating member for every member of the bundle.
        std::vector<int> parent;
        int x = -1;
    };

    /// All {x}-successors of the members, enumerated from age-valid templates.
    auto x_successor_bundle(GenericStructure & g, const Bundle & b, int x) -> XSuccessor;

    struct ConformAssignment
    {
        std::vector<int> domain;
        /// Member of the successor bundle for each domain element.
        std::vector<int> member;
    };

    struct ProbeConfig
    {
        int fragment_bound = 3;
        /// Rank checks compare age members up to this size.
        int size_bound = 4;
        /// Elements of the predecessor typeset that fragments are drawn from.
        int pool = 12;
        int max_assignments = 2000;
        int advance_budget = 500;
    };

    struct ProbeVerdict
    {
        bool pass = true;
        ProbeConfig config;
        int assignments_checked = 0;
        int advanced = 0;
        std::optional<ConformAssignment> counterexample;
        std::string reason;
    };

    /// Reason alpha is not conform for b over c, if any.
    auto conform_violation(const GenericStructure & g, const Bundle & c, const Bundle & b,
            const ConformAssignment & alpha) -> std::optional<std::string>;

    /// Enumerates conform assignments on fragments of the pool and searches
    /// a placement fixing the sockel of c for each. A failed placement is
    /// retried after advancing the structure by the advance budget.
    auto melding_probe(GenericStructure & g, const Bundle & c, const Bundle & b,
            const ProbeConfig & config = {}) -> ProbeVerdict;

    /// Successor, placement of every fragment into the union typeset, and
    /// bijectivity of the restriction map.
    auto is_refinement(GenericStructure & g, const Bundle & c, const Bundle & b,
            const ProbeConfig & config = {}) -> ProbeVerdict;

    struct StarSuccessorPlan
    {
        /// Members of the bundle from smallest to largest.
        std::vector<int> order;
        std::vector<std::vector<int>> star;
        /// Index in the predecessor bundle for each member.
        std::vector<int> parent;
    };

    struct StarSuccessor
    {
        Bundle bundle;
        StarSuccessorPlan plan;
    };

    /// Members with an empty target list keep one free successor; every
    /// target adds a restriction type over a fresh star set placed on top.
    auto build_star_successor(GenericStructure & g, const Bundle & c,
            const std::vector<std::vector<TypeDescriptor>> & targets, int size_bound) -> StarSuccessor;

    /// Checks the three star successor conditions; the third by a melding probe.
    auto star_plan_violation(GenericStructure & g, const Bundle & c, const StarSuccessor & s,
            const ProbeConfig & config = {}) -> std::optional<std::string>;

    /// The bundle of joins beta(D) with D over every member D of c_up.
    auto agreement_join(GenericStructure & g, const Bundle & b, const XSuccessor & c_up,
            const std::vector<int> & beta, int size_bound) -> Bundle;

    struct Continuation
    {
        Bundle bundle;
        /// Chosen member of each fiber, as an index into the fiber.
        std::vector<int> selection;
        std::vector<std::vector<int>> fibers;
        int selections_tried = 0;
        bool ranks_match = true;
        ProbeVerdict refinement;
    };

    /// The first selection, lexicographically, of one z-successor of b per
    /// member of the z-successor of c_prime that refines the latter.
    auto x_continuation(GenericStructure & g, const Bundle & c_prime, const Bundle & b, int z,
            const ProbeConfig & config = {}) -> Continuation;
}
