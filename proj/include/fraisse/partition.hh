#pragma once

#include <fraisse/bundle.hh>
#include <fraisse/colouring.hh>
#include <fraisse/generic.hh>
#include <fraisse/types.hh>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fraisse
{
    class PartitionError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    /// x precedes y when the largest element of their symmetric difference
    /// lies in y. Strict: a set never precedes itself.
    auto lex_less(const std::vector<int> & x, const std::vector<int> & y) -> bool;

    enum class PQRClass
    {
        P,
        Q,
        R
    };

    auto class_name(PQRClass c) -> std::string;

    inline constexpr int pqr_prefix_cap = 200;
    inline constexpr int pqr_sockel_cap = 3;

    struct PQRPartition
    {
        TypeDescriptor t;
        TypeDescriptor s;
        int prefix = 0;
        int sockel_cap = pqr_sockel_cap;
        std::vector<PQRClass> assignment;
        /// The least sockel below n, in the lex order, on which n realizes t (resp. s).
        std::vector<std::optional<std::vector<int>>> least_t;
        std::vector<std::optional<std::vector<int>>> least_s;

        auto members(PQRClass c) const -> std::vector<int>;
    };

    /// Least set F' of elements below n with an isomorphism from t's template
    /// onto F' and n that sends the star to n.
    auto least_realizing_sockel(const IndexedStructure & snapshot, const TypeDescriptor & t, int n)
        -> std::optional<std::vector<int>>;

    /// n lies in P when t is realized at n over a set below n that precedes
    /// every set below n over which s is realized at n; Q swaps t and s.
    auto build_pqr(const GenericStructure & g, const TypeDescriptor & t, const TypeDescriptor & s,
            int prefix, int sockel_cap = pqr_sockel_cap) -> PQRPartition;

    struct AgeIndivisibility
    {
        std::optional<FinStructure> witness;
        int parts = 2;
        int size_cap = 0;
        int candidates_checked = 0;
        int partitions_checked = 0;
    };

    /// Largest number of partitions examined per candidate.
    inline constexpr std::uint64_t partition_budget = 1u << 20;

    /// The first age member B, by size and enumeration order, such that
    /// every partition of B into `parts` classes has a class embedding a.
    auto n_age_indivisible_search(const AgeHandle & age, const FinStructure & a, int parts, int size_cap)
        -> AgeIndivisibility;

    struct ColouringSelection
    {
        /// The class chosen for every member.
        std::optional<std::vector<int>> epsilon;
        int fragment_bound = 0;
        int pool = 0;
        int selections_tried = 0;
        int fragments_checked = 0;
        /// The last fragment that could not be placed, for the last selection tried.
        std::vector<int> blocking_fragment;
    };

    /// Tries every selection of one colour class per member in lexicographic
    /// order. A selection passes when every fragment of at most
    /// `fragment_bound` pool elements of the bundle's typeset can be moved
    /// into the selected classes by an embedding fixing the sockel. Only
    /// realized elements are used.
    auto bundle_colouring_select(GenericStructure & g, const Bundle & b, const std::function<int (int)> & colour,
            int colours, int fragment_bound, int pool = 12) -> ColouringSelection;

    struct NeutralCopy
    {
        /// The enumerated typeset elements u_i and their copies v_i.
        std::vector<int> enumerated;
        std::vector<int> elements;
        bool embedding = false;
        bool free_position = false;
        bool neutral = false;
        int successors_checked = 0;
        int joins_realized = 0;
        int bound = 2;
    };

    /// Copies the first `count` realized typeset elements of b one at a time,
    /// each into the free successor over the originals of the type the
    /// previous copies dictate. Neutrality to t is checked on every successor
    /// over at most `bound` copied elements.
    auto neutral_copy(GenericStructure & g, const Bundle & b, const TypeDescriptor & t, int count, int bound = 2)
        -> NeutralCopy;

    enum class Verdict
    {
        Divisible,
        IndivisibleCertified,
        RankLinearEvidence,
        Inconclusive
    };

    auto verdict_name(Verdict v) -> std::string;

    struct RankClass
    {
        TypeDescriptor representative;
        std::vector<bool> profile;
        int types = 0;
    };

    struct DivisibilityWitness
    {
        TypeDescriptor t;
        TypeDescriptor s;
        /// In the rank of t but not of s, and the other way round.
        FinStructure a;
        FinStructure b;
    };

    /// Re-checks all four rank memberships with the exhaustive search.
    auto verify_witness(const AgeHandle & age, const DivisibilityWitness & w) -> bool;

    struct Certificate
    {
        std::string id;
        std::string statement;
        /// Chain length the rule predicts at the bounds used.
        int predicted_chain = 0;
        /// Chain length the rule states for unbounded comparison.
        int stated_chain = 0;
        bool reverified = false;
    };

    struct ClassifierReport
    {
        Verdict verdict = Verdict::Inconclusive;
        int sockel_bound = 0;
        int size_bound = 0;
        int types_enumerated = 0;
        int members_compared = 0;
        /// Distinct ranks ordered by inclusion; empty for divisible ages.
        std::vector<RankClass> chain;
        int chain_length = 0;
        std::optional<DivisibilityWitness> witness;
        std::optional<Certificate> certificate;
        std::string reason;
        double millis = 0;
    };

    /// Types over age members with at most sockel_bound elements, one per
    /// one-point extension, smallest sockels first.
    auto enumerate_abstract_types(const AgeHandle & age, int sockel_bound) -> std::vector<TypeDescriptor>;

    auto classify(const AgeHandle & age, int sockel_bound, int size_bound) -> ClassifierReport;
}
