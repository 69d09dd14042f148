#pragma once

#include <fraisse/morphism.hh>
#include <fraisse/structure.hh>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fraisse
{
    enum class RuleKind
    {
        CompleteGraph,
        IrreducibleUniformMinN,
        IrreducibleUniformExactlyN,
        Custom
    };

    struct SchematicRule
    {
        RuleKind kind = RuleKind::CompleteGraph;
        int k = 2;
        int n = 3;
        std::string name;
        SignaturePtr signature;
        /// Custom rules: true when the structure is forbidden as a whole.
        std::function<bool (const FinStructure &)> forbidden;
        int max_member_size = 4;
    };

    auto rule_name(RuleKind kind) -> std::string;
    auto parse_rule_kind(const std::string & name) -> RuleKind;

    /// Signature used by the built-in schematic rules: a single set-mode
    /// relation of arity k (E for graphs, H otherwise).
    auto uniform_signature(int k) -> SignaturePtr;

    struct BoundarySpec
    {
        SignaturePtr signature;
        std::vector<FinStructure> explicit_members;
        std::optional<SchematicRule> schematic;
    };

    struct NormalizedBoundary
    {
        BoundarySpec spec;
        bool free_amalgamation = false;
        int checked_up_to = 0;
    };

    class AgeError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    class BudgetExceeded : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    auto complete_graph(int n) -> FinStructure;
    auto complete_uniform(int k, int n) -> FinStructure;

    /// Drops isomorphic duplicates and members embedding a smaller member;
    /// for schematic rules generates members up to `schematic_cap` for the flag.
    auto normalize_boundary(const BoundarySpec & spec, int schematic_cap = 6) -> NormalizedBoundary;

    class AgeHandle
    {
        private:
            NormalizedBoundary _boundary;
            std::vector<FinStructure> _forbidden;
            bool _instance_monotone = false;

            mutable std::mutex _mutex;
            mutable std::map<int, std::vector<FinStructure>> _members;

            auto forbidden_uniform(const FinStructure & a, std::optional<int> must_use) const -> bool;
            auto forbidden_custom(const FinStructure & a, std::optional<int> must_use) const -> bool;

        public:
            static constexpr int enumeration_cap = 9;
            static constexpr int extension_tuple_cap = 22;

            explicit AgeHandle(const BoundarySpec & spec);

            /// Wraps an already normalized boundary without re-checking it.
            explicit AgeHandle(NormalizedBoundary boundary);

            auto signature() const -> const SignaturePtr & { return _boundary.spec.signature; }
            auto boundary() const -> const NormalizedBoundary & { return _boundary; }
            auto free_amalgamation() const -> bool { return _boundary.free_amalgamation; }

            /// Removing instances from a member never leaves the age.
            auto instance_monotone() const -> bool { return _instance_monotone; }

            auto contains(const FinStructure & a) const -> bool;

            /// Membership of `a` given that `a` minus element `e` is a member.
            auto contains_given(const FinStructure & a, int e) const -> bool;

            /// Isomorphism-class representatives of members with exactly n elements.
            auto members(int n) const -> const std::vector<FinStructure> &;

            /// Boundary members with at most `cap` elements (generated for schematic rules).
            auto boundary_members(int cap) const -> std::vector<FinStructure>;
    };

    using AgePtr = std::shared_ptr<const AgeHandle>;

    auto make_age(const BoundarySpec & spec) -> AgePtr;
    auto explicit_age(SignaturePtr signature, std::vector<FinStructure> members) -> AgePtr;
    auto schematic_age(RuleKind kind, int k, int n) -> AgePtr;

    auto age_contains(const AgeHandle & age, const FinStructure & a) -> bool;
    auto enumerate_age(const AgeHandle & age, int n) -> std::vector<FinStructure>;

    /// Every candidate tuple over `size` elements that contains element `e`.
    auto tuples_through(const Signature & sig, int size, int e) -> std::vector<Instance>;

    /// One-point extensions of `base` inside the age: structures on
    /// base.size()+1 elements restricting to `base`, the new element last.
    /// Order follows the bitmask over tuples_through, so it is deterministic.
    auto one_point_extensions(const AgeHandle & age, const FinStructure & base) -> std::vector<FinStructure>;

    /// Largest subset inducing an irreducible substructure (the generalised clique number).
    auto omega(const FinStructure & s) -> int;

    struct BoundaryAnalysis
    {
        int omega = 0;
        std::vector<std::vector<int>> conformal_sets;
        bool three_gaifman_complete = false;
    };

    auto is_conformal(const FinStructure & b, const std::vector<int> & a) -> bool;
    auto boundary_analysis(const FinStructure & b) -> BoundaryAnalysis;

    struct SingleRankCertificate
    {
        int item = 0;
        int size_cap = 0;
        std::string rule_proof;
    };

    auto certify_single_rank(const AgeHandle & age, int size_cap) -> std::optional<SingleRankCertificate>;
}
