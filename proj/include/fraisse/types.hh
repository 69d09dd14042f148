#pragma once

#include <fraisse/age.hh>
#include <fraisse/generic.hh>
#include <fraisse/morphism.hh>
#include <fraisse/structure.hh>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fraisse
{
    class TypeError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    /// A type whose sockel is 0..f-1, given only by its template.
    auto abstract_type(const FinStructure & tmpl) -> TypeDescriptor;

    /// The template restricted to the sockel.
    auto sockel_structure(const TypeDescriptor & t) -> FinStructure;

    /// All types over F realizable in the age, in one-point-extension order.
    auto types_over(GenericStructure & g, const std::vector<int> & sockel) -> std::vector<TypeDescriptor>;

    auto restrict_type(const TypeDescriptor & t, const std::vector<int> & subset) -> TypeDescriptor;

    /// The unique free E-successor: the star gains no relation touching E.
    auto free_successor(const IndexedStructure & snapshot, const AgeHandle & age,
            const TypeDescriptor & t, const std::vector<int> & extra) -> TypeDescriptor;

    /// Reason the two types are not in free position, if any.
    auto free_position_violation(const IndexedStructure & snapshot, const TypeDescriptor & t,
            const TypeDescriptor & s) -> std::optional<std::string>;

    /// The join: the star realizes both types with no relation across the
    /// two sockel differences.
    auto join(const IndexedStructure & snapshot, const AgeHandle & age,
            const TypeDescriptor & t, const TypeDescriptor & s) -> TypeDescriptor;

    /// The join of two types with disjoint sockels.
    auto sum(const IndexedStructure & snapshot, const AgeHandle & age,
            const TypeDescriptor & t, const TypeDescriptor & s) -> TypeDescriptor;

    /// The image under a partial isomorphism of the snapshot defined on the sockel.
    auto image(const IndexedStructure & snapshot, const TypeDescriptor & t,
            const std::map<int, int> & f) -> TypeDescriptor;

    enum class RankSearch
    {
        /// Skips the mixed-tuple search when the age is instance monotone.
        Fast,
        /// Always searches every subset of the mixed tuples.
        Exhaustive
    };

    /// Largest number of mixed tuples the witness search enumerates.
    inline constexpr int mixed_tuple_cap = 16;

    /// An age member on F followed by a's elements witnessing that a embeds
    /// into the typeset of t, or nothing. Mixed tuples are those with at
    /// least two entries in a and at least one in F.
    auto rank_witness(const AgeHandle & age, const TypeDescriptor & t, const FinStructure & a,
            RankSearch search = RankSearch::Fast) -> std::optional<FinStructure>;

    auto rank_contains(const AgeHandle & age, const TypeDescriptor & t, const FinStructure & a,
            RankSearch search = RankSearch::Fast) -> bool;

    /// Age members with 1..size_bound elements, in enumeration order.
    auto age_members_up_to(const AgeHandle & age, int size_bound) -> std::vector<FinStructure>;

    /// Rank membership of every structure in `members`.
    auto rank_profile(const AgeHandle & age, const TypeDescriptor & t,
            const std::vector<FinStructure> & members) -> std::vector<bool>;

    struct RankComparison
    {
        int size_bound = 0;
        /// rank(t) is contained in rank(s) up to the bound.
        bool leq = true;
        bool geq = true;
        std::optional<FinStructure> witness_ts;
        std::optional<FinStructure> witness_st;
    };

    auto rank_compare(const AgeHandle & age, const TypeDescriptor & t, const TypeDescriptor & s,
            int size_bound) -> RankComparison;

    /// t + Z where Z is a relocated copy of `target` inside the free typeset
    /// over t's sockel; its rank equals target's at the bound.
    auto restrict_to_rank(GenericStructure & g, const TypeDescriptor & t, const TypeDescriptor & target,
            int size_bound) -> TypeDescriptor;

    enum class FormSymbol
    {
        Plus,
        Free,
        Open,
        Close
    };

    auto symbol_text(FormSymbol s) -> std::string;

    struct FormStep
    {
        FormSymbol symbol = FormSymbol::Plus;
        /// Plus: the summand. Close: the successor of the type at the
        /// matching bracket that is joined in.
        std::optional<TypeDescriptor> operand;
        /// Free: the set E.
        std::vector<int> set;
    };

    struct FormScript
    {
        std::vector<FormStep> steps;

        auto text() const -> std::string;
    };

    /// Brackets matched with non-empty interiors.
    auto well_formed(const FormScript & script) -> bool;

    struct FormedType
    {
        TypeDescriptor type;
        std::vector<FormSymbol> sequence;
        /// The set assigned to each entry; matching brackets share one.
        std::vector<std::vector<int>> phi;
        /// The intermediate successors, starting with the original type.
        std::vector<TypeDescriptor> chain;
    };

    auto apply_form(const IndexedStructure & snapshot, const AgeHandle & age,
            const TypeDescriptor & t, const FormScript & script) -> FormedType;
}
