#pragma once

#include <fraisse/structure.hh>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_set>
#include <vector>

namespace fraisse
{
    struct InstanceHash
    {
        auto operator() (const Instance & i) const -> std::size_t;
    };

    /// Growable structure with incidence and Gaifman-neighbour indices, the
    /// target representation used by morphism search.
    class IndexedStructure
    {
        private:
            SignaturePtr _signature;
            int _size = 0;
            std::vector<Instance> _instances;
            std::unordered_set<Instance, InstanceHash> _lookup;
            std::vector<std::vector<int>> _incident;
            std::vector<std::vector<int>> _neighbours;

        public:
            IndexedStructure() = default;
            explicit IndexedStructure(SignaturePtr signature);
            explicit IndexedStructure(const FinStructure & s);

            auto signature() const -> const SignaturePtr & { return _signature; }
            auto size() const -> int { return _size; }
            auto instance_count() const -> int { return int(_instances.size()); }
            auto instance(int id) const -> const Instance & { return _instances[id]; }
            auto instances() const -> const std::vector<Instance> & { return _instances; }
            auto incident(int e) const -> const std::vector<int> & { return _incident[e]; }
            auto neighbours(int e) const -> const std::vector<int> & { return _neighbours[e]; }
            auto adjacent(int a, int b) const -> bool;

            auto canonical(Instance i) const -> Instance;
            auto contains(const Instance & i) const -> bool;
            auto add_element() -> int;
            auto add(const Instance & i) -> bool;

            auto induced(const std::vector<int> & subset) const -> FinStructure;
            auto structure() const -> FinStructure;
    };

    enum class MorphismKind
    {
        Monomorphism,
        Embedding,
        Isomorphism
    };

    struct Morphism
    {
        MorphismKind kind = MorphismKind::Embedding;
        std::vector<int> map;

        auto operator== (const Morphism &) const -> bool = default;
    };

    struct SearchConstraints
    {
        std::map<int, int> partial;
        std::function<bool (int source, int target)> filter;
    };

    /// Backtracking search over source elements in index order with ascending
    /// candidates, so results come out lexicographically least first.
    auto search_morphisms(const FinStructure & source, const IndexedStructure & target, MorphismKind kind,
            std::size_t limit, const SearchConstraints & constraints = {}) -> std::vector<Morphism>;

    auto search_morphisms(const FinStructure & source, const FinStructure & target, MorphismKind kind,
            std::size_t limit, const SearchConstraints & constraints = {}) -> std::vector<Morphism>;

    auto find_morphism(const FinStructure & source, const IndexedStructure & target, MorphismKind kind,
            const SearchConstraints & constraints = {}) -> std::optional<std::vector<int>>;

    auto find_morphism(const FinStructure & source, const FinStructure & target, MorphismKind kind,
            const SearchConstraints & constraints = {}) -> std::optional<std::vector<int>>;

    /// Independent check of a map against the definition of the given kind.
    auto verify_morphism(const FinStructure & source, const FinStructure & target,
            const std::vector<int> & map, MorphismKind kind) -> bool;

    /// Isomorphism test; `fixed_points` lists elements that must map to themselves.
    auto is_isomorphic(const FinStructure & a, const FinStructure & b,
            const std::vector<int> & fixed_points = {}) -> bool;

    auto embeds(const FinStructure & a, const FinStructure & b) -> bool;

    /// Isomorphism-invariant hash after colour refinement. The elements in
    /// `distinguished` keep individual colours by position.
    auto invariant_hash(const FinStructure & s, const std::vector<int> & distinguished = {}) -> std::uint64_t;

    /// Set of structures up to isomorphism fixing the first `fixed` elements
    /// pointwise; hash buckets resolved by isomorphism search.
    class IsoClassSet
    {
        private:
            int _fixed;
            std::map<std::uint64_t, std::vector<int>> _buckets;
            std::vector<FinStructure> _members;

        public:
            explicit IsoClassSet(int fixed = 0) : _fixed(fixed) { }

            /// Returns the index of the class, and whether it was new.
            auto insert(const FinStructure & s) -> std::pair<int, bool>;
            auto find(const FinStructure & s) const -> std::optional<int>;
            auto members() const -> const std::vector<FinStructure> & { return _members; }
            auto size() const -> int { return int(_members.size()); }
    };

    auto mix_hash(std::uint64_t h, std::uint64_t v) -> std::uint64_t;
}
