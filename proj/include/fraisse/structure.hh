#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fraisse
{
    enum class Mode
    {
        Ordered,
        Set
    };

    struct RelationSymbol
    {
        std::string name;
        int arity = 1;
        Mode mode = Mode::Ordered;

        auto operator== (const RelationSymbol &) const -> bool = default;
    };

    class Signature
    {
        private:
            std::vector<RelationSymbol> _symbols;

        public:
            Signature() = default;
            explicit Signature(std::vector<RelationSymbol> symbols);

            auto symbols() const -> const std::vector<RelationSymbol> & { return _symbols; }
            auto size() const -> int { return int(_symbols.size()); }
            auto operator[] (int i) const -> const RelationSymbol & { return _symbols[i]; }
            auto find(std::string_view name) const -> std::optional<int>;
            auto max_arity() const -> int;

            auto operator== (const Signature &) const -> bool = default;
    };

    using SignaturePtr = std::shared_ptr<const Signature>;

    auto make_signature(std::vector<RelationSymbol> symbols) -> SignaturePtr;

    /// Largest supported arity of a relation symbol.
    inline constexpr int supported_arity = 6;

    struct Instance
    {
        int symbol = 0;
        int arity = 0;
        std::array<int, supported_arity> entries{};

        Instance() = default;
        Instance(int symbol, std::initializer_list<int> tuple);
        Instance(int symbol, const std::vector<int> & tuple);

        auto tuple() const -> std::vector<int> { return { entries.begin(), entries.begin() + arity }; }
        auto begin() const { return entries.begin(); }
        auto end() const { return entries.begin() + arity; }
        auto contains(int e) const -> bool;
        auto max_entry() const -> int;

        auto operator<=> (const Instance &) const = default;
    };

    class StructureError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    /// Finite relational structure with elements 0..size-1. Instances are kept
    /// sorted, set-mode tuples with ascending entries.
    class FinStructure
    {
        private:
            SignaturePtr _signature;
            int _size = 0;
            std::vector<Instance> _instances;

        public:
            FinStructure() = default;
            FinStructure(SignaturePtr signature, int size);
            FinStructure(SignaturePtr signature, int size, std::vector<Instance> instances);

            auto signature() const -> const SignaturePtr & { return _signature; }
            auto size() const -> int { return _size; }
            auto instances() const -> const std::vector<Instance> & { return _instances; }

            auto canonical(Instance i) const -> Instance;
            auto contains(const Instance & i) const -> bool;
            auto add(Instance i) -> bool;
            auto add_element() -> int;

            auto operator== (const FinStructure & other) const -> bool;
    };

    struct Induced
    {
        FinStructure structure;
        std::vector<int> elements;
    };

    /// Restriction to `subset`; element i of the result is subset[i].
    auto induced(const FinStructure & s, const std::vector<int> & subset) -> Induced;

    /// Applies `map` to every entry of `i` and canonicalises against `s`'s signature.
    auto relabel(const FinStructure & s, const Instance & i, const std::vector<int> & map) -> Instance;

    auto gaifman_pairs(const FinStructure & s) -> std::vector<std::array<int, 2>>;
    auto gaifman_triples(const FinStructure & s) -> std::vector<std::array<int, 3>>;
    auto gaifman_adjacency(const FinStructure & s) -> std::vector<std::vector<bool>>;
    auto is_irreducible(const FinStructure & s) -> bool;
    auto is_3_irreducible(const FinStructure & s) -> bool;

    struct Amalgam
    {
        FinStructure structure;
        std::vector<int> second_map;
    };

    /// Free amalgam of m and m_prime over the correspondence `shared` of
    /// (element of m, element of m_prime) pairs. Elements of m keep their ids;
    /// the remaining elements of m_prime follow in order.
    auto free_amalgam(const FinStructure & m, const FinStructure & m_prime,
            const std::vector<std::pair<int, int>> & shared) -> Amalgam;

    auto disjoint_union(const FinStructure & a, const FinStructure & b) -> FinStructure;

    auto to_dot(const FinStructure & s, std::string_view name = "G") -> std::string;

    auto describe(const FinStructure & s) -> std::string;
}
