#pragma once

#include <fraisse/age.hh>
#include <fraisse/morphism.hh>
#include <fraisse/structure.hh>

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fraisse
{
    /// A type <F|x>: the sockel F (ascending element ids) and a template on
    /// F plus one slot, the star, which is the last element.
    struct TypeDescriptor
    {
        std::vector<int> sockel;
        FinStructure tmpl;

        auto star() const -> int { return int(sockel.size()); }
        auto operator== (const TypeDescriptor &) const -> bool = default;
    };

    /// Sorts the sockel ascending and relabels the template to match.
    auto normalized(TypeDescriptor t) -> TypeDescriptor;

    auto describe(const TypeDescriptor & t) -> std::string;

    enum class GenerationMode
    {
        Dovetail,
        Random
    };

    auto mode_name(GenerationMode mode) -> std::string;
    auto parse_generation_mode(const std::string & name) -> GenerationMode;

    struct GeneratorConfig
    {
        std::uint64_t seed = 0;
        GenerationMode mode = GenerationMode::Dovetail;
        /// Largest sockel the scheduler enqueues demands for.
        int sockel_cap = 2;
    };

    struct ExtensionRequest
    {
        FinStructure a;
        std::vector<int> s;
        /// anchor[i] is the snapshot element that s[i] must map to.
        std::vector<int> anchor;
    };

    enum class LogKind
    {
        Demand,
        Request
    };

    struct LogEntry
    {
        LogKind kind = LogKind::Demand;
        std::uint64_t demand_id = 0;
        TypeDescriptor type;
        std::vector<int> created;
    };

    struct TargetFilter
    {
        std::function<bool (int)> predicate;
        /// Every mover image must lie in the typeset of each listed type.
        std::vector<TypeDescriptor> constraints;
        /// Optional: entry j constrains only the image of mover j.
        std::vector<std::vector<TypeDescriptor>> per_mover;

        auto for_mover(int j) const -> std::vector<TypeDescriptor>;
    };

    class GenerationError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    /// Append-only finite approximation of the homogeneous structure of a
    /// free amalgamation age. Demands are served from a FIFO queue whose
    /// contents are a function of the snapshot: the types over the empty
    /// set, then for each element e in creation order the types over every
    /// F containing e as its largest element, |F| <= sockel_cap.
    class GenericStructure
    {
        private:
            AgePtr _age;
            GeneratorConfig _config;
            IndexedStructure _log;
            std::vector<LogEntry> _history;

            std::deque<TypeDescriptor> _pending;
            int _next_queue_element = -1;
            std::uint64_t _next_demand = 0;
            std::map<std::pair<int, std::vector<Instance>>, std::vector<FinStructure>> _templates;

            auto refill() -> bool;
            auto attach(const TypeDescriptor & t, std::uint64_t demand) -> int;

        public:
            GenericStructure(AgePtr age, GeneratorConfig config = {});

            /// Rebuilds a generator from an exported snapshot and its log.
            static auto restore(AgePtr age, GeneratorConfig config, const FinStructure & snapshot,
                    std::vector<LogEntry> history) -> GenericStructure;

            auto age() const -> const AgePtr & { return _age; }
            auto config() const -> const GeneratorConfig & { return _config; }
            auto indexed() const -> const IndexedStructure & { return _log; }
            auto snapshot() const -> FinStructure { return _log.structure(); }
            auto size() const -> int { return _log.size(); }
            auto history() const -> const std::vector<LogEntry> & { return _history; }
            auto demands_served() const -> std::uint64_t { return _next_demand; }

            /// Templates of the one-point extensions over the induced structure on F.
            auto templates_over(const std::vector<int> & sockel) -> const std::vector<FinStructure> &;

            /// Pops and realizes n demands; stops early only if the queue is exhausted.
            auto advance(std::uint64_t steps) -> const IndexedStructure &;

            /// Advances until `done` holds or `max_steps` demands were served.
            auto advance_until(const std::function<bool (const GenericStructure &)> & done, std::uint64_t max_steps) -> bool;

            /// Appends a[~s] freely over the anchor; returns the embedding of a.
            auto realize(const ExtensionRequest & request) -> std::vector<int>;

            /// Appends one element realizing t (free attachment over its sockel).
            auto realize_type(const TypeDescriptor & t) -> int;

            auto type_of(const std::vector<int> & sockel, int y) const -> TypeDescriptor;
            auto typeset_contains(const TypeDescriptor & t, int y) const -> bool;
            auto typeset(const TypeDescriptor & t) const -> std::vector<int>;

            /// Images of `movers` under an embedding of induced(fixed + movers)
            /// fixing `fixed`, with every image passing the filter. With
            /// `want_fresh`, realizes fresh movers when the snapshot has none.
            auto exists_fixing(const std::vector<int> & fixed, const std::vector<int> & movers,
                    const TargetFilter & filter, bool want_fresh) -> std::optional<std::vector<int>>;

            /// Types over F within `candidate`, |F| <= bound, realized in the
            /// snapshot outside F but by no element of candidate outside F.
            auto verify_copy_prefix(const std::vector<int> & candidate, int sockel_bound) const -> std::vector<TypeDescriptor>;
    };
}
