#pragma once

#include <fraisse/morphism.hh>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fraisse
{
    /// The instances present when y was created: those containing y whose
    /// entries are all at most y. Later growth of the structure never changes it.
    struct AttachmentRecord
    {
        int element = -1;
        std::vector<Instance> instances;

        /// Elements sharing an instance with the element, ascending.
        auto neighbours() const -> std::vector<int>;
    };

    auto attachment_record(const IndexedStructure & snapshot, int y) -> AttachmentRecord;

    /// Colour 0 is red and colour 1 is blue.
    inline constexpr int red = 0;
    inline constexpr int blue = 1;

    class ColouringOracle
    {
        public:
            virtual ~ColouringOracle() = default;

            virtual auto name() const -> std::string = 0;
            virtual auto colours() const -> int { return 2; }

            /// Depends only on y, its attachment record and the seed, so a
            /// replay of the same run sees the same colours.
            virtual auto colour(const IndexedStructure & snapshot, int y) -> int = 0;
    };

    using OraclePtr = std::shared_ptr<ColouringOracle>;

    struct OracleSpec
    {
        /// all, parity, degree, scripted, random, edge-free-red, adjacent or first.
        std::string kind = "all";
        std::uint64_t seed = 0;
        /// all: the colour used.
        int colour = red;
        /// degree: blue from this many attachment instances on.
        int threshold = 2;
        /// adjacent: red iff attached to this element.
        int element = 0;
        /// first: red for the first `count` elements.
        int count = 3;
        /// scripted: colour of element i is script[i % size].
        std::vector<int> script;
    };

    auto make_oracle(const OracleSpec & spec) -> OraclePtr;

    /// all, parity, degree, scripted and random.
    auto builtin_oracle_kinds() -> std::vector<std::string>;

    /// The built-in adversary of the given kind; the seed also draws the script.
    auto builtin_oracle(const std::string & kind, std::uint64_t seed) -> OracleSpec;

    auto describe(const OracleSpec & spec) -> std::string;
}
