#include <fraisse/colouring.hh>

#include <algorithm>
#include <stdexcept>

namespace fraisse
{
    namespace
    {
        class ConstantOracle : public ColouringOracle
        {
            int _colour;

            public:
                explicit ConstantOracle(int colour) : _colour(colour) {}
                auto name() const -> std::string override { return "all-" + std::to_string(_colour); }
                auto colour(const IndexedStructure &, int) -> int override { return _colour; }
        };

        class ParityOracle : public ColouringOracle
        {
            public:
                auto name() const -> std::string override { return "parity"; }
                auto colour(const IndexedStructure &, int y) -> int override { return y % 2; }
        };

        class DegreeOracle : public ColouringOracle
        {
            int _threshold;

            public:
                explicit DegreeOracle(int threshold) : _threshold(threshold) {}
                auto name() const -> std::string override { return "degree-" + std::to_string(_threshold); }
                auto colour(const IndexedStructure & s, int y) -> int override
                {
                    return int(attachment_record(s, y).instances.size()) >= _threshold ? blue : red;
                }
        };

        class ScriptedOracle : public ColouringOracle
        {
            std::vector<int> _script;

            public:
                explicit ScriptedOracle(std::vector<int> script) : _script(std::move(script))
                {
                    if (_script.empty())
                        throw std::invalid_argument("scripted oracle without colours");
                    for (int c : _script)
                        if (c != red && c != blue)
                            throw std::invalid_argument("scripted colours must be 0 or 1");
                }
                auto name() const -> std::string override { return "scripted"; }
                auto colour(const IndexedStructure &, int y) -> int override { return _script[y % _script.size()]; }
        };

        class RandomOracle : public ColouringOracle
        {
            std::uint64_t _seed;

            public:
                explicit RandomOracle(std::uint64_t seed) : _seed(seed) {}
                auto name() const -> std::string override { return "random-" + std::to_string(_seed); }
                auto colour(const IndexedStructure &, int y) -> int override
                {
                    return int(mix_hash(_seed, std::uint64_t(y)) >> 63);
                }
        };

        /// Red unless an attachment neighbour is red, so red never holds an edge.
        class EdgeFreeRedOracle : public ColouringOracle
        {
            std::vector<int> _memo;

            public:
                auto name() const -> std::string override { return "edge-free-red"; }
                auto colour(const IndexedStructure & s, int y) -> int override
                {
                    for (int z = int(_memo.size()) ; z <= y ; ++z) {
                        auto n = attachment_record(s, z).neighbours();
                        bool red_neighbour = std::any_of(n.begin(), n.end(), [&] (int v) { return _memo[v] == red; });
                        _memo.push_back(red_neighbour ? blue : red);
                    }
                    return _memo[y];
                }
        };

        class AdjacentOracle : public ColouringOracle
        {
            int _element;

            public:
                explicit AdjacentOracle(int element) : _element(element) {}
                auto name() const -> std::string override { return "adjacent-" + std::to_string(_element); }
                auto colour(const IndexedStructure & s, int y) -> int override
                {
                    auto n = attachment_record(s, y).neighbours();
                    return std::binary_search(n.begin(), n.end(), _element) ? red : blue;
                }
        };

        class FirstOracle : public ColouringOracle
        {
            int _count;

            public:
                explicit FirstOracle(int count) : _count(count) {}
                auto name() const -> std::string override { return "first-" + std::to_string(_count); }
                auto colour(const IndexedStructure &, int y) -> int override { return y < _count ? red : blue; }
        };
    }

    auto AttachmentRecord::neighbours() const -> std::vector<int>
    {
        std::vector<int> out;
        for (auto & i : instances)
            for (int e : i)
                if (e != element)
                    out.push_back(e);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    auto attachment_record(const IndexedStructure & snapshot, int y) -> AttachmentRecord
    {
        AttachmentRecord r;
        r.element = y;
        for (int id : snapshot.incident(y)) {
            auto & i = snapshot.instance(id);
            if (i.max_entry() <= y)
                r.instances.push_back(i);
        }
        std::sort(r.instances.begin(), r.instances.end());
        return r;
    }

    auto make_oracle(const OracleSpec & spec) -> OraclePtr
    {
        if (spec.kind == "all")
            return std::make_shared<ConstantOracle>(spec.colour);
        if (spec.kind == "parity")
            return std::make_shared<ParityOracle>();
        if (spec.kind == "degree")
            return std::make_shared<DegreeOracle>(spec.threshold);
        if (spec.kind == "scripted")
            return std::make_shared<ScriptedOracle>(spec.script);
        if (spec.kind == "random")
            return std::make_shared<RandomOracle>(spec.seed);
        if (spec.kind == "edge-free-red")
            return std::make_shared<EdgeFreeRedOracle>();
        if (spec.kind == "adjacent")
            return std::make_shared<AdjacentOracle>(spec.element);
        if (spec.kind == "first")
            return std::make_shared<FirstOracle>(spec.count);
        throw std::invalid_argument("unknown oracle kind " + spec.kind);
    }

    auto builtin_oracle_kinds() -> std::vector<std::string>
    {
        return { "all", "parity", "degree", "scripted", "random" };
    }

    auto builtin_oracle(const std::string & kind, std::uint64_t seed) -> OracleSpec
    {
        OracleSpec spec;
        spec.kind = kind;
        spec.seed = seed;
        spec.colour = int(seed % 2);
        spec.threshold = 2 + int(seed % 3);
        if (kind == "scripted")
            for (int i = 0 ; i < 16 ; ++i)
                spec.script.push_back(int(mix_hash(seed + 101, std::uint64_t(i)) >> 63));
        return spec;
    }

    auto describe(const OracleSpec & spec) -> std::string
    {
        if (spec.kind == "all")
            return "all-" + std::to_string(spec.colour);
        if (spec.kind == "degree")
            return "degree-" + std::to_string(spec.threshold);
        if (spec.kind == "random")
            return "random-" + std::to_string(spec.seed);
        if (spec.kind == "adjacent")
            return "adjacent-" + std::to_string(spec.element);
        if (spec.kind == "first")
            return "first-" + std::to_string(spec.count);
        return spec.kind;
    }
}
