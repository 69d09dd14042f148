#include <fraisse/structure.hh>

#include <algorithm>
#include <set>
#include <sstream>

namespace fraisse
{
    Signature::Signature(std::vector<RelationSymbol> symbols) :
        _symbols(std::move(symbols))
    {
        std::set<std::string> names;
        for (auto & r : _symbols) {
            if (r.arity < 1)
                throw StructureError("relation '" + r.name + "' must have positive arity");
            if (r.arity > supported_arity)
                throw StructureError("relation '" + r.name + "' exceeds the supported arity " + std::to_string(supported_arity));
            if (! names.insert(r.name).second)
                throw StructureError("duplicate relation name '" + r.name + "'");
        }
    }

    auto Signature::find(std::string_view name) const -> std::optional<int>
    {
        for (int i = 0 ; i < size() ; ++i)
            if (_symbols[i].name == name)
                return i;
        return std::nullopt;
    }

    auto Signature::max_arity() const -> int
    {
        int m = 0;
        for (auto & r : _symbols)
            m = std::max(m, r.arity);
        return m;
    }

    auto make_signature(std::vector<RelationSymbol> symbols) -> SignaturePtr
    {
        return std::make_shared<const Signature>(std::move(symbols));
    }

    Instance::Instance(int s, std::initializer_list<int> tuple) :
        symbol(s),
        arity(int(tuple.size()))
    {
        if (arity > supported_arity)
            throw StructureError("tuple too long");
        std::copy(tuple.begin(), tuple.end(), entries.begin());
    }

    Instance::Instance(int s, const std::vector<int> & tuple) :
        symbol(s),
        arity(int(tuple.size()))
    {
        if (arity > supported_arity)
            throw StructureError("tuple too long");
        std::copy(tuple.begin(), tuple.end(), entries.begin());
    }

    auto Instance::contains(int e) const -> bool
    {
        return std::find(begin(), end(), e) != end();
    }

    auto Instance::max_entry() const -> int
    {
        return *std::max_element(begin(), end());
    }

    FinStructure::FinStructure(SignaturePtr signature, int size) :
        _signature(std::move(signature)),
        _size(size)
    {
        if (! _signature)
            throw StructureError("structure without signature");
        if (size < 0)
            throw StructureError("negative structure size");
    }

    FinStructure::FinStructure(SignaturePtr signature, int size, std::vector<Instance> instances) :
        FinStructure(std::move(signature), size)
    {
        for (auto & i : instances)
            i = canonical(i);
        std::sort(instances.begin(), instances.end());
        instances.erase(std::unique(instances.begin(), instances.end()), instances.end());
        _instances = std::move(instances);
    }

    auto FinStructure::canonical(Instance i) const -> Instance
    {
        if (i.symbol < 0 || i.symbol >= _signature->size())
            throw StructureError("unknown relation symbol index " + std::to_string(i.symbol));
        auto & r = (*_signature)[i.symbol];
        if (i.arity != r.arity)
            throw StructureError("tuple of length " + std::to_string(i.arity) + " for relation '" + r.name
                    + "' of arity " + std::to_string(r.arity));
        for (int k = 0 ; k < i.arity ; ++k) {
            if (i.entries[k] < 0 || i.entries[k] >= _size)
                throw StructureError("element " + std::to_string(i.entries[k]) + " out of range in relation '" + r.name + "'");
            for (int l = 0 ; l < k ; ++l)
                if (i.entries[k] == i.entries[l])
                    throw StructureError("repeated entry in a tuple of relation '" + r.name + "'");
        }
        for (int k = i.arity ; k < supported_arity ; ++k)
            i.entries[k] = 0;
        if (r.mode == Mode::Set)
            std::sort(i.entries.begin(), i.entries.begin() + i.arity);
        return i;
    }

    auto FinStructure::contains(const Instance & i) const -> bool
    {
        return std::binary_search(_instances.begin(), _instances.end(), canonical(i));
    }

    auto FinStructure::add(Instance i) -> bool
    {
        i = canonical(i);
        auto pos = std::lower_bound(_instances.begin(), _instances.end(), i);
        if (pos != _instances.end() && *pos == i)
            return false;
        _instances.insert(pos, i);
        return true;
    }

    auto FinStructure::add_element() -> int
    {
        return _size++;
    }

    auto FinStructure::operator== (const FinStructure & other) const -> bool
    {
        return _size == other._size && _instances == other._instances
            && (_signature == other._signature || *_signature == *other._signature);
    }

    auto relabel(const FinStructure & s, const Instance & i, const std::vector<int> & map) -> Instance
    {
        Instance r = i;
        for (int k = 0 ; k < i.arity ; ++k)
            r.entries[k] = map[i.entries[k]];
        if ((*s.signature())[i.symbol].mode == Mode::Set)
            std::sort(r.entries.begin(), r.entries.begin() + r.arity);
        return r;
    }

    auto induced(const FinStructure & s, const std::vector<int> & subset) -> Induced
    {
        std::vector<int> position(s.size(), -1);
        for (int k = 0 ; k < int(subset.size()) ; ++k) {
            int e = subset[k];
            if (e < 0 || e >= s.size())
                throw std::out_of_range("element " + std::to_string(e) + " is not in the structure");
            if (position[e] != -1)
                throw std::out_of_range("element " + std::to_string(e) + " listed twice");
            position[e] = k;
        }

        std::vector<Instance> kept;
        for (auto & i : s.instances()) {
            if (std::all_of(i.begin(), i.end(), [&] (int e) { return position[e] != -1; }))
                kept.push_back(relabel(s, i, position));
        }
        return Induced{ FinStructure(s.signature(), int(subset.size()), std::move(kept)), subset };
    }

    auto gaifman_adjacency(const FinStructure & s) -> std::vector<std::vector<bool>>
    {
        std::vector<std::vector<bool>> adj(s.size(), std::vector<bool>(s.size(), false));
        for (auto & i : s.instances())
            for (int a = 0 ; a < i.arity ; ++a)
                for (int b = 0 ; b < i.arity ; ++b)
                    if (a != b)
                        adj[i.entries[a]][i.entries[b]] = true;
        return adj;
    }

    auto gaifman_pairs(const FinStructure & s) -> std::vector<std::array<int, 2>>
    {
        auto adj = gaifman_adjacency(s);
        std::vector<std::array<int, 2>> result;
        for (int a = 0 ; a < s.size() ; ++a)
            for (int b = a + 1 ; b < s.size() ; ++b)
                if (adj[a][b])
                    result.push_back({ a, b });
        return result;
    }

    auto gaifman_triples(const FinStructure & s) -> std::vector<std::array<int, 3>>
    {
        std::set<std::array<int, 3>> triples;
        for (auto & i : s.instances()) {
            std::vector<int> t(i.begin(), i.end());
            std::sort(t.begin(), t.end());
            for (std::size_t a = 0 ; a < t.size() ; ++a)
                for (std::size_t b = a + 1 ; b < t.size() ; ++b)
                    for (std::size_t c = b + 1 ; c < t.size() ; ++c)
                        triples.insert({ t[a], t[b], t[c] });
        }
        return { triples.begin(), triples.end() };
    }

    auto is_irreducible(const FinStructure & s) -> bool
    {
        auto n = std::size_t(s.size());
        if (n < 2)
            return true;
        return gaifman_pairs(s).size() == n * (n - 1) / 2;
    }

    auto is_3_irreducible(const FinStructure & s) -> bool
    {
        auto n = std::size_t(s.size());
        if (n < 3)
            return true;
        return gaifman_triples(s).size() == n * (n - 1) * (n - 2) / 6;
    }

    auto free_amalgam(const FinStructure & m, const FinStructure & m_prime,
            const std::vector<std::pair<int, int>> & shared) -> Amalgam
    {
        if (! (*m.signature() == *m_prime.signature()))
            throw StructureError("free amalgam of structures over different signatures");

        std::vector<int> map(m_prime.size(), -1);
        std::vector<int> first_side, second_side;
        for (auto [a, b] : shared) {
            if (a < 0 || a >= m.size() || b < 0 || b >= m_prime.size())
                throw StructureError("correspondence entry out of range");
            if (map[b] != -1 || std::find(first_side.begin(), first_side.end(), a) != first_side.end())
                throw StructureError("correspondence is not injective");
            map[b] = a;
            first_side.push_back(a);
            second_side.push_back(b);
        }

        auto left = induced(m, first_side).structure;
        auto right = induced(m_prime, second_side).structure;
        if (! (left == right))
            throw StructureError("correspondence is not an isomorphism of the shared restrictions");

        int next = m.size();
        for (int b = 0 ; b < m_prime.size() ; ++b)
            if (map[b] == -1)
                map[b] = next++;

        FinStructure result(m.signature(), next, m.instances());
        for (auto & i : m_prime.instances())
            result.add(relabel(m_prime, i, map));
        return Amalgam{ std::move(result), std::move(map) };
    }

    auto disjoint_union(const FinStructure & a, const FinStructure & b) -> FinStructure
    {
        return free_amalgam(a, b, {}).structure;
    }

    auto to_dot(const FinStructure & s, std::string_view name) -> std::string
    {
        std::ostringstream out;
        out << "graph " << name << " {\n";
        for (int e = 0 ; e < s.size() ; ++e)
            out << "  " << e << ";\n";
        for (auto [a, b] : gaifman_pairs(s))
            out << "  " << a << " -- " << b << ";\n";
        out << "}\n";
        return out.str();
    }

    auto describe(const FinStructure & s) -> std::string
    {
        std::ostringstream out;
        out << s.size() << " {";
        bool first = true;
        for (auto & i : s.instances()) {
            out << (first ? "" : " ") << (*s.signature())[i.symbol].name << ":";
            for (int k = 0 ; k < i.arity ; ++k)
                out << (k ? "," : "") << i.entries[k];
            first = false;
        }
        out << "}";
        return out.str();
    }
}
