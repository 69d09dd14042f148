#include <fraisse/morphism.hh>

#include <algorithm>
#include <numeric>

namespace fraisse
{
    auto mix_hash(std::uint64_t h, std::uint64_t v) -> std::uint64_t
    {
        std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    auto InstanceHash::operator() (const Instance & i) const -> std::size_t
    {
        std::uint64_t h = mix_hash(std::uint64_t(i.symbol), std::uint64_t(i.arity));
        for (int k = 0 ; k < i.arity ; ++k)
            h = mix_hash(h, std::uint64_t(i.entries[k]));
        return std::size_t(h);
    }

    IndexedStructure::IndexedStructure(SignaturePtr signature) :
        _signature(std::move(signature))
    {
    }

    IndexedStructure::IndexedStructure(const FinStructure & s) :
        _signature(s.signature())
    {
        for (int e = 0 ; e < s.size() ; ++e)
            add_element();
        for (auto & i : s.instances())
            add(i);
    }

    auto IndexedStructure::adjacent(int a, int b) const -> bool
    {
        auto & n = _neighbours[a];
        return std::binary_search(n.begin(), n.end(), b);
    }

    auto IndexedStructure::canonical(Instance i) const -> Instance
    {
        auto & r = (*_signature)[i.symbol];
        for (int k = i.arity ; k < supported_arity ; ++k)
            i.entries[k] = 0;
        if (r.mode == Mode::Set)
            std::sort(i.entries.begin(), i.entries.begin() + i.arity);
        return i;
    }

    auto IndexedStructure::contains(const Instance & i) const -> bool
    {
        return _lookup.count(canonical(i)) != 0;
    }

    auto IndexedStructure::add_element() -> int
    {
        _incident.emplace_back();
        _neighbours.emplace_back();
        return _size++;
    }

    auto IndexedStructure::add(const Instance & raw) -> bool
    {
        if (raw.symbol < 0 || raw.symbol >= _signature->size() || raw.arity != (*_signature)[raw.symbol].arity)
            throw StructureError("instance does not match the signature");
        for (int k = 0 ; k < raw.arity ; ++k) {
            if (raw.entries[k] < 0 || raw.entries[k] >= _size)
                throw StructureError("instance entry out of range");
            for (int l = 0 ; l < k ; ++l)
                if (raw.entries[k] == raw.entries[l])
                    throw StructureError("repeated entry in a tuple");
        }

        auto i = canonical(raw);
        if (! _lookup.insert(i).second)
            return false;
        int id = int(_instances.size());
        _instances.push_back(i);
        for (int a = 0 ; a < i.arity ; ++a) {
            int e = i.entries[a];
            _incident[e].push_back(id);
            for (int b = 0 ; b < i.arity ; ++b) {
                if (a == b)
                    continue;
                auto & n = _neighbours[e];
                auto pos = std::lower_bound(n.begin(), n.end(), i.entries[b]);
                if (pos == n.end() || *pos != i.entries[b])
                    n.insert(pos, i.entries[b]);
            }
        }
        return true;
    }

    auto IndexedStructure::induced(const std::vector<int> & subset) const -> FinStructure
    {
        std::vector<int> position;
        std::map<int, int> sparse;
        for (int k = 0 ; k < int(subset.size()) ; ++k) {
            if (subset[k] < 0 || subset[k] >= _size)
                throw std::out_of_range("element " + std::to_string(subset[k]) + " is not in the structure");
            if (! sparse.emplace(subset[k], k).second)
                throw std::out_of_range("element " + std::to_string(subset[k]) + " listed twice");
        }

        std::vector<Instance> kept;
        for (auto e : subset)
            for (int id : _incident[e]) {
                auto & i = _instances[id];
                if (i.entries[0] != e && sparse.count(i.entries[0]))
                    continue;
                Instance r = i;
                bool inside = true;
                for (int k = 0 ; k < i.arity && inside ; ++k) {
                    auto it = sparse.find(i.entries[k]);
                    if (it == sparse.end())
                        inside = false;
                    else
                        r.entries[k] = it->second;
                }
                if (inside)
                    kept.push_back(r);
            }
        return FinStructure(_signature, int(subset.size()), std::move(kept));
    }

    auto IndexedStructure::structure() const -> FinStructure
    {
        return FinStructure(_signature, _size, _instances);
    }

    namespace
    {
        struct Search
        {
            const FinStructure & source;
            const IndexedStructure & target;
            MorphismKind kind;
            std::size_t limit;
            const SearchConstraints & constraints;

            std::vector<std::vector<int>> source_incident;
            std::vector<std::vector<int>> source_neighbours;
            std::vector<int> order;
            std::vector<int> map;
            std::map<int, int> inverse;
            std::vector<Morphism> results;

            Search(const FinStructure & s, const IndexedStructure & t, MorphismKind k, std::size_t l,
                    const SearchConstraints & c) :
                source(s), target(t), kind(k), limit(l), constraints(c),
                source_incident(s.size()), source_neighbours(s.size()), map(s.size(), -1)
            {
                for (int id = 0 ; id < int(s.instances().size()) ; ++id) {
                    auto & i = s.instances()[id];
                    for (int a = 0 ; a < i.arity ; ++a) {
                        source_incident[i.entries[a]].push_back(id);
                        for (int b = 0 ; b < i.arity ; ++b)
                            if (a != b)
                                source_neighbours[i.entries[a]].push_back(i.entries[b]);
                    }
                }
                for (auto & n : source_neighbours) {
                    std::sort(n.begin(), n.end());
                    n.erase(std::unique(n.begin(), n.end()), n.end());
                }
            }

            auto consistent(int v, int w) -> bool
            {
                if (int(target.incident(w).size()) < int(source_incident[v].size()))
                    return false;
                if (kind == MorphismKind::Isomorphism && target.incident(w).size() != source_incident[v].size())
                    return false;

                for (int id : source_incident[v]) {
                    auto & i = source.instances()[id];
                    Instance m = i;
                    bool complete = true;
                    for (int k = 0 ; k < i.arity && complete ; ++k) {
                        int image = i.entries[k] == v ? w : map[i.entries[k]];
                        if (image == -1)
                            complete = false;
                        m.entries[k] = image;
                    }
                    if (complete && ! target.contains(m))
                        return false;
                }

                if (kind != MorphismKind::Monomorphism) {
                    for (int id : target.incident(w)) {
                        auto & j = target.instance(id);
                        Instance p = j;
                        bool complete = true;
                        for (int k = 0 ; k < j.arity && complete ; ++k) {
                            if (j.entries[k] == w) {
                                p.entries[k] = v;
                                continue;
                            }
                            auto it = inverse.find(j.entries[k]);
                            if (it == inverse.end())
                                complete = false;
                            else
                                p.entries[k] = it->second;
                        }
                        if (complete && ! source.contains(p))
                            return false;
                    }
                }
                return true;
            }

            auto assign(int v, int w) -> void
            {
                map[v] = w;
                inverse.emplace(w, v);
            }

            auto unassign(int v) -> void
            {
                inverse.erase(map[v]);
                map[v] = -1;
            }

            auto candidates(int v) -> std::vector<int>
            {
                const std::vector<int> * best = nullptr;
                for (int u : source_neighbours[v])
                    if (map[u] != -1 && (! best || target.neighbours(map[u]).size() < best->size()))
                        best = &target.neighbours(map[u]);

                std::vector<int> result;
                auto admit = [&] (int w) {
                    if (inverse.count(w))
                        return;
                    if (constraints.filter && ! constraints.filter(v, w))
                        return;
                    result.push_back(w);
                };
                if (best)
                    for (int w : *best)
                        admit(w);
                else
                    for (int w = 0 ; w < target.size() ; ++w)
                        admit(w);
                return result;
            }

            auto run(std::size_t depth) -> bool
            {
                if (depth == order.size()) {
                    results.push_back(Morphism{ kind, map });
                    return results.size() >= limit;
                }
                int v = order[depth];
                for (int w : candidates(v)) {
                    if (! consistent(v, w))
                        continue;
                    assign(v, w);
                    if (run(depth + 1))
                        return true;
                    unassign(v);
                }
                return false;
            }

            auto start() -> void
            {
                if (limit == 0)
                    return;
                if (kind == MorphismKind::Isomorphism
                        && (source.size() != target.size() || int(source.instances().size()) != target.instance_count()))
                    return;
                if (source.size() > target.size())
                    return;

                for (auto [v, w] : constraints.partial) {
                    if (v < 0 || v >= source.size() || w < 0 || w >= target.size())
                        return;
                    if (map[v] != -1 || inverse.count(w))
                        return;
                    if (constraints.filter && ! constraints.filter(v, w))
                        return;
                    if (! consistent(v, w))
                        return;
                    assign(v, w);
                }
                for (int v = 0 ; v < source.size() ; ++v)
                    if (map[v] == -1)
                        order.push_back(v);
                run(0);
            }
        };
    }

    auto search_morphisms(const FinStructure & source, const IndexedStructure & target, MorphismKind kind,
            std::size_t limit, const SearchConstraints & constraints) -> std::vector<Morphism>
    {
        Search search(source, target, kind, limit, constraints);
        search.start();
        return std::move(search.results);
    }

    auto search_morphisms(const FinStructure & source, const FinStructure & target, MorphismKind kind,
            std::size_t limit, const SearchConstraints & constraints) -> std::vector<Morphism>
    {
        return search_morphisms(source, IndexedStructure(target), kind, limit, constraints);
    }

    auto find_morphism(const FinStructure & source, const IndexedStructure & target, MorphismKind kind,
            const SearchConstraints & constraints) -> std::optional<std::vector<int>>
    {
        auto r = search_morphisms(source, target, kind, 1, constraints);
        if (r.empty())
            return std::nullopt;
        return r.front().map;
    }

    auto find_morphism(const FinStructure & source, const FinStructure & target, MorphismKind kind,
            const SearchConstraints & constraints) -> std::optional<std::vector<int>>
    {
        return find_morphism(source, IndexedStructure(target), kind, constraints);
    }

    auto verify_morphism(const FinStructure & source, const FinStructure & target,
            const std::vector<int> & map, MorphismKind kind) -> bool
    {
        if (int(map.size()) != source.size())
            return false;
        std::vector<int> seen(target.size(), 0);
        for (int w : map) {
            if (w < 0 || w >= target.size() || seen[w]++)
                return false;
        }
        for (auto & i : source.instances())
            if (! target.contains(relabel(target, i, map)))
                return false;
        if (kind == MorphismKind::Monomorphism)
            return true;

        std::vector<int> inverse(target.size(), -1);
        for (int v = 0 ; v < source.size() ; ++v)
            inverse[map[v]] = v;
        for (auto & j : target.instances()) {
            if (std::any_of(j.begin(), j.end(), [&] (int e) { return inverse[e] == -1; }))
                continue;
            if (! source.contains(relabel(source, j, inverse)))
                return false;
        }
        if (kind == MorphismKind::Isomorphism)
            return source.size() == target.size();
        return true;
    }

    auto is_isomorphic(const FinStructure & a, const FinStructure & b, const std::vector<int> & fixed_points) -> bool
    {
        if (a.size() != b.size() || a.instances().size() != b.instances().size())
            return false;
        SearchConstraints c;
        for (int e : fixed_points)
            c.partial.emplace(e, e);
        return ! search_morphisms(a, b, MorphismKind::Isomorphism, 1, c).empty();
    }

    auto embeds(const FinStructure & a, const FinStructure & b) -> bool
    {
        return ! search_morphisms(a, b, MorphismKind::Embedding, 1).empty();
    }

    auto invariant_hash(const FinStructure & s, const std::vector<int> & distinguished) -> std::uint64_t
    {
        int n = s.size();
        std::vector<std::uint64_t> colour(n, 1);
        for (int k = 0 ; k < int(distinguished.size()) ; ++k)
            colour[distinguished[k]] = mix_hash(0x5eed, std::uint64_t(k + 2));

        std::vector<std::vector<int>> incident(n);
        for (int id = 0 ; id < int(s.instances().size()) ; ++id)
            for (int e : s.instances()[id])
                incident[e].push_back(id);

        for (int round = 0 ; round < 3 ; ++round) {
            std::vector<std::uint64_t> next(n);
            for (int v = 0 ; v < n ; ++v) {
                std::vector<std::uint64_t> parts;
                for (int id : incident[v]) {
                    auto & i = s.instances()[id];
                    bool set_mode = (*s.signature())[i.symbol].mode == Mode::Set;
                    std::vector<std::uint64_t> others;
                    std::uint64_t h = mix_hash(std::uint64_t(i.symbol), 17);
                    for (int k = 0 ; k < i.arity ; ++k) {
                        int e = i.entries[k];
                        if (e == v)
                            h = mix_hash(h, set_mode ? 99 : std::uint64_t(k));
                        else if (set_mode)
                            others.push_back(colour[e]);
                        else
                            h = mix_hash(h, mix_hash(colour[e], std::uint64_t(k)));
                    }
                    std::sort(others.begin(), others.end());
                    for (auto o : others)
                        h = mix_hash(h, o);
                    parts.push_back(h);
                }
                std::sort(parts.begin(), parts.end());
                std::uint64_t h = colour[v];
                for (auto p : parts)
                    h = mix_hash(h, p);
                next[v] = h;
            }
            colour = std::move(next);
        }

        std::vector<std::uint64_t> sorted = colour;
        std::sort(sorted.begin(), sorted.end());
        std::uint64_t h = mix_hash(std::uint64_t(n), s.instances().size());
        for (auto c : sorted)
            h = mix_hash(h, c);
        for (int e : distinguished)
            h = mix_hash(h, colour[e]);
        return h;
    }

    auto IsoClassSet::insert(const FinStructure & s) -> std::pair<int, bool>
    {
        if (auto f = find(s))
            return { *f, false };
        std::vector<int> fixed(_fixed);
        std::iota(fixed.begin(), fixed.end(), 0);
        int index = int(_members.size());
        _members.push_back(s);
        _buckets[invariant_hash(s, fixed)].push_back(index);
        return { index, true };
    }

    auto IsoClassSet::find(const FinStructure & s) const -> std::optional<int>
    {
        std::vector<int> fixed(_fixed);
        std::iota(fixed.begin(), fixed.end(), 0);
        auto it = _buckets.find(invariant_hash(s, fixed));
        if (it == _buckets.end())
            return std::nullopt;
        for (int index : it->second)
            if (is_isomorphic(s, _members[index], fixed))
                return index;
        return std::nullopt;
    }
}
