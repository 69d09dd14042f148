#include <fraisse/age.hh>

#include <algorithm>
#include <bit>
#include <numeric>

namespace fraisse
{
    namespace
    {
        using Mask = std::uint64_t;

        enum class Step
        {
            Continue,
            Prune,
            Stop
        };

        auto bit(int e) -> Mask
        {
            return Mask(1) << e;
        }

        /// Pair-coverage index over a structure of at most 64 elements.
        class CoverIndex
        {
            private:
                int _size;
                std::vector<Mask> _instance_masks;
                std::vector<Mask> _adjacent;

            public:
                explicit CoverIndex(const FinStructure & s) :
                    _size(s.size()),
                    _adjacent(s.size(), 0)
                {
                    if (s.size() > 64)
                        throw BudgetExceeded("irreducibility search limited to 64 elements");
                    for (auto & i : s.instances()) {
                        Mask m = 0;
                        for (int e : i)
                            m |= bit(e);
                        if (std::popcount(m) >= 2)
                            _instance_masks.push_back(m);
                        for (int e : i)
                            _adjacent[e] |= m & ~bit(e);
                    }
                }

                auto size() const -> int { return _size; }
                auto adjacent(int e) const -> Mask { return _adjacent[e]; }

                auto irreducible(Mask set) const -> bool
                {
                    if (std::popcount(set) <= 1)
                        return true;
                    std::vector<Mask> covered(_size, 0);
                    for (Mask m : _instance_masks)
                        if ((m & ~set) == 0)
                            for (Mask rest = m ; rest ; rest &= rest - 1)
                                covered[std::countr_zero(rest)] |= m;
                    for (Mask rest = set ; rest ; rest &= rest - 1) {
                        int u = std::countr_zero(rest);
                        if ((set & ~(covered[u] | bit(u))) != 0)
                            return false;
                    }
                    return true;
                }

                /// Visits Gaifman cliques extending `current` by later candidates.
                template <typename Visit>
                auto cliques(Mask current, Mask candidates, Visit & visit) const -> bool
                {
                    switch (visit(current, candidates)) {
                        case Step::Stop: return true;
                        case Step::Prune: return false;
                        case Step::Continue: break;
                    }
                    for (Mask rest = candidates ; rest ; rest &= rest - 1) {
                        int v = std::countr_zero(rest);
                        Mask later = rest & ~bit(v);
                        if (cliques(current | bit(v), later & _adjacent[v], visit))
                            return true;
                    }
                    return false;
                }
        };

        auto all_mask(int n) -> Mask
        {
            return n >= 64 ? ~Mask(0) : bit(n) - 1;
        }

        /// Whether some subset of size in [min_size, max_size] induces an
        /// irreducible substructure, optionally containing `must_use`.
        auto has_irreducible(const FinStructure & s, int min_size, int max_size, std::optional<int> must_use) -> bool
        {
            CoverIndex index(s);
            Mask start = 0, candidates = all_mask(s.size());
            if (must_use) {
                start = bit(*must_use);
                candidates = index.adjacent(*must_use);
            }
            auto visit = [&] (Mask current, Mask rest) -> Step {
                int size = std::popcount(current);
                if (size + std::popcount(rest) < min_size || size > max_size)
                    return Step::Prune;
                if (size >= min_size && index.irreducible(current))
                    return Step::Stop;
                return Step::Continue;
            };
            if (must_use)
                return index.cliques(start, candidates, visit);

            for (int v = 0 ; v < s.size() ; ++v)
                if (index.cliques(bit(v), index.adjacent(v) & ~all_mask(v + 1), visit))
                    return true;
            return false;
        }

        auto empty_age(SignaturePtr sig) -> const AgeHandle &
        {
            static std::mutex mutex;
            static std::vector<std::pair<SignaturePtr, std::unique_ptr<AgeHandle>>> cache;
            std::lock_guard lock(mutex);
            for (auto & [s, a] : cache)
                if (*s == *sig)
                    return *a;
            cache.emplace_back(sig, std::make_unique<AgeHandle>(BoundarySpec{ sig, {}, std::nullopt }));
            return *cache.back().second;
        }
    }

    auto rule_name(RuleKind kind) -> std::string
    {
        switch (kind) {
            case RuleKind::CompleteGraph: return "complete_graph";
            case RuleKind::IrreducibleUniformMinN: return "irreducible_k_uniform_min_n";
            case RuleKind::IrreducibleUniformExactlyN: return "irreducible_k_uniform_exactly_n";
            case RuleKind::Custom: return "custom";
        }
        return "custom";
    }

    auto parse_rule_kind(const std::string & name) -> RuleKind
    {
        for (auto k : { RuleKind::CompleteGraph, RuleKind::IrreducibleUniformMinN, RuleKind::IrreducibleUniformExactlyN })
            if (rule_name(k) == name)
                return k;
        throw AgeError("unknown schematic rule '" + name + "'");
    }

    auto uniform_signature(int k) -> SignaturePtr
    {
        static std::mutex mutex;
        static std::map<int, SignaturePtr> cache;
        std::lock_guard lock(mutex);
        auto & s = cache[k];
        if (! s)
            s = make_signature({ RelationSymbol{ k == 2 ? "E" : "H", k, Mode::Set } });
        return s;
    }

    auto complete_uniform(int k, int n) -> FinStructure
    {
        FinStructure s(uniform_signature(k), n);
        std::vector<bool> choose(n, false);
        std::fill(choose.begin(), choose.begin() + std::min(k, n), true);
        if (k > n)
            return s;
        do {
            std::vector<int> t;
            for (int e = 0 ; e < n ; ++e)
                if (choose[e])
                    t.push_back(e);
            s.add(Instance(0, t));
        } while (std::prev_permutation(choose.begin(), choose.end()));
        return s;
    }

    auto complete_graph(int n) -> FinStructure
    {
        return complete_uniform(2, n);
    }

    auto tuples_through(const Signature & sig, int size, int e) -> std::vector<Instance>
    {
        std::vector<Instance> result;
        for (int r = 0 ; r < sig.size() ; ++r) {
            int arity = sig[r].arity;
            if (arity > size)
                continue;
            std::vector<int> t(arity, 0);
            auto emit = [&] (auto & self, int pos) -> void {
                if (pos == arity) {
                    if (std::find(t.begin(), t.end(), e) != t.end())
                        result.push_back(Instance(r, t));
                    return;
                }
                for (int v = 0 ; v < size ; ++v) {
                    if (sig[r].mode == Mode::Set && pos > 0 && v <= t[pos - 1])
                        continue;
                    if (std::find(t.begin(), t.begin() + pos, v) != t.begin() + pos)
                        continue;
                    t[pos] = v;
                    self(self, pos + 1);
                }
            };
            emit(emit, 0);
        }
        return result;
    }

    auto normalize_boundary(const BoundarySpec & spec, int schematic_cap) -> NormalizedBoundary
    {
        NormalizedBoundary result;
        result.spec = spec;

        if (spec.schematic) {
            auto & rule = *spec.schematic;
            switch (rule.kind) {
                case RuleKind::CompleteGraph:
                    if (rule.n < 1)
                        throw AgeError("complete_graph needs n >= 1");
                    result.spec.signature = uniform_signature(2);
                    result.spec.explicit_members = { complete_graph(rule.n) };
                    result.free_amalgamation = true;
                    result.checked_up_to = rule.n;
                    return result;

                case RuleKind::IrreducibleUniformMinN:
                case RuleKind::IrreducibleUniformExactlyN:
                    if (rule.k < 2 || rule.n <= rule.k)
                        throw AgeError("uniform rules need 2 <= k < n");
                    result.spec.signature = uniform_signature(rule.k);
                    result.free_amalgamation = true;
                    result.checked_up_to = 0;
                    return result;

                case RuleKind::Custom: {
                    if (! rule.forbidden || ! rule.signature)
                        throw AgeError("custom rule needs a signature and a predicate");
                    result.spec.signature = rule.signature;
                    AgeHandle probe(NormalizedBoundary{ result.spec, false, 0 });
                    auto members = probe.boundary_members(std::min(schematic_cap, rule.max_member_size));
                    result.free_amalgamation = std::all_of(members.begin(), members.end(),
                            [] (const FinStructure & b) { return is_irreducible(b); });
                    result.checked_up_to = std::min(schematic_cap, rule.max_member_size);
                    return result;
                }
            }
        }

        if (! spec.signature)
            throw AgeError("boundary without signature");
        for (auto & b : spec.explicit_members)
            if (! (*b.signature() == *spec.signature))
                throw AgeError("boundary member over a different signature");

        IsoClassSet classes;
        for (auto & b : spec.explicit_members)
            classes.insert(b);
        auto members = classes.members();
        std::stable_sort(members.begin(), members.end(),
                [] (const FinStructure & a, const FinStructure & b) { return a.size() < b.size(); });

        std::vector<FinStructure> kept;
        for (auto & b : members) {
            bool dominated = std::any_of(kept.begin(), kept.end(), [&] (const FinStructure & a) { return embeds(a, b); });
            if (! dominated)
                kept.push_back(b);
        }

        result.spec.explicit_members = kept;
        result.free_amalgamation = std::all_of(kept.begin(), kept.end(), [] (const FinStructure & b) { return is_irreducible(b); });
        for (auto & b : kept)
            result.checked_up_to = std::max(result.checked_up_to, b.size());
        return result;
    }

    AgeHandle::AgeHandle(const BoundarySpec & spec) :
        AgeHandle(normalize_boundary(spec))
    {
    }

    AgeHandle::AgeHandle(NormalizedBoundary boundary) :
        _boundary(std::move(boundary))
    {
        auto & rule = _boundary.spec.schematic;
        if (! rule || rule->kind == RuleKind::CompleteGraph)
            _forbidden = _boundary.spec.explicit_members;

        if (rule && (rule->kind == RuleKind::IrreducibleUniformMinN || rule->kind == RuleKind::IrreducibleUniformExactlyN))
            _instance_monotone = true;
        else if (rule && rule->kind == RuleKind::Custom)
            _instance_monotone = false;
        else {
            _instance_monotone = true;
            for (auto & b : _forbidden) {
                for (int e = 0 ; e < b.size() && _instance_monotone ; ++e)
                    for (auto & t : tuples_through(*b.signature(), b.size(), e)) {
                        FinStructure bigger = b;
                        if (! bigger.add(t))
                            continue;
                        if (contains(bigger)) {
                            _instance_monotone = false;
                            break;
                        }
                    }
                if (! _instance_monotone)
                    break;
            }
        }
    }

    auto AgeHandle::forbidden_uniform(const FinStructure & a, std::optional<int> must_use) const -> bool
    {
        auto & rule = *_boundary.spec.schematic;
        int max_size = rule.kind == RuleKind::IrreducibleUniformExactlyN ? rule.n : a.size();
        return has_irreducible(a, rule.n, max_size, must_use);
    }

    auto AgeHandle::forbidden_custom(const FinStructure & a, std::optional<int> must_use) const -> bool
    {
        auto & rule = *_boundary.spec.schematic;
        int n = a.size();
        if (n > 20)
            throw BudgetExceeded("custom boundary predicate limited to 20 elements");
        for (std::uint32_t m = 1 ; m < (std::uint32_t(1) << n) ; ++m) {
            if (must_use && ! (m & (1u << *must_use)))
                continue;
            if (std::popcount(m) > rule.max_member_size)
                continue;
            std::vector<int> subset;
            for (int e = 0 ; e < n ; ++e)
                if (m & (1u << e))
                    subset.push_back(e);
            if (rule.forbidden(induced(a, subset).structure))
                return true;
        }
        return false;
    }

    auto AgeHandle::contains(const FinStructure & a) const -> bool
    {
        if (! (*a.signature() == *signature()))
            throw AgeError("structure over a different signature than the age");
        auto & rule = _boundary.spec.schematic;
        if (rule && (rule->kind == RuleKind::IrreducibleUniformMinN || rule->kind == RuleKind::IrreducibleUniformExactlyN))
            return ! forbidden_uniform(a, std::nullopt);
        if (rule && rule->kind == RuleKind::Custom)
            return ! forbidden_custom(a, std::nullopt);

        IndexedStructure target(a);
        for (auto & b : _forbidden)
            if (b.size() <= a.size() && find_morphism(b, target, MorphismKind::Embedding))
                return false;
        return true;
    }

    auto AgeHandle::contains_given(const FinStructure & a, int e) const -> bool
    {
        if (! (*a.signature() == *signature()))
            throw AgeError("structure over a different signature than the age");
        auto & rule = _boundary.spec.schematic;
        if (rule && (rule->kind == RuleKind::IrreducibleUniformMinN || rule->kind == RuleKind::IrreducibleUniformExactlyN))
            return ! forbidden_uniform(a, e);
        if (rule && rule->kind == RuleKind::Custom)
            return ! forbidden_custom(a, e);

        IndexedStructure target(a);
        for (auto & b : _forbidden) {
            if (b.size() > a.size())
                continue;
            for (int v = 0 ; v < b.size() ; ++v) {
                SearchConstraints c;
                c.partial.emplace(v, e);
                if (find_morphism(b, target, MorphismKind::Embedding, c))
                    return false;
            }
        }
        return true;
    }

    auto AgeHandle::members(int n) const -> const std::vector<FinStructure> &
    {
        if (n < 0 || n > enumeration_cap)
            throw BudgetExceeded("age enumeration beyond " + std::to_string(enumeration_cap) + " elements");
        {
            std::lock_guard lock(_mutex);
            auto it = _members.find(n);
            if (it != _members.end())
                return it->second;
        }

        std::vector<FinStructure> result;
        if (n == 0)
            result.push_back(FinStructure(signature(), 0));
        else {
            auto & smaller = members(n - 1);
            auto tuples = tuples_through(*signature(), n, n - 1);
            if (int(tuples.size()) > extension_tuple_cap)
                throw BudgetExceeded("too many candidate tuples for age enumeration at size " + std::to_string(n));
            IsoClassSet classes;
            for (auto & r : smaller) {
                for (std::uint64_t m = 0 ; m < (std::uint64_t(1) << tuples.size()) ; ++m) {
                    std::vector<Instance> inst = r.instances();
                    for (std::size_t t = 0 ; t < tuples.size() ; ++t)
                        if (m & (std::uint64_t(1) << t))
                            inst.push_back(tuples[t]);
                    FinStructure candidate(signature(), n, std::move(inst));
                    if (contains_given(candidate, n - 1))
                        classes.insert(candidate);
                }
            }
            result = classes.members();
        }

        std::lock_guard lock(_mutex);
        return _members.emplace(n, std::move(result)).first->second;
    }

    auto AgeHandle::boundary_members(int cap) const -> std::vector<FinStructure>
    {
        auto & rule = _boundary.spec.schematic;
        if (! rule || rule->kind == RuleKind::CompleteGraph) {
            std::vector<FinStructure> result;
            for (auto & b : _forbidden)
                if (b.size() <= cap)
                    result.push_back(b);
            return result;
        }

        auto & all = empty_age(signature());
        std::vector<FinStructure> result;
        for (int s = 1 ; s <= cap ; ++s) {
            for (auto & b : all.members(s)) {
                bool member = false;
                if (rule->kind == RuleKind::Custom) {
                    if (rule->forbidden(b)) {
                        member = true;
                        for (int e = 0 ; e < s && member ; ++e) {
                            std::vector<int> rest;
                            for (int v = 0 ; v < s ; ++v)
                                if (v != e)
                                    rest.push_back(v);
                            if (forbidden_custom(induced(b, rest).structure, std::nullopt))
                                member = false;
                        }
                    }
                }
                else if (rule->kind == RuleKind::IrreducibleUniformExactlyN)
                    member = s == rule->n && is_irreducible(b);
                else if (s >= rule->n && is_irreducible(b)) {
                    member = true;
                    for (int e = 0 ; e < s && member ; ++e) {
                        std::vector<int> rest;
                        for (int v = 0 ; v < s ; ++v)
                            if (v != e)
                                rest.push_back(v);
                        if (! contains(induced(b, rest).structure))
                            member = false;
                    }
                }
                if (member)
                    result.push_back(b);
            }
        }
        return result;
    }

    auto make_age(const BoundarySpec & spec) -> AgePtr
    {
        return std::make_shared<const AgeHandle>(spec);
    }

    auto explicit_age(SignaturePtr signature, std::vector<FinStructure> members) -> AgePtr
    {
        return make_age(BoundarySpec{ std::move(signature), std::move(members), std::nullopt });
    }

    auto schematic_age(RuleKind kind, int k, int n) -> AgePtr
    {
        SchematicRule rule;
        rule.kind = kind;
        rule.k = kind == RuleKind::CompleteGraph ? 2 : k;
        rule.n = n;
        return make_age(BoundarySpec{ uniform_signature(rule.k), {}, rule });
    }

    auto age_contains(const AgeHandle & age, const FinStructure & a) -> bool
    {
        return age.contains(a);
    }

    auto enumerate_age(const AgeHandle & age, int n) -> std::vector<FinStructure>
    {
        return age.members(n);
    }

    auto one_point_extensions(const AgeHandle & age, const FinStructure & base) -> std::vector<FinStructure>
    {
        int n = base.size() + 1;
        auto tuples = tuples_through(*base.signature(), n, n - 1);
        if (int(tuples.size()) > AgeHandle::extension_tuple_cap)
            throw BudgetExceeded("too many candidate tuples for one-point extensions over " + std::to_string(base.size()) + " elements");
        bool base_ok = age.contains(base);
        std::vector<FinStructure> result;
        for (std::uint64_t m = 0 ; m < (std::uint64_t(1) << tuples.size()) ; ++m) {
            std::vector<Instance> inst = base.instances();
            for (std::size_t t = 0 ; t < tuples.size() ; ++t)
                if (m & (std::uint64_t(1) << t))
                    inst.push_back(tuples[t]);
            FinStructure candidate(base.signature(), n, std::move(inst));
            if (base_ok ? age.contains_given(candidate, n - 1) : age.contains(candidate))
                result.push_back(std::move(candidate));
        }
        return result;
    }

    auto omega(const FinStructure & s) -> int
    {
        if (s.size() == 0)
            return 0;
        CoverIndex index(s);
        int best = 1;
        auto visit = [&] (Mask current, Mask rest) -> Step {
            int size = std::popcount(current);
            if (size + std::popcount(rest) <= best)
                return Step::Prune;
            if (size > best && index.irreducible(current))
                best = size;
            return Step::Continue;
        };
        for (int v = 0 ; v < s.size() ; ++v)
            index.cliques(bit(v), index.adjacent(v) & ~all_mask(v + 1), visit);
        return best;
    }

    auto is_conformal(const FinStructure & b, const std::vector<int> & a) -> bool
    {
        int n = b.size();
        std::vector<bool> in_a(n, false);
        for (int e : a)
            in_a[e] = true;
        if (a.size() < 2 || int(a.size()) >= n)
            return false;

        auto inside = [&] (const Instance & i, int x) {
            return std::all_of(i.begin(), i.end(), [&] (int e) { return ! in_a[e] || e == x; });
        };

        for (std::size_t p = 0 ; p < a.size() ; ++p)
            for (std::size_t q = 0 ; q < a.size() ; ++q) {
                if (p == q)
                    continue;
                int x = a[p], y = a[q];
                std::vector<int> swap(n);
                std::iota(swap.begin(), swap.end(), 0);
                swap[x] = y;
                std::vector<Instance> from_x, at_y;
                for (auto & i : b.instances()) {
                    if (inside(i, x))
                        from_x.push_back(relabel(b, i, swap));
                    if (inside(i, y))
                        at_y.push_back(i);
                }
                std::sort(from_x.begin(), from_x.end());
                std::sort(at_y.begin(), at_y.end());
                if (from_x != at_y)
                    return false;
            }
        return true;
    }

    auto boundary_analysis(const FinStructure & b) -> BoundaryAnalysis
    {
        BoundaryAnalysis result;
        result.omega = omega(b);
        result.three_gaifman_complete = is_3_irreducible(b);
        int n = b.size();
        if (n > 20)
            throw BudgetExceeded("conformal-set enumeration limited to 20 elements");
        std::vector<std::pair<int, std::vector<int>>> found;
        for (std::uint32_t m = 0 ; m < (std::uint32_t(1) << n) ; ++m) {
            std::vector<int> a;
            for (int e = 0 ; e < n ; ++e)
                if (m & (1u << e))
                    a.push_back(e);
            if (is_conformal(b, a))
                found.emplace_back(int(a.size()), a);
        }
        std::sort(found.begin(), found.end());
        for (auto & f : found)
            result.conformal_sets.push_back(f.second);
        return result;
    }

    namespace
    {
        auto gaifman3_contains(const std::vector<std::array<int, 3>> & triples, int a, int b, int c) -> bool
        {
            std::array<int, 3> t{ a, b, c };
            std::sort(t.begin(), t.end());
            return std::binary_search(triples.begin(), triples.end(), t);
        }

        auto conformal_item_holds(const FinStructure & m, bool want_edge) -> bool
        {
            if (m.size() < 3)
                return true;
            auto analysis = boundary_analysis(m);
            auto triples = gaifman_triples(m);
            for (auto & a : analysis.conformal_sets) {
                std::vector<bool> in_a(m.size(), false);
                for (int e : a)
                    in_a[e] = true;
                bool found = false;
                for (std::size_t p = 0 ; p < a.size() && ! found ; ++p)
                    for (std::size_t q = p + 1 ; q < a.size() && ! found ; ++q)
                        for (int c = 0 ; c < m.size() && ! found ; ++c)
                            if (! in_a[c] && gaifman3_contains(triples, a[p], a[q], c) == want_edge)
                                found = true;
                if (! found)
                    return false;
            }
            return true;
        }
    }

    auto certify_single_rank(const AgeHandle & age, int size_cap) -> std::optional<SingleRankCertificate>
    {
        auto members = age.boundary_members(size_cap);
        auto & rule = age.boundary().spec.schematic;
        std::string proof = rule && rule->kind != RuleKind::CompleteGraph
            ? "rule " + rule_name(rule->kind) + ": generated members checked up to size " + std::to_string(size_cap)
            : "";

        auto all = [&] (auto predicate) { return std::all_of(members.begin(), members.end(), predicate); };

        if (all([] (const FinStructure & b) { return b.size() == 2 || is_3_irreducible(b); }))
            return SingleRankCertificate{ 1, size_cap, proof };
        if (all([] (const FinStructure & b) { return boundary_analysis(b).conformal_sets.empty(); }))
            return SingleRankCertificate{ 2, size_cap, proof };
        if (all([] (const FinStructure & b) { return conformal_item_holds(b, true); }))
            return SingleRankCertificate{ 3, size_cap, proof };
        // Item (4) adds tuples with two entries in the conform set and one in
        // the sockel, which needs a relation of arity at least three.
        if (age.signature()->max_arity() >= 3
                && all([] (const FinStructure & b) { return conformal_item_holds(b, false); }))
            return SingleRankCertificate{ 4, size_cap, proof };
        return std::nullopt;
    }
}
