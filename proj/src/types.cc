#include <fraisse/types.hh>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace fraisse
{
    namespace
    {
        auto sorted_unique(std::vector<int> v) -> std::vector<int>
        {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            return v;
        }

        auto position_in(const std::vector<int> & list, int v) -> int
        {
            auto it = std::lower_bound(list.begin(), list.end(), v);
            if (it == list.end() || *it != v)
                throw TypeError("element " + std::to_string(v) + " is not in the sockel");
            return int(it - list.begin());
        }

        /// Copies the star tuples of t into `into`, whose sockel is `sockel`
        /// (a superset of t's) followed by the star.
        auto add_star_tuples(FinStructure & into, const std::vector<int> & sockel, const TypeDescriptor & t) -> void
        {
            std::vector<int> map;
            for (int v : t.sockel)
                map.push_back(position_in(sockel, v));
            map.push_back(int(sockel.size()));
            for (auto & i : t.tmpl.instances())
                if (i.contains(t.star()))
                    into.add(relabel(t.tmpl, i, map));
        }

        auto with_star(const IndexedStructure & snapshot, const std::vector<int> & sockel) -> FinStructure
        {
            auto base = snapshot.induced(sockel);
            base.add_element();
            return base;
        }

        auto check_consistent(const IndexedStructure & snapshot, const TypeDescriptor & t) -> void
        {
            if (! (sockel_structure(t) == snapshot.induced(t.sockel)))
                throw TypeError("type template disagrees with the snapshot on its sockel");
        }
    }

    auto abstract_type(const FinStructure & tmpl) -> TypeDescriptor
    {
        if (tmpl.size() < 1)
            throw TypeError("a type template needs the star element");
        std::vector<int> sockel(tmpl.size() - 1);
        std::iota(sockel.begin(), sockel.end(), 0);
        return TypeDescriptor{ sockel, tmpl };
    }

    auto sockel_structure(const TypeDescriptor & t) -> FinStructure
    {
        std::vector<int> positions(t.sockel.size());
        std::iota(positions.begin(), positions.end(), 0);
        return induced(t.tmpl, positions).structure;
    }

    auto types_over(GenericStructure & g, const std::vector<int> & sockel) -> std::vector<TypeDescriptor>
    {
        auto f = sorted_unique(sockel);
        std::vector<TypeDescriptor> result;
        for (auto & t : g.templates_over(f))
            result.push_back(TypeDescriptor{ f, t });
        return result;
    }

    auto restrict_type(const TypeDescriptor & t, const std::vector<int> & subset) -> TypeDescriptor
    {
        auto e = sorted_unique(subset);
        std::vector<int> positions;
        for (int v : e)
            positions.push_back(position_in(t.sockel, v));
        positions.push_back(t.star());
        return TypeDescriptor{ e, induced(t.tmpl, positions).structure };
    }

    auto free_successor(const IndexedStructure & snapshot, const AgeHandle & age,
            const TypeDescriptor & t, const std::vector<int> & extra) -> TypeDescriptor
    {
        check_consistent(snapshot, t);
        auto e = sorted_unique(extra);
        for (int v : e)
            if (std::binary_search(t.sockel.begin(), t.sockel.end(), v))
                throw TypeError("free successor set meets the sockel");
        auto sockel = t.sockel;
        sockel.insert(sockel.end(), e.begin(), e.end());
        sockel = sorted_unique(sockel);
        auto tmpl = with_star(snapshot, sockel);
        add_star_tuples(tmpl, sockel, t);
        if (! age.contains(tmpl))
            throw TypeError("free successor is not an age member");
        return TypeDescriptor{ sockel, tmpl };
    }

    auto free_position_violation(const IndexedStructure & snapshot, const TypeDescriptor & t,
            const TypeDescriptor & s) -> std::optional<std::string>
    {
        std::vector<int> shared, only_t, only_s;
        std::set_intersection(t.sockel.begin(), t.sockel.end(), s.sockel.begin(), s.sockel.end(), std::back_inserter(shared));
        std::set_difference(t.sockel.begin(), t.sockel.end(), s.sockel.begin(), s.sockel.end(), std::back_inserter(only_t));
        std::set_difference(s.sockel.begin(), s.sockel.end(), t.sockel.begin(), t.sockel.end(), std::back_inserter(only_s));
        if (! (restrict_type(t, shared) == restrict_type(s, shared)))
            return "the types disagree over their common sockel";
        for (int a : only_t)
            for (int b : only_s)
                if (snapshot.adjacent(a, b))
                    return "sockel elements " + std::to_string(a) + " and " + std::to_string(b) + " are related";
        return std::nullopt;
    }

    auto join(const IndexedStructure & snapshot, const AgeHandle & age,
            const TypeDescriptor & t, const TypeDescriptor & s) -> TypeDescriptor
    {
        check_consistent(snapshot, t);
        check_consistent(snapshot, s);
        if (auto why = free_position_violation(snapshot, t, s))
            throw TypeError("types not in free position: " + *why);
        auto sockel = t.sockel;
        sockel.insert(sockel.end(), s.sockel.begin(), s.sockel.end());
        sockel = sorted_unique(sockel);
        auto tmpl = with_star(snapshot, sockel);
        add_star_tuples(tmpl, sockel, t);
        add_star_tuples(tmpl, sockel, s);
        if (! age.contains(tmpl))
            throw TypeError("join is not an age member");
        return TypeDescriptor{ sockel, tmpl };
    }

    auto sum(const IndexedStructure & snapshot, const AgeHandle & age,
            const TypeDescriptor & t, const TypeDescriptor & s) -> TypeDescriptor
    {
        for (int v : s.sockel)
            if (std::binary_search(t.sockel.begin(), t.sockel.end(), v))
                throw TypeError("summands must have disjoint sockels");
        return join(snapshot, age, t, s);
    }

    auto image(const IndexedStructure & snapshot, const TypeDescriptor & t, const std::map<int, int> & f) -> TypeDescriptor
    {
        check_consistent(snapshot, t);
        std::vector<int> target;
        for (int v : t.sockel) {
            auto it = f.find(v);
            if (it == f.end())
                throw TypeError("map undefined on sockel element " + std::to_string(v));
            if (it->second < 0 || it->second >= snapshot.size())
                throw TypeError("map leaves the snapshot");
            target.push_back(it->second);
        }
        if (sorted_unique(target).size() != target.size())
            throw TypeError("map is not injective on the sockel");
        if (! (snapshot.induced(t.sockel) == snapshot.induced(target)))
            throw TypeError("map is not an isomorphism on the sockel");
        return normalized(TypeDescriptor{ target, t.tmpl });
    }

    auto rank_witness(const AgeHandle & age, const TypeDescriptor & t, const FinStructure & a,
            RankSearch search) -> std::optional<FinStructure>
    {
        if (! (*a.signature() == *age.signature()))
            throw TypeError("structure over a different signature than the age");
        int f = int(t.sockel.size()), n = f + a.size();
        FinStructure m(age.signature(), n);
        for (auto & i : t.tmpl.instances())
            if (! i.contains(t.star()))
                m.add(i);
        std::vector<int> shift(a.size());
        std::iota(shift.begin(), shift.end(), f);
        for (auto & i : a.instances())
            m.add(relabel(a, i, shift));
        std::vector<int> map(f + 1);
        std::iota(map.begin(), map.end(), 0);
        for (int j = 0 ; j < a.size() ; ++j) {
            map[f] = f + j;
            for (auto & i : t.tmpl.instances())
                if (i.contains(t.star()))
                    m.add(relabel(t.tmpl, i, map));
        }
        if (age.contains(m))
            return m;
        if (f == 0 || a.size() < 2 || (search == RankSearch::Fast && age.instance_monotone()))
            return std::nullopt;

        std::vector<Instance> mixed;
        for (int e = f ; e < n ; ++e)
            for (auto & i : tuples_through(*age.signature(), n, e)) {
                int in_a = 0, low = n;
                bool in_f = false;
                for (int v : i) {
                    if (v >= f) {
                        ++in_a;
                        low = std::min(low, v);
                    }
                    else
                        in_f = true;
                }
                if (in_f && in_a >= 2 && low == e)
                    mixed.push_back(i);
            }
        if (mixed.empty())
            return std::nullopt;
        if (int(mixed.size()) > mixed_tuple_cap)
            throw BudgetExceeded("rank witness search over " + std::to_string(mixed.size()) + " mixed tuples");
        for (std::uint32_t mask = 1 ; mask < (std::uint32_t(1) << mixed.size()) ; ++mask) {
            FinStructure candidate = m;
            for (std::size_t k = 0 ; k < mixed.size() ; ++k)
                if (mask & (std::uint32_t(1) << k))
                    candidate.add(mixed[k]);
            if (age.contains(candidate))
                return candidate;
        }
        return std::nullopt;
    }

    auto rank_contains(const AgeHandle & age, const TypeDescriptor & t, const FinStructure & a, RankSearch search) -> bool
    {
        return rank_witness(age, t, a, search).has_value();
    }

    auto age_members_up_to(const AgeHandle & age, int size_bound) -> std::vector<FinStructure>
    {
        std::vector<FinStructure> result;
        for (int n = 1 ; n <= size_bound ; ++n) {
            auto & level = age.members(n);
            result.insert(result.end(), level.begin(), level.end());
        }
        return result;
    }

    auto rank_profile(const AgeHandle & age, const TypeDescriptor & t, const std::vector<FinStructure> & members) -> std::vector<bool>
    {
        std::vector<bool> result;
        result.reserve(members.size());
        for (auto & a : members)
            result.push_back(rank_contains(age, t, a));
        return result;
    }

    auto rank_compare(const AgeHandle & age, const TypeDescriptor & t, const TypeDescriptor & s, int size_bound) -> RankComparison
    {
        RankComparison result;
        result.size_bound = size_bound;
        for (auto & a : age_members_up_to(age, size_bound)) {
            bool in_t = rank_contains(age, t, a), in_s = rank_contains(age, s, a);
            if (in_t && ! in_s) {
                result.leq = false;
                if (! result.witness_ts)
                    result.witness_ts = a;
            }
            if (in_s && ! in_t) {
                result.geq = false;
                if (! result.witness_st)
                    result.witness_st = a;
            }
        }
        return result;
    }

    auto restrict_to_rank(GenericStructure & g, const TypeDescriptor & t, const TypeDescriptor & target,
            int size_bound) -> TypeDescriptor
    {
        auto & age = *g.age();
        auto order = rank_compare(age, target, t, size_bound);
        if (! order.leq)
            throw TypeError("target rank is not contained in the rank of the type");

        // The free type over t's sockel; its typeset carries the whole age.
        TypeDescriptor open{ t.sockel, with_star(g.indexed(), t.sockel) };
        TargetFilter inside{ {}, { open } };
        auto images = g.exists_fixing({}, target.sockel, inside, true);
        if (! images)
            throw TypeError("could not relocate the target sockel");
        std::map<int, int> f;
        for (std::size_t i = 0 ; i < target.sockel.size() ; ++i)
            f.emplace(target.sockel[i], (*images)[i]);
        auto moved = image(g.indexed(), target, f);
        return sum(g.indexed(), age, t, moved);
    }

    auto symbol_text(FormSymbol s) -> std::string
    {
        switch (s) {
            case FormSymbol::Plus: return "+";
            case FormSymbol::Free: return "->";
            case FormSymbol::Open: return "[";
            case FormSymbol::Close: return "]";
        }
        return "?";
    }

    auto FormScript::text() const -> std::string
    {
        std::string out;
        for (auto & s : steps)
            out += symbol_text(s.symbol);
        return out;
    }

    auto well_formed(const FormScript & script) -> bool
    {
        int depth = 0;
        for (std::size_t k = 0 ; k < script.steps.size() ; ++k) {
            auto symbol = script.steps[k].symbol;
            if (symbol == FormSymbol::Open) {
                ++depth;
                if (k + 1 < script.steps.size() && script.steps[k + 1].symbol == FormSymbol::Close)
                    return false;
            }
            else if (symbol == FormSymbol::Close && --depth < 0)
                return false;
        }
        return depth == 0;
    }

    auto apply_form(const IndexedStructure & snapshot, const AgeHandle & age,
            const TypeDescriptor & t, const FormScript & script) -> FormedType
    {
        if (! well_formed(script))
            throw TypeError("form script '" + script.text() + "' is not well formed");
        check_consistent(snapshot, t);

        FormedType result{ t, {}, {}, { t } };
        std::vector<std::pair<TypeDescriptor, std::size_t>> open;
        std::set<int> used(t.sockel.begin(), t.sockel.end());
        auto claim = [&] (const std::vector<int> & set) {
            if (set.empty())
                throw TypeError("form step with an empty set");
            for (int v : set)
                if (! used.insert(v).second)
                    throw TypeError("form step reuses element " + std::to_string(v));
        };

        for (auto & step : script.steps) {
            auto & current = result.type;
            result.sequence.push_back(step.symbol);
            switch (step.symbol) {
                case FormSymbol::Plus: {
                    if (! step.operand)
                        throw TypeError("'+' needs a summand");
                    claim(step.operand->sockel);
                    current = sum(snapshot, age, current, *step.operand);
                    result.phi.push_back(step.operand->sockel);
                    break;
                }
                case FormSymbol::Free: {
                    auto e = sorted_unique(step.set);
                    claim(e);
                    current = free_successor(snapshot, age, current, e);
                    result.phi.push_back(e);
                    break;
                }
                case FormSymbol::Open:
                    open.emplace_back(current, result.phi.size());
                    result.phi.emplace_back();
                    break;
                case FormSymbol::Close: {
                    if (! step.operand)
                        throw TypeError("']' needs the type to join");
                    auto [base, slot] = open.back();
                    open.pop_back();
                    auto & s = *step.operand;
                    if (! std::includes(s.sockel.begin(), s.sockel.end(), base.sockel.begin(), base.sockel.end()))
                        throw TypeError("joined type must extend the sockel at the matching bracket");
                    if (! (restrict_type(s, base.sockel) == base))
                        throw TypeError("joined type is not a successor of the type at the matching bracket");
                    std::vector<int> e;
                    std::set_difference(s.sockel.begin(), s.sockel.end(), base.sockel.begin(), base.sockel.end(), std::back_inserter(e));
                    claim(e);
                    current = join(snapshot, age, current, s);
                    result.phi[slot] = e;
                    result.phi.push_back(e);
                    break;
                }
            }
            if (step.symbol != FormSymbol::Open)
                result.chain.push_back(current);
        }
        return result;
    }
}
