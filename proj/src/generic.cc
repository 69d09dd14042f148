#include <fraisse/generic.hh>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace fraisse
{
    namespace
    {
        /// Calls f on every subset of `pool` with at most `max_size` elements,
        /// ordered by size and then lexicographically.
        template <typename F_>
        auto for_each_small_subset(const std::vector<int> & pool, int max_size, F_ && f) -> void
        {
            int n = int(pool.size());
            for (int k = 0 ; k <= std::min(max_size, n) ; ++k) {
                std::vector<int> index(k);
                std::iota(index.begin(), index.end(), 0);
                while (true) {
                    std::vector<int> subset;
                    for (int i : index)
                        subset.push_back(pool[i]);
                    f(subset);
                    int p = k - 1;
                    while (p >= 0 && index[p] == n - k + p)
                        --p;
                    if (p < 0)
                        break;
                    ++index[p];
                    for (int q = p + 1 ; q < k ; ++q)
                        index[q] = index[q - 1] + 1;
                }
            }
        }

        auto with_star(const std::vector<int> & sockel, int y) -> std::vector<int>
        {
            auto list = sockel;
            list.push_back(y);
            return list;
        }
    }

    auto normalized(TypeDescriptor t) -> TypeDescriptor
    {
        if (std::is_sorted(t.sockel.begin(), t.sockel.end()))
            return t;
        int k = int(t.sockel.size());
        std::vector<int> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&] (int a, int b) { return t.sockel[a] < t.sockel[b]; });
        std::vector<int> map(k + 1);
        for (int p = 0 ; p < k ; ++p)
            map[order[p]] = p;
        map[k] = k;
        std::vector<Instance> moved;
        for (auto & i : t.tmpl.instances())
            moved.push_back(relabel(t.tmpl, i, map));
        TypeDescriptor result;
        for (int p = 0 ; p < k ; ++p)
            result.sockel.push_back(t.sockel[order[p]]);
        result.tmpl = FinStructure(t.tmpl.signature(), k + 1, std::move(moved));
        return result;
    }

    auto describe(const TypeDescriptor & t) -> std::string
    {
        std::ostringstream out;
        out << "<{";
        for (std::size_t i = 0 ; i < t.sockel.size() ; ++i)
            out << (i ? "," : "") << t.sockel[i];
        out << "}|" << describe(t.tmpl) << ">";
        return out.str();
    }

    auto mode_name(GenerationMode mode) -> std::string
    {
        return mode == GenerationMode::Dovetail ? "dovetail" : "random";
    }

    auto parse_generation_mode(const std::string & name) -> GenerationMode
    {
        if (name == "dovetail")
            return GenerationMode::Dovetail;
        if (name == "random")
            return GenerationMode::Random;
        throw GenerationError("unknown generation mode '" + name + "'");
    }

    GenericStructure::GenericStructure(AgePtr age, GeneratorConfig config) :
        _age(std::move(age)),
        _config(config),
        _log(_age->signature())
    {
        if (! _age->free_amalgamation())
            throw GenerationError("the generator needs an age with free amalgamation");
        if (_config.sockel_cap < 0)
            throw GenerationError("sockel cap must be non-negative");
    }

    auto GenericStructure::restore(AgePtr age, GeneratorConfig config, const FinStructure & snapshot,
            std::vector<LogEntry> history) -> GenericStructure
    {
        GenericStructure g(std::move(age), config);
        if (! (*snapshot.signature() == *g._age->signature()))
            throw GenerationError("snapshot over a different signature");
        g._log = IndexedStructure(snapshot);
        for (auto & entry : history) {
            if (entry.kind != LogKind::Demand)
                continue;
            while (g._pending.empty())
                if (! g.refill())
                    throw GenerationError("demand log is longer than the queue");
            if (! (g._pending.front() == entry.type) || entry.demand_id != g._next_demand)
                throw GenerationError("demand log does not match the queue at demand " + std::to_string(entry.demand_id));
            g._pending.pop_front();
            ++g._next_demand;
        }
        g._history = std::move(history);
        return g;
    }

    auto GenericStructure::templates_over(const std::vector<int> & sockel) -> const std::vector<FinStructure> &
    {
        auto base = _log.induced(sockel);
        auto key = std::make_pair(base.size(), base.instances());
        auto it = _templates.find(key);
        if (it == _templates.end())
            it = _templates.emplace(key, one_point_extensions(*_age, base)).first;
        return it->second;
    }

    auto GenericStructure::refill() -> bool
    {
        if (_next_queue_element == -1) {
            for (auto & t : templates_over({}))
                _pending.push_back(TypeDescriptor{ {}, t });
            _next_queue_element = 0;
            return true;
        }
        if (_next_queue_element >= _log.size())
            return false;

        int e = _next_queue_element++;
        std::vector<int> older(e);
        std::iota(older.begin(), older.end(), 0);
        for_each_small_subset(older, _config.sockel_cap - 1, [&] (const std::vector<int> & rest) {
                auto sockel = rest;
                sockel.push_back(e);
                for (auto & t : templates_over(sockel))
                    _pending.push_back(TypeDescriptor{ sockel, t });
            });
        return true;
    }

    auto GenericStructure::attach(const TypeDescriptor & t, std::uint64_t demand) -> int
    {
        int k = int(t.sockel.size());
        std::vector<Instance> extra;

        if (_config.mode == GenerationMode::Random && _log.size() > k) {
            std::mt19937_64 rng(mix_hash(_config.seed, demand));
            for (int attempt = 0 ; attempt < 8 && extra.empty() ; ++attempt) {
                // Local picture: sockel, up to two other old elements, then the new one.
                std::vector<int> local = t.sockel;
                int others = 1 + int(rng() % 2);
                for (int o = 0 ; o < others ; ++o) {
                    int v = int(rng() % std::uint64_t(_log.size()));
                    if (std::find(local.begin(), local.end(), v) == local.end())
                        local.push_back(v);
                }
                int x = int(local.size());
                FinStructure picture = _log.induced(local);
                picture.add_element();
                std::vector<int> into(k + 1);
                std::iota(into.begin(), into.end(), 0);
                into[k] = x;
                for (auto & i : t.tmpl.instances())
                    if (i.contains(k))
                        picture.add(relabel(t.tmpl, i, into));
                std::vector<Instance> sampled;
                for (auto & i : tuples_through(*picture.signature(), x + 1, x)) {
                    bool determined = std::all_of(i.begin(), i.end(), [&] (int v) { return v < k || v == x; });
                    if (! determined && (rng() & 1))
                        sampled.push_back(i);
                }
                if (sampled.empty())
                    continue;
                for (auto & i : sampled)
                    picture.add(i);
                // Boundary members are irreducible, so a forbidden copy through
                // the new element lies within its neighbourhood.
                if (! _age->contains_given(picture, x))
                    continue;
                std::vector<int> back = local;
                back.push_back(-1);
                for (auto & i : sampled) {
                    Instance r = i;
                    for (int p = 0 ; p < i.arity ; ++p)
                        r.entries[p] = i.entries[p] == x ? -1 : back[i.entries[p]];
                    extra.push_back(r);
                }
            }
        }

        int y = _log.add_element();
        std::vector<int> map = with_star(t.sockel, y);
        for (auto & i : t.tmpl.instances())
            if (i.contains(k))
                _log.add(relabel(t.tmpl, i, map));
        for (auto i : extra) {
            for (int p = 0 ; p < i.arity ; ++p)
                if (i.entries[p] == -1)
                    i.entries[p] = y;
            _log.add(i);
        }
        return y;
    }

    auto GenericStructure::advance(std::uint64_t steps) -> const IndexedStructure &
    {
        for (std::uint64_t s = 0 ; s < steps ; ++s) {
            while (_pending.empty())
                if (! refill())
                    return _log;
            auto t = std::move(_pending.front());
            _pending.pop_front();
            std::uint64_t id = _next_demand++;
            int y = attach(t, id);
            _history.push_back(LogEntry{ LogKind::Demand, id, std::move(t), { y } });
        }
        return _log;
    }

    auto GenericStructure::advance_until(const std::function<bool (const GenericStructure &)> & done, std::uint64_t max_steps) -> bool
    {
        std::uint64_t start = _next_demand;
        while (! done(*this)) {
            if (_next_demand - start >= max_steps)
                return false;
            std::uint64_t before = _next_demand;
            advance(1);
            if (_next_demand == before)
                return false;
        }
        return true;
    }

    auto GenericStructure::realize(const ExtensionRequest & request) -> std::vector<int>
    {
        auto & a = request.a;
        if (! (*a.signature() == *_age->signature()))
            throw GenerationError("extension request over a different signature");
        if (request.s.size() != request.anchor.size())
            throw GenerationError("anchor does not cover the anchored subset");
        std::vector<int> map(a.size(), -1);
        std::set<int> images;
        for (std::size_t i = 0 ; i < request.s.size() ; ++i) {
            int v = request.s[i], w = request.anchor[i];
            if (v < 0 || v >= a.size() || map[v] != -1)
                throw GenerationError("invalid anchored subset");
            if (w < 0 || w >= _log.size() || ! images.insert(w).second)
                throw GenerationError("anchor is not injective into the snapshot");
            map[v] = w;
        }
        if (! _age->contains(a))
            throw GenerationError("requested structure is not in the age");
        if (! (induced(a, request.s).structure == _log.induced(request.anchor)))
            throw GenerationError("anchor is not an isomorphism onto its image");

        LogEntry entry{ LogKind::Request, 0, {}, {} };
        for (int v = 0 ; v < a.size() ; ++v)
            if (map[v] == -1) {
                map[v] = _log.add_element();
                entry.created.push_back(map[v]);
            }
        std::vector<bool> anchored(a.size(), false);
        for (int v : request.s)
            anchored[v] = true;
        for (auto & i : a.instances())
            if (! std::all_of(i.begin(), i.end(), [&] (int v) { return anchored[v]; }))
                _log.add(relabel(a, i, map));
        _history.push_back(std::move(entry));
        return map;
    }

    auto GenericStructure::realize_type(const TypeDescriptor & t) -> int
    {
        std::vector<int> s(t.sockel.size());
        std::iota(s.begin(), s.end(), 0);
        return realize(ExtensionRequest{ t.tmpl, s, t.sockel }).back();
    }

    auto GenericStructure::type_of(const std::vector<int> & sockel, int y) const -> TypeDescriptor
    {
        auto sorted = sockel;
        std::sort(sorted.begin(), sorted.end());
        return TypeDescriptor{ sorted, _log.induced(with_star(sorted, y)) };
    }

    auto GenericStructure::typeset_contains(const TypeDescriptor & t, int y) const -> bool
    {
        if (y < 0 || y >= _log.size() || std::find(t.sockel.begin(), t.sockel.end(), y) != t.sockel.end())
            return false;
        return _log.induced(with_star(t.sockel, y)) == t.tmpl;
    }

    auto GenericStructure::typeset(const TypeDescriptor & t) const -> std::vector<int>
    {
        std::vector<int> result;
        for (int y = 0 ; y < _log.size() ; ++y)
            if (typeset_contains(t, y))
                result.push_back(y);
        return result;
    }

    auto TargetFilter::for_mover(int j) const -> std::vector<TypeDescriptor>
    {
        auto out = constraints;
        if (j < int(per_mover.size()))
            out.insert(out.end(), per_mover[j].begin(), per_mover[j].end());
        return out;
    }

    auto GenericStructure::exists_fixing(const std::vector<int> & fixed, const std::vector<int> & movers,
            const TargetFilter & filter, bool want_fresh) -> std::optional<std::vector<int>>
    {
        int f = int(fixed.size()), m = int(movers.size());
        std::vector<std::vector<TypeDescriptor>> wanted(m);
        for (int j = 0 ; j < m ; ++j)
            wanted[j] = filter.for_mover(j);
        auto passes = [&] (int j, int w) {
            if (filter.predicate && ! filter.predicate(w))
                return false;
            return std::all_of(wanted[j].begin(), wanted[j].end(),
                    [&] (const TypeDescriptor & t) { return typeset_contains(t, w); });
        };
        auto all_pass = [&] (const std::vector<int> & images) {
            for (int j = 0 ; j < m ; ++j)
                if (! passes(j, images[j]))
                    return false;
            return true;
        };

        if (all_pass(movers))
            return movers;

        std::vector<int> order = fixed;
        order.insert(order.end(), movers.begin(), movers.end());
        auto source = _log.induced(order);
        SearchConstraints c;
        for (int i = 0 ; i < f ; ++i)
            c.partial.emplace(i, fixed[i]);
        c.filter = [&] (int v, int w) { return v < f || passes(v - f, w); };
        if (auto found = find_morphism(source, _log, MorphismKind::Embedding, c))
            return std::vector<int>(found->begin() + f, found->end());
        if (! want_fresh || m == 0)
            return std::nullopt;

        // Fresh movers over the fixed set and the constraint sockels.
        std::vector<int> anchor = fixed;
        for (auto & list : wanted)
            for (auto & t : list)
                for (int v : t.sockel)
                    if (std::find(anchor.begin(), anchor.end(), v) == anchor.end())
                        anchor.push_back(v);
        int s = int(anchor.size());
        auto position = [&] (int v) { return int(std::find(anchor.begin(), anchor.end(), v) - anchor.begin()); };
        auto star_map = [&] (const TypeDescriptor & t, int j) {
            std::vector<int> into;
            for (int v : t.sockel)
                into.push_back(position(v));
            into.push_back(s + j);
            return into;
        };

        FinStructure base = _log.induced(anchor);
        for (int j = 0 ; j < m ; ++j)
            base.add_element();
        std::vector<int> from_source(f + m);
        for (int i = 0 ; i < f ; ++i)
            from_source[i] = i;
        for (int j = 0 ; j < m ; ++j)
            from_source[f + j] = s + j;
        for (auto & i : source.instances())
            base.add(relabel(source, i, from_source));
        for (int j = 0 ; j < m ; ++j)
            for (auto & t : wanted[j]) {
                auto into = star_map(t, j);
                for (auto & i : t.tmpl.instances())
                    if (i.contains(t.star()))
                        base.add(relabel(t.tmpl, i, into));
            }

        auto consistent = [&] (const FinStructure & candidate) {
            if (! (induced(candidate, from_source).structure == source))
                return false;
            for (int j = 0 ; j < m ; ++j)
                for (auto & t : wanted[j])
                    if (! (induced(candidate, star_map(t, j)).structure == t.tmpl))
                        return false;
            return true;
        };
        if (! consistent(base))
            return std::nullopt;

        // Tuples through two or more movers and a non-fixed anchor are free.
        std::vector<Instance> open;
        for (int j = 0 ; j < m ; ++j)
            for (auto & i : tuples_through(*base.signature(), s + m, s + j)) {
                int movers_in = 0, first_mover = s + m;
                bool loose = false;
                for (int v : i) {
                    if (v >= s) {
                        ++movers_in;
                        first_mover = std::min(first_mover, v);
                    }
                    else if (v >= f)
                        loose = true;
                }
                if (movers_in >= 2 && loose && first_mover == s + j && ! base.contains(i))
                    open.push_back(i);
            }

        std::optional<FinStructure> chosen;
        if (_age->contains(base))
            chosen = base;
        else if (! _age->instance_monotone() && open.size() <= 12) {
            for (std::uint32_t mask = 1 ; mask < (1u << open.size()) && ! chosen ; ++mask) {
                FinStructure candidate = base;
                for (std::size_t t = 0 ; t < open.size() ; ++t)
                    if (mask & (1u << t))
                        candidate.add(open[t]);
                if (_age->contains(candidate))
                    chosen = candidate;
            }
        }
        if (! chosen)
            return std::nullopt;

        std::vector<int> s_positions(s);
        std::iota(s_positions.begin(), s_positions.end(), 0);
        auto map = realize(ExtensionRequest{ *chosen, s_positions, anchor });
        std::vector<int> images(map.begin() + s, map.end());
        if (! all_pass(images))
            return std::nullopt;
        return images;
    }

    auto GenericStructure::verify_copy_prefix(const std::vector<int> & candidate, int sockel_bound) const -> std::vector<TypeDescriptor>
    {
        auto pool = candidate;
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        std::vector<bool> in_candidate(_log.size(), false);
        for (int v : pool)
            in_candidate.at(v) = true;

        std::vector<TypeDescriptor> unmet;
        for_each_small_subset(pool, sockel_bound, [&] (const std::vector<int> & sockel) {
                std::map<std::vector<Instance>, std::pair<FinStructure, bool>> seen;
                for (int y = 0 ; y < _log.size() ; ++y) {
                    if (std::binary_search(sockel.begin(), sockel.end(), y))
                        continue;
                    auto t = _log.induced(with_star(sockel, y));
                    auto [it, fresh] = seen.emplace(t.instances(), std::make_pair(t, false));
                    (void) fresh;
                    if (in_candidate[y])
                        it->second.second = true;
                }
                for (auto & [key, entry] : seen)
                    if (! entry.second)
                        unmet.push_back(TypeDescriptor{ sockel, entry.first });
            });
        return unmet;
    }
}
