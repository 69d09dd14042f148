#include <fraisse/bundle.hh>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

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

        auto minus(const std::vector<int> & a, const std::vector<int> & b) -> std::vector<int>
        {
            std::vector<int> out;
            for (int v : a)
                if (std::find(b.begin(), b.end(), v) == b.end())
                    out.push_back(v);
            return out;
        }

        auto predecessor_pool(const GenericStructure & g, const Bundle & c, int limit) -> std::vector<int>
        {
            std::vector<int> pool;
            for (int y = 0 ; y < g.size() && int(pool.size()) < limit ; ++y)
                if (member_containing(g, c, y))
                    pool.push_back(y);
            return pool;
        }

        auto describe_assignment(const ConformAssignment & alpha) -> std::string
        {
            std::string out;
            for (std::size_t i = 0 ; i < alpha.domain.size() ; ++i)
                out += (i ? ", " : "") + std::to_string(alpha.domain[i]) + " -> " + std::to_string(alpha.member[i]);
            return "{" + out + "}";
        }

        /// Searches a placement of the domain fixing c's sockel, advancing the
        /// structure once when the first search fails.
        auto place(GenericStructure & g, const Bundle & c, const Bundle & b, const ConformAssignment & alpha,
                const ProbeConfig & config, int & advanced) -> bool
        {
            TargetFilter filter;
            for (int m : alpha.member)
                filter.per_mover.push_back({ b.members[m] });
            if (g.exists_fixing(c.sockel, alpha.domain, filter, true))
                return true;
            if (config.advance_budget <= 0)
                return false;
            g.advance(config.advance_budget);
            advanced += config.advance_budget;
            return bool(g.exists_fixing(c.sockel, alpha.domain, filter, true));
        }

        auto same_ranks(const AgeHandle & age, const std::vector<TypeDescriptor> & a,
                const std::vector<TypeDescriptor> & b, int bound) -> bool
        {
            auto covered = [&] (const std::vector<TypeDescriptor> & from, const std::vector<TypeDescriptor> & in) {
                for (auto & t : from) {
                    bool found = false;
                    for (auto & s : in) {
                        auto cmp = rank_compare(age, t, s, bound);
                        if (cmp.leq && cmp.geq) {
                            found = true;
                            break;
                        }
                    }
                    if (! found)
                        return false;
                }
                return true;
            };
            return covered(a, b) && covered(b, a);
        }
    }

    auto for_each_fragment(const std::vector<int> & pool, int max_size,
            const std::function<bool (const std::vector<int> &)> & f) -> void
    {
        int n = int(pool.size());
        for (int k = 1 ; k <= max_size && k <= n ; ++k) {
            std::vector<int> index(k);
            for (int i = 0 ; i < k ; ++i)
                index[i] = i;
            while (true) {
                std::vector<int> subset;
                for (int i : index)
                    subset.push_back(pool[i]);
                if (! f(subset))
                    return;
                int i = k - 1;
                while (i >= 0 && index[i] == n - k + i)
                    --i;
                if (i < 0)
                    break;
                ++index[i];
                for (int j = i + 1 ; j < k ; ++j)
                    index[j] = index[j - 1] + 1;
            }
        }
    }

    auto Bundle::index_of(const TypeDescriptor & t) const -> std::optional<int>
    {
        for (int i = 0 ; i < size() ; ++i)
            if (members[i] == t)
                return i;
        return std::nullopt;
    }

    auto make_bundle(std::vector<int> sockel, std::vector<TypeDescriptor> members) -> Bundle
    {
        Bundle b{ sorted_unique(std::move(sockel)), {} };
        for (auto & m : members) {
            auto t = normalized(std::move(m));
            if (t.sockel != b.sockel)
                throw BundleError("bundle member " + describe(t) + " has a different sockel");
            if (b.index_of(t))
                throw BundleError("bundle member " + describe(t) + " is listed twice");
            b.members.push_back(std::move(t));
        }
        return b;
    }

    auto member_containing(const GenericStructure & g, const Bundle & b, int y) -> std::optional<int>
    {
        for (int i = 0 ; i < b.size() ; ++i)
            if (g.typeset_contains(b.members[i], y))
                return i;
        return std::nullopt;
    }

    auto bundle_typeset(const GenericStructure & g, const Bundle & b) -> std::vector<int>
    {
        std::vector<int> out;
        for (int y = 0 ; y < g.size() ; ++y)
            if (member_containing(g, b, y))
                out.push_back(y);
        return out;
    }

    auto successor_violation(const Bundle & c, const Bundle & b) -> std::optional<std::string>
    {
        for (int v : c.sockel)
            if (! std::binary_search(b.sockel.begin(), b.sockel.end(), v))
                return "sockel element " + std::to_string(v) + " of the predecessor is missing";
        for (int i = 0 ; i < b.size() ; ++i)
            if (! c.index_of(restrict_type(b.members[i], c.sockel)))
                return "member " + std::to_string(i) + " does not restrict to a predecessor member";
        return std::nullopt;
    }

    auto predecessor(const Bundle & c, const Bundle & b, int i) -> int
    {
        auto found = c.index_of(restrict_type(b.members.at(i), c.sockel));
        if (! found)
            throw BundleError("member " + std::to_string(i) + " has no predecessor");
        return *found;
    }

    auto x_successor_bundle(GenericStructure & g, const Bundle & b, int x) -> XSuccessor
    {
        if (std::binary_search(b.sockel.begin(), b.sockel.end(), x) || ! member_containing(g, b, x))
            throw BundleError("element " + std::to_string(x) + " is not in the bundle typeset");
        auto sockel = b.sockel;
        sockel.push_back(x);
        sockel = sorted_unique(sockel);
        XSuccessor out;
        out.x = x;
        out.bundle.sockel = sockel;
        for (auto & t : types_over(g, sockel)) {
            auto parent = b.index_of(restrict_type(t, b.sockel));
            if (! parent)
                continue;
            out.bundle.members.push_back(t);
            out.parent.push_back(*parent);
        }
        return out;
    }

    auto conform_violation(const GenericStructure & g, const Bundle & c, const Bundle & b,
            const ConformAssignment & alpha) -> std::optional<std::string>
    {
        if (alpha.domain.size() != alpha.member.size())
            return std::string("domain and member lists differ in length");
        if (sorted_unique(alpha.domain).size() != alpha.domain.size())
            return std::string("domain repeats an element");
        std::map<int, std::vector<int>> fibres;
        for (std::size_t i = 0 ; i < alpha.domain.size() ; ++i) {
            int a = alpha.domain[i], m = alpha.member[i];
            if (m < 0 || m >= b.size())
                return "member index " + std::to_string(m) + " out of range";
            if (! g.typeset_contains(restrict_type(b.members[m], c.sockel), a))
                return "element " + std::to_string(a) + " is outside the predecessor typeset of member " + std::to_string(m);
            fibres[m].push_back(a);
        }
        for (auto & [m, elements] : fibres)
            if (! rank_contains(*g.age(), b.members[m], g.indexed().induced(elements)))
                return "fibre of member " + std::to_string(m) + " is outside its rank";
        return std::nullopt;
    }

    auto melding_probe(GenericStructure & g, const Bundle & c, const Bundle & b, const ProbeConfig & config) -> ProbeVerdict
    {
        ProbeVerdict verdict;
        verdict.config = config;
        if (auto bad = successor_violation(c, b)) {
            verdict.pass = false;
            verdict.reason = "not a successor: " + *bad;
            return verdict;
        }

        std::vector<TypeDescriptor> down;
        for (auto & t : b.members)
            down.push_back(restrict_type(t, c.sockel));
        std::map<std::tuple<int, int, std::vector<Instance>>, bool> rank_cache;
        auto in_rank = [&] (int m, const std::vector<int> & elements) {
            auto s = g.indexed().induced(elements);
            auto key = std::make_tuple(m, s.size(), s.instances());
            auto it = rank_cache.find(key);
            if (it == rank_cache.end())
                it = rank_cache.emplace(key, rank_contains(*g.age(), b.members[m], s)).first;
            return it->second;
        };

        auto pool = predecessor_pool(g, c, config.pool);
        for_each_fragment(pool, config.fragment_bound, [&] (const std::vector<int> & fragment) {
                int k = int(fragment.size());
                std::vector<std::vector<int>> options(k);
                for (int i = 0 ; i < k ; ++i)
                    for (int m = 0 ; m < b.size() ; ++m)
                        if (g.typeset_contains(down[m], fragment[i]))
                            options[i].push_back(m);
                if (std::any_of(options.begin(), options.end(), [] (auto & o) { return o.empty(); }))
                    return true;
                std::vector<int> pick(k, 0);
                while (true) {
                    ConformAssignment alpha{ fragment, {} };
                    std::map<int, std::vector<int>> fibres;
                    for (int i = 0 ; i < k ; ++i) {
                        alpha.member.push_back(options[i][pick[i]]);
                        fibres[alpha.member.back()].push_back(fragment[i]);
                    }
                    bool conform = std::all_of(fibres.begin(), fibres.end(),
                            [&] (auto & entry) { return in_rank(entry.first, entry.second); });
                    if (conform) {
                        if (++verdict.assignments_checked > config.max_assignments) {
                            --verdict.assignments_checked;
                            verdict.reason = "assignment cap reached";
                            return false;
                        }
                        if (! place(g, c, b, alpha, config, verdict.advanced)) {
                            verdict.pass = false;
                            verdict.counterexample = alpha;
                            verdict.reason = "no placement for " + describe_assignment(alpha);
                            return false;
                        }
                    }
                    int i = k - 1;
                    while (i >= 0 && pick[i] + 1 == int(options[i].size()))
                        pick[i--] = 0;
                    if (i < 0)
                        return true;
                    ++pick[i];
                }
            });
        return verdict;
    }

    auto is_refinement(GenericStructure & g, const Bundle & c, const Bundle & b, const ProbeConfig & config) -> ProbeVerdict
    {
        ProbeVerdict verdict;
        verdict.config = config;
        if (auto bad = successor_violation(c, b)) {
            verdict.pass = false;
            verdict.reason = "not a successor: " + *bad;
            return verdict;
        }
        std::vector<int> successor_of(c.size(), -1);
        for (int i = 0 ; i < b.size() ; ++i) {
            int p = predecessor(c, b, i);
            if (successor_of[p] != -1) {
                verdict.pass = false;
                verdict.reason = "restriction map is not injective at member " + std::to_string(p);
                return verdict;
            }
            successor_of[p] = i;
        }
        for (int p = 0 ; p < c.size() ; ++p)
            if (successor_of[p] == -1) {
                verdict.pass = false;
                verdict.reason = "restriction map misses member " + std::to_string(p);
                return verdict;
            }

        auto pool = predecessor_pool(g, c, config.pool);
        for_each_fragment(pool, config.fragment_bound, [&] (const std::vector<int> & fragment) {
                ConformAssignment alpha{ fragment, {} };
                for (int a : fragment)
                    alpha.member.push_back(successor_of[*member_containing(g, c, a)]);
                if (++verdict.assignments_checked > config.max_assignments) {
                    --verdict.assignments_checked;
                    verdict.reason = "assignment cap reached";
                    return false;
                }
                if (! place(g, c, b, alpha, config, verdict.advanced)) {
                    verdict.pass = false;
                    verdict.counterexample = alpha;
                    verdict.reason = "no placement for " + describe_assignment(alpha);
                    return false;
                }
                return true;
            });
        return verdict;
    }

    auto build_star_successor(GenericStructure & g, const Bundle & c,
            const std::vector<std::vector<TypeDescriptor>> & targets, int size_bound) -> StarSuccessor
    {
        if (int(targets.size()) != c.size())
            throw BundleError("one target list per member is required");
        auto & age = *g.age();
        for (int j = 0 ; j < c.size() ; ++j)
            for (auto & r : targets[j])
                if (! rank_compare(age, r, c.members[j], size_bound).leq)
                    throw BundleError("target " + describe(r) + " exceeds the rank of member " + std::to_string(j));

        struct Entry
        {
            TypeDescriptor type;
            std::vector<int> star;
            int parent;
        };
        std::vector<Entry> entries;
        for (int j = 0 ; j < c.size() ; ++j)
            if (targets[j].empty())
                entries.push_back(Entry{ c.members[j], {}, j });

        std::vector<int> extra;
        for (int j = 0 ; j < c.size() ; ++j)
            for (auto & r : targets[j]) {
                auto base = extra.empty() ? c.members[j] : free_successor(g.indexed(), age, c.members[j], extra);
                std::optional<TypeDescriptor> restricted;
                for (int attempt = 0 ; attempt < 3 && ! restricted ; ++attempt) {
                    try {
                        restricted = restrict_to_rank(g, base, r, size_bound);
                    }
                    catch (const TypeError &) {
                        g.advance(200);
                    }
                }
                if (! restricted)
                    throw BundleError("relocation exhausted for target " + describe(r));
                auto fresh = minus(restricted->sockel, base.sockel);
                for (auto & e : entries)
                    e.type = free_successor(g.indexed(), age, e.type, fresh);
                entries.push_back(Entry{ *restricted, fresh, j });
                extra.insert(extra.end(), fresh.begin(), fresh.end());
                extra = sorted_unique(extra);
            }

        auto sockel = c.sockel;
        sockel.insert(sockel.end(), extra.begin(), extra.end());
        StarSuccessor out;
        std::vector<TypeDescriptor> members;
        for (std::size_t i = 0 ; i < entries.size() ; ++i) {
            members.push_back(entries[i].type);
            out.plan.order.push_back(int(i));
            out.plan.star.push_back(entries[i].star);
            out.plan.parent.push_back(entries[i].parent);
        }
        out.bundle = make_bundle(sockel, members);
        return out;
    }

    auto star_plan_violation(GenericStructure & g, const Bundle & c, const StarSuccessor & s,
            const ProbeConfig & config) -> std::optional<std::string>
    {
        auto & b = s.bundle;
        auto & plan = s.plan;
        if (auto bad = successor_violation(c, b))
            return "not a successor: " + *bad;
        if (int(plan.order.size()) != b.size() || int(plan.star.size()) != b.size())
            return std::string("plan does not cover the bundle");
        auto extra = minus(b.sockel, c.sockel);
        std::set<int> seen;
        for (auto & star : plan.star)
            for (int v : star) {
                if (std::find(extra.begin(), extra.end(), v) == extra.end())
                    return "star element " + std::to_string(v) + " is outside the new sockel part";
                if (! seen.insert(v).second)
                    return "star sets overlap at " + std::to_string(v);
            }

        for (std::size_t p = 0 ; p < plan.order.size() ; ++p) {
            int i = plan.order[p];
            std::vector<int> up;
            for (std::size_t q = p + 1 ; q < plan.order.size() ; ++q) {
                auto & star = plan.star[plan.order[q]];
                up.insert(up.end(), star.begin(), star.end());
            }
            up = sorted_unique(up);
            auto & member = b.members[i];
            auto lower = restrict_type(member, minus(b.sockel, up));
            if (! up.empty() && ! (free_successor(g.indexed(), *g.age(), lower, up) == member))
                return "member " + std::to_string(i) + " is not free over the stars above it";
            auto bottom = restrict_type(member, c.sockel);
            auto probe = melding_probe(g, make_bundle(c.sockel, { bottom }), make_bundle(lower.sockel, { lower }), config);
            if (! probe.pass)
                return "member " + std::to_string(i) + " truncation is not melding: " + probe.reason;
        }
        return std::nullopt;
    }

    auto agreement_join(GenericStructure & g, const Bundle & b, const XSuccessor & c_up,
            const std::vector<int> & beta, int size_bound) -> Bundle
    {
        auto & age = *g.age();
        if (beta.size() != c_up.bundle.members.size())
            throw BundleError("agreement function must cover every member");
        auto base = minus(c_up.bundle.sockel, { c_up.x });
        std::vector<TypeDescriptor> joins;
        std::vector<int> sockel;
        for (std::size_t d = 0 ; d < beta.size() ; ++d) {
            auto & member = c_up.bundle.members[d];
            if (beta[d] < 0 || beta[d] >= b.size())
                throw BundleError("agreement function leaves the bundle");
            auto & target = b.members[beta[d]];
            if (! (restrict_type(member, base) == restrict_type(target, base)))
                throw BundleError("agreement violated: member " + std::to_string(d) + " restricts differently");
            auto cmp = rank_compare(age, member, target, size_bound);
            if (! cmp.leq || ! cmp.geq)
                throw BundleError("agreement violated: member " + std::to_string(d) + " has a different rank");
            if (auto bad = free_position_violation(g.indexed(), target, member))
                throw BundleError("member " + std::to_string(d) + " not in free position: " + *bad);
            joins.push_back(join(g.indexed(), age, target, member));
            sockel = joins.back().sockel;
        }
        return make_bundle(sockel, joins);
    }

    auto x_continuation(GenericStructure & g, const Bundle & c_prime, const Bundle & b, int z,
            const ProbeConfig & config) -> Continuation
    {
        constexpr int selection_cap = 256;
        auto b_up = x_successor_bundle(g, b, z);
        auto c_up = x_successor_bundle(g, c_prime, z);
        auto key = c_up.bundle.sockel;

        Continuation out;
        for (auto & y : c_up.bundle.members) {
            std::vector<int> fibre;
            for (int i = 0 ; i < b_up.bundle.size() ; ++i)
                if (restrict_type(b_up.bundle.members[i], key) == y)
                    fibre.push_back(i);
            if (fibre.empty())
                throw BundleError("empty fibre over " + describe(y));
            out.fibers.push_back(fibre);
        }

        int k = int(out.fibers.size());
        std::vector<int> pick(k, 0);
        while (out.selections_tried < selection_cap) {
            ++out.selections_tried;
            std::vector<TypeDescriptor> chosen;
            for (int i = 0 ; i < k ; ++i)
                chosen.push_back(b_up.bundle.members[out.fibers[i][pick[i]]]);
            auto candidate = make_bundle(b_up.bundle.sockel, chosen);
            auto verdict = is_refinement(g, c_up.bundle, candidate, config);
            if (verdict.pass) {
                out.bundle = candidate;
                out.selection = pick;
                out.refinement = verdict;
                for (int p = 0 ; p < c_prime.size() && out.ranks_match ; ++p) {
                    std::vector<TypeDescriptor> before, after;
                    for (int i = 0 ; i < k ; ++i)
                        if (c_up.parent[i] == p) {
                            before.push_back(c_up.bundle.members[i]);
                            after.push_back(chosen[i]);
                        }
                    out.ranks_match = same_ranks(*g.age(), before, after, config.size_bound);
                }
                return out;
            }
            int i = k - 1;
            while (i >= 0 && pick[i] + 1 == int(out.fibers[i].size()))
                pick[i--] = 0;
            if (i < 0)
                break;
            ++pick[i];
        }
        throw BundleError("no selection refines the z-successor at fragment bound "
                + std::to_string(config.fragment_bound));
    }
}
