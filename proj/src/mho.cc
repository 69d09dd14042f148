#include <fraisse/mho.hh>

#include <algorithm>
#include <random>

namespace fraisse
{
    namespace
    {
        auto as_mask(int sorts, const std::vector<int> & members) -> std::vector<bool>
        {
            std::vector<bool> mask(sorts, false);
            for (int x : members)
                mask[x] = true;
            return mask;
        }

        auto subset_of_sorted(const std::vector<int> & a, const std::vector<int> & b) -> bool
        {
            return std::includes(b.begin(), b.end(), a.begin(), a.end());
        }

        auto count_in(const std::vector<int> & elements, const std::vector<bool> & s, bool want) -> int
        {
            return int(std::count_if(elements.begin(), elements.end(), [&] (int e) { return bool(s[e]) == want; }));
        }

        auto sort_name(const MhoInstance & inst, int x) -> std::string
        {
            if (x < int(inst.names.size()) && ! inst.names[x].empty())
                return inst.names[x];
            return "S" + std::to_string(x);
        }
    }

    auto MhoInstance::maximum() const -> int
    {
        for (int x = 0 ; x < sorts() ; ++x) {
            bool top = true;
            for (int y = 0 ; y < sorts() && top ; ++y)
                top = below[y][x];
            if (top)
                return x;
        }
        return -1;
    }

    auto MhoInstance::refinements(int x) const -> std::vector<int>
    {
        return restrictions(x, rho[x]);
    }

    auto MhoInstance::restrictions(int x, int r) const -> std::vector<int>
    {
        std::vector<int> out;
        for (int y = 0 ; y < sorts() ; ++y)
            if (below[y][x] && rho[y] == r)
                out.push_back(y);
        return out;
    }

    auto make_mho(int ground, int ranks, int threshold, const std::vector<std::pair<int, int>> & covers,
            std::vector<std::vector<int>> sigma, std::vector<int> rho) -> MhoInstance
    {
        MhoInstance inst;
        inst.ground = ground;
        inst.ranks = ranks;
        inst.threshold = threshold;
        int n = int(sigma.size());
        if (int(rho.size()) != n)
            throw MhoError("sigma and rho list different numbers of sorts");
        for (auto & s : sigma) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            for (int e : s)
                if (e < 0 || e >= ground)
                    throw MhoError("sigma element outside the ground set");
        }
        for (int r : rho)
            if (r < 0 || r >= ranks)
                throw MhoError("rank outside the chain");
        inst.below.assign(n, std::vector<bool>(n, false));
        for (int x = 0 ; x < n ; ++x)
            inst.below[x][x] = true;
        for (auto [lo, hi] : covers) {
            if (lo < 0 || lo >= n || hi < 0 || hi >= n)
                throw MhoError("cover names an unknown sort");
            inst.below[lo][hi] = true;
        }
        for (int k = 0 ; k < n ; ++k)
            for (int x = 0 ; x < n ; ++x)
                if (inst.below[x][k])
                    for (int y = 0 ; y < n ; ++y)
                        if (inst.below[k][y])
                            inst.below[x][y] = true;
        inst.sigma = std::move(sigma);
        inst.rho = std::move(rho);
        return inst;
    }

    auto validate_mho(const MhoInstance & inst) -> std::optional<MhoViolation>
    {
        int n = inst.sorts();
        if (n == 0)
            return MhoViolation{ 4, "no sorts" };
        for (int x = 0 ; x < n ; ++x) {
            if (! inst.below[x][x])
                return MhoViolation{ 0, sort_name(inst, x) + " is not below itself" };
            if (int(inst.sigma[x].size()) <= inst.threshold)
                return MhoViolation{ 0, "sigma of " + sort_name(inst, x) + " has at most threshold elements" };
            for (int y = 0 ; y < n ; ++y) {
                if (x != y && inst.below[x][y] && inst.below[y][x])
                    return MhoViolation{ 0, sort_name(inst, x) + " and " + sort_name(inst, y) + " are below each other" };
                for (int z = 0 ; z < n ; ++z)
                    if (inst.below[x][y] && inst.below[y][z] && ! inst.below[x][z])
                        return MhoViolation{ 0, "order is not transitive at " + sort_name(inst, y) };
            }
        }
        for (int x = 0 ; x < n ; ++x)
            for (int y = 0 ; y < n ; ++y) {
                if (! inst.below[x][y])
                    continue;
                if (! subset_of_sorted(inst.sigma[x], inst.sigma[y]))
                    return MhoViolation{ 1, "sigma of " + sort_name(inst, x) + " is not inside sigma of " + sort_name(inst, y) };
                if (inst.rho[x] > inst.rho[y])
                    return MhoViolation{ 2, "rank of " + sort_name(inst, x) + " exceeds rank of " + sort_name(inst, y) };
            }
        for (int x = 0 ; x < n ; ++x)
            for (int r = 0 ; r <= inst.rho[x] ; ++r)
                if (inst.restrictions(x, r).empty())
                    return MhoViolation{ 3, sort_name(inst, x) + " has no restriction of rank " + std::to_string(r) };
        int top = inst.maximum();
        if (top < 0)
            return MhoViolation{ 4, "no maximum" };
        if (int(inst.sigma[top].size()) != inst.ground)
            return MhoViolation{ 4, "sigma of the maximum is not the ground set" };
        return std::nullopt;
    }

    auto Labelling::witness() const -> std::vector<int>
    {
        std::vector<int> out;
        for (int x = 0 ; x < int(label.size()) ; ++x)
            if (label[x] >= 0)
                out.push_back(x);
        return out;
    }

    auto subset_of(const MhoInstance & inst, const std::vector<int> & elements) -> std::vector<bool>
    {
        std::vector<bool> s(inst.ground, false);
        for (int e : elements) {
            if (e < 0 || e >= inst.ground)
                throw MhoError("subset element outside the ground set");
            s[e] = true;
        }
        return s;
    }

    auto big_phi(const MhoInstance & inst, const Labelling & l, int x, int r) -> bool
    {
        for (int y : inst.refinements(x)) {
            bool found = false;
            for (int z : inst.refinements(y)) {
                auto rs = inst.restrictions(z, r);
                if (std::all_of(rs.begin(), rs.end(), [&] (int q) { return l.labelled(q); })) {
                    found = true;
                    break;
                }
            }
            if (! found)
                return false;
        }
        return true;
    }

    auto big_phi(const MhoInstance & inst, const Labelling & l, int x) -> bool
    {
        for (int r = 0 ; r <= inst.rho[x] ; ++r)
            if (big_phi(inst, l, x, r))
                return true;
        return false;
    }

    auto small_phi(const MhoInstance & inst, const std::vector<bool> & w, int x, int r) -> bool
    {
        for (int y : inst.refinements(x)) {
            bool every = true;
            for (int z : inst.refinements(y)) {
                auto rs = inst.restrictions(z, r);
                if (std::none_of(rs.begin(), rs.end(), [&] (int q) { return bool(w[q]); })) {
                    every = false;
                    break;
                }
            }
            if (every)
                return true;
        }
        return false;
    }

    auto small_phi(const MhoInstance & inst, const std::vector<bool> & w, int x) -> bool
    {
        for (int r = 0 ; r <= inst.rho[x] ; ++r)
            if (! small_phi(inst, w, x, r))
                return false;
        return true;
    }

    auto gamma(const MhoInstance & inst, const std::vector<bool> & z, int x) -> bool
    {
        for (int y : inst.refinements(x))
            for (int r = 0 ; r <= inst.rho[x] ; ++r) {
                auto rs = inst.restrictions(y, r);
                if (std::none_of(rs.begin(), rs.end(), [&] (int q) { return bool(z[q]); }))
                    return false;
            }
        return true;
    }

    auto compute_labelling(const MhoInstance & inst, const std::vector<bool> & s) -> Labelling
    {
        if (int(s.size()) != inst.ground)
            throw MhoError("subset does not match the ground set");
        int n = inst.sorts();
        Labelling l;
        l.subset = s;
        l.label.assign(n, -1);
        l.reason.assign(n, -1);
        for (int x = 0 ; x < n ; ++x)
            if (count_in(inst.sigma[x], s, false) <= inst.threshold)
                l.label[x] = 0;

        for (;;) {
            std::vector<std::pair<int, int>> fresh;
            for (int x = 0 ; x < n ; ++x) {
                if (l.labelled(x))
                    continue;
                for (int r = 0 ; r <= inst.rho[x] ; ++r)
                    if (big_phi(inst, l, x, r)) {
                        fresh.emplace_back(x, r);
                        break;
                    }
            }
            if (fresh.empty())
                break;
            ++l.rounds;
            // Bottom-up, so a sort labelled this round also counts for the
            // sorts above it.
            auto down = [&] (int x) {
                int c = 0;
                for (int y = 0 ; y < n ; ++y)
                    c += inst.below[y][x];
                return c;
            };
            std::stable_sort(fresh.begin(), fresh.end(),
                    [&] (const auto & a, const auto & b) { return down(a.first) < down(b.first); });
            for (auto [x, r] : fresh) {
                int least = 0;
                for (int y = 0 ; y < n ; ++y)
                    if (y != x && inst.below[y][x] && l.labelled(y))
                        least = std::max(least, l.label[y] + 1);
                l.label[x] = least;
                l.reason[x] = r;
            }
        }
        return l;
    }

    auto largeness_dichotomy(const MhoInstance & inst, const std::vector<bool> & s) -> Largeness
    {
        auto l = compute_labelling(inst, s);
        int top = inst.maximum();
        if (top < 0)
            throw MhoError("instance without maximum");

        Largeness out;
        out.computed = true;
        out.side = l.labelled(top) ? Side::Subset : Side::Complement;
        std::vector<bool> w(inst.sorts(), false);
        for (int x = 0 ; x < inst.sorts() ; ++x)
            if (l.labelled(x) == (out.side == Side::Subset)) {
                w[x] = true;
                out.witness.push_back(x);
            }
        out.large = s;
        if (out.side == Side::Complement)
            out.large.flip();

        out.phi_verified = true;
        out.intersection_verified = true;
        for (int x : out.witness) {
            for (int r = 0 ; r <= inst.rho[x] ; ++r) {
                bool ok = small_phi(inst, w, x, r);
                out.phi_verified = out.phi_verified && ok;
                out.log.push_back("phi " + sort_name(inst, x) + " r" + std::to_string(r) + (ok ? " holds" : " fails"));
            }
            int meet = count_in(inst.sigma[x], out.large, true);
            bool big = meet > inst.threshold;
            out.intersection_verified = out.intersection_verified && big;
            out.log.push_back("meet " + sort_name(inst, x) + " " + std::to_string(meet) + (big ? " above" : " within") + " threshold");
        }
        return out;
    }

    auto constructive_set(const MhoInstance & inst, const Largeness & largeness) -> ConstructiveSet
    {
        if (! largeness.computed)
            throw MhoError("dichotomy not yet computed");
        int n = inst.sorts();
        if (int(largeness.large.size()) != inst.ground)
            throw MhoError("dichotomy computed for a different instance");
        auto w = as_mask(n, largeness.witness);

        ConstructiveSet out;
        out.side = largeness.side;
        std::vector<bool> closure(n, false);
        int top = inst.maximum();
        for (int x : largeness.witness) {
            int chosen = -1;
            for (int y : inst.refinements(x)) {
                bool every = true;
                for (int z : inst.refinements(y)) {
                    auto rs = inst.restrictions(z, inst.rho[x]);
                    if (std::none_of(rs.begin(), rs.end(), [&] (int q) { return bool(w[q]); })) {
                        every = false;
                        break;
                    }
                }
                if (every) {
                    chosen = y;
                    break;
                }
            }
            if (chosen < 0)
                throw MhoError("witness member " + sort_name(inst, x) + " has no refinement for its own rank");
            out.seeds.push_back(chosen);
            if (x == top)
                out.root = chosen;
            for (int y : inst.refinements(chosen))
                closure[y] = true;
        }
        for (int x = 0 ; x < n ; ++x)
            if (closure[x])
                out.members.push_back(x);

        out.closed = true;
        out.intersections = true;
        out.gamma_holds = true;
        for (int x : out.members) {
            for (int y : inst.refinements(x))
                out.closed = out.closed && closure[y];
            out.intersections = out.intersections && count_in(inst.sigma[x], largeness.large, true) > inst.threshold;
            out.gamma_holds = out.gamma_holds && gamma(inst, closure, x);
        }
        out.closed = out.closed && out.root >= 0;
        return out;
    }

    auto audit_mho(const MhoInstance & inst, const std::vector<bool> & s) -> MhoAudit
    {
        MhoAudit audit;
        auto l = compute_labelling(inst, s);
        int n = inst.sorts();
        std::vector<bool> w(n, false);
        for (int x = 0 ; x < n ; ++x)
            w[x] = l.labelled(x);

        for (int x = 0 ; x < n ; ++x) {
            if (l.labelled(x))
                for (int y : inst.refinements(x))
                    if (! l.labelled(y)) {
                        audit.labelled_closure = false;
                        audit.failures.push_back("refinement " + sort_name(inst, y) + " of labelled " + sort_name(inst, x) + " is unlabelled");
                    }

            if (l.labelled(x))
                for (int r0 = 0 ; r0 <= inst.rho[x] ; ++r0) {
                    if (! big_phi(inst, l, x, r0))
                        continue;
                    for (int r = r0 + 1 ; r <= inst.rho[x] ; ++r)
                        if (! big_phi(inst, l, x, r)) {
                            audit.rank_monotone = false;
                            audit.failures.push_back("Phi of " + sort_name(inst, x) + " fails going up to r" + std::to_string(r));
                        }
                    break;
                }

            for (int r = 0 ; r <= inst.rho[x] ; ++r)
                if (big_phi(inst, l, x, r) && ! small_phi(inst, w, x, r)) {
                    audit.phi_implication = false;
                    audit.failures.push_back("Phi without phi at " + sort_name(inst, x) + " r" + std::to_string(r));
                }
            if (l.label[x] == 0 && ! small_phi(inst, w, x)) {
                audit.phi_implication = false;
                audit.failures.push_back("label 0 without phi at " + sort_name(inst, x));
            }
        }

        auto large = largeness_dichotomy(inst, s);
        if (! large.phi_verified) {
            audit.witness_phi = false;
            audit.failures.push_back("returned witness fails phi");
        }
        return audit;
    }

    auto random_mho(std::uint64_t seed, const MhoShape & shape) -> MhoInstance
    {
        std::mt19937_64 rng(seed);
        auto pick = [&] (int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
        int need = shape.threshold + 1;

        for (;;) {
            int ground = pick(std::max(need, 1), std::max(need, shape.max_ground));
            int ranks = pick(1, shape.max_ranks);
            int target = pick(1, shape.max_sorts);

            std::vector<std::vector<int>> sigma;
            std::vector<int> rho;
            std::vector<std::pair<int, int>> covers;
            std::vector<int> all(ground);
            for (int e = 0 ; e < ground ; ++e)
                all[e] = e;
            sigma.push_back(all);
            rho.push_back(ranks - 1);

            auto sub_sigma = [&] (const std::vector<int> & from) {
                std::vector<int> pool = from;
                std::shuffle(pool.begin(), pool.end(), rng);
                int size = pick(need, int(pool.size()));
                pool.resize(size);
                std::sort(pool.begin(), pool.end());
                return pool;
            };

            for (int x = 1 ; x < target ; ++x) {
                std::vector<int> parents;
                for (int p = 0 ; p < x ; ++p)
                    if (pick(0, 2) == 0)
                        parents.push_back(p);
                if (parents.empty())
                    parents.push_back(pick(0, x - 1));
                std::vector<int> meet = sigma[parents[0]];
                int cap = rho[parents[0]];
                for (int p : parents) {
                    std::vector<int> both;
                    std::set_intersection(meet.begin(), meet.end(), sigma[p].begin(), sigma[p].end(), std::back_inserter(both));
                    meet = both;
                    cap = std::min(cap, rho[p]);
                }
                if (int(meet.size()) < need) {
                    parents.resize(1);
                    meet = sigma[parents[0]];
                    cap = rho[parents[0]];
                }
                sigma.push_back(sub_sigma(meet));
                rho.push_back(pick(0, cap));
                for (int p : parents)
                    covers.emplace_back(x, p);
            }

            auto inst = make_mho(ground, ranks, shape.threshold, covers, sigma, rho);
            bool repaired = true;
            for (int x = 0 ; x < inst.sorts() && repaired ; ++x)
                for (int r = 0 ; r <= inst.rho[x] ; ++r) {
                    if (! inst.restrictions(x, r).empty())
                        continue;
                    if (inst.sorts() >= shape.max_sorts) {
                        repaired = false;
                        break;
                    }
                    sigma.push_back(sub_sigma(inst.sigma[x]));
                    rho.push_back(r);
                    covers.emplace_back(int(sigma.size()) - 1, x);
                    inst = make_mho(ground, ranks, shape.threshold, covers, sigma, rho);
                }
            if (repaired && ! validate_mho(inst))
                return inst;
        }
    }
}
