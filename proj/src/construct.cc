#include <fraisse/construct.hh>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

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

        /// One template over the union of the sockels whose star realizes every
        /// given type; extras join the sockel without relations to the star.
        auto compose(const IndexedStructure & snapshot, const std::vector<TypeDescriptor> & types,
                const std::vector<int> & extras) -> TypeDescriptor
        {
            std::vector<int> sockel = extras;
            for (auto & t : types)
                sockel.insert(sockel.end(), t.sockel.begin(), t.sockel.end());
            sockel = sorted_unique(sockel);
            std::map<int, int> position;
            for (int p = 0 ; p < int(sockel.size()) ; ++p)
                position.emplace(sockel[p], p);
            int star = int(sockel.size());
            auto base = snapshot.induced(sockel);
            FinStructure tmpl(snapshot.signature(), star + 1, base.instances());
            for (auto & t : types)
                for (auto & i : t.tmpl.instances()) {
                    if (! i.contains(t.star()))
                        continue;
                    std::vector<int> map(t.star() + 1);
                    for (int p = 0 ; p < t.star() ; ++p)
                        map[p] = position.at(t.sockel[p]);
                    map[t.star()] = star;
                    tmpl.add(relabel(tmpl, i, map));
                }
            return TypeDescriptor{ sockel, tmpl };
        }

        auto star_related(const TypeDescriptor & t) -> std::vector<int>
        {
            std::vector<int> out;
            for (auto & i : t.tmpl.instances())
                if (i.contains(t.star()))
                    for (int p : i)
                        if (p != t.star())
                            out.push_back(t.sockel[p]);
            return sorted_unique(out);
        }

        struct Frame
        {
            TypeDescriptor type;
            int tries = 0;
            bool free_tried = false;
            bool scanned = false;
            std::vector<int> existing;
            std::size_t next_existing = 0;
        };

        class Runner
        {
            GenericStructure & _g;
            ColouringOracle & _oracle;
            const ConstructConfig & _config;
            std::mt19937_64 _rng;
            ConstructResult & _r;
            std::optional<Bundle> _demanded;

            auto colour(int y) -> int { return _oracle.colour(_g.indexed(), y); }

            auto in_all(int y, const TypeDescriptor & t) const -> bool
            {
                if (! _g.typeset_contains(t, y))
                    return false;
                for (auto & w : _config.within)
                    if (! _g.typeset_contains(w, y))
                        return false;
                return true;
            }

            /// The type of u_n over the prefix, carried to the images.
            auto step_type(int n) const -> TypeDescriptor
            {
                std::vector<int> prefix(n);
                std::iota(prefix.begin(), prefix.end(), 0);
                std::map<int, int> f;
                for (int i = 0 ; i < n ; ++i)
                    f.emplace(i, _r.images[i]);
                return image(_g.indexed(), _g.type_of(prefix, n), f);
            }

            /// Distinct types over the images of the prefix elements still to be copied.
            auto demanded_bundle(int n) const -> Bundle
            {
                std::vector<int> prefix(n);
                std::iota(prefix.begin(), prefix.end(), 0);
                std::map<int, int> f;
                for (int i = 0 ; i < n ; ++i)
                    f.emplace(i, _r.images[i]);
                std::vector<TypeDescriptor> members;
                for (int j = n ; j < _config.target ; ++j) {
                    auto t = image(_g.indexed(), _g.type_of(prefix, j), f);
                    if (std::find(members.begin(), members.end(), t) == members.end())
                        members.push_back(t);
                }
                auto sockel = sorted_unique(_r.images);
                return make_bundle(sockel, members);
            }

            auto fresh(const TypeDescriptor & t, bool with_extras) -> std::optional<int>
            {
                if (_r.fresh_realized >= _config.budgets.advance)
                    return std::nullopt;
                std::vector<TypeDescriptor> parts{ t };
                parts.insert(parts.end(), _config.within.begin(), _config.within.end());
                std::vector<int> extras;
                if (with_extras) {
                    auto base = compose(_g.indexed(), parts, {});
                    int want = 1 + int(_rng() % 2);
                    for (int attempt = 0 ; attempt < 8 && int(extras.size()) < want ; ++attempt) {
                        int y = int(_rng() % std::uint64_t(_g.size()));
                        if (! std::binary_search(base.sockel.begin(), base.sockel.end(), y)
                                && std::find(extras.begin(), extras.end(), y) == extras.end())
                            extras.push_back(y);
                    }
                }
                auto composed = compose(_g.indexed(), parts, extras);
                if (! extras.empty()) {
                    int star = composed.star();
                    std::vector<bool> is_extra(star, false);
                    for (int y : extras)
                        is_extra[std::lower_bound(composed.sockel.begin(), composed.sockel.end(), y) - composed.sockel.begin()] = true;
                    bool any = false;
                    for (auto & i : tuples_through(*composed.tmpl.signature(), star + 1, star)) {
                        bool only_extras = std::all_of(i.begin(), i.end(), [&] (int p) { return p == star || is_extra[p]; });
                        if (only_extras && (_rng() & 1)) {
                            composed.tmpl.add(i);
                            any = true;
                        }
                    }
                    if (! any)
                        return std::nullopt;
                }
                if (! _g.age()->contains_given(composed.tmpl, composed.star()))
                    return std::nullopt;
                try {
                    int y = _g.realize_type(composed);
                    ++_r.fresh_realized;
                    return y;
                }
                catch (const GenerationError &) {
                    return std::nullopt;
                }
            }

            auto scan(Frame & frame) -> void
            {
                frame.scanned = true;
                auto related = star_related(frame.type);
                std::vector<int> pool;
                if (related.empty()) {
                    pool.resize(_g.size());
                    std::iota(pool.begin(), pool.end(), 0);
                }
                else
                    pool = _g.indexed().neighbours(related.front());
                std::sort(pool.begin(), pool.end());
                for (int y : pool) {
                    if (int(frame.existing.size()) >= _config.budgets.retry)
                        break;
                    if (colour(y) == _config.colour && in_all(y, frame.type))
                        frame.existing.push_back(y);
                }
            }

            /// Next accepted candidate: the free realization, then snapshot
            /// elements, then fresh realizations with extra relations.
            auto next(Frame & frame, bool & was_fresh) -> std::optional<int>
            {
                while (frame.tries < _config.budgets.retry) {
                    if (! frame.free_tried) {
                        frame.free_tried = true;
                        ++frame.tries;
                        if (auto y = fresh(frame.type, false); y && colour(*y) == _config.colour && in_all(*y, frame.type)) {
                            was_fresh = true;
                            return y;
                        }
                        continue;
                    }
                    if (! frame.scanned)
                        scan(frame);
                    if (frame.next_existing < frame.existing.size()) {
                        ++frame.tries;
                        int y = frame.existing[frame.next_existing++];
                        if (std::find(_r.images.begin(), _r.images.end(), y) == _r.images.end()) {
                            was_fresh = false;
                            return y;
                        }
                        continue;
                    }
                    if (_r.fresh_realized >= _config.budgets.advance)
                        return std::nullopt;
                    ++frame.tries;
                    if (auto y = fresh(frame.type, true); y && colour(*y) == _config.colour && in_all(*y, frame.type)) {
                        was_fresh = true;
                        return y;
                    }
                }
                return std::nullopt;
            }

        public:
            Runner(GenericStructure & g, ColouringOracle & oracle, const ConstructConfig & config, ConstructResult & r)
                : _g(g), _oracle(oracle), _config(config), _rng(config.seed * 0x9e3779b97f4a7c15ull + 17), _r(r) {}

            auto run() -> void
            {
                int target = _config.target;
                std::vector<Frame> frames;
                int deepest = -1;
                std::optional<TypeDescriptor> blocked;
                int n = 0;
                while (n < target) {
                    if (int(frames.size()) == n)
                        frames.push_back(Frame{ step_type(n) });
                    auto & frame = frames[n];
                    bool was_fresh = false;
                    if (auto y = next(frame, was_fresh)) {
                        _r.images.push_back(*y);
                        StepRecord rec{ n, n, *y, was_fresh, frame.tries, 0, false };
                        auto bundle = demanded_bundle(n + 1);
                        rec.bundle_size = bundle.size();
                        if (_demanded && successor_violation(*_demanded, bundle))
                            throw ConstructError("demanded types over the image lost their predecessors");
                        _demanded = bundle;
                        _r.trace.push_back(rec);
                        ++n;
                        if (_config.audit && ! _config.audit(_g)) {
                            _r.outcome = Outcome::AuditFailure;
                            _r.reason = "the audit hook stopped the run";
                            return;
                        }
                        continue;
                    }
                    _r.trace.push_back(StepRecord{ n, n, -1, false, frame.tries, 0, false });
                    if (n >= deepest) {
                        deepest = n;
                        blocked = frame.type;
                    }
                    frames.pop_back();
                    if (n == 0 || _r.backtracks >= _config.budgets.backtrack || _r.fresh_realized >= _config.budgets.advance)
                        break;
                    ++_r.backtracks;
                    --n;
                    _r.images.pop_back();
                    _demanded.reset();
                    _r.trace.push_back(StepRecord{ n, n, -1, false, frames[n].tries, 0, true });
                }
                if (n == target) {
                    _r.outcome = Outcome::Success;
                    return;
                }
                _r.outcome = Outcome::Obstruction;
                _r.reason = "budgets exhausted at step " + std::to_string(deepest);
                ObstructionReport o;
                o.type = *blocked;
                o.step = deepest;
                o.monochromatic = true;
                for (int y : _g.typeset(*blocked))
                    if (colour(y) == _config.colour) {
                        bool inside = true;
                        for (auto & w : _config.within)
                            inside = inside && _g.typeset_contains(w, y);
                        if (inside)
                            o.monochromatic = false;
                    }
                auto & age = *_g.age();
                auto core = restrict_type(*blocked, star_related(*blocked));
                auto whole = abstract_type(FinStructure(age.signature(), 1));
                o.full_rank = rank_compare(age, core, whole, 4).geq;
                _r.obstruction = o;
            }
        };
    }

    auto outcome_name(Outcome o) -> std::string
    {
        switch (o) {
            case Outcome::Success: return "success";
            case Outcome::Obstruction: return "obstruction";
            case Outcome::AuditFailure: return "audit-failure";
            case Outcome::Refused: return "refused";
            case Outcome::Inconclusive: return "inconclusive";
        }
        return "?";
    }

    auto ConstructResult::succeeded() const -> bool
    {
        return winner() != nullptr;
    }

    auto ConstructResult::winner() const -> const ConstructResult *
    {
        if (outcome == Outcome::Success && verified)
            return this;
        if (counter)
            return counter->winner();
        return nullptr;
    }

    auto verify_prefix(const GenericStructure & g, ColouringOracle & oracle, const std::vector<int> & prefix,
            const std::vector<int> & images, int colour) -> bool
    {
        if (prefix.size() != images.size())
            return false;
        auto source = g.indexed().induced(prefix);
        auto target = g.snapshot();
        std::vector<int> map(images.begin(), images.end());
        if (! verify_morphism(source, target, map, MorphismKind::Embedding))
            return false;
        for (int y : images)
            if (oracle.colour(g.indexed(), y) != colour)
                return false;
        return true;
    }

    auto monochromatic_construct(GenericStructure & g, ColouringOracle & oracle, const ConstructConfig & config)
        -> ConstructResult
    {
        ConstructResult r;
        r.colour = config.colour;
        r.target = config.target;
        if (config.target < 0 || config.colour < 0 || config.colour >= oracle.colours())
            throw ConstructError("target or colour out of range");

        if (! config.assume_indivisible) {
            auto report = classify(*g.age(), 1, 3);
            if (report.verdict == Verdict::Divisible || report.verdict == Verdict::Inconclusive) {
                r.outcome = Outcome::Refused;
                r.reason = "the age is classified " + verdict_name(report.verdict);
                return r;
            }
        }

        int target = config.target;
        if (g.size() < target && ! g.advance_until([&] (const GenericStructure & s) { return s.size() >= target; },
                    std::uint64_t(target) * 64 + 1024)) {
            r.outcome = Outcome::Inconclusive;
            r.reason = "the generator could not reach the target length";
            return r;
        }
        r.prefix.resize(target);
        std::iota(r.prefix.begin(), r.prefix.end(), 0);

        Runner(g, oracle, config, r).run();
        if (r.outcome == Outcome::Success) {
            r.verified = verify_prefix(g, oracle, r.prefix, r.images, config.colour);
            if (! r.verified) {
                r.outcome = Outcome::Inconclusive;
                r.reason = "the prefix failed re-verification";
            }
            return r;
        }
        if (r.outcome == Outcome::Obstruction && config.counter_run && oracle.colours() == 2) {
            ConstructConfig other = config;
            other.colour = 1 - config.colour;
            other.counter_run = false;
            other.assume_indivisible = true;
            other.seed = config.seed + 1;
            if (r.obstruction->full_rank)
                other.within.push_back(r.obstruction->type);
            r.counter = std::make_shared<ConstructResult>(monochromatic_construct(g, oracle, other));
        }
        return r;
    }

    auto rado_dichotomy(GenericStructure & g, ColouringOracle & oracle, int target, Budgets budgets,
            std::uint64_t seed) -> DichotomyResult
    {
        auto & spec = g.age()->boundary().spec;
        if (spec.schematic || ! spec.explicit_members.empty() || ! (*spec.signature == *uniform_signature(2)))
            throw ConstructError("the dichotomy needs the age of all finite graphs");

        DichotomyResult d;
        ConstructConfig config;
        config.colour = red;
        config.target = target;
        config.budgets = budgets;
        config.seed = seed;
        config.counter_run = false;
        config.assume_indivisible = true;
        d.run = monochromatic_construct(g, oracle, config);
        if (d.run.outcome == Outcome::Success && d.run.verified) {
            d.side = red;
            return d;
        }

        // Every type of the random graph has full rank, so blue is built
        // inside the blocked type, or a type over red elements whose
        // realized typeset misses the red images.
        std::optional<TypeDescriptor> inside;
        if (d.run.obstruction)
            inside = d.run.obstruction->type;
        else if (! d.run.images.empty()) {
            auto unmet = g.verify_copy_prefix(d.run.images, 2);
            if (! unmet.empty())
                inside = unmet.front();
        }
        ConstructConfig other = config;
        other.colour = blue;
        other.seed = seed + 1;
        if (inside)
            other.within.push_back(*inside);
        d.blue_inside = inside;
        d.run.counter = std::make_shared<ConstructResult>(monochromatic_construct(g, oracle, other));
        if (d.run.counter->outcome == Outcome::Success && d.run.counter->verified)
            d.side = blue;
        return d;
    }

    auto weak_indivisibility_run(GenericStructure & g, ColouringOracle & oracle, const FinStructure & missing,
            int missing_colour, int target, Budgets budgets, std::uint64_t seed) -> WeakRun
    {
        if (oracle.colours() != 2 || (missing_colour != red && missing_colour != blue))
            throw ConstructError("weak indivisibility runs need two colours");
        WeakRun w;
        auto check = [&] (const GenericStructure & s) {
            ++w.audits;
            std::vector<int> cls;
            for (int y = 0 ; y < s.size() ; ++y)
                if (oracle.colour(s.indexed(), y) == missing_colour)
                    cls.push_back(y);
            auto found = find_morphism(missing, IndexedStructure(s.indexed().induced(cls)), MorphismKind::Embedding);
            if (! found)
                return true;
            w.audit_failed = true;
            for (int v : *found)
                w.audit_witness.push_back(cls[v]);
            return false;
        };
        if (! check(g)) {
            w.run.outcome = Outcome::AuditFailure;
            w.run.reason = "the missing structure already embeds into its colour class";
            return w;
        }
        ConstructConfig config;
        config.colour = 1 - missing_colour;
        config.target = target;
        config.budgets = budgets;
        config.seed = seed;
        config.counter_run = false;
        config.assume_indivisible = true;
        config.audit = check;
        w.run = monochromatic_construct(g, oracle, config);
        if (! w.audit_failed && ! check(g))
            w.run.outcome = Outcome::AuditFailure;
        return w;
    }
}
