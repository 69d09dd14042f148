#include <fraisse/io.hh>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fraisse
{
    namespace
    {
        auto at(const Json & j, const std::string & key, const std::string & where) -> const Json &
        {
            if (! j.is_object())
                throw IoError(where + ": expected an object");
            auto it = j.find(key);
            if (it == j.end())
                throw IoError(where + ": missing field '" + key + "'");
            return *it;
        }

        template <typename T>
        auto get(const Json & j, const std::string & key, const std::string & where) -> T
        {
            auto & v = at(j, key, where);
            try {
                return v.get<T>();
            }
            catch (const nlohmann::json::exception & e) {
                throw IoError(where + "." + key + ": " + e.what());
            }
        }

        auto mode_text(Mode m) -> std::string
        {
            return m == Mode::Set ? "set" : "ordered";
        }

        auto side_text(Side s) -> std::string
        {
            return s == Side::Subset ? "subset" : "complement";
        }

        auto optional_json(const std::optional<std::vector<int>> & v) -> Json
        {
            return v ? Json(*v) : Json(nullptr);
        }
    }

    auto canonical(const Json & j) -> std::string
    {
        return j.dump(2) + "\n";
    }

    auto read_json(const std::string & path) -> Json
    {
        std::ifstream in(path);
        if (! in)
            throw IoError(path + ": cannot open");
        try {
            return Json::parse(in);
        }
        catch (const nlohmann::json::parse_error & e) {
            throw IoError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
        }
    }

    auto write_json(const std::string & path, const Json & j) -> void
    {
        std::ofstream out(path);
        if (! out)
            throw IoError(path + ": cannot write");
        out << canonical(j);
    }

    auto document(const std::string & kind, Json payload) -> Json
    {
        payload["kind"] = kind;
        payload["version"] = version_tag;
        return payload;
    }

    auto expect_kind(const Json & doc, const std::string & kind, const std::string & where) -> void
    {
        auto found = get<std::string>(doc, "kind", where);
        if (found != kind)
            throw IoError(where + ": expected a " + kind + " document, found " + found);
        get<std::string>(doc, "version", where);
    }

    auto signature_json(const Signature & sig) -> Json
    {
        Json out = Json::array();
        for (auto & s : sig.symbols())
            out.push_back({ { "name", s.name }, { "arity", s.arity }, { "mode", mode_text(s.mode) } });
        return out;
    }

    auto parse_signature(const Json & j, const std::string & where) -> SignaturePtr
    {
        if (! j.is_array())
            throw IoError(where + ": expected an array of relation symbols");
        std::vector<RelationSymbol> symbols;
        for (std::size_t i = 0 ; i < j.size() ; ++i) {
            auto w = where + "[" + std::to_string(i) + "]";
            auto mode = get<std::string>(j[i], "mode", w);
            if (mode != "set" && mode != "ordered")
                throw IoError(w + ".mode: expected set or ordered");
            symbols.push_back(RelationSymbol{ get<std::string>(j[i], "name", w), get<int>(j[i], "arity", w),
                    mode == "set" ? Mode::Set : Mode::Ordered });
        }
        try {
            return make_signature(std::move(symbols));
        }
        catch (const std::exception & e) {
            throw IoError(where + ": " + e.what());
        }
    }

    auto structure_json(const FinStructure & s) -> Json
    {
        auto instances = s.instances();
        std::sort(instances.begin(), instances.end());
        Json relations = Json::array();
        for (auto & i : instances)
            relations.push_back(Json::array({ (*s.signature())[i.symbol].name, i.tuple() }));
        return { { "size", s.size() }, { "relations", relations } };
    }

    auto parse_structure(const Json & j, const SignaturePtr & sig, const std::string & where) -> FinStructure
    {
        int size = get<int>(j, "size", where);
        if (size < 0)
            throw IoError(where + ".size: negative");
        auto & relations = at(j, "relations", where);
        if (! relations.is_array())
            throw IoError(where + ".relations: expected an array");
        FinStructure s(sig, size);
        for (std::size_t k = 0 ; k < relations.size() ; ++k) {
            auto w = where + ".relations[" + std::to_string(k) + "]";
            auto & r = relations[k];
            if (! r.is_array() || r.size() != 2 || ! r[0].is_string() || ! r[1].is_array())
                throw IoError(w + ": expected [symbol, [entries]]");
            auto symbol = sig->find(r[0].get<std::string>());
            if (! symbol)
                throw IoError(w + ": unknown symbol " + r[0].get<std::string>());
            try {
                s.add(Instance(*symbol, r[1].get<std::vector<int>>()));
            }
            catch (const std::exception & e) {
                throw IoError(w + ": " + e.what());
            }
        }
        return s;
    }

    auto boundary_json(const BoundarySpec & spec) -> Json
    {
        Json forbidden = Json::array();
        if (! spec.schematic)
            for (auto & b : spec.explicit_members)
                forbidden.push_back(structure_json(b));
        Json rule = nullptr;
        if (spec.schematic) {
            if (spec.schematic->kind == RuleKind::Custom)
                throw IoError("custom rules have no file form");
            rule = { { "kind", rule_name(spec.schematic->kind) }, { "k", spec.schematic->k }, { "n", spec.schematic->n } };
        }
        return { { "signature", signature_json(*spec.signature) }, { "forbidden", forbidden }, { "rule", rule } };
    }

    auto parse_boundary(const Json & j, const std::string & where) -> BoundarySpec
    {
        BoundarySpec spec;
        Json rule = j.is_object() && j.contains("rule") ? j["rule"] : Json(nullptr);
        if (! rule.is_null()) {
            auto w = where + ".rule";
            RuleKind kind;
            try {
                kind = parse_rule_kind(get<std::string>(rule, "kind", w));
            }
            catch (const AgeError & e) {
                throw IoError(w + ".kind: " + e.what());
            }
            int k = get<int>(rule, "k", w), n = get<int>(rule, "n", w);
            if (k < 1 || n < 1)
                throw IoError(w + ": k and n must be positive");
            try {
                spec = schematic_age(kind, k, n)->boundary().spec;
            }
            catch (const AgeError & e) {
                throw IoError(w + ": " + e.what());
            }
            if (j.contains("signature") && ! (*parse_signature(j["signature"], where + ".signature") == *spec.signature))
                throw IoError(where + ".signature: does not match the rule");
        }
        else
            spec.signature = parse_signature(at(j, "signature", where), where + ".signature");
        if (j.contains("forbidden")) {
            auto & f = j["forbidden"];
            if (spec.schematic && ! f.empty())
                throw IoError(where + ".forbidden: a rule boundary lists no explicit members");
            if (! f.is_array())
                throw IoError(where + ".forbidden: expected an array");
            for (std::size_t i = 0 ; i < f.size() ; ++i)
                spec.explicit_members.push_back(parse_structure(f[i], spec.signature, where + ".forbidden[" + std::to_string(i) + "]"));
        }
        return spec;
    }

    auto type_json(const TypeDescriptor & t) -> Json
    {
        return { { "sockel", t.sockel }, { "template", structure_json(t.tmpl) } };
    }

    auto parse_type(const Json & j, const SignaturePtr & sig, const std::string & where) -> TypeDescriptor
    {
        TypeDescriptor t{ get<std::vector<int>>(j, "sockel", where), parse_structure(at(j, "template", where), sig, where + ".template") };
        if (t.tmpl.size() != int(t.sockel.size()) + 1)
            throw IoError(where + ": the template needs one element more than the sockel");
        return normalized(t);
    }

    auto bundle_json(const Bundle & b) -> Json
    {
        Json members = Json::array();
        for (auto & t : b.members)
            members.push_back(structure_json(t.tmpl));
        return { { "sockel", b.sockel }, { "members", members } };
    }

    auto parse_bundle(const Json & j, const SignaturePtr & sig, const std::string & where) -> Bundle
    {
        auto sockel = get<std::vector<int>>(j, "sockel", where);
        auto & m = at(j, "members", where);
        if (! m.is_array())
            throw IoError(where + ".members: expected an array");
        std::vector<TypeDescriptor> members;
        for (std::size_t i = 0 ; i < m.size() ; ++i)
            members.push_back(TypeDescriptor{ sockel, parse_structure(m[i], sig, where + ".members[" + std::to_string(i) + "]") });
        try {
            return make_bundle(sockel, members);
        }
        catch (const BundleError & e) {
            throw IoError(where + ": " + e.what());
        }
    }

    auto mho_json(const MhoInstance & inst) -> Json
    {
        Json order = Json::array();
        for (int x = 0 ; x < inst.sorts() ; ++x)
            for (int y = 0 ; y < inst.sorts() ; ++y)
                if (x != y && inst.below[x][y])
                    order.push_back(Json::array({ x, y }));
        return { { "ground", inst.ground }, { "ranks", inst.ranks }, { "threshold", inst.threshold },
                { "sigma", inst.sigma }, { "rho", inst.rho }, { "names", inst.names }, { "order", order } };
    }

    auto parse_mho(const Json & j, const std::string & where) -> MhoInstance
    {
        std::vector<std::pair<int, int>> covers;
        for (auto & p : get<std::vector<std::vector<int>>>(j, "order", where)) {
            if (p.size() != 2)
                throw IoError(where + ".order: expected [lower, upper] pairs");
            covers.emplace_back(p[0], p[1]);
        }
        try {
            auto inst = make_mho(get<int>(j, "ground", where), get<int>(j, "ranks", where), get<int>(j, "threshold", where),
                    covers, get<std::vector<std::vector<int>>>(j, "sigma", where), get<std::vector<int>>(j, "rho", where));
            if (j.contains("names"))
                inst.names = get<std::vector<std::string>>(j, "names", where);
            return inst;
        }
        catch (const MhoError & e) {
            throw IoError(where + ": " + e.what());
        }
    }

    auto generator_json(const GeneratorConfig & c) -> Json
    {
        return { { "seed", c.seed }, { "mode", mode_name(c.mode) }, { "sockel_cap", c.sockel_cap } };
    }

    auto parse_generator(const Json & j, const std::string & where) -> GeneratorConfig
    {
        GeneratorConfig c;
        c.seed = get<std::uint64_t>(j, "seed", where);
        try {
            c.mode = parse_generation_mode(get<std::string>(j, "mode", where));
        }
        catch (const GenerationError & e) {
            throw IoError(where + ".mode: " + e.what());
        }
        c.sockel_cap = get<int>(j, "sockel_cap", where);
        return c;
    }

    auto load_age(const Json & doc, const std::string & where) -> AgePtr
    {
        auto kind = get<std::string>(doc, "kind", where);
        try {
            if (kind == "boundary")
                return make_age(parse_boundary(doc, where));
            if (kind == "snapshot")
                return make_age(parse_boundary(at(doc, "boundary", where), where + ".boundary"));
        }
        catch (const AgeError & e) {
            throw IoError(where + ": " + e.what());
        }
        throw IoError(where + ": expected a boundary or snapshot document, found " + kind);
    }

    auto snapshot_json(const GenericStructure & g) -> Json
    {
        return document("snapshot", { { "boundary", boundary_json(g.age()->boundary().spec) },
                { "generator", generator_json(g.config()) }, { "structure", structure_json(g.snapshot()) },
                { "demands_served", g.demands_served() } });
    }

    auto classifier_json(const ClassifierReport & r) -> Json
    {
        Json chain = Json::array();
        for (auto & c : r.chain)
            chain.push_back({ { "representative", type_json(c.representative) }, { "types", c.types },
                    { "rank_members", std::count(c.profile.begin(), c.profile.end(), true) } });
        Json witness = nullptr;
        if (r.witness)
            witness = { { "t", type_json(r.witness->t) }, { "s", type_json(r.witness->s) },
                    { "in_t_not_s", structure_json(r.witness->a) }, { "in_s_not_t", structure_json(r.witness->b) } };
        Json cert = nullptr;
        if (r.certificate)
            cert = { { "id", r.certificate->id }, { "statement", r.certificate->statement },
                    { "predicted_chain", r.certificate->predicted_chain }, { "stated_chain", r.certificate->stated_chain },
                    { "reverified", r.certificate->reverified } };
        return { { "verdict", verdict_name(r.verdict) }, { "bounds", { { "sockel", r.sockel_bound }, { "size", r.size_bound } } },
                { "types_enumerated", r.types_enumerated }, { "members_compared", r.members_compared },
                { "chain_length", r.chain_length }, { "chain", chain }, { "witness", witness },
                { "certificate", cert }, { "reason", r.reason } };
    }

    auto pqr_json(const PQRPartition & p) -> Json
    {
        Json least_t = Json::array(), least_s = Json::array();
        for (std::size_t n = 0 ; n < p.assignment.size() ; ++n) {
            least_t.push_back(optional_json(p.least_t[n]));
            least_s.push_back(optional_json(p.least_s[n]));
        }
        return { { "t", type_json(p.t) }, { "s", type_json(p.s) }, { "prefix", p.prefix }, { "sockel_cap", p.sockel_cap },
                { "P", p.members(PQRClass::P) }, { "Q", p.members(PQRClass::Q) }, { "R", p.members(PQRClass::R) },
                { "least_t", least_t }, { "least_s", least_s } };
    }

    auto construct_json(const ConstructResult & r) -> Json
    {
        Json trace = Json::array();
        for (auto & s : r.trace)
            trace.push_back({ { "step", s.step }, { "element", s.element }, { "image", s.image }, { "fresh", s.fresh },
                    { "candidates", s.candidates }, { "bundle_size", s.bundle_size }, { "backtrack", s.backtrack } });
        Json obstruction = nullptr;
        if (r.obstruction)
            obstruction = { { "type", type_json(r.obstruction->type) }, { "step", r.obstruction->step },
                    { "monochromatic", r.obstruction->monochromatic }, { "full_rank", r.obstruction->full_rank } };
        return { { "outcome", outcome_name(r.outcome) }, { "colour", r.colour }, { "target", r.target },
                { "prefix", r.prefix }, { "images", r.images }, { "backtracks", r.backtracks },
                { "fresh_realized", r.fresh_realized }, { "verified", r.verified }, { "reason", r.reason },
                { "trace", trace }, { "obstruction", obstruction },
                { "counter", r.counter ? construct_json(*r.counter) : Json(nullptr) },
                { "succeeded", r.succeeded() } };
    }

    auto dichotomy_json(const DichotomyResult & d) -> Json
    {
        return { { "side", d.side }, { "run", construct_json(d.run) },
                { "blue_inside", d.blue_inside ? type_json(*d.blue_inside) : Json(nullptr) } };
    }

    auto weak_json(const WeakRun & w) -> Json
    {
        return { { "run", construct_json(w.run) }, { "audit_failed", w.audit_failed }, { "audits", w.audits },
                { "audit_witness", w.audit_witness } };
    }

    auto labelling_json(const Labelling & l) -> Json
    {
        return { { "label", l.label }, { "reason", l.reason }, { "rounds", l.rounds }, { "labelled", l.witness() } };
    }

    auto largeness_json(const Largeness & l) -> Json
    {
        std::vector<int> large;
        for (int e = 0 ; e < int(l.large.size()) ; ++e)
            if (l.large[e])
                large.push_back(e);
        return { { "side", side_text(l.side) }, { "witness", l.witness }, { "large", large },
                { "phi_verified", l.phi_verified }, { "intersection_verified", l.intersection_verified }, { "log", l.log } };
    }

    auto constructive_json(const ConstructiveSet & c) -> Json
    {
        return { { "side", side_text(c.side) }, { "seeds", c.seeds }, { "members", c.members }, { "root", c.root },
                { "closed", c.closed }, { "intersections", c.intersections }, { "gamma", c.gamma_holds },
                { "verified", c.verified() } };
    }

    auto audit_json(const MhoAudit & a) -> Json
    {
        return { { "labelled_closure", a.labelled_closure }, { "rank_monotone", a.rank_monotone },
                { "phi_implication", a.phi_implication }, { "witness_phi", a.witness_phi }, { "failures", a.failures },
                { "ok", a.ok() } };
    }
}
