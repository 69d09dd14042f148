#include <fraisse/cli.hh>
#include <fraisse/fixtures.hh>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>

namespace fraisse
{
    namespace
    {
        auto generator_for(const RunConfig & c) -> GeneratorConfig
        {
            GeneratorConfig g;
            g.seed = c.seed;
            g.mode = parse_generation_mode(c.mode);
            return g;
        }

        auto sampled(const RunConfig & c, AgePtr age) -> GenericStructure
        {
            GenericStructure g(std::move(age), generator_for(c));
            g.advance(std::uint64_t(c.steps));
            return g;
        }

        auto oracle_for(const RunConfig & c) -> OraclePtr
        {
            OracleSpec spec;
            spec.kind = c.oracle;
            spec.seed = c.seed;
            spec.colour = c.colour;
            spec.element = c.oracle_element;
            spec.threshold = c.oracle_threshold;
            spec.count = c.oracle_count;
            if (spec.kind == "scripted") {
                if (c.script.empty())
                    spec.script = builtin_oracle("scripted", c.seed).script;
                else {
                    auto j = read_json(c.script);
                    try {
                        spec.script = j.get<std::vector<int>>();
                    }
                    catch (const nlohmann::json::exception & e) {
                        throw IoError(c.script + ": expected an array of colours");
                    }
                }
            }
            try {
                return make_oracle(spec);
            }
            catch (const std::invalid_argument & e) {
                throw IoError(std::string("oracle: ") + e.what());
            }
        }

        auto load_type(const std::string & path, const SignaturePtr & sig) -> TypeDescriptor
        {
            auto doc = read_json(path);
            expect_kind(doc, "type", path);
            return parse_type(doc, sig, path);
        }

        /// A sample report stands for the snapshot it carries.
        auto unwrap(Json doc) -> Json
        {
            if (doc.is_object() && doc.value("kind", std::string()) == "report" && doc.value("command", std::string()) == "sample")
                return document("snapshot", doc.at("result"));
            return doc;
        }

        auto load_structure(const std::string & path) -> FinStructure
        {
            auto doc = unwrap(read_json(path));
            auto kind = doc.value("kind", std::string());
            if (kind == "snapshot") {
                auto age = load_age(doc, path);
                return parse_structure(doc.at("structure"), age->signature(), path + ".structure");
            }
            expect_kind(doc, "structure", path);
            auto sig = parse_signature(doc.at("signature"), path + ".signature");
            return parse_structure(doc.at("structure"), sig, path + ".structure");
        }

        auto missing_structure(const RunConfig & c, const SignaturePtr & sig) -> FinStructure
        {
            if (c.missing == "vertex")
                return FinStructure(sig, 1);
            if (c.missing == "non-edge")
                return FinStructure(sig, 2);
            if (c.missing == "edge")
                return FinStructure(sig, 2, { Instance(0, { 0, 1 }) });
            return load_structure(c.missing);
        }

        auto require_input(const RunConfig & c) -> const std::string &
        {
            if (c.inputs.empty())
                throw IoError(c.command + ": an input is required");
            return c.inputs.front();
        }

        auto check_bounds(const RunConfig & c) -> void
        {
            if (c.sockel_bound <= 0 || c.size_bound <= 0 || c.fragment_bound <= 0)
                throw IoError("bounds must be positive");
            if (c.budgets.retry <= 0 || c.budgets.backtrack < 0 || c.budgets.advance <= 0)
                throw IoError("budgets must be positive");
            if (c.steps < 0 || c.target < 0 || c.prefix < 0)
                throw IoError("lengths must not be negative");
        }

        auto classify_command(const RunConfig & c) -> Json
        {
            auto age = resolve_age(require_input(c));
            return classifier_json(classify(*age, c.sockel_bound, c.size_bound));
        }

        auto sample_command(const RunConfig & c) -> Json
        {
            auto g = sampled(c, resolve_age(require_input(c)));
            auto snap = snapshot_json(g);
            snap.erase("kind");
            snap.erase("version");
            return snap;
        }

        auto types_command(const RunConfig & c) -> Json
        {
            auto g = sampled(c, resolve_age(require_input(c)));
            for (int v : c.sockel)
                if (v < 0 || v >= g.size())
                    throw IoError("types: sockel element " + std::to_string(v) + " is not in the snapshot");
            Json types = Json::array();
            for (auto & t : types_over(g, c.sockel)) {
                auto set = g.typeset(t);
                types.push_back({ { "type", type_json(t) }, { "realized", set.size() },
                        { "first", set.empty() ? Json(nullptr) : Json(set.front()) } });
            }
            return { { "snapshot_size", g.size() }, { "types", types } };
        }

        auto game_command(const RunConfig & c) -> Json
        {
            auto age = resolve_age(require_input(c));
            GenericStructure g(age, generator_for(c));
            auto oracle = oracle_for(c);
            ConstructConfig config;
            config.colour = c.colour;
            config.target = c.target;
            config.budgets = c.budgets;
            config.seed = c.seed;
            auto r = monochromatic_construct(g, *oracle, config);
            return { { "oracle", oracle->name() }, { "result", construct_json(r) } };
        }

        auto dichotomy_command(const RunConfig & c) -> Json
        {
            auto age = resolve_age(require_input(c));
            GenericStructure g(age, generator_for(c));
            auto oracle = oracle_for(c);
            DichotomyResult d;
            try {
                d = rado_dichotomy(g, *oracle, c.target, c.budgets, c.seed);
            }
            catch (const ConstructError & e) {
                throw IoError(std::string("dichotomy: ") + e.what());
            }
            return { { "oracle", oracle->name() }, { "result", dichotomy_json(d) } };
        }

        auto weak_command(const RunConfig & c) -> Json
        {
            auto age = resolve_age(require_input(c));
            GenericStructure g(age, generator_for(c));
            auto oracle = oracle_for(c);
            auto missing = missing_structure(c, age->signature());
            auto w = weak_indivisibility_run(g, *oracle, missing, c.missing_colour, c.target, c.budgets, c.seed);
            return { { "oracle", oracle->name() }, { "missing", structure_json(missing) }, { "result", weak_json(w) } };
        }

        auto divide_command(const RunConfig & c) -> Json
        {
            auto age = resolve_age(require_input(c));
            TypeDescriptor t, s;
            if (! c.type_t.empty() && ! c.type_s.empty()) {
                t = load_type(c.type_t, age->signature());
                s = load_type(c.type_s, age->signature());
            }
            else {
                auto report = classify(*age, c.sockel_bound, c.size_bound);
                if (! report.witness)
                    throw IoError("divide: the classifier found no incomparable pair; pass --t and --s");
                t = report.witness->t;
                s = report.witness->s;
            }
            int steps = c.steps;
            GenericStructure g(age, generator_for(c));
            g.advance_until([&] (const GenericStructure & x) { return x.size() >= c.prefix; },
                    std::uint64_t(std::max(steps, c.prefix * 64 + 1024)));
            PQRPartition p;
            try {
                p = build_pqr(g, t, s, c.prefix, c.pqr_sockel_cap);
            }
            catch (const PartitionError & e) {
                throw IoError(std::string("divide: ") + e.what());
            }
            Json checks = Json::object();
            if (c.check_prefix > 0 && c.check_prefix <= g.size()) {
                std::vector<int> head(c.check_prefix);
                std::iota(head.begin(), head.end(), 0);
                auto source = g.indexed().induced(head);
                for (auto cls : { PQRClass::P, PQRClass::Q, PQRClass::R }) {
                    auto target = IndexedStructure(g.indexed().induced(p.members(cls)));
                    checks[class_name(cls)] = bool(find_morphism(source, target, MorphismKind::Embedding));
                }
            }
            return { { "partition", pqr_json(p) }, { "prefix_embeds", checks }, { "check_prefix", c.check_prefix } };
        }

        auto mho_command(const RunConfig & c) -> Json
        {
            MhoInstance inst;
            if (c.inputs.empty())
                inst = random_mho(c.seed);
            else {
                auto doc = read_json(c.inputs.front());
                expect_kind(doc, "mho", c.inputs.front());
                inst = parse_mho(doc, c.inputs.front());
            }
            if (auto v = validate_mho(inst))
                throw IoError("mho: item " + std::to_string(v->item) + ": " + v->detail);
            std::vector<bool> s(inst.ground, false);
            if (c.subset.empty())
                for (int e = 0 ; e < inst.ground ; ++e)
                    s[e] = mix_hash(c.seed, std::uint64_t(e)) & 1;
            else
                for (int e : c.subset) {
                    if (e < 0 || e >= inst.ground)
                        throw IoError("mho: subset element " + std::to_string(e) + " outside the ground");
                    s[e] = true;
                }
            std::vector<int> members;
            for (int e = 0 ; e < inst.ground ; ++e)
                if (s[e])
                    members.push_back(e);
            auto large = largeness_dichotomy(inst, s);
            return { { "instance", mho_json(inst) }, { "subset", members },
                    { "labelling", labelling_json(compute_labelling(inst, s)) },
                    { "largeness", largeness_json(large) },
                    { "constructive", constructive_json(constructive_set(inst, large)) },
                    { "audit", audit_json(audit_mho(inst, s)) } };
        }

        auto dot_text(const RunConfig & c) -> std::string
        {
            return to_dot(load_structure(require_input(c)), "U");
        }

        auto completed(const RunConfig & c, const Json & result) -> bool
        {
            if (c.command == "game")
                return result.at("result").at("succeeded").get<bool>();
            if (c.command == "dichotomy")
                return result.at("result").at("side").get<int>() >= 0;
            if (c.command == "weak") {
                auto & w = result.at("result");
                return w.at("audit_failed").get<bool>() || w.at("run").at("succeeded").get<bool>();
            }
            return true;
        }

        auto default_output(const RunConfig & c) -> std::string
        {
            if (! c.output.empty())
                return c.output;
            if (auto dir = std::getenv(output_dir_variable); dir && *dir)
                return std::string(dir) + "/" + c.command + (c.command == "export-dot" ? ".dot" : ".json");
            return {};
        }
    }

    auto config_json(const RunConfig & c) -> Json
    {
        return { { "command", c.command }, { "inputs", c.inputs },
                { "bounds", { { "sockel", c.sockel_bound }, { "size", c.size_bound }, { "fragment", c.fragment_bound } } },
                { "budgets", { { "retry", c.budgets.retry }, { "backtrack", c.budgets.backtrack }, { "advance", c.budgets.advance } } },
                { "seed", c.seed }, { "mode", c.mode }, { "output", c.output }, { "steps", c.steps },
                { "target", c.target }, { "colour", c.colour },
                { "oracle", { { "kind", c.oracle }, { "element", c.oracle_element }, { "threshold", c.oracle_threshold },
                        { "count", c.oracle_count }, { "script", c.script } } },
                { "prefix", c.prefix }, { "pqr_sockel_cap", c.pqr_sockel_cap }, { "t", c.type_t }, { "s", c.type_s },
                { "check_prefix", c.check_prefix }, { "sockel", c.sockel }, { "missing", c.missing },
                { "missing_colour", c.missing_colour }, { "subset", c.subset } };
    }

    auto resolve_age(const std::string & input) -> AgePtr
    {
        static const std::string prefix = "fixture:";
        if (input.rfind(prefix, 0) == 0) {
            try {
                return named_age(input.substr(prefix.size()));
            }
            catch (const AgeError & e) {
                throw IoError(input + ": " + e.what());
            }
        }
        return load_age(unwrap(read_json(input)), input);
    }

    auto run_command(const RunConfig & config) -> Json
    {
        check_bounds(config);
        auto start = std::chrono::steady_clock::now();
        Json result;
        const auto & cmd = config.command;
        if (cmd == "classify")
            result = classify_command(config);
        else if (cmd == "sample")
            result = sample_command(config);
        else if (cmd == "types")
            result = types_command(config);
        else if (cmd == "game")
            result = game_command(config);
        else if (cmd == "dichotomy")
            result = dichotomy_command(config);
        else if (cmd == "weak")
            result = weak_command(config);
        else if (cmd == "divide")
            result = divide_command(config);
        else if (cmd == "mho")
            result = mho_command(config);
        else if (cmd == "export-dot")
            result = { { "dot", dot_text(config) } };
        else
            throw IoError("unknown command '" + cmd + "'");
        double millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return document("report", { { "command", cmd }, { "config", config_json(config) }, { "result", result },
                { "completed", completed(config, result) }, { "timing", { { "millis", millis } } } });
    }

    auto without_timing(Json report) -> Json
    {
        report.erase("timing");
        return report;
    }

    auto execute(const RunConfig & config, std::ostream & out, std::ostream & err) -> int
    {
        Json report;
        try {
            report = run_command(config);
        }
        catch (const BudgetExceeded & e) {
            err << "budget exhausted: " << e.what() << "\n";
            return 2;
        }
        catch (const BudgetExhausted & e) {
            err << "budget exhausted: " << e.what() << "\n";
            return 2;
        }
        catch (const std::exception & e) {
            err << "error: " << e.what() << "\n";
            return 1;
        }

        std::string text = config.command == "export-dot" ? report["result"]["dot"].get<std::string>() : canonical(report);
        auto path = default_output(config);
        if (path.empty())
            out << text;
        else {
            std::ofstream file(path);
            if (! file) {
                err << "error: " << path << ": cannot write\n";
                return 1;
            }
            file << text;
            out << path << "\n";
        }
        return report["completed"].get<bool>() ? 0 : 2;
    }
}
