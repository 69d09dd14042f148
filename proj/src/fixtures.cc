#include <fraisse/fixtures.hh>
#include <fraisse/morphism.hh>

#include <array>
#include <regex>

namespace fraisse
{
    namespace
    {
        auto triangle(SignaturePtr sig, int symbol) -> FinStructure
        {
            return FinStructure(sig, 3, { Instance(symbol, { 0, 1 }), Instance(symbol, { 0, 2 }), Instance(symbol, { 1, 2 }) });
        }
    }

    auto rado_age() -> AgePtr
    {
        return explicit_age(uniform_signature(2), {});
    }

    auto clique_free_age(int n) -> AgePtr
    {
        return explicit_age(uniform_signature(2), { complete_graph(n) });
    }

    auto twtriangle_age() -> AgePtr
    {
        auto sig = make_signature({ RelationSymbol{ "R", 2, Mode::Set }, RelationSymbol{ "B", 2, Mode::Set } });
        FinStructure both(sig, 2, { Instance(0, { 0, 1 }), Instance(1, { 0, 1 }) });
        return explicit_age(sig, { triangle(sig, 0), triangle(sig, 1), both });
    }

    auto five_vertex_k() -> FinStructure
    {
        return FinStructure(uniform_signature(3), 5, { Instance(0, { 0, 1, 2 }), Instance(0, { 0, 3, 4 }),
                Instance(0, { 1, 3, 4 }), Instance(0, { 2, 3, 4 }) });
    }

    auto strmelmeld_age() -> AgePtr
    {
        auto sig = make_signature({ RelationSymbol{ "G", 2, Mode::Set }, RelationSymbol{ "Blue", 3, Mode::Set },
                RelationSymbol{ "Red", 3, Mode::Set } });
        constexpr int graph = 0, blue = 1, red = 2;
        std::vector<FinStructure> boundary;
        IsoClassSet seen;
        auto keep = [&] (const FinStructure & s) {
            if (seen.insert(s).second)
                boundary.push_back(s);
        };

        // A graph edge inside a blue hyperedge, or blue and red on one
        // triple, with any further relations on the same three vertices.
        std::vector<Instance> pairs{ Instance(graph, { 0, 1 }), Instance(graph, { 0, 2 }), Instance(graph, { 1, 2 }) };
        for (std::uint32_t mask = 0 ; mask < 16 ; ++mask) {
            FinStructure with(sig, 3, { Instance(blue, { 0, 1, 2 }) });
            for (int t = 0 ; t < 3 ; ++t)
                if (mask & (1u << t))
                    with.add(pairs[t]);
            if (mask & 8u)
                with.add(Instance(red, { 0, 1, 2 }));
            if (mask != 0)
                keep(with);
        }

        // Supersets of M on its own vertices that avoid the triples above,
        // other than N.
        FinStructure m(sig, 4, { Instance(blue, { 0, 1, 2 }), Instance(blue, { 0, 1, 3 }), Instance(graph, { 2, 3 }) });
        keep(m);
        for (auto & extra : { Instance(red, { 0, 2, 3 }), Instance(red, { 1, 2, 3 }) }) {
            auto with = m;
            with.add(extra);
            keep(with);
        }

        // K with each triple it leaves empty unchanged, blue, or red. Every
        // pair of K lies in a blue hyperedge, so no graph edge is added.
        FinStructure k(sig, 5, {});
        auto plain = five_vertex_k();
        for (auto & i : plain.instances())
            k.add(Instance(blue, i.tuple()));
        std::vector<std::array<int, 3>> empty;
        for (int a = 0 ; a < 5 ; ++a)
            for (int b = a + 1 ; b < 5 ; ++b)
                for (int c = b + 1 ; c < 5 ; ++c)
                    if (! k.contains(Instance(blue, { a, b, c })))
                        empty.push_back({ a, b, c });
        int choices = 1;
        for (std::size_t t = 0 ; t < empty.size() ; ++t)
            choices *= 3;
        for (int code = 0 ; code < choices ; ++code) {
            auto with = k;
            int rest = code;
            for (auto & t : empty) {
                if (rest % 3 == 1)
                    with.add(Instance(blue, { t[0], t[1], t[2] }));
                else if (rest % 3 == 2)
                    with.add(Instance(red, { t[0], t[1], t[2] }));
                rest /= 3;
            }
            keep(with);
        }
        return explicit_age(sig, boundary);
    }

    auto unary_age() -> AgePtr
    {
        return explicit_age(make_signature({ RelationSymbol{ "R", 1, Mode::Set } }), {});
    }

    auto fixture_names() -> std::vector<std::string>
    {
        return { "rado", "k3free", "k4free", "k5free", "twtriangle", "strmelmeld", "unary", "knfree-3-5", "knfree-3-6" };
    }

    auto named_age(const std::string & name) -> AgePtr
    {
        static const std::regex clique("k([0-9])free"), uniform("knfree-([0-9])-([0-9]+)");
        std::smatch match;
        if (name == "rado")
            return rado_age();
        if (std::regex_match(name, match, clique))
            return clique_free_age(std::stoi(match[1]));
        if (name == "twtriangle")
            return twtriangle_age();
        if (name == "strmelmeld")
            return strmelmeld_age();
        if (name == "unary")
            return unary_age();
        if (std::regex_match(name, match, uniform))
            return schematic_age(RuleKind::IrreducibleUniformMinN, std::stoi(match[1]), std::stoi(match[2]));
        throw AgeError("unknown fixture " + name);
    }
}
