#include <doctest.h>

#include <fraisse/cli.hh>
#include <fraisse/fixtures.hh>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fraisse;

namespace
{
    auto fixture(const std::string & name) -> std::string
    {
        return std::string(FRAISSE_FIXTURE_DIR) + "/" + name + ".json";
    }

    auto slurp(const std::string & path) -> std::string
    {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    auto scratch(const std::string & name) -> std::string
    {
        auto dir = std::filesystem::temp_directory_path() / "fraisse-tests";
        std::filesystem::create_directories(dir);
        return (dir / name).string();
    }

    auto mixed_signature() -> SignaturePtr
    {
        return make_signature({ { "E", 2, Mode::Set }, { "L", 3, Mode::Ordered }, { "P", 1, Mode::Ordered } });
    }

    auto error_of(const std::function<void ()> & f) -> std::string
    {
        try {
            f();
        }
        catch (const IoError & e) {
            return e.what();
        }
        return {};
    }
}

TEST_CASE("structures re-serialize byte-identically")
{
    auto sig = mixed_signature();
    FinStructure s(sig, 4, { Instance(0, { 2, 0 }), Instance(1, { 3, 1, 0 }), Instance(2, { 1 }), Instance(0, { 1, 3 }) });
    auto text = canonical(structure_json(s));
    auto back = parse_structure(Json::parse(text), sig, "s");
    CHECK(canonical(structure_json(back)) == text);
    CHECK(back.instances() == s.instances());

    auto sigtext = canonical(signature_json(*sig));
    CHECK(canonical(signature_json(*parse_signature(Json::parse(sigtext), "sig"))) == sigtext);
}

TEST_CASE("fixture boundaries re-serialize byte-identically")
{
    for (auto name : fixture_names()) {
        auto text = slurp(fixture(name));
        REQUIRE_MESSAGE(! text.empty(), name);
        auto doc = Json::parse(text);
        expect_kind(doc, "boundary", name);
        auto spec = parse_boundary(doc, name);
        CHECK_MESSAGE(canonical(document("boundary", boundary_json(spec))) == text, name);
        CHECK(canonical(document("boundary", boundary_json(named_age(name)->boundary().spec))) == text);
    }
    for (auto name : { "knfree-3-5", "knfree-3-6" }) {
        auto text = slurp(fixture(name));
        auto spec = parse_boundary(Json::parse(text), name);
        REQUIRE(spec.schematic);
        CHECK(spec.schematic->k == 3);
        CHECK(canonical(document("boundary", boundary_json(spec))) == text);
    }
}

TEST_CASE("types and bundles re-serialize byte-identically")
{
    GenericStructure g(rado_age(), GeneratorConfig{ 2 });
    g.advance(30);
    auto types = types_over(g, { 0, 1 });
    REQUIRE(types.size() > 2);
    for (auto & t : types) {
        auto text = canonical(type_json(t));
        auto back = parse_type(Json::parse(text), g.age()->signature(), "t");
        CHECK(back == t);
        CHECK(canonical(type_json(back)) == text);
    }
    auto b = make_bundle({ 0, 1 }, { types[2], types[0], types[1] });
    auto text = canonical(bundle_json(b));
    auto back = parse_bundle(Json::parse(text), g.age()->signature(), "b");
    CHECK(back.size() == 3);
    CHECK(canonical(bundle_json(back)) == text);
}

TEST_CASE("ordered instances re-serialize byte-identically")
{
    for (std::uint64_t seed = 0 ; seed < 25 ; ++seed) {
        auto inst = random_mho(seed);
        auto text = canonical(mho_json(inst));
        auto back = parse_mho(Json::parse(text), "mho");
        CHECK(canonical(mho_json(back)) == text);
        CHECK(back.below == inst.below);
        CHECK(back.sigma == inst.sigma);
        CHECK(back.rho == inst.rho);
    }
}

TEST_CASE("snapshots reload the same age and structure")
{
    GenericStructure g(clique_free_age(3), GeneratorConfig{ 5 });
    g.advance(40);
    auto doc = snapshot_json(g);
    auto age = load_age(doc, "snap");
    CHECK(age->contains(complete_graph(2)));
    CHECK_FALSE(age->contains(complete_graph(3)));
    auto s = parse_structure(doc.at("structure"), age->signature(), "snap.structure");
    CHECK(is_isomorphic(s, g.snapshot()));
    CHECK(canonical(structure_json(s)) == canonical(structure_json(g.snapshot())));
}

TEST_CASE("malformed input names its location")
{
    auto sig = uniform_signature(2);
    CHECK(error_of([&] { parse_structure(Json::parse(R"({"size": 3, "relations": [["F", [0, 1]]]})"), sig, "s"); })
            .find("s.relations[0]") != std::string::npos);
    CHECK(error_of([&] { parse_structure(Json::parse(R"({"size": 3})"), sig, "s"); })
            .find("missing field 'relations'") != std::string::npos);
    CHECK(error_of([&] { parse_structure(Json::parse(R"({"size": 2, "relations": [["E", [0, 5]]]})"), sig, "s"); })
            .find("s.relations[0]") != std::string::npos);
    CHECK(error_of([&] { parse_signature(Json::parse(R"([{"name": "E", "arity": 2, "mode": "odd"}])"), "sig"); })
            .find("sig[0].mode") != std::string::npos);
    CHECK(error_of([&] { parse_boundary(Json::parse(R"({"signature": [], "forbidden": 3, "rule": null})"), "b"); })
            .find("b.") != std::string::npos);

    auto path = scratch("broken.json");
    {
        std::ofstream out(path);
        out << "{\n  \"kind\": \"boundary\",\n  \"signature\": [,]\n}\n";
    }
    CHECK(error_of([&] { read_json(path); }).find("byte") != std::string::npos);
    CHECK(error_of([&] { expect_kind(Json{ { "kind", "type" }, { "version", version_tag } }, "boundary", "f"); })
            .find("expected a boundary document") != std::string::npos);
}

TEST_CASE("reports replay byte-identically apart from timing")
{
    auto run = [] (RunConfig c) { return canonical(without_timing(run_command(c))); };

    RunConfig classify;
    classify.command = "classify";
    classify.inputs = { fixture("k3free") };
    classify.size_bound = 4;
    CHECK(run(classify) == run(classify));
    auto report = run_command(classify);
    CHECK(report.at("version") == version_tag);
    CHECK(report.at("config") == config_json(classify));
    CHECK(report.at("result").at("verdict") == "indivisible-certified");

    RunConfig game;
    game.command = "game";
    game.inputs = { "fixture:rado" };
    game.oracle = "degree";
    game.target = 20;
    game.seed = 4;
    CHECK(run(game) == run(game));

    RunConfig divide;
    divide.command = "divide";
    divide.inputs = { fixture("twtriangle") };
    divide.size_bound = 4;
    divide.prefix = 30;
    CHECK(run(divide) == run(divide));

    RunConfig mho;
    mho.command = "mho";
    mho.seed = 9;
    CHECK(run(mho) == run(mho));
}

TEST_CASE("exit codes")
{
    std::ostringstream out, err;
    RunConfig c;
    c.command = "classify";
    c.inputs = { fixture("k3free") };
    c.size_bound = 4;
    c.output = scratch("classify.json");
    CHECK(execute(c, out, err) == 0);
    auto written = read_json(c.output);
    CHECK(written.at("kind") == "report");

    c.inputs = { scratch("no-such-file.json") };
    CHECK(execute(c, out, err) == 1);
    CHECK(err.str().find("cannot open") != std::string::npos);

    c.inputs = { fixture("k3free") };
    c.size_bound = 0;
    CHECK(execute(c, out, err) == 1);

    RunConfig game;
    game.command = "game";
    game.inputs = { "fixture:rado" };
    game.oracle = "all";
    game.colour = blue;
    game.target = 10;
    game.budgets.retry = 1;
    game.budgets.backtrack = 0;
    game.budgets.advance = 1;
    game.output = scratch("game.json");
    auto code = execute(game, out, err);
    CHECK((code == 0 || code == 2));
    CHECK((code == 2) == ! read_json(game.output).at("completed").get<bool>());

    RunConfig dot;
    dot.command = "export-dot";
    dot.inputs = { fixture("k3free") };
    CHECK(execute(dot, out, err) == 1);

    RunConfig sample;
    sample.command = "sample";
    sample.inputs = { "fixture:k3free" };
    sample.steps = 15;
    sample.output = scratch("sample.json");
    REQUIRE(execute(sample, out, err) == 0);
    std::ostringstream dotout;
    dot.inputs = { sample.output };
    REQUIRE(execute(dot, dotout, err) == 0);
    CHECK(dotout.str().rfind("graph U {", 0) == 0);
}
