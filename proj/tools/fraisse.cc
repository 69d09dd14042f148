#include <fraisse/cli.hh>

#include <CLI11.hpp>

#include <iostream>

using namespace fraisse;

namespace
{
    auto add_common(CLI::App * sub, RunConfig & c) -> void
    {
        sub->add_option("--sockel-bound", c.sockel_bound, "Largest sockel size considered")->capture_default_str();
        sub->add_option("--size-bound", c.size_bound, "Largest age member size considered")->capture_default_str();
        sub->add_option("--fragment-bound", c.fragment_bound, "Largest fragment size")->capture_default_str();
        sub->add_option("--retry", c.budgets.retry, "Candidates per step")->capture_default_str();
        sub->add_option("--backtrack", c.budgets.backtrack, "Backtracks per run")->capture_default_str();
        sub->add_option("--advance", c.budgets.advance, "Fresh realizations per run")->capture_default_str();
        sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
        sub->add_option("--mode", c.mode, "Generator mode")
            ->check(CLI::IsMember({ "dovetail", "random" }))->capture_default_str();
        sub->add_option("-o,--output", c.output, "Output file (default: $FRAISSE_OUT_DIR/<command>.json, else stdout)");
    }

    auto add_oracle(CLI::App * sub, RunConfig & c) -> void
    {
        sub->add_option("--oracle", c.oracle, "Colouring oracle kind")
            ->check(CLI::IsMember({ "all", "parity", "degree", "scripted", "random", "edge-free-red", "adjacent", "first" }))
            ->capture_default_str();
        sub->add_option("--oracle-element", c.oracle_element, "adjacent: the anchor element");
        sub->add_option("--oracle-threshold", c.oracle_threshold, "degree: blue threshold");
        sub->add_option("--oracle-count", c.oracle_count, "first: number of red elements");
        sub->add_option("--script", c.script, "scripted: JSON array of colours");
        sub->add_option("--target", c.target, "Prefix length to copy")->capture_default_str();
    }

    auto add_age(CLI::App * sub, RunConfig & c, bool required = true) -> void
    {
        auto opt = sub->add_option("age", c.inputs, "Boundary or snapshot file, or fixture:NAME");
        if (required)
            opt->required();
    }
}

auto main(int argc, char ** argv) -> int
{
    CLI::App app{ "Fraisse limits: ages, generic structures and partition games" };
    app.require_subcommand(1);
    RunConfig c;

    auto classify = app.add_subcommand("classify", "Rank profiles and the divisibility verdict of an age");
    add_age(classify, c);
    add_common(classify, c);

    auto sample = app.add_subcommand("sample", "A snapshot of the generic structure");
    add_age(sample, c);
    add_common(sample, c);
    sample->add_option("--steps", c.steps, "Demands to serve")->capture_default_str();

    auto types = app.add_subcommand("types", "Types over a sockel in a snapshot");
    add_age(types, c);
    add_common(types, c);
    types->add_option("--steps", c.steps, "Demands to serve")->capture_default_str();
    types->add_option("--sockel", c.sockel, "Sockel elements");

    auto game = app.add_subcommand("game", "Copy the enumeration prefix into one colour class");
    add_age(game, c);
    add_common(game, c);
    add_oracle(game, c);
    game->add_option("--colour", c.colour, "0 for red, 1 for blue")->check(CLI::Range(0, 1));

    auto dichotomy = app.add_subcommand("dichotomy", "Red copy or blue copy on the random graph");
    add_age(dichotomy, c);
    add_common(dichotomy, c);
    add_oracle(dichotomy, c);

    auto weak = app.add_subcommand("weak", "Copy into one colour while auditing the other");
    add_age(weak, c);
    add_common(weak, c);
    add_oracle(weak, c);
    weak->add_option("--missing", c.missing, "vertex, edge, non-edge or a structure file")->capture_default_str();
    weak->add_option("--missing-colour", c.missing_colour, "Colour assumed to omit the structure")
        ->check(CLI::Range(0, 1));

    auto divide = app.add_subcommand("divide", "The P, Q, R partition of a prefix");
    add_age(divide, c);
    add_common(divide, c);
    divide->add_option("--prefix", c.prefix, "Prefix length")->capture_default_str();
    divide->add_option("--pqr-sockel-cap", c.pqr_sockel_cap, "Largest sockel of t and s")->capture_default_str();
    divide->add_option("--t", c.type_t, "Type file for t");
    divide->add_option("--s", c.type_s, "Type file for s");
    divide->add_option("--check-prefix", c.check_prefix, "Prefix checked against each class")->capture_default_str();

    auto mho = app.add_subcommand("mho", "Labelling and largeness for a finite ordered instance");
    add_age(mho, c, false);
    add_common(mho, c);
    mho->add_option("--subset", c.subset, "Ground elements of the colour class");

    auto dot = app.add_subcommand("export-dot", "DOT rendering of a snapshot or structure");
    add_age(dot, c);
    dot->add_option("-o,--output", c.output, "Output file");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError & e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    c.command = app.get_subcommands().front()->get_name();
    return execute(c, std::cout, std::cerr);
}
