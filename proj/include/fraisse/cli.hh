#pragma once

#include <fraisse/io.hh>

#include <iosfwd>
#include <string>
#include <vector>

namespace fraisse
{
    /// Everything a command needs; reports embed it verbatim.
    struct RunConfig
    {
        std::string command;
        std::vector<std::string> inputs;
        int sockel_bound = 2;
        int size_bound = 5;
        int fragment_bound = 3;
        Budgets budgets;
        std::uint64_t seed = 0;
        std::string mode = "dovetail";
        std::string output;

        /// sample, types, divide: demands served before the command runs.
        int steps = 200;
        /// game, dichotomy, weak: prefix length to copy.
        int target = 40;
        int colour = red;
        /// Oracle kind and parameters; script is a path to a JSON array of colours.
        std::string oracle = "parity";
        int oracle_element = 0;
        int oracle_threshold = 2;
        int oracle_count = 3;
        std::string script;
        /// divide: prefix length and the two types (files; empty for the classifier's pair).
        int prefix = 60;
        int pqr_sockel_cap = 2;
        std::string type_t;
        std::string type_s;
        /// Elements of the enumeration prefix checked against each class.
        int check_prefix = 6;
        /// types: the sockel.
        std::vector<int> sockel;
        /// weak: vertex, edge, non-edge or a structure file.
        std::string missing = "edge";
        int missing_colour = red;
        /// mho: the partition class, as ground elements.
        std::vector<int> subset;
    };

    /// Environment variable naming the default output directory.
    inline constexpr const char * output_dir_variable = "FRAISSE_OUT_DIR";

    auto config_json(const RunConfig & c) -> Json;

    /// An age from a boundary or snapshot file, or `fixture:NAME`.
    auto resolve_age(const std::string & input) -> AgePtr;

    /// Raised when a run ends without a result because budgets ran out.
    class BudgetExhausted : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    /// The report document of one command; timing lives under "timing" only.
    /// Throws IoError and friends on bad input.
    auto run_command(const RunConfig & config) -> Json;

    /// The report without its timing member, for replay comparisons.
    auto without_timing(Json report) -> Json;

    /// Runs the command and writes the report (or DOT text for export-dot).
    /// Returns 0 on a completed run, 1 on input errors, 2 on exhausted budgets.
    auto execute(const RunConfig & config, std::ostream & out, std::ostream & err) -> int;
}
