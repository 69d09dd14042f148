#pragma once

#include <fraisse/bundle.hh>
#include <fraisse/colouring.hh>
#include <fraisse/generic.hh>
#include <fraisse/partition.hh>
#include <fraisse/types.hh>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fraisse
{
    class ConstructError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    struct Budgets
    {
        /// Candidates tried per step before backtracking.
        int retry = 50;
        /// Backtrack events per run.
        int backtrack = 20;
        /// Fresh elements realized per run.
        int advance = 500;
    };

    enum class Outcome
    {
        Success,
        /// Budgets ran out; the run carries an obstruction report.
        Obstruction,
        /// The audit hook reported a violated assumption.
        AuditFailure,
        Refused,
        Inconclusive
    };

    auto outcome_name(Outcome o) -> std::string;

    struct StepRecord
    {
        int step = 0;
        int element = 0;
        /// -1 when the step failed.
        int image = -1;
        bool fresh = false;
        int candidates = 0;
        /// Members of the bundle of demanded types over the image after this step.
        int bundle_size = 0;
        bool backtrack = false;
    };

    struct ObstructionReport
    {
        /// The type over the image that no candidate of the run's colour realized.
        TypeDescriptor type;
        int step = 0;
        /// Every realized element of the type's typeset has another colour.
        bool monochromatic = false;
        /// The type's rank is the whole age at the comparison bound.
        bool full_rank = false;
    };

    struct ConstructConfig
    {
        int colour = red;
        int target = 40;
        Budgets budgets;
        /// Seeds the extra relations given to fresh candidates.
        std::uint64_t seed = 0;
        /// Run the other colour when the budgets run out.
        bool counter_run = true;
        /// Skip the classifier precondition; used by the counter-run and
        /// by callers that already classified the age.
        bool assume_indivisible = false;
        /// Images must also realize these types.
        std::vector<TypeDescriptor> within;
        /// Called after each accepted step; false stops the run.
        std::function<bool (const GenericStructure &)> audit;
    };

    struct ConstructResult
    {
        Outcome outcome = Outcome::Inconclusive;
        int colour = red;
        int target = 0;
        std::vector<int> prefix;
        std::vector<int> images;
        std::vector<StepRecord> trace;
        int backtracks = 0;
        int fresh_realized = 0;
        /// Embedding and colour purity re-checked from the snapshot.
        bool verified = false;
        std::optional<ObstructionReport> obstruction;
        std::shared_ptr<ConstructResult> counter;
        std::string reason;

        /// This run or its counter-run produced a verified prefix.
        auto succeeded() const -> bool;
        /// The run that produced the verified prefix, if any.
        auto winner() const -> const ConstructResult *;
    };

    /// Checks that i -> images[i] embeds the induced prefix and that every
    /// image has the given colour.
    auto verify_prefix(const GenericStructure & g, ColouringOracle & oracle, const std::vector<int> & prefix,
            const std::vector<int> & images, int colour) -> bool;

    /// Copies the enumeration prefix 0..target-1 into one colour class, step by
    /// step, with backtracking; falls back to an obstruction and a counter-run.
    auto monochromatic_construct(GenericStructure & g, ColouringOracle & oracle, const ConstructConfig & config)
        -> ConstructResult;

    struct DichotomyResult
    {
        /// red, blue, or -1 when neither side finished.
        int side = -1;
        ConstructResult run;
        /// The type inside whose typeset the blue copy was built.
        std::optional<TypeDescriptor> blue_inside;
    };

    /// Requires the age of all finite graphs.
    auto rado_dichotomy(GenericStructure & g, ColouringOracle & oracle, int target, Budgets budgets = {},
            std::uint64_t seed = 0) -> DichotomyResult;

    struct WeakRun
    {
        ConstructResult run;
        /// `missing` embedded into the colour class it is assumed to avoid.
        bool audit_failed = false;
        int audits = 0;
        std::vector<int> audit_witness;
    };

    /// Builds a copy in colour 1 - missing_colour while auditing that
    /// `missing` never embeds into colour missing_colour.
    auto weak_indivisibility_run(GenericStructure & g, ColouringOracle & oracle, const FinStructure & missing,
            int missing_colour, int target, Budgets budgets = {}, std::uint64_t seed = 0) -> WeakRun;
}
