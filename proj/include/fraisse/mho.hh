#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraisse
{
    class MhoError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    /// A finite model of the largeness game. Ground elements are 0..ground-1,
    /// ranks are the chain 0 < 1 < ... < ranks-1 and "infinite" reads as
    /// "more than threshold elements".
    struct MhoInstance
    {
        int ground = 0;
        int ranks = 1;
        int threshold = 0;
        /// below[x][y] holds when sort x is below sort y.
        std::vector<std::vector<bool>> below;
        /// Ascending ground elements of every sort.
        std::vector<std::vector<int>> sigma;
        std::vector<int> rho;
        std::vector<std::string> names;

        auto sorts() const -> int { return int(sigma.size()); }
        /// The maximum, or -1.
        auto maximum() const -> int;
        /// Sorts below x with the rank of x, x included.
        auto refinements(int x) const -> std::vector<int>;
        /// Sorts below x with rank r.
        auto restrictions(int x, int r) const -> std::vector<int>;
    };

    /// Builds an instance from covering pairs {lower, upper}; the order is
    /// their reflexive transitive closure.
    auto make_mho(int ground, int ranks, int threshold, const std::vector<std::pair<int, int>> & covers,
            std::vector<std::vector<int>> sigma, std::vector<int> rho) -> MhoInstance;

    struct MhoViolation
    {
        /// 0 for the order axioms or the size of a sort, 1..4 for the items.
        int item = 0;
        std::string detail;
    };

    auto validate_mho(const MhoInstance & inst) -> std::optional<MhoViolation>;

    struct Labelling
    {
        /// Membership of every ground element in the partition class.
        std::vector<bool> subset;
        /// Label of every sort, or -1.
        std::vector<int> label;
        /// The rank a sort was labelled for, or -1 for label 0 and unlabelled sorts.
        std::vector<int> reason;
        int rounds = 0;

        auto labelled(int x) const -> bool { return label[x] >= 0; }
        /// The labelled sorts.
        auto witness() const -> std::vector<int>;
    };

    /// Membership vector of an element list.
    auto subset_of(const MhoInstance & inst, const std::vector<int> & elements) -> std::vector<bool>;

    /// Fixed point of the labelling recursion. Each round labels the sorts
    /// that qualify against the labels of the previous round.
    auto compute_labelling(const MhoInstance & inst, const std::vector<bool> & s) -> Labelling;

    /// For every refinement Y of x some refinement Z of Y has all of its
    /// r-restrictions labelled.
    auto big_phi(const MhoInstance & inst, const Labelling & l, int x, int r) -> bool;
    auto big_phi(const MhoInstance & inst, const Labelling & l, int x) -> bool;

    /// Some refinement Y of x has, below every refinement Z of Y, an
    /// r-restriction in w.
    auto small_phi(const MhoInstance & inst, const std::vector<bool> & w, int x, int r) -> bool;
    /// small_phi for every rank up to that of x.
    auto small_phi(const MhoInstance & inst, const std::vector<bool> & w, int x) -> bool;

    /// Every refinement Y of x has an r-restriction in z for every rank r up to that of x.
    auto gamma(const MhoInstance & inst, const std::vector<bool> & z, int x) -> bool;

    enum class Side
    {
        Subset,
        Complement
    };

    struct Largeness
    {
        bool computed = false;
        Side side = Side::Subset;
        std::vector<int> witness;
        /// The large class as membership vector.
        std::vector<bool> large;
        bool phi_verified = false;
        /// Every witness member meets the large class in more than threshold elements.
        bool intersection_verified = false;
        std::vector<std::string> log;
    };

    /// The subset is large with the labelled sorts as witness when the
    /// maximum is labelled, otherwise the complement is large with the
    /// unlabelled sorts. The returned witness is re-checked member-wise.
    auto largeness_dichotomy(const MhoInstance & inst, const std::vector<bool> & s) -> Largeness;

    struct ConstructiveSet
    {
        Side side = Side::Subset;
        /// The refinement chosen for every witness member, in witness order.
        std::vector<int> seeds;
        /// Refinement closure of the seeds, ascending.
        std::vector<int> members;
        /// The seed chosen for the maximum.
        int root = -1;
        bool closed = false;
        bool intersections = false;
        bool gamma_holds = false;

        auto verified() const -> bool { return closed && intersections && gamma_holds; }
    };

    /// Requires a computed dichotomy for the same instance.
    auto constructive_set(const MhoInstance & inst, const Largeness & largeness) -> ConstructiveSet;

    struct MhoAudit
    {
        bool labelled_closure = true;
        bool rank_monotone = true;
        bool phi_implication = true;
        bool witness_phi = true;
        std::vector<std::string> failures;

        auto ok() const -> bool { return labelled_closure && rank_monotone && phi_implication && witness_phi; }
    };

    /// Exhaustive check of the labelling properties on one instance and subset.
    auto audit_mho(const MhoInstance & inst, const std::vector<bool> & s) -> MhoAudit;

    struct MhoShape
    {
        int max_sorts = 6;
        int max_ranks = 3;
        int max_ground = 8;
        int threshold = 0;
    };

    /// A random instance satisfying the four items. Draws that need more
    /// sorts than allowed to repair item iii are redrawn.
    auto random_mho(std::uint64_t seed, const MhoShape & shape = {}) -> MhoInstance;
}
