#pragma once

#include <fraisse/age.hh>

#include <string>
#include <vector>

namespace fraisse
{
    /// All finite graphs.
    auto rado_age() -> AgePtr;

    /// Graphs without a complete subgraph on n vertices.
    auto clique_free_age(int n) -> AgePtr;

    /// Two edge-disjoint triangle-free graphs R and B.
    auto twtriangle_age() -> AgePtr;

    /// Graph edges G with blue and red 3-uniform hypergraphs. Forbidden: a
    /// graph edge inside a blue hyperedge, a blue and a red hyperedge on one
    /// triple, every copy of M that lacks one of N's two red hyperedges, and
    /// every structure carrying the blue five-vertex K.
    auto strmelmeld_age() -> AgePtr;

    /// One unary relation R and nothing forbidden.
    auto unary_age() -> AgePtr;

    /// The irreducible 3-uniform hypergraph on five vertices with four hyperedges.
    auto five_vertex_k() -> FinStructure;

    /// Names accepted by `named_age`.
    auto fixture_names() -> std::vector<std::string>;

    /// rado, k3free, k4free, k5free, twtriangle, strmelmeld, unary, or
    /// knfree-K-N for the uniform rule with parameters K and N.
    auto named_age(const std::string & name) -> AgePtr;
}
