#ifndef PBFORGE_GUARD_PBFORGE_ENCODINGS_HH
#define PBFORGE_GUARD_PBFORGE_ENCODINGS_HH

#include <pbforge/opb.hh>

#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pbforge
{
    /// Simple undirected graph on vertices 0..n-1. Edges are stored with u < v, sorted, no duplicates.
    struct Graph
    {
        std::size_t n = 0;
        std::vector<std::pair<std::size_t, std::size_t>> edges;

        /// Canonicalizes and deduplicates. Throws InvalidInstance on self-loops or out-of-range ends.
        static auto from_edges(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) -> Graph;

        [[nodiscard]] auto adjacency() const -> std::vector<std::vector<bool>>;

        auto operator==(const Graph &) const -> bool = default;
    };

    struct IndependentSet
    {
        Graph graph;
        std::size_t k;
    };

    struct Langford
    {
        std::size_t n;
    };

    struct Schur
    {
        std::size_t n;
        std::size_t colors;
    };

    struct VanDerWaerden
    {
        std::size_t n;
        std::size_t colors;
        std::size_t ap_length;
    };

    struct Ramsey
    {
        std::size_t n;
        std::size_t s;
        std::size_t t;
    };

    struct EquitableColoring
    {
        Graph graph;
        std::size_t k;
    };

    struct PigeonHole
    {
        std::size_t pigeons;
        std::size_t holes;
    };

    struct BinPacking
    {
        std::vector<std::size_t> sizes;
        std::size_t bins;
        std::size_t capacity;
    };

    using ProblemInstance = std::variant<IndependentSet, Langford, Schur, VanDerWaerden, Ramsey, EquitableColoring, PigeonHole, BinPacking>;

    /// Native witness, one integer per position:
    ///  - IndependentSet: the chosen vertices (any length).
    ///  - Langford: the 2n sequence values, each in 1..n.
    ///  - Schur, VanDerWaerden: a color in 0..colors-1 for each of 1..n.
    ///  - Ramsey: 0/1 per edge of K_n in lexicographic order, 1 meaning the s-side ("red").
    ///  - EquitableColoring: a color in 0..k-1 per vertex.
    ///  - PigeonHole: a hole in 0..holes-1 per pigeon.
    ///  - BinPacking: a bin in 0..bins-1 per item.
    using Witness = std::vector<long long>;

    auto is_prime(std::size_t p) -> bool;
    /// Nonzero quadratic residues mod p, sorted.
    auto quadratic_residues(std::size_t p) -> std::vector<std::size_t>;
    /// Throws InvalidInstance unless p is prime and p = 1 mod 4.
    auto paley_graph(std::size_t p) -> Graph;
    /// Complete multipartite graph with the given part sizes, parts numbered consecutively.
    auto complete_multipartite(const std::vector<std::size_t> & parts) -> Graph;

    auto encode_independent_set(const Graph & g, std::size_t k) -> Formula;
    auto encode_langford(std::size_t n) -> Formula;
    auto encode_schur(std::size_t n, std::size_t colors) -> Formula;
    auto encode_vdw(std::size_t n, std::size_t colors, std::size_t ap_length) -> Formula;
    auto encode_ramsey(std::size_t n, std::size_t s, std::size_t t) -> Formula;
    auto encode_equitable(const Graph & g, std::size_t k) -> Formula;
    auto encode_php(std::size_t pigeons, std::size_t holes) -> Formula;
    auto encode_binpacking(const std::vector<std::size_t> & sizes, std::size_t bins, std::size_t capacity) -> Formula;

    /// Dispatches to the family encoder. Throws InvalidInstance on bad parameters.
    auto encode(const ProblemInstance & instance) -> Formula;

    /// Checks the combinatorial property directly, without going through the encoding.
    /// Throws InvalidWitness if the witness has the wrong shape for the instance.
    auto verify_witness(const ProblemInstance & instance, const Witness & witness) -> bool;

    /// Reads a native witness back out of a satisfying valuation of encode(instance).
    /// The result has the right shape but is only meaningful if the valuation satisfies the encoding.
    auto decode_witness(const ProblemInstance & instance, const Valuation & valuation) -> Witness;

    /// Short family name plus parameters, e.g. "ramsey n=6 s=3 t=3".
    auto describe(const ProblemInstance & instance) -> std::string;
}

#endif
