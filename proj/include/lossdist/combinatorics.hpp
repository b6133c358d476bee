#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace lossdist {

// Partition of a positive integer; parts kept in non-increasing order.
struct IntegerPartition {
    std::vector<int> parts;

    int size() const;    // sum of parts
    int length() const;  // number of parts

    // (part, multiplicity) pairs with parts decreasing.
    std::vector<std::pair<int, int>> multiplicities() const;
};

// All partitions of k whose smallest part is >= min_part, in lexicographic
// order of the non-increasing part lists. Degenerate input (k < min_part or
// k <= 0) yields an empty sequence.
std::vector<IntegerPartition> partitions_with_min_part(int k, int min_part);

// z_lambda = prod_j j^{m_j} m_j!, the centralizer order of a permutation with
// cycle type lambda. Exact uint64 arithmetic; overflow raises numeric_error.
std::uint64_t z_lambda(const IntegerPartition& p);

// Triangles of unsigned Stirling numbers up to row max_order, exact uint64
// arithmetic. Construction fails with numeric_error if any entry overflows.
class StirlingTable {
public:
    explicit StirlingTable(int max_order);

    int max_order() const { return max_order_; }

    // First kind c(l, m): permutations of l elements with m cycles.
    std::uint64_t first_kind(int l, int m) const;
    // Second kind S(r, s): partitions of an r-set into s blocks.
    std::uint64_t second_kind(int r, int s) const;

private:
    int max_order_;
    std::vector<std::vector<std::uint64_t>> first_;
    std::vector<std::vector<std::uint64_t>> second_;
};

// Coefficients a_0..a_R of a power series truncated at degree R = size() - 1.
using SeriesCoefficients = std::vector<double>;

// exp of a truncated series; requires g[0] == 0, returns h with h[0] == 1.
SeriesCoefficients series_exp(const SeriesCoefficients& g);

// log of a truncated series; requires h[0] == 1, returns g with g[0] == 0.
SeriesCoefficients series_log(const SeriesCoefficients& h);

} // namespace lossdist
