#include "lossdist/combinatorics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lossdist/errors.hpp"

namespace lossdist {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* where) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw numeric_error(std::string(where) + ": uint64 overflow");
    return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, const char* where) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw numeric_error(std::string(where) + ": uint64 overflow");
    return r;
}

// Emits every partition of `remaining` as an ascending composition extending
// the current stack; each partition is produced exactly once.
void ascending_partitions(int remaining, int min_val, std::vector<int>& stack,
                          std::vector<IntegerPartition>& out) {
    if (remaining == 0) {
        IntegerPartition p;
        p.parts.assign(stack.rbegin(), stack.rend());
        out.push_back(std::move(p));
        return;
    }
    for (int v = min_val; v <= remaining; ++v) {
        stack.push_back(v);
        ascending_partitions(remaining - v, v, stack, out);
        stack.pop_back();
    }
}

} // namespace

int IntegerPartition::size() const {
    return std::accumulate(parts.begin(), parts.end(), 0);
}

int IntegerPartition::length() const { return static_cast<int>(parts.size()); }

std::vector<std::pair<int, int>> IntegerPartition::multiplicities() const {
    std::vector<std::pair<int, int>> out;
    for (int part : parts) {
        if (!out.empty() && out.back().first == part)
            ++out.back().second;
        else
            out.emplace_back(part, 1);
    }
    return out;
}

std::vector<IntegerPartition> partitions_with_min_part(int k, int min_part) {
    std::vector<IntegerPartition> all;
    if (k <= 0 || k < min_part) return all;
    std::vector<int> stack;
    ascending_partitions(k, 1, stack, all);
    // Acceptance-rejection on the minimum part, then the documented order.
    std::vector<IntegerPartition> kept;
    for (auto& p : all)
        if (p.parts.back() >= min_part) kept.push_back(std::move(p));
    std::sort(kept.begin(), kept.end(),
              [](const IntegerPartition& a, const IntegerPartition& b) {
                  return a.parts < b.parts;
              });
    return kept;
}

std::uint64_t z_lambda(const IntegerPartition& p) {
    std::uint64_t z = 1;
    for (auto [part, mult] : p.multiplicities()) {
        for (int i = 0; i < mult; ++i)
            z = checked_mul(z, static_cast<std::uint64_t>(part), "z_lambda");
        for (int i = 2; i <= mult; ++i)
            z = checked_mul(z, static_cast<std::uint64_t>(i), "z_lambda");
    }
    return z;
}

StirlingTable::StirlingTable(int max_order) : max_order_(max_order) {
    if (max_order < 0) throw input_error("stirling_table: max_order must be >= 0");
    first_.resize(max_order + 1);
    second_.resize(max_order + 1);
    for (int l = 0; l <= max_order; ++l) {
        first_[l].assign(l + 1, 0);
        second_[l].assign(l + 1, 0);
    }
    first_[0][0] = 1;
    second_[0][0] = 1;
    for (int l = 1; l <= max_order; ++l) {
        for (int m = 1; m <= l; ++m) {
            // c(l,m) = c(l-1,m-1) + (l-1) c(l-1,m)
            std::uint64_t t = (m <= l - 1)
                ? checked_mul(static_cast<std::uint64_t>(l - 1), first_[l - 1][m],
                              "stirling_table(first kind)")
                : 0;
            first_[l][m] = checked_add(first_[l - 1][m - 1], t, "stirling_table(first kind)");
            // S(l,s) = S(l-1,s-1) + s S(l-1,s)
            std::uint64_t u = (m <= l - 1)
                ? checked_mul(static_cast<std::uint64_t>(m), second_[l - 1][m],
                              "stirling_table(second kind)")
                : 0;
            second_[l][m] = checked_add(second_[l - 1][m - 1], u, "stirling_table(second kind)");
        }
    }
}

std::uint64_t StirlingTable::first_kind(int l, int m) const {
    if (l < 0 || l > max_order_)
        throw input_error("stirling_table: row index out of range");
    if (m < 0 || m > l) return 0;
    return first_[l][m];
}

std::uint64_t StirlingTable::second_kind(int r, int s) const {
    if (r < 0 || r > max_order_)
        throw input_error("stirling_table: row index out of range");
    if (s < 0 || s > r) return 0;
    return second_[r][s];
}

SeriesCoefficients series_exp(const SeriesCoefficients& g) {
    if (g.empty() || g[0] != 0.0)
        throw input_error("series_exp: constant term must be 0");
    const int R = static_cast<int>(g.size()) - 1;
    SeriesCoefficients h(R + 1, 0.0);
    h[0] = 1.0;
    // h' = g' h termwise: n h_n = sum_{k=1}^{n} k g_k h_{n-k}
    for (int n = 1; n <= R; ++n) {
        double acc = 0.0;
        for (int k = 1; k <= n; ++k) acc += k * g[k] * h[n - k];
        h[n] = acc / n;
    }
    return h;
}

SeriesCoefficients series_log(const SeriesCoefficients& h) {
    if (h.empty() || h[0] != 1.0)
        throw input_error("series_log: constant term must be 1");
    const int R = static_cast<int>(h.size()) - 1;
    SeriesCoefficients g(R + 1, 0.0);
    for (int n = 1; n <= R; ++n) {
        double acc = 0.0;
        for (int k = 1; k < n; ++k) acc += k * g[k] * h[n - k];
        g[n] = h[n] - acc / n;
    }
    return g;
}

} // namespace lossdist
