#pragma once

// Test-side reference implementations. Deliberately naive: enumeration and
// direct summation only, so they stay independently checkable.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracles {

// Partition numbers p(0..n) via the pentagonal-number recurrence.
inline std::vector<long long> partition_numbers(int n) {
    std::vector<long long> p(n + 1, 0);
    p[0] = 1;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1;; ++j) {
            const int g1 = j * (3 * j - 1) / 2;
            const int g2 = j * (3 * j + 1) / 2;
            if (g1 > i && g2 > i) break;
            const long long s = (j % 2 == 1) ? 1 : -1;
            if (g1 <= i) p[i] += s * p[i - g1];
            if (g2 <= i) p[i] += s * p[i - g2];
        }
    }
    return p;
}

inline std::uint64_t factorial_u64(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

// All set partitions of {0..n-1}, each as a block list; blocks are sets of
// element indices. Enumerated by assigning each element to an existing block
// or a fresh one (restricted growth strings).
inline std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
    std::vector<std::vector<std::vector<int>>> out;
    std::vector<std::vector<int>> blocks;
    std::function<void(int)> rec = [&](int elem) {
        if (elem == n) {
            out.push_back(blocks);
            return;
        }
        // Index-based: deeper levels push and pop a fresh block, which can
        // reallocate the block list and would invalidate a range-for iterator.
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            blocks[bi].push_back(elem);
            rec(elem + 1);
            blocks[bi].pop_back();
        }
        blocks.push_back({elem});
        rec(elem + 1);
        blocks.pop_back();
    };
    rec(0);
    return out;
}

// Exact loss-count pmf of independent Bernoullis by direct convolution.
inline std::vector<double> bernoulli_pmf(const std::vector<double>& pd) {
    std::vector<double> p(pd.size() + 1, 0.0);
    p[0] = 1.0;
    std::size_t used = 0;
    for (double q : pd) {
        for (std::size_t k = used + 1; k-- > 0;) {
            p[k + 1] += p[k] * q;
            p[k] *= 1.0 - q;
        }
        ++used;
    }
    return p;
}

// Raw moments M_1..M_r of an integer-supported pmf.
inline std::vector<double> raw_moments(const std::vector<double>& pmf, int r) {
    std::vector<double> m(r, 0.0);
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        double kj = 1.0;
        for (int j = 0; j < r; ++j) {
            kj *= static_cast<double>(k);
            m[j] += kj * pmf[k];
        }
    }
    return m;
}

// Factorial cumulants kappa_1..kappa_R of a (possibly signed) measure given by
// masses on {0..kmax}: coefficients of log sum_k mass(k) (1+z)^k, extracted in
// extended precision. The measure is normalized by its total mass first.
inline std::vector<long double> factorial_cumulants(
    const std::function<long double(std::int64_t)>& mass, std::int64_t kmax, int R) {
    std::vector<long double> h(R + 1, 0.0L);
    for (std::int64_t k = 0; k <= kmax; ++k) {
        const long double m = mass(k);
        long double binom = 1.0L;  // C(k, j), becomes 0 for j > k and stays 0
        for (int j = 0; j <= R; ++j) {
            h[j] += m * binom;
            binom *= static_cast<long double>(k - j) / static_cast<long double>(j + 1);
        }
    }
    for (int j = R; j >= 0; --j) h[j] /= h[0];
    std::vector<long double> g(R + 1, 0.0L);
    for (int n = 1; n <= R; ++n) {
        long double acc = 0.0L;
        for (int k = 1; k < n; ++k) acc += static_cast<long double>(k) * g[k] * h[n - k];
        g[n] = h[n] - acc / static_cast<long double>(n);
    }
    long double fact = 1.0L;
    for (int n = 1; n <= R; ++n) {
        fact *= static_cast<long double>(n);
        g[n] *= fact;
    }
    return g;  // g[j] = kappa_j for j >= 1
}

// True if every block of tau is contained in a single block of sigma.
inline bool refines(const std::vector<std::vector<int>>& tau,
                    const std::vector<std::vector<int>>& sigma) {
    std::vector<int> owner(1024, -1);
    for (int bi = 0; bi < static_cast<int>(sigma.size()); ++bi)
        for (int e : sigma[bi]) owner[e] = bi;
    for (const auto& block : tau) {
        const int o = owner[block.front()];
        for (int e : block)
            if (owner[e] != o) return false;
    }
    return true;
}

// Compound-scheme coefficient oracle: the double sum over pairs of nested set
// partitions,
//   b_k = (1/k!) sum_{sigma} sum_{tau <= sigma} mu(tau, sigma)
//         prod_{D in tau} E[(Z)_{|D|}] prod_{B in sigma} p_{#tau-blocks in B},
// with mu(tau, sigma) = (-1)^{|tau|-|sigma|} prod_B (n_B - 1)! and the
// convention p_1 := 0. fm[j] holds the j-th falling factorial moment of the
// exposure law, fm[0] = 1.
inline double setpartition_bk(const std::vector<double>& pd,
                              const std::vector<double>& fm, int k) {
    const auto parts = set_partitions(k);
    std::vector<double> psum(k + 1, 0.0);
    for (int j = 2; j <= k; ++j)
        for (double p : pd) psum[j] += std::pow(p, j);
    long double total = 0.0L;
    for (const auto& sigma : parts) {
        std::vector<int> owner(k, -1);
        for (int bi = 0; bi < static_cast<int>(sigma.size()); ++bi)
            for (int e : sigma[bi]) owner[e] = bi;
        for (const auto& tau : parts) {
            if (!refines(tau, sigma)) continue;
            std::vector<int> count(sigma.size(), 0);
            long double w = 1.0L;
            for (const auto& block : tau) {
                ++count[owner[block.front()]];
                w *= fm[block.size()];
            }
            const int drop = static_cast<int>(tau.size() - sigma.size());
            if (drop % 2 != 0) w = -w;
            for (std::size_t bi = 0; bi < sigma.size(); ++bi) {
                w *= factorial_u64(count[bi] - 1);
                w *= psum[count[bi]];
            }
            total += w;
        }
    }
    return static_cast<double>(total / factorial_u64(k));
}

// pmf of the compound Poisson law CP(lam, Z) on {0..kmax} by direct
// convolution of e^{-lam} lam^N / N! Z^{*N}, truncated at N = nmax.
inline std::vector<double> compound_pmf_by_convolution(double lam,
                                                       const std::vector<double>& zpmf,
                                                       int kmax, int nmax) {
    std::vector<double> out(kmax + 1, 0.0);
    std::vector<double> zpow{1.0};
    double w = std::exp(-lam);
    for (int n = 0; n <= nmax; ++n) {
        for (std::size_t k = 0; k < zpow.size() && k <= static_cast<std::size_t>(kmax);
             ++k)
            out[k] += w * zpow[k];
        std::vector<double> next(zpow.size() + zpmf.size() - 1, 0.0);
        for (std::size_t a = 0; a < zpow.size(); ++a)
            for (std::size_t b = 0; b < zpmf.size(); ++b)
                next[a + b] += zpow[a] * zpmf[b];
        zpow = std::move(next);
        w *= lam / static_cast<double>(n + 1);
    }
    return out;
}

} // namespace oracles
