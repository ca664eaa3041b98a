#pragma once
#include <utility>
#include <vector>

// Truncated q-expansion of prod_i eta(d_i z)^{e_i} where eta(z) =
// q^{1/24} prod (1 - q^n).  Requires sum d_i e_i divisible by 24 (holds for
// the eta products used in the tests).  Index n holds the coefficient of
// q^n.  Pure integer series arithmetic, independent of the symbol engine.
inline std::vector<long long> eta_product(const std::vector<std::pair<long, long>>& factors,
                                          long terms) {
    long weight_sum = 0;
    for (auto& [d, e] : factors) weight_sum += d * e;
    long shift = weight_sum / 24;
    std::vector<long long> f(terms + 1, 0);
    f[0] = 1;
    for (auto& [d, e] : factors)
        for (long rep = 0; rep < e; ++rep)
            for (long m = 1; m * d <= terms; ++m)
                for (long i = terms; i >= m * d; --i) f[i] -= f[i - m * d];
    std::vector<long long> out(terms + 1, 0);
    for (long n = shift; n <= terms; ++n) out[n] = f[n - shift];
    return out;
}
