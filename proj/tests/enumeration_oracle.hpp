#pragma once

// Brute-force oracle for the occupancy-count law: walks all m^n ball
// assignments and tallies the number of urns at occupancy d. Test-only;
// anything the library computes cleverly is checked against this.

#include <vector>

#include <gmpxx.h>

namespace oracle {

inline std::vector<mpq_class> enumerate_pmf(long long n, long long m, int d) {
    std::vector<mpz_class> hits(m + 1, mpz_class(0));
    std::vector<int> assign(n, 0);  // assign[ball] = urn
    for (;;) {
        std::vector<int> occ(m, 0);
        for (int urn : assign) ++occ[urn];
        int k = 0;
        for (int o : occ)
            if (o == d) ++k;
        hits[k] += 1;
        long long pos = 0;
        while (pos < n && ++assign[pos] == m) assign[pos++] = 0;
        if (pos == n) break;
    }
    mpz_class total;
    mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(m),
                  static_cast<unsigned long>(n));
    std::vector<mpq_class> pmf(m + 1);
    for (long long k = 0; k <= m; ++k) {
        pmf[k] = mpq_class(hits[k], total);
        pmf[k].canonicalize();
    }
    return pmf;
}

inline std::pair<mpq_class, mpq_class> enumerate_moments(long long n, long long m,
                                                         int d) {
    const auto pmf = enumerate_pmf(n, m, d);
    mpq_class m1(0), m2(0);
    for (long long k = 0; k <= m; ++k) {
        m1 += mpq_class(static_cast<long>(k)) * pmf[k];
        m2 += mpq_class(static_cast<long>(k * k)) * pmf[k];
    }
    return {m1, m2 - m1 * m1};
}

}  // namespace oracle
