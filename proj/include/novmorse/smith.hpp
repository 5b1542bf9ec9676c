#ifndef NOVMORSE_SMITH_HPP
#define NOVMORSE_SMITH_HPP

// Smith normal form over Z with arbitrary-precision entries; used for
// integral homology.  The matrices coming out of the cell complexes here are
// small, so the classical elimination with a smallest-pivot heuristic is
// entirely adequate.

#include <cstdlib>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace novmorse {

using BigInt = boost::multiprecision::cpp_int;

// diagonal of the Smith normal form: nonnegative, in divisibility order,
// without trailing zeros
inline std::vector<BigInt> smith_diagonal(std::vector<std::vector<BigInt>> m) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    std::vector<BigInt> diag;
    std::size_t t = 0;
    while (t < rows && t < cols) {
        // locate a nonzero entry of smallest magnitude in the submatrix
        std::size_t pr = t, pc = t;
        bool found = false;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j) {
                if (m[i][j] == 0) continue;
                if (!found || abs(m[i][j]) < abs(m[pr][pc])) {
                    pr = i;
                    pc = j;
                    found = true;
                }
            }
        if (!found) break;
        std::swap(m[t], m[pr]);
        for (std::size_t i = 0; i < rows; ++i) std::swap(m[i][t], m[i][pc]);

        bool clean = false;
        while (!clean) {
            clean = true;
            // clear column t
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (m[i][t] == 0) continue;
                BigInt q = m[i][t] / m[t][t];
                for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
                if (m[i][t] != 0) {
                    // remainder is smaller than the pivot: promote it
                    std::swap(m[t], m[i]);
                    clean = false;
                }
            }
            if (!clean) continue;
            // clear row t
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (m[t][j] == 0) continue;
                BigInt q = m[t][j] / m[t][t];
                for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
                if (m[t][j] != 0) {
                    for (std::size_t i = 0; i < rows; ++i) std::swap(m[i][t], m[i][j]);
                    clean = false;
                }
            }
            if (!clean) continue;
            // pivot must divide the rest of the submatrix
            for (std::size_t i = t + 1; i < rows && clean; ++i)
                for (std::size_t j = t + 1; j < cols && clean; ++j)
                    if (m[i][j] % m[t][t] != 0) {
                        for (std::size_t jj = t; jj < cols; ++jj) m[t][jj] += m[i][jj];
                        clean = false;
                    }
        }
        diag.push_back(abs(m[t][t]));
        ++t;
    }
    return diag;
}

inline std::size_t rank_from_smith(const std::vector<BigInt>& diag) {
    std::size_t r = 0;
    for (const auto& d : diag)
        if (d != 0) ++r;
    return r;
}

} // namespace novmorse

#endif
