#include "fftsim/mds_code.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fftsim {

MdsCodeSpec make_systematic_mds(int p, int k) {
    if (k < 1 || p < k) throw std::invalid_argument("make_systematic_mds: need 1 <= k <= p");
    ComplexMatrix v(k, p);
    for (int i = 0; i < k; i++)
        for (int j = 0; j < p; j++)
            v(i, j) = std::polar(1.0, 2.0 * std::numbers::pi * ((static_cast<long long>(i) * j) % p) / p);
    // Normalize so the first k columns become the identity: gen = V_k^{-1} V.
    ComplexMatrix vk = submatrix(v, 0, 0, k, k);
    ComplexMatrix gen = solve(vk, v);
    for (int i = 0; i < k; i++)
        for (int j = 0; j < k; j++) gen(i, j) = (i == j) ? 1.0 : 0.0;
    return MdsCodeSpec{p, k, std::move(gen)};
}

MdsCodeSpec make_checksum_code(int k) {
    if (k < 1) throw std::invalid_argument("make_checksum_code: k < 1");
    ComplexMatrix gen(k, k + 1);
    for (int i = 0; i < k; i++) {
        gen(i, i) = 1.0;
        gen(i, k) = 1.0;
    }
    return MdsCodeSpec{k + 1, k, std::move(gen)};
}

bool verify_mds_exhaustive(const MdsCodeSpec& code, double tol) {
    int p = code.p, k = code.k;
    std::vector<int> pick(k);
    for (int i = 0; i < k; i++) pick[i] = i;
    while (true) {
        ComplexMatrix sub(k, k);
        for (int c = 0; c < k; c++)
            for (int r = 0; r < k; r++) sub(r, c) = code.gen(r, pick[c]);
        if (std::abs(determinant(sub)) < tol) return false;
        int i = k - 1;
        while (i >= 0 && pick[i] == p - k + i) i--;
        if (i < 0) break;
        pick[i]++;
        for (int j = i + 1; j < k; j++) pick[j] = pick[j - 1] + 1;
    }
    return true;
}

std::vector<ComplexMatrix> encode_blocks(const MdsCodeSpec& code,
                                         const std::vector<ComplexMatrix>& data) {
    if (static_cast<int>(data.size()) != code.k)
        throw std::invalid_argument("encode_blocks: need exactly k data blocks");
    for (const auto& d : data)
        if (!d.same_shape(data[0])) throw std::invalid_argument("encode_blocks: ragged blocks");
    std::vector<ComplexMatrix> out;
    out.reserve(code.p);
    for (int j = 0; j < code.k; j++) out.push_back(data[j]);
    for (int j = code.k; j < code.p; j++) {
        ComplexMatrix acc(data[0].rows, data[0].cols);
        for (int i = 0; i < code.k; i++) add_scaled(acc, code.gen(i, j), data[i]);
        out.push_back(std::move(acc));
    }
    return out;
}

std::vector<ComplexMatrix> decode_from_surviving(const MdsCodeSpec& code,
                                                 const std::vector<int>& surviving,
                                                 const std::vector<ComplexMatrix>& blocks) {
    int k = code.k;
    if (static_cast<int>(surviving.size()) != k || static_cast<int>(blocks.size()) != k)
        throw std::invalid_argument("decode_from_surviving: need exactly k blocks");
    for (int m = 0; m < k; m++) {
        if (surviving[m] < 0 || surviving[m] >= code.p)
            throw std::invalid_argument("decode_from_surviving: block index out of range");
        if (m > 0 && surviving[m] <= surviving[m - 1])
            throw std::invalid_argument("decode_from_surviving: indices must ascend");
        if (!blocks[m].same_shape(blocks[0]))
            throw std::invalid_argument("decode_from_surviving: ragged blocks");
    }

    bool all_systematic = true;
    for (int m = 0; m < k; m++)
        if (surviving[m] != m) { all_systematic = false; break; }
    if (all_systematic) return blocks;

    int rows = blocks[0].rows, cols = blocks[0].cols;
    ComplexMatrix a(k, k);
    ComplexMatrix rhs(k, rows * cols);
    for (int m = 0; m < k; m++) {
        for (int i = 0; i < k; i++) a(m, i) = code.gen(i, surviving[m]);
        for (int t = 0; t < rows * cols; t++) rhs(m, t) = blocks[m].data[t];
    }
    ComplexMatrix sol = solve(a, rhs);
    std::vector<ComplexMatrix> out(k, ComplexMatrix(rows, cols));
    for (int i = 0; i < k; i++)
        for (int t = 0; t < rows * cols; t++) out[i].data[t] = sol(i, t);
    return out;
}

} // namespace fftsim
