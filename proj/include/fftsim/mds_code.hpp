#pragma once

#include "fftsim/complex_matrix.hpp"

#include <vector>

namespace fftsim {

// Systematic (k, p) erasure code over the complex numbers. gen is k x p of
// the form [I | parity]; encoded block j = sum_i gen(i, j) * data_i, so any
// k encoded blocks determine the data when the code is MDS.
struct MdsCodeSpec {
    int p = 0;
    int k = 0;
    ComplexMatrix gen;
};

// Vandermonde construction on the p-th roots of unity, normalized to
// systematic form. Every k x k minor is nonsingular.
MdsCodeSpec make_systematic_mds(int p, int k);

// p = k+1, single all-ones parity column.
MdsCodeSpec make_checksum_code(int k);

// Brute-force check that every k-subset of generator columns is invertible.
// Cost grows as C(p, k); meant for small p in tests.
bool verify_mds_exhaustive(const MdsCodeSpec& code, double tol = 1e-8);

// data.size() == k, all blocks same shape; returns p blocks. Systematic
// blocks are verbatim copies of the data blocks.
std::vector<ComplexMatrix> encode_blocks(const MdsCodeSpec& code,
                                         const std::vector<ComplexMatrix>& data);

// surviving: k distinct ascending encoded-block indices; blocks: the matching
// encoded blocks. Returns the k data blocks. All-systematic survivors decode
// by verbatim copy, anything else solves the k x k system.
std::vector<ComplexMatrix> decode_from_surviving(const MdsCodeSpec& code,
                                                 const std::vector<int>& surviving,
                                                 const std::vector<ComplexMatrix>& blocks);

} // namespace fftsim
