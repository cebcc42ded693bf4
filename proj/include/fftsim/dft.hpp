#pragma once

#include "fftsim/complex_matrix.hpp"

#include <vector>

namespace fftsim {

// Geometry of a factorized transform: length n = n1*n2 laid out as an
// n1 x n2 grid, run on p nodes of which k carry data blocks.
struct DftPlan {
    int n = 0;
    int n1 = 0;
    int n2 = 0;
    int k = 0;
    int p = 0;
};

// Requires n == n1*n2, k | n1, k | n2, 1 <= k <= p.
DftPlan make_plan(int n, int n1, int n2, int k, int p);

// Column-major fill: X(i1, i2) = x[i2*n1 + i1].
ComplexMatrix vector_to_input_matrix(const std::vector<cplx>& x, const DftPlan& plan);
// Row-major read: out[k1*n2 + k2] = Z(k1, k2).
std::vector<cplx> output_matrix_to_vector(const ComplexMatrix& z, const DftPlan& plan);

// O(n^2) transform straight from the definition; the reference oracle.
std::vector<cplx> dft_direct(const std::vector<cplx>& x);

// F[j][k] = w^(j*k), w = exp(-2*pi*i/n).
ComplexMatrix dft_matrix(int n);

// T[i][j] = w_N^(i*j) with N = n1*n2; the per-element factor that glues the
// row pass to the column pass.
ComplexMatrix twiddle_matrix(int n1, int n2);

ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b);

// Apply the twiddle factors in place to a block whose rows are global
// [0, m.rows) and whose columns start at col_offset in the full grid.
void twiddle_block_inplace(ComplexMatrix& m, int n_total, int col_offset);

// Row pass -> twiddle -> column pass, all as explicit matrix products.
// Independent of the fast kernels below; used as a mid-level oracle.
std::vector<cplx> cooley_tukey_reference(const std::vector<cplx>& x, const DftPlan& plan);

// How badly the twiddle fails to commute with a trailing column mix:
// max |A .* (B C) - (A .* B) C| for A the twiddle and seeded random B, C.
// Nonzero, which is why block recombination must happen before the twiddle.
double twiddle_order_witness(int n1, int n2, unsigned seed);

// In-place transforms of every row / every column. Radix-2 when the length
// is a power of two, direct matrix product otherwise.
void dft_rows_inplace(ComplexMatrix& m);
void dft_cols_inplace(ComplexMatrix& m);

} // namespace fftsim
