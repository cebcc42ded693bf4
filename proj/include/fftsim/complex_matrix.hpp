#pragma once

#include <complex>
#include <vector>

namespace fftsim {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Small and dumb on purpose: the simulator
// moves blocks of these around, it does not need BLAS.
struct ComplexMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> data;

    ComplexMatrix() = default;
    ComplexMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

    cplx& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const cplx& operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    bool same_shape(const ComplexMatrix& o) const { return rows == o.rows && cols == o.cols; }

    static ComplexMatrix identity(int n);
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix transpose(const ComplexMatrix& a);

// a += s * b (elementwise, shapes must match)
void add_scaled(ComplexMatrix& a, cplx s, const ComplexMatrix& b);
void scale(ComplexMatrix& a, cplx s);

// Copy out rows [r0, r0+nr) x cols [c0, c0+nc).
ComplexMatrix submatrix(const ComplexMatrix& a, int r0, int c0, int nr, int nc);
// Paste b into a at (r0, c0).
void paste(ComplexMatrix& a, int r0, int c0, const ComplexMatrix& b);

// Solve A X = B with partial-pivot Gaussian elimination; A is square.
ComplexMatrix solve(ComplexMatrix a, ComplexMatrix b);
cplx determinant(ComplexMatrix a);

double frobenius(const ComplexMatrix& a);
// ||got - want||_F / ||want||_F (absolute norm if want is ~zero)
double relative_error(const ComplexMatrix& got, const ComplexMatrix& want);

} // namespace fftsim
