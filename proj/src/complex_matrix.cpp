#include "fftsim/complex_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace fftsim {

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; i++) m(i, i) = 1.0;
    return m;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dims differ");
    ComplexMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; i++) {
        for (int k = 0; k < a.cols; k++) {
            cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            const cplx* brow = &b.data[static_cast<size_t>(k) * b.cols];
            cplx* crow = &c.data[static_cast<size_t>(i) * c.cols];
            for (int j = 0; j < b.cols; j++) crow[j] += aik * brow[j];
        }
    }
    return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.rows * b.rows, a.cols * b.cols);
    for (int i = 0; i < a.rows; i++)
        for (int j = 0; j < a.cols; j++) {
            cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (int r = 0; r < b.rows; r++)
                for (int s = 0; s < b.cols; s++)
                    c(i * b.rows + r, j * b.cols + s) = aij * b(r, s);
        }
    return c;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
    ComplexMatrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; i++)
        for (int j = 0; j < a.cols; j++) t(j, i) = a(i, j);
    return t;
}

void add_scaled(ComplexMatrix& a, cplx s, const ComplexMatrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("add_scaled: shape mismatch");
    for (size_t i = 0; i < a.data.size(); i++) a.data[i] += s * b.data[i];
}

void scale(ComplexMatrix& a, cplx s) {
    for (auto& v : a.data) v *= s;
}

ComplexMatrix submatrix(const ComplexMatrix& a, int r0, int c0, int nr, int nc) {
    if (r0 < 0 || c0 < 0 || r0 + nr > a.rows || c0 + nc > a.cols)
        throw std::out_of_range("submatrix: block out of range");
    ComplexMatrix b(nr, nc);
    for (int i = 0; i < nr; i++)
        for (int j = 0; j < nc; j++) b(i, j) = a(r0 + i, c0 + j);
    return b;
}

void paste(ComplexMatrix& a, int r0, int c0, const ComplexMatrix& b) {
    if (r0 < 0 || c0 < 0 || r0 + b.rows > a.rows || c0 + b.cols > a.cols)
        throw std::out_of_range("paste: block out of range");
    for (int i = 0; i < b.rows; i++)
        for (int j = 0; j < b.cols; j++) a(r0 + i, c0 + j) = b(i, j);
}

ComplexMatrix solve(ComplexMatrix a, ComplexMatrix b) {
    if (a.rows != a.cols) throw std::invalid_argument("solve: A not square");
    if (a.rows != b.rows) throw std::invalid_argument("solve: rhs rows mismatch");
    int n = a.rows;
    for (int col = 0; col < n; col++) {
        int piv = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; r++) {
            double m = std::abs(a(r, col));
            if (m > best) { best = m; piv = r; }
        }
        if (best < 1e-300) throw std::runtime_error("solve: singular matrix");
        if (piv != col) {
            for (int j = col; j < n; j++) std::swap(a(col, j), a(piv, j));
            for (int j = 0; j < b.cols; j++) std::swap(b(col, j), b(piv, j));
        }
        cplx d = a(col, col);
        for (int r = col + 1; r < n; r++) {
            cplx f = a(r, col) / d;
            if (f == cplx{}) continue;
            a(r, col) = 0.0;
            for (int j = col + 1; j < n; j++) a(r, j) -= f * a(col, j);
            for (int j = 0; j < b.cols; j++) b(r, j) -= f * b(col, j);
        }
    }
    ComplexMatrix x(n, b.cols);
    for (int r = n - 1; r >= 0; r--) {
        for (int j = 0; j < b.cols; j++) {
            cplx s = b(r, j);
            for (int k = r + 1; k < n; k++) s -= a(r, k) * x(k, j);
            x(r, j) = s / a(r, r);
        }
    }
    return x;
}

cplx determinant(ComplexMatrix a) {
    if (a.rows != a.cols) throw std::invalid_argument("determinant: not square");
    int n = a.rows;
    cplx det = 1.0;
    for (int col = 0; col < n; col++) {
        int piv = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; r++) {
            double m = std::abs(a(r, col));
            if (m > best) { best = m; piv = r; }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (int j = col; j < n; j++) std::swap(a(col, j), a(piv, j));
            det = -det;
        }
        det *= a(col, col);
        cplx d = a(col, col);
        for (int r = col + 1; r < n; r++) {
            cplx f = a(r, col) / d;
            if (f == cplx{}) continue;
            for (int j = col + 1; j < n; j++) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

double frobenius(const ComplexMatrix& a) {
    double s = 0.0;
    for (const auto& v : a.data) s += std::norm(v);
    return std::sqrt(s);
}

double relative_error(const ComplexMatrix& got, const ComplexMatrix& want) {
    if (!got.same_shape(want)) return INFINITY;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < got.data.size(); i++) {
        num += std::norm(got.data[i] - want.data[i]);
        den += std::norm(want.data[i]);
    }
    num = std::sqrt(num);
    den = std::sqrt(den);
    if (den < 1e-300) return num;
    return num / den;
}

} // namespace fftsim
