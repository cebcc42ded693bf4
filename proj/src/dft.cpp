#include "fftsim/dft.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fftsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(int x) { return x > 0 && (x & (x - 1)) == 0; }

// w[t] = exp(-2*pi*i*t/n) for t < n/2; each entry from polar, no running
// products, so later stages don't inherit rounding.
std::vector<cplx> half_roots(int n) {
    std::vector<cplx> w(n / 2);
    for (int t = 0; t < n / 2; t++) w[t] = std::polar(1.0, -kTwoPi * t / n);
    return w;
}

void fft_pow2(cplx* x, int n, const std::vector<cplx>& w) {
    for (int i = 1, j = 0; i < n; i++) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j |= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        int half = len >> 1;
        int stride = n / len;
        for (int s = 0; s < n; s += len)
            for (int j = 0; j < half; j++) {
                cplx u = x[s + j];
                cplx v = x[s + j + half] * w[static_cast<size_t>(j) * stride];
                x[s + j] = u + v;
                x[s + j + half] = u - v;
            }
    }
}

} // namespace

DftPlan make_plan(int n, int n1, int n2, int k, int p) {
    if (n1 < 1 || n2 < 1 || n < 1) throw std::invalid_argument("make_plan: sizes must be positive");
    if (static_cast<long long>(n1) * n2 != n) throw std::invalid_argument("make_plan: n != n1*n2");
    if (k < 1 || p < 1 || k > p) throw std::invalid_argument("make_plan: need 1 <= k <= p");
    if (n1 % k != 0 || n2 % k != 0) throw std::invalid_argument("make_plan: k must divide n1 and n2");
    return DftPlan{n, n1, n2, k, p};
}

ComplexMatrix vector_to_input_matrix(const std::vector<cplx>& x, const DftPlan& plan) {
    if (static_cast<int>(x.size()) != plan.n) throw std::invalid_argument("input length != plan.n");
    ComplexMatrix m(plan.n1, plan.n2);
    for (int i2 = 0; i2 < plan.n2; i2++)
        for (int i1 = 0; i1 < plan.n1; i1++) m(i1, i2) = x[static_cast<size_t>(i2) * plan.n1 + i1];
    return m;
}

std::vector<cplx> output_matrix_to_vector(const ComplexMatrix& z, const DftPlan& plan) {
    if (z.rows != plan.n1 || z.cols != plan.n2) throw std::invalid_argument("output shape mismatch");
    std::vector<cplx> out(plan.n);
    for (int k1 = 0; k1 < plan.n1; k1++)
        for (int k2 = 0; k2 < plan.n2; k2++) out[static_cast<size_t>(k1) * plan.n2 + k2] = z(k1, k2);
    return out;
}

std::vector<cplx> dft_direct(const std::vector<cplx>& x) {
    int n = static_cast<int>(x.size());
    std::vector<cplx> roots(n);
    for (int t = 0; t < n; t++) roots[t] = std::polar(1.0, -kTwoPi * t / n);
    std::vector<cplx> out(n);
    for (int k = 0; k < n; k++) {
        cplx acc = 0.0;
        for (int j = 0; j < n; j++) acc += x[j] * roots[(static_cast<long long>(j) * k) % n];
        out[k] = acc;
    }
    return out;
}

ComplexMatrix dft_matrix(int n) {
    std::vector<cplx> roots(n);
    for (int t = 0; t < n; t++) roots[t] = std::polar(1.0, -kTwoPi * t / n);
    ComplexMatrix f(n, n);
    for (int j = 0; j < n; j++)
        for (int k = 0; k < n; k++) f(j, k) = roots[(static_cast<long long>(j) * k) % n];
    return f;
}

ComplexMatrix twiddle_matrix(int n1, int n2) {
    int n = n1 * n2;
    ComplexMatrix t(n1, n2);
    for (int i = 0; i < n1; i++)
        for (int j = 0; j < n2; j++)
            t(i, j) = std::polar(1.0, -kTwoPi * ((static_cast<long long>(i) * j) % n) / n);
    return t;
}

ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("hadamard: shape mismatch");
    ComplexMatrix c = a;
    for (size_t i = 0; i < c.data.size(); i++) c.data[i] *= b.data[i];
    return c;
}

void twiddle_block_inplace(ComplexMatrix& m, int n_total, int col_offset) {
    for (int i = 0; i < m.rows; i++)
        for (int j = 0; j < m.cols; j++) {
            long long e = (static_cast<long long>(i) * (col_offset + j)) % n_total;
            m(i, j) *= std::polar(1.0, -kTwoPi * static_cast<double>(e) / n_total);
        }
}

std::vector<cplx> cooley_tukey_reference(const std::vector<cplx>& x, const DftPlan& plan) {
    ComplexMatrix m = vector_to_input_matrix(x, plan);
    ComplexMatrix y = matmul(m, dft_matrix(plan.n2));
    y = hadamard(twiddle_matrix(plan.n1, plan.n2), y);
    ComplexMatrix z = matmul(dft_matrix(plan.n1), y);
    return output_matrix_to_vector(z, plan);
}

double twiddle_order_witness(int n1, int n2, unsigned seed) {
    std::mt19937_64 rng(seed);
    auto u = [&] { return (rng() >> 11) * (1.0 / 9007199254740992.0); };
    ComplexMatrix a = twiddle_matrix(n1, n2);
    ComplexMatrix b(n1, n2), c(n2, n2);
    for (auto& v : b.data) v = cplx(u(), u());
    for (auto& v : c.data) v = cplx(u(), u());
    ComplexMatrix lhs = hadamard(a, matmul(b, c));
    ComplexMatrix rhs = matmul(hadamard(a, b), c);
    double worst = 0.0;
    for (size_t i = 0; i < lhs.data.size(); i++)
        worst = std::max(worst, std::abs(lhs.data[i] - rhs.data[i]));
    return worst;
}

void dft_rows_inplace(ComplexMatrix& m) {
    int n = m.cols;
    if (n <= 1) return;
    if (!is_pow2(n)) {
        m = matmul(m, dft_matrix(n));
        return;
    }
    auto w = half_roots(n);
    for (int r = 0; r < m.rows; r++) fft_pow2(&m.data[static_cast<size_t>(r) * n], n, w);
}

void dft_cols_inplace(ComplexMatrix& m) {
    int n = m.rows;
    int c = m.cols;
    if (n <= 1) return;
    if (!is_pow2(n)) {
        m = matmul(dft_matrix(n), m);
        return;
    }
    auto w = half_roots(n);
    for (int i = 1, j = 0; i < n; i++) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j |= bit;
        if (i < j)
            for (int t = 0; t < c; t++) std::swap(m(i, t), m(j, t));
    }
    // Butterflies pair whole rows, so the inner loop stays contiguous.
    for (int len = 2; len <= n; len <<= 1) {
        int half = len >> 1;
        int stride = n / len;
        for (int s = 0; s < n; s += len)
            for (int j = 0; j < half; j++) {
                cplx wj = w[static_cast<size_t>(j) * stride];
                cplx* a = &m.data[static_cast<size_t>(s + j) * c];
                cplx* b = &m.data[static_cast<size_t>(s + j + half) * c];
                for (int t = 0; t < c; t++) {
                    cplx u = a[t];
                    cplx v = b[t] * wj;
                    a[t] = u + v;
                    b[t] = u - v;
                }
            }
    }
}

} // namespace fftsim
