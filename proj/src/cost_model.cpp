#include "fftsim/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fftsim {

namespace {

int ceil_log2(int x) {
    int l = 0;
    while ((1 << l) < x) l++;
    return l;
}

} // namespace

long long CostLedger::c2() const {
    long long s = 0;
    for (const auto& r : rounds) s += r.max_symbols;
    return s;
}

long long CostLedger::c1(const std::string& stage) const {
    long long s = 0;
    for (const auto& r : rounds)
        if (r.stage == stage) s++;
    return s;
}

long long CostLedger::c2(const std::string& stage) const {
    long long s = 0;
    for (const auto& r : rounds)
        if (r.stage == stage) s += r.max_symbols;
    return s;
}

long long CostLedger::total_volume() const {
    long long s = 0;
    for (const auto& r : rounds) s += r.total_symbols;
    return s;
}

double CostLedger::time(const CostParams& p) const {
    return static_cast<double>(c1()) * p.alpha + static_cast<double>(c2()) * p.beta;
}

double CostLedger::time(const std::string& stage, const CostParams& p) const {
    return static_cast<double>(c1(stage)) * p.alpha + static_cast<double>(c2(stage)) * p.beta;
}

CostBound all_to_all_cost(int p, double n, Regime regime) {
    if (p < 1) throw std::invalid_argument("all_to_all_cost: p < 1");
    if (p == 1) return {0, 0, CostBound::Kind::exact};
    if (regime == Regime::min_rounds) {
        double l = ceil_log2(p);
        return {l, n / 2.0 * l, CostBound::Kind::exact};
    }
    return {static_cast<double>(p - 1), (p - 1) * n / p, CostBound::Kind::exact};
}

CostBound transpose_cost(int k, double n_total) {
    if (k < 1) throw std::invalid_argument("transpose_cost: k < 1");
    if (k == 1) return {0, 0, CostBound::Kind::exact};
    double l = ceil_log2(k);
    return {l, n_total / (2.0 * k) * l, CostBound::Kind::exact};
}

CostBound reduce_lower_bound(int p, double n) {
    if (p <= 1) return {0, 0, CostBound::Kind::lower};
    return {static_cast<double>(ceil_log2(p)), n, CostBound::Kind::lower};
}

CostBound reduce_upper_bound(int p, double n) {
    if (p <= 1) return {0, 0, CostBound::Kind::upper};
    return {2.0 * ceil_log2(p), 2.0 * n, CostBound::Kind::upper};
}

double reduce_upper_time(int p, double n, const CostParams& params) {
    if (p <= 1) return 0.0;
    double a = std::sqrt(ceil_log2(p) * params.alpha);
    double b = std::sqrt(n * params.beta);
    return (a + b) * (a + b);
}

CostBound multi_broadcast_lower_bound(int p, int r, double n) {
    if (p < 1 || r < 0) throw std::invalid_argument("multi_broadcast_lower_bound: bad p or r");
    return {static_cast<double>(ceil_log2(p)), r * n, CostBound::Kind::lower};
}

CostBound multi_broadcast_upper_bound(int p, int r, double n) {
    CostBound low = multi_broadcast_lower_bound(p, r, n);
    return {2.0 * low.c1, 2.0 * low.c2, CostBound::Kind::upper};
}

CostBound encoding_cost(int p, int k, double n_total) {
    if (k < 1 || p < k) throw std::invalid_argument("encoding_cost: need 1 <= k <= p");
    double l = ceil_log2(k);
    return {2.0 * l, 2.0 * (p - k) * n_total / k, CostBound::Kind::upper};
}

double crossover_threshold(int k) { return std::log2(static_cast<double>(k)) / 2.0; }

bool crossover_check(int p, int k) { return static_cast<double>(p - k) < crossover_threshold(k); }

int tune_segments(int tree_nodes, long long n, const CostParams& params) {
    if (n < 1) throw std::invalid_argument("tune_segments: n < 1");
    int l = ceil_log2(std::max(tree_nodes, 1));
    int best = 1;
    double best_time = 0;
    bool first = true;
    for (long long s = 1; s <= n; s++) {
        if (n % s != 0) continue;
        double t = (l + s - 1.0) * (params.alpha + static_cast<double>(n) / s * params.beta);
        if (first || t < best_time - 1e-12) {
            best = static_cast<int>(s);
            best_time = t;
            first = false;
        }
    }
    return best;
}

} // namespace fftsim
