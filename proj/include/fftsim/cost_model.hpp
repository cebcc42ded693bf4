#pragma once

#include <string>
#include <vector>

namespace fftsim {

// Linear latency/bandwidth model: a round costs alpha, a symbol costs beta,
// and a schedule of C1 rounds moving at most C2 symbols on the critical path
// costs C1*alpha + C2*beta.
struct CostParams {
    double alpha = 1.0;
    double beta = 1.0;
};

struct LedgerRound {
    std::string stage;
    long long max_symbols = 0;    // largest single transfer this round
    long long total_symbols = 0;  // sum over all transfers this round
    int n_transfers = 0;
};

// Round-by-round record of everything a simulation sent. C1 counts rounds,
// C2 sums the per-round maxima (the critical-path symbol count under the
// one-port assumption).
struct CostLedger {
    std::vector<LedgerRound> rounds;

    long long c1() const { return static_cast<long long>(rounds.size()); }
    long long c2() const;
    long long c1(const std::string& stage) const;
    long long c2(const std::string& stage) const;
    long long total_volume() const;
    double time(const CostParams& p) const;
    double time(const std::string& stage, const CostParams& p) const;
};

struct CostBound {
    enum class Kind { lower, upper, exact };
    double c1 = 0;
    double c2 = 0;
    Kind kind = Kind::exact;

    double time(const CostParams& p) const { return c1 * p.alpha + c2 * p.beta; }
};

enum class Regime { min_rounds, min_bandwidth };

// Complete exchange of n symbols per node among p nodes.
//   min_rounds:    ceil(log2 p) rounds, (n/2)*ceil(log2 p) symbols
//   min_bandwidth: p-1 rounds, (p-1)*n/p symbols
CostBound all_to_all_cost(int p, double n, Regime regime);

// The transpose step of the factorized transform: an all-to-all of n/k = N/k
// per node among the k data nodes in the round-minimal regime.
CostBound transpose_cost(int k, double n_total);

// Reduction of n symbols to one node among p nodes.
CostBound reduce_lower_bound(int p, double n);
CostBound reduce_upper_bound(int p, double n);
// Segmented-pipeline optimum with the segment count relaxed to a real:
// (sqrt(ceil(log2 p) * alpha) + sqrt(n * beta))^2.
double reduce_upper_time(int p, double n, const CostParams& params);

// r sources each delivering (multi-broadcast) or collecting (multi-reduce)
// n symbols across a group of p nodes.
CostBound multi_broadcast_lower_bound(int p, int r, double n);
CostBound multi_broadcast_upper_bound(int p, int r, double n);

// Cost attributed to the two re-encode points of the protected pipeline.
CostBound encoding_cost(int p, int k, double n_total);

// The protection pays for itself once the added parity count p-k drops
// below half the transpose round count: p - k < log2(k)/2.
double crossover_threshold(int k);
bool crossover_check(int p, int k);

// Smallest divisor s of n minimizing (ceil(log2 nodes) + s - 1)(alpha + n*beta/s):
// the segment count for pipelined tree collectives.
int tune_segments(int tree_nodes, long long n, const CostParams& params);

} // namespace fftsim
