#pragma once

#include "fftsim/cost_model.hpp"
#include "fftsim/dft.hpp"
#include "fftsim/mds_code.hpp"
#include "fftsim/net_sim.hpp"

#include <string>
#include <vector>

namespace fftsim {

// Canonical stage names for fault injection, in execution order:
// encode1, rearrange, rowfft, transpose, decode1, twiddle, encode2, colfft,
// decode2. The plain pipeline runs the subset {rearrange, rowfft, transpose,
// twiddle, colfft}. An erasure at stage S removes the node from S onward.
const std::vector<std::string>& pipeline_stages();
int stage_index(const std::string& stage);

struct StageCost {
    std::string stage;
    long long c1 = 0;
    long long c2 = 0;
};

struct PipelineResult {
    bool recoverable = true;
    std::string failure_reason;
    std::vector<cplx> output;  // empty when unrecoverable
    CostLedger ledger;
    std::vector<std::string> recovery_log;
    DftPlan plan;
    CostParams params;
    double comm_time = 0.0;
};

// Distributed transform over plan.k nodes with no redundancy: any erasure
// makes the run unrecoverable; stragglers only get logged.
PipelineResult run_uncoded(const std::vector<cplx>& x, const DftPlan& plan,
                           const std::vector<FaultEvent>& faults, Regime regime,
                           const CostParams& params);

// Protected run over plan.p nodes: code1 guards the row-block distribution,
// code2 the column blocks going into the column transform. Requires plan.k a
// power of two; with r = p - k > 0 parity nodes, r must divide k and be a
// power of two. segments <= 0 auto-tunes the re-encode pipeline depth.
PipelineResult run_coded(const std::vector<cplx>& x, const DftPlan& plan, const MdsCodeSpec& code1,
                         const MdsCodeSpec& code2, const std::vector<FaultEvent>& faults,
                         Regime regime, const CostParams& params, int segments = 0);

// Per-stage communication totals in ledger order.
std::vector<StageCost> stage_cost_report(const PipelineResult& r);

struct OverheadComparison {
    double transpose_time = 0;
    double encode2_time = 0;
    bool predicted = false;  // parity count below half the transpose rounds
    bool measured = false;   // re-encode measured cheaper than the transpose
    bool boundary = false;   // parity count exactly at the threshold
};

// Fault-free protected run on a square n1 = n2 = sqrt(n) grid; compares the
// measured ledger cost of the column-block re-encode against the transpose.
OverheadComparison overhead_comparison(int k, int p, int n, const CostParams& params,
                                       int segments = 0);

// How far F (T .* (X F (G_S kron I))) (G_S kron I)^{-1} lands from
// F (T .* (X F)) on a seeded X: recombining encoded column blocks cannot be
// postponed past the twiddle, so decode has to happen before it.
double hoisted_recombine_witness(int n1, int n2, const MdsCodeSpec& code,
                                 const std::vector<int>& surviving, unsigned seed);

} // namespace fftsim
