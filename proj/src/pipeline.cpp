#include "fftsim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fftsim {

namespace {

enum StageIdx {
    kEncode1 = 0,
    kRearrange = 1,
    kRowFft = 2,
    kTranspose = 3,
    kDecode1 = 4,
    kTwiddle = 5,
    kEncode2 = 6,
    kColFft = 7,
    kDecode2 = 8,
};

constexpr int kAlive = std::numeric_limits<int>::max();

std::string ckey(const std::string& pfx, int dst, int src) {
    return pfx + std::to_string(dst) + "_" + std::to_string(src);
}

struct FaultTable {
    std::vector<int> erase_idx;               // first stage the node is gone
    std::vector<std::vector<double>> delays;  // [node][stage]
};

FaultTable digest_faults(const std::vector<FaultEvent>& faults, int n_nodes) {
    FaultTable t;
    t.erase_idx.assign(n_nodes, kAlive);
    t.delays.assign(n_nodes, std::vector<double>(pipeline_stages().size(), 0.0));
    for (const auto& ev : faults) {
        int si = stage_index(ev.stage);
        if (ev.node < 0 || ev.node >= n_nodes)
            throw std::invalid_argument("fault names node " + std::to_string(ev.node) +
                                        " but the run has " + std::to_string(n_nodes) + " nodes");
        if (ev.kind == FaultEvent::Kind::erase)
            t.erase_idx[ev.node] = std::min(t.erase_idx[ev.node], si);
        else
            t.delays[ev.node][si] += ev.delay;
    }
    return t;
}

double cum_delay(const FaultTable& t, int node, int through_stage) {
    double d = 0;
    for (int s = 0; s <= through_stage; s++) d += t.delays[node][s];
    return d;
}

std::set<NodeId> erased_at(const FaultTable& t, int stage) {
    std::set<NodeId> out;
    for (int v = 0; v < (int)t.erase_idx.size(); v++)
        if (t.erase_idx[v] <= stage) out.insert(v);
    return out;
}

std::string join_ids(const std::vector<int>& ids) {
    std::ostringstream os;
    for (size_t i = 0; i < ids.size(); i++) os << (i ? "," : "") << ids[i];
    return os.str();
}

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

PipelineResult abort_run(PipelineResult res, const std::string& reason) {
    res.recoverable = false;
    res.failure_reason = reason;
    res.output.clear();
    res.comm_time = res.ledger.time(res.params);
    return res;
}

void log_stragglers(const FaultTable& ft, std::vector<std::string>& log) {
    for (int v = 0; v < (int)ft.delays.size(); v++)
        for (size_t s = 0; s < ft.delays[v].size(); s++)
            if (ft.delays[v][s] > 0)
                log.push_back("node " + std::to_string(v) + " straggles at " +
                              pipeline_stages()[s] + " (+" + std::to_string(ft.delays[v][s]) +
                              ")");
}

std::vector<cplx> probe_signal(int n, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    auto u = [&] { return (rng() >> 11) * (1.0 / 9007199254740992.0); };
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(u(), u());
    return x;
}

}  // namespace

const std::vector<std::string>& pipeline_stages() {
    static const std::vector<std::string> names = {"encode1", "rearrange", "rowfft",
                                                   "transpose", "decode1", "twiddle",
                                                   "encode2", "colfft",  "decode2"};
    return names;
}

int stage_index(const std::string& stage) {
    const auto& names = pipeline_stages();
    for (int i = 0; i < (int)names.size(); i++)
        if (names[i] == stage) return i;
    throw std::invalid_argument("unknown stage name '" + stage + "'");
}

PipelineResult run_uncoded(const std::vector<cplx>& x, const DftPlan& plan,
                           const std::vector<FaultEvent>& faults, Regime regime,
                           const CostParams& params) {
    PipelineResult res;
    res.plan = plan;
    res.params = params;
    if ((int)x.size() != plan.n)
        throw std::invalid_argument("input length does not match the plan");
    const int k = plan.k;
    const int rows = plan.n1 / k;  // row-block height
    const int cols = plan.n2 / k;  // column-slice width
    FaultTable ft = digest_faults(faults, k);
    log_stragglers(ft, res.recovery_log);

    int first_erase = kAlive, first_node = -1;
    for (int v = 0; v < k; v++)
        if (ft.erase_idx[v] < first_erase) { first_erase = ft.erase_idx[v]; first_node = v; }
    auto dead_abort = [&](const char* where) {
        return abort_run(std::move(res), "node " + std::to_string(first_node) + " erased at " +
                                             pipeline_stages()[first_erase] +
                                             "; no redundancy, stopping at " + where);
    };

    NodeStore store;
    std::vector<NodeId> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    ComplexMatrix X = vector_to_input_matrix(x, plan);

    // rearrange: node v owns column slice v; row block j belongs to node j
    if (first_erase <= kRearrange) return dead_abort("rearrange");
    for (int v = 0; v < k; v++) {
        ComplexMatrix xs = submatrix(X, 0, v * cols, plan.n1, cols);
        for (int j = 0; j < k; j++)
            store.put(v, ckey("u", j, v), submatrix(xs, j * rows, 0, rows, cols));
    }
    run_schedule(store, all_to_all(ids, "u", "rearrange", regime), {}, res.ledger);
    for (int j = 0; j < k; j++) {
        ComplexMatrix xr(rows, plan.n2);
        for (int v = 0; v < k; v++) paste(xr, 0, v * cols, store.take(j, ckey("u", j, v)));
        store.put(j, "y", std::move(xr));
    }

    if (first_erase <= kRowFft) return dead_abort("rowfft");
    for (int j = 0; j < k; j++) {
        ComplexMatrix y = store.take(j, "y");
        dft_rows_inplace(y);
        store.put(j, "y", std::move(y));
    }

    if (first_erase <= kTranspose) return dead_abort("transpose");
    for (int a = 0; a < k; a++) {
        ComplexMatrix y = store.take(a, "y");
        for (int b = 0; b < k; b++)
            store.put(a, ckey("t", b, a), submatrix(y, 0, b * cols, rows, cols));
    }
    run_schedule(store, all_to_all(ids, "t", "transpose", regime), {}, res.ledger);
    for (int b = 0; b < k; b++) {
        ComplexMatrix w(plan.n1, cols);
        for (int a = 0; a < k; a++) paste(w, a * rows, 0, store.take(b, ckey("t", b, a)));
        store.put(b, "w", std::move(w));
    }

    if (first_erase <= kTwiddle) return dead_abort("twiddle");
    for (int b = 0; b < k; b++) {
        ComplexMatrix w = store.take(b, "w");
        twiddle_block_inplace(w, plan.n, b * cols);
        store.put(b, "w", std::move(w));
    }

    if (first_erase <= kColFft) return dead_abort("colfft");
    for (int b = 0; b < k; b++) {
        ComplexMatrix w = store.take(b, "w");
        dft_cols_inplace(w);
        store.put(b, "w", std::move(w));
    }

    if (first_erase != kAlive) return dead_abort("output collection");
    ComplexMatrix Z(plan.n1, plan.n2);
    for (int b = 0; b < k; b++) paste(Z, 0, b * cols, store.get(b, "w"));
    res.output = output_matrix_to_vector(Z, plan);
    res.comm_time = res.ledger.time(params);
    return res;
}

PipelineResult run_coded(const std::vector<cplx>& x, const DftPlan& plan, const MdsCodeSpec& code1,
                         const MdsCodeSpec& code2, const std::vector<FaultEvent>& faults,
                         Regime regime, const CostParams& params, int segments) {
    PipelineResult res;
    res.plan = plan;
    res.params = params;
    const int k = plan.k, p = plan.p, r = p - k;
    if ((int)x.size() != plan.n)
        throw std::invalid_argument("input length does not match the plan");
    if (!is_pow2(k)) throw std::invalid_argument("data node count must be a power of two");
    if (r > 0 && (!is_pow2(r) || k % r != 0))
        throw std::invalid_argument(
            "parity node count must be a power of two dividing the data node count");
    if (code1.k != k || code1.p != p || code2.k != k || code2.p != p)
        throw std::invalid_argument("code shape does not match the plan");
    const int rows = plan.n1 / k;
    const int cols = plan.n2 / k;

    FaultTable ft = digest_faults(faults, p);
    log_stragglers(ft, res.recovery_log);

    // Row blocks live on the k data nodes until the rearrange fans them out;
    // losing a data node before that point loses plain data.
    for (int v = 0; v < k; v++)
        if (ft.erase_idx[v] <= kRearrange)
            return abort_run(std::move(res),
                             "data node " + std::to_string(v) + " erased at " +
                                 pipeline_stages()[ft.erase_idx[v]] +
                                 "; its row blocks were never distributed");

    NodeStore store;
    std::vector<NodeId> all(p);
    std::iota(all.begin(), all.end(), 0);
    ComplexMatrix X = vector_to_input_matrix(x, plan);

    // encode1 (local): each data node encodes the k row blocks of its column
    // slice into p, one per eventual holder
    for (int v = 0; v < k; v++) {
        ComplexMatrix xs = submatrix(X, 0, v * cols, plan.n1, cols);
        std::vector<ComplexMatrix> blocks;
        for (int i = 0; i < k; i++) blocks.push_back(submatrix(xs, i * rows, 0, rows, cols));
        std::vector<ComplexMatrix> enc = encode_blocks(code1, blocks);
        for (int j = 0; j < p; j++) store.put(v, ckey("re", j, v), std::move(enc[j]));
    }

    run_schedule(store, rearrange_rotation(all, k, "re", "rearrange"), erased_at(ft, kRearrange),
                 res.ledger);
    for (int j = 0; j < p; j++) {
        if (ft.erase_idx[j] <= kRowFft) continue;
        ComplexMatrix xr(rows, plan.n2);
        for (int v = 0; v < k; v++) paste(xr, 0, v * cols, store.take(j, ckey("re", j, v)));
        store.put(j, "y", std::move(xr));
    }

    for (int j = 0; j < p; j++) {
        if (ft.erase_idx[j] <= kRowFft) continue;
        ComplexMatrix y = store.take(j, "y");
        dft_rows_inplace(y);
        store.put(j, "y", std::move(y));
    }

    // pick the k fastest finishers of the row pass; ties go to lower ids
    std::vector<int> cand;
    for (int j = 0; j < p; j++)
        if (ft.erase_idx[j] > kRowFft) cand.push_back(j);
    if ((int)cand.size() < k)
        return abort_run(std::move(res), "only " + std::to_string(cand.size()) + " of " +
                                             std::to_string(p) + " nodes finished the row pass; " +
                                             std::to_string(k) + " needed");
    std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
        double da = cum_delay(ft, a, kRowFft), db = cum_delay(ft, b, kRowFft);
        if (da != db) return da < db;
        return a < b;
    });
    std::vector<int> sel(cand.begin(), cand.begin() + k);
    std::sort(sel.begin(), sel.end());
    std::vector<int> excluded;
    for (int j : cand)
        if (!std::binary_search(sel.begin(), sel.end(), j)) excluded.push_back(j);
    std::sort(excluded.begin(), excluded.end());
    res.recovery_log.push_back("selected " + join_ids(sel) + " after the row pass" +
                               (excluded.empty() ? "" : "; idle: " + join_ids(excluded)));

    // From here to the re-encode, each selected node's block exists nowhere
    // else; losing one in that window ends the run at the stage it hits.
    int fatal_stage = kAlive, fatal_node = -1;
    for (int v : sel)
        if (ft.erase_idx[v] < fatal_stage) { fatal_stage = ft.erase_idx[v]; fatal_node = v; }
    auto fatal_abort = [&] {
        return abort_run(std::move(res), "selected node " + std::to_string(fatal_node) +
                                             " erased at " + pipeline_stages()[fatal_stage] +
                                             "; its committed block is unrecoverable");
    };

    if (fatal_stage <= kTranspose) return fatal_abort();
    for (int a = 0; a < k; a++) {
        ComplexMatrix y = store.take(sel[a], "y");
        for (int b = 0; b < k; b++)
            store.put(sel[a], ckey("tr", b, a), submatrix(y, 0, b * cols, rows, cols));
    }
    run_schedule(store, all_to_all(sel, "tr", "transpose", regime), erased_at(ft, kTranspose),
                 res.ledger);
    for (int b = 0; b < k; b++) {
        ComplexMatrix w(plan.n1, cols);
        for (int a = 0; a < k; a++) paste(w, a * rows, 0, store.take(sel[b], ckey("tr", b, a)));
        store.put(sel[b], "w", std::move(w));
    }

    // decode1: survivor sel[b] now stacks encoded row blocks sel[0..k) of
    // column slice b; skip entirely when they are the systematic ones
    if (fatal_stage <= kDecode1) return fatal_abort();
    bool systematic1 = true;
    for (int a = 0; a < k; a++) systematic1 = systematic1 && sel[a] == a;
    if (!systematic1) {
        for (int b = 0; b < k; b++) {
            ComplexMatrix w = store.take(sel[b], "w");
            std::vector<ComplexMatrix> enc;
            for (int a = 0; a < k; a++) enc.push_back(submatrix(w, a * rows, 0, rows, cols));
            std::vector<ComplexMatrix> dec = decode_from_surviving(code1, sel, enc);
            for (int i = 0; i < k; i++) paste(w, i * rows, 0, dec[i]);
            store.put(sel[b], "w", std::move(w));
        }
        res.recovery_log.push_back("decoded row blocks from holders " + join_ids(sel));
    } else {
        res.recovery_log.push_back("row blocks all systematic; no decode needed");
    }

    if (fatal_stage <= kTwiddle) return fatal_abort();
    for (int b = 0; b < k; b++) {
        ComplexMatrix w = store.take(sel[b], "w");
        twiddle_block_inplace(w, plan.n, b * cols);
        store.put(sel[b], "w", std::move(w));
    }

    // encode2: column-block parities stream to the idle nodes; the column
    // transform is linear, so parity formed here still decodes afterwards
    if (fatal_stage <= kEncode2) return fatal_abort();
    if (!excluded.empty()) {
        std::vector<std::string> dkeys(k, "w");
        auto parity_coeffs = [&](const std::vector<int>& hosts) {
            ComplexMatrix c((int)hosts.size(), k);
            for (int i = 0; i < (int)hosts.size(); i++)
                for (int b = 0; b < k; b++) c(i, b) = code2.gen(b, k + hosts[i]);
            return c;
        };
        // hosts are positions within `excluded`: excluded[i] carries encoded
        // column block k+i
        std::vector<int> host_pos((int)excluded.size());
        std::iota(host_pos.begin(), host_pos.end(), 0);
        int e = (int)excluded.size();
        if (is_pow2(e) && k % e == 0) {
            std::vector<std::string> okeys(e, "wpar");
            run_multi_reduce(store, sel, dkeys, excluded, okeys, parity_coeffs(host_pos), segments,
                             erased_at(ft, kEncode2), res.ledger, "encode2", params);
        } else {
            // degraded host set that no longer tiles the group: one
            // accumulation tree per parity block
            for (int i = 0; i < e; i++)
                run_multi_reduce(store, sel, dkeys, {excluded[i]}, {"wpar"},
                                 parity_coeffs({host_pos[i]}), segments, erased_at(ft, kEncode2),
                                 res.ledger, "encode2", params);
        }
        res.recovery_log.push_back("re-encoded " + std::to_string(e) +
                                   " parity column blocks onto " + join_ids(excluded));
    }

    for (int b = 0; b < k; b++) {
        if (ft.erase_idx[sel[b]] <= kColFft) continue;
        ComplexMatrix w = store.take(sel[b], "w");
        dft_cols_inplace(w);
        store.put(sel[b], "w", std::move(w));
    }
    for (int v : excluded) {
        if (ft.erase_idx[v] <= kColFft || !store.has(v, "wpar")) continue;
        ComplexMatrix w = store.take(v, "wpar");
        dft_cols_inplace(w);
        store.put(v, "wpar", std::move(w));
    }

    // final selection: any k encoded column blocks whose holders are still
    // alive at collection time
    struct Cand2 {
        int block;
        int holder;
    };
    std::vector<Cand2> cand2;
    for (int b = 0; b < k; b++)
        if (ft.erase_idx[sel[b]] > kDecode2) cand2.push_back({b, sel[b]});
    for (int i = 0; i < (int)excluded.size(); i++)
        if (ft.erase_idx[excluded[i]] > kDecode2 && store.has(excluded[i], "wpar"))
            cand2.push_back({k + i, excluded[i]});
    if ((int)cand2.size() < k)
        return abort_run(std::move(res), "only " + std::to_string(cand2.size()) +
                                             " encoded column blocks survived to the final " +
                                             "decode; " + std::to_string(k) + " needed");
    std::stable_sort(cand2.begin(), cand2.end(), [&](const Cand2& a, const Cand2& b) {
        double da = cum_delay(ft, a.holder, kColFft), db = cum_delay(ft, b.holder, kColFft);
        if (da != db) return da < db;
        return a.holder < b.holder;
    });
    cand2.resize(k);
    std::sort(cand2.begin(), cand2.end(),
              [](const Cand2& a, const Cand2& b) { return a.block < b.block; });

    std::vector<int> surv2;
    std::vector<ComplexMatrix> blocks2;
    for (const auto& c : cand2) {
        surv2.push_back(c.block);
        blocks2.push_back(store.get(c.holder, c.block < k ? "w" : "wpar"));
    }
    bool systematic2 = true;
    for (int m = 0; m < k; m++) systematic2 = systematic2 && surv2[m] == m;
    std::vector<ComplexMatrix> zblocks =
        systematic2 ? std::move(blocks2) : decode_from_surviving(code2, surv2, blocks2);
    res.recovery_log.push_back(systematic2
                                   ? "column blocks all systematic; no decode needed"
                                   : "decoded column blocks from encoded set " + join_ids(surv2));

    ComplexMatrix Z(plan.n1, plan.n2);
    for (int b = 0; b < k; b++) paste(Z, 0, b * cols, zblocks[b]);
    res.output = output_matrix_to_vector(Z, plan);
    res.comm_time = res.ledger.time(params);
    return res;
}

std::vector<StageCost> stage_cost_report(const PipelineResult& r) {
    std::vector<StageCost> out;
    for (const auto& round : r.ledger.rounds) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const StageCost& s) { return s.stage == round.stage; });
        if (it == out.end()) {
            out.push_back({round.stage, 0, 0});
            it = out.end() - 1;
        }
        it->c1 += 1;
        it->c2 += round.max_symbols;
    }
    return out;
}

OverheadComparison overhead_comparison(int k, int p, int n, const CostParams& params,
                                       int segments) {
    int n1 = (int)std::llround(std::sqrt((double)n));
    if (n1 * n1 != n || n1 % k != 0)
        throw std::invalid_argument(
            "overhead comparison needs n a perfect square with k | sqrt(n)");
    DftPlan plan = make_plan(n, n1, n1, k, p);
    MdsCodeSpec code = make_systematic_mds(p, k);
    std::vector<cplx> x = probe_signal(n, 1234);
    PipelineResult res = run_coded(x, plan, code, code, {}, Regime::min_rounds, params, segments);
    if (!res.recoverable) throw std::logic_error("fault-free comparison run failed");
    OverheadComparison oc;
    oc.transpose_time = res.ledger.time("transpose", params);
    oc.encode2_time = res.ledger.time("encode2", params);
    oc.predicted = crossover_check(p, k);
    oc.boundary = std::abs((double)(p - k) - crossover_threshold(k)) < 1e-12;
    oc.measured = oc.encode2_time < oc.transpose_time;
    return oc;
}

double hoisted_recombine_witness(int n1, int n2, const MdsCodeSpec& code,
                                 const std::vector<int>& surviving, unsigned seed) {
    int k = code.k;
    if ((int)surviving.size() != k)
        throw std::invalid_argument("surviving set must have k entries");
    if (n2 % k != 0) throw std::invalid_argument("k must divide n2");
    int q = n2 / k;
    ComplexMatrix gs(k, k);
    for (int i = 0; i < k; i++)
        for (int m = 0; m < k; m++) gs(i, m) = code.gen(i, surviving[m]);
    ComplexMatrix mix = kron(gs, ComplexMatrix::identity(q));
    ComplexMatrix unmix = solve(mix, ComplexMatrix::identity(n2));

    std::mt19937_64 rng(seed);
    auto u = [&] { return (rng() >> 11) * (1.0 / 9007199254740992.0); };
    ComplexMatrix X(n1, n2);
    for (int i = 0; i < n1; i++)
        for (int j = 0; j < n2; j++) X(i, j) = cplx(u(), u());

    ComplexMatrix f1 = dft_matrix(n1), f2 = dft_matrix(n2);
    ComplexMatrix t = twiddle_matrix(n1, n2);
    ComplexMatrix y = matmul(X, f2);

    ComplexMatrix straight = matmul(f1, hadamard(t, y));
    ComplexMatrix hoisted = matmul(matmul(f1, hadamard(t, matmul(y, mix))), unmix);

    double worst = 0;
    for (int i = 0; i < n1; i++)
        for (int j = 0; j < n2; j++)
            worst = std::max(worst, std::abs(hoisted(i, j) - straight(i, j)));
    return worst;
}

} // namespace fftsim
