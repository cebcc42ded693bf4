#include "fftsim/net_sim.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fftsim {

namespace {

bool is_pow2(int x) { return x > 0 && (x & (x - 1)) == 0; }

int ceil_log2(int x) {
    int l = 0;
    while ((1 << l) < x) l++;
    return l;
}

std::string seg_key(const std::string& pfx, int k) { return pfx + "seg" + std::to_string(k); }

std::string chunk_key(const std::string& pfx, int dst, int src) {
    return pfx + std::to_string(dst) + "_" + std::to_string(src);
}

// Merge equally long parallel schedules over disjoint node sets round-by-round.
void merge_into(RoundSchedule& base, const RoundSchedule& add) {
    if (base.rounds.size() < add.rounds.size()) base.rounds.resize(add.rounds.size());
    for (size_t t = 0; t < add.rounds.size(); t++)
        base.rounds[t].insert(base.rounds[t].end(), add.rounds[t].begin(), add.rounds[t].end());
}

} // namespace

void NodeStore::put(NodeId node, const std::string& key, ComplexMatrix m) {
    data_[node][key] = std::move(m);
}

bool NodeStore::has(NodeId node, const std::string& key) const {
    auto it = data_.find(node);
    return it != data_.end() && it->second.count(key) > 0;
}

const ComplexMatrix& NodeStore::get(NodeId node, const std::string& key) const {
    auto it = data_.find(node);
    if (it != data_.end()) {
        auto jt = it->second.find(key);
        if (jt != it->second.end()) return jt->second;
    }
    throw std::logic_error("NodeStore: node " + std::to_string(node) + " lacks key " + key);
}

ComplexMatrix NodeStore::take(NodeId node, const std::string& key) {
    auto it = data_.find(node);
    if (it != data_.end()) {
        auto jt = it->second.find(key);
        if (jt != it->second.end()) {
            ComplexMatrix m = std::move(jt->second);
            it->second.erase(jt);
            return m;
        }
    }
    throw std::logic_error("NodeStore: node " + std::to_string(node) + " lacks key " + key);
}

void NodeStore::drop(NodeId node, const std::string& key) {
    auto it = data_.find(node);
    if (it != data_.end()) it->second.erase(key);
}

void NodeStore::drop_node(NodeId node) { data_.erase(node); }

std::vector<std::string> NodeStore::keys(NodeId node) const {
    std::vector<std::string> out;
    auto it = data_.find(node);
    if (it != data_.end())
        for (const auto& kv : it->second) out.push_back(kv.first);
    return out;
}

std::vector<FaultEvent> parse_fault_scenario(const std::string& text) {
    std::vector<FaultEvent> events;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line.erase(0, start);

        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) {
            size_t a = f.find_first_not_of(" \t");
            size_t b = f.find_last_not_of(" \t");
            fields.push_back(a == std::string::npos ? "" : f.substr(a, b - a + 1));
        }
        auto fail = [&](const std::string& why) {
            throw std::invalid_argument("fault scenario line " + std::to_string(lineno) + ": " + why);
        };
        if (fields.size() < 3) fail("expected stage,node,kind[,delay]");
        FaultEvent ev;
        ev.stage = fields[0];
        try {
            ev.node = std::stoi(fields[1]);
        } catch (...) {
            fail("bad node id '" + fields[1] + "'");
        }
        if (fields[2] == "erase") {
            ev.kind = FaultEvent::Kind::erase;
            if (fields.size() != 3) fail("erase takes no delay");
        } else if (fields[2] == "straggle") {
            ev.kind = FaultEvent::Kind::straggle;
            if (fields.size() != 4) fail("straggle needs a delay");
            try {
                ev.delay = std::stod(fields[3]);
            } catch (...) {
                fail("bad delay '" + fields[3] + "'");
            }
            if (ev.delay < 0) fail("negative delay");
        } else {
            fail("unknown kind '" + fields[2] + "'");
        }
        events.push_back(ev);
    }
    return events;
}

ScheduleStats& schedule_stats() {
    static ScheduleStats stats;
    return stats;
}

std::string validate_one_port(const RoundSchedule& sched) {
    for (size_t t = 0; t < sched.rounds.size(); t++) {
        std::map<NodeId, int> sends, recvs;
        for (const auto& tr : sched.rounds[t]) {
            if (tr.src == tr.dst)
                return "round " + std::to_string(t) + ": self transfer at node " + std::to_string(tr.src);
            if (tr.moves.empty())
                return "round " + std::to_string(t) + ": empty transfer " + std::to_string(tr.src) +
                       "->" + std::to_string(tr.dst);
            if (++sends[tr.src] > 1)
                return "round " + std::to_string(t) + ": node " + std::to_string(tr.src) +
                       " sends more than once";
            if (++recvs[tr.dst] > 1)
                return "round " + std::to_string(t) + ": node " + std::to_string(tr.dst) +
                       " receives more than once";
        }
    }
    return "";
}

void run_schedule(NodeStore& store, const RoundSchedule& sched, const std::set<NodeId>& erased,
                  CostLedger& ledger) {
    schedule_stats().schedules_run++;
    std::string err = validate_one_port(sched);
    if (!err.empty()) throw std::logic_error("one-port violation in " + sched.stage + ": " + err);
    schedule_stats().schedules_validated++;

    for (const auto& round : sched.rounds) {
        LedgerRound lr;
        lr.stage = sched.stage;
        for (const auto& tr : round) {
            if (erased.count(tr.src) || erased.count(tr.dst)) continue;
            long long symbols = 0;
            for (const auto& mv : tr.moves) {
                const ComplexMatrix& src = store.get(tr.src, mv.src_key);
                symbols += static_cast<long long>(src.data.size());
                if (tr.accumulate && store.has(tr.dst, mv.dst_key)) {
                    ComplexMatrix dst = store.take(tr.dst, mv.dst_key);
                    add_scaled(dst, 1.0, src);
                    store.put(tr.dst, mv.dst_key, std::move(dst));
                } else {
                    store.put(tr.dst, mv.dst_key, src);
                }
            }
            lr.max_symbols = std::max(lr.max_symbols, symbols);
            lr.total_symbols += symbols;
            lr.n_transfers++;
        }
        if (lr.n_transfers > 0) ledger.rounds.push_back(std::move(lr));
    }
}

RoundSchedule all_to_all_bruck(const std::vector<NodeId>& nodes, const std::string& pfx,
                               const std::string& stage) {
    int p = static_cast<int>(nodes.size());
    RoundSchedule sched{stage, {}};
    if (p <= 1) return sched;
    int phases = ceil_log2(p);
    // loc[d][s]: logical rank currently holding the block headed to d from s.
    std::vector<std::vector<int>> loc(p, std::vector<int>(p));
    for (int d = 0; d < p; d++)
        for (int s = 0; s < p; s++) loc[d][s] = s;
    for (int t = 0; t < phases; t++) {
        Round round;
        std::vector<std::vector<KeyMove>> outgoing(p);
        for (int d = 0; d < p; d++)
            for (int s = 0; s < p; s++) {
                int v = loc[d][s];
                if ((((d - v) % p + p) % p) & (1 << t)) {
                    std::string key = chunk_key(pfx, d, s);
                    outgoing[v].push_back({key, key});
                    loc[d][s] = (v + (1 << t)) % p;
                }
            }
        for (int v = 0; v < p; v++)
            if (!outgoing[v].empty())
                round.push_back({nodes[v], nodes[(v + (1 << t)) % p], std::move(outgoing[v]), false});
        sched.rounds.push_back(std::move(round));
    }
    for (int d = 0; d < p; d++)
        for (int s = 0; s < p; s++)
            if (loc[d][s] != d) throw std::logic_error("bruck: block not delivered");
    return sched;
}

RoundSchedule all_to_all_pairwise(const std::vector<NodeId>& nodes, const std::string& pfx,
                                  const std::string& stage) {
    int p = static_cast<int>(nodes.size());
    RoundSchedule sched{stage, {}};
    for (int k = 1; k < p; k++) {
        Round round;
        for (int v = 0; v < p; v++) {
            int d = (v + k) % p;
            std::string key = chunk_key(pfx, d, v);
            round.push_back({nodes[v], nodes[d], {{key, key}}, false});
        }
        sched.rounds.push_back(std::move(round));
    }
    return sched;
}

RoundSchedule all_to_all(const std::vector<NodeId>& nodes, const std::string& pfx,
                         const std::string& stage, Regime regime) {
    return regime == Regime::min_rounds ? all_to_all_bruck(nodes, pfx, stage)
                                        : all_to_all_pairwise(nodes, pfx, stage);
}

RoundSchedule rearrange_rotation(const std::vector<NodeId>& receivers, int n_senders,
                                 const std::string& pfx, const std::string& stage) {
    int p = static_cast<int>(receivers.size());
    if (n_senders < 1 || n_senders > p)
        throw std::invalid_argument("rearrange_rotation: bad sender count");
    RoundSchedule sched{stage, {}};
    for (int t = 1; t < p; t++) {
        Round round;
        for (int v = 0; v < n_senders; v++) {
            int d = (v + t) % p;
            std::string key = chunk_key(pfx, d, v);
            round.push_back({receivers[v], receivers[d], {{key, key}}, false});
        }
        sched.rounds.push_back(std::move(round));
    }
    return sched;
}

RoundSchedule all_gather_rd(const std::vector<NodeId>& nodes, const std::vector<std::string>& keys,
                            const std::string& stage) {
    int r = static_cast<int>(nodes.size());
    if (keys.size() != nodes.size()) throw std::invalid_argument("all_gather_rd: keys/nodes mismatch");
    if (!is_pow2(r)) throw std::invalid_argument("all_gather_rd: node count must be a power of two");
    RoundSchedule sched{stage, {}};
    for (int t = 0; (1 << t) < r; t++) {
        Round round;
        for (int v = 0; v < r; v++) {
            int w = v ^ (1 << t);
            std::vector<KeyMove> moves;
            for (int u = 0; u < r; u++)
                if ((u >> t) == (v >> t)) moves.push_back({keys[u], keys[u]});
            round.push_back({nodes[v], nodes[w], std::move(moves), false});
        }
        sched.rounds.push_back(std::move(round));
    }
    return sched;
}

RoundSchedule broadcast_pipelined(const std::vector<NodeId>& nodes, int s, const std::string& pfx,
                                  const std::string& stage) {
    int p = static_cast<int>(nodes.size());
    if (!is_pow2(p)) throw std::invalid_argument("broadcast_pipelined: node count must be a power of two");
    if (s < 1) throw std::invalid_argument("broadcast_pipelined: segments < 1");
    RoundSchedule sched{stage, {}};
    if (p == 1) return sched;
    int d = ceil_log2(p);
    int last = s + d - 2;  // final round index
    sched.rounds.resize(last + 1);

    auto add = [&](int round, int src, int dst, int k) {
        sched.rounds[round].push_back({nodes[src], nodes[dst], {{seg_key(pfx, k), seg_key(pfx, k)}}, false});
    };

    // Pool depth pattern: for each payload depth c there are 2^(c-1) blocks of
    // d-1-c idle "guard" slots (depth d, no forwarding duty) followed by the
    // payload. Guards are exactly what lets one node's send windows tile
    // without overlap from one segment to the next.
    int m = p - 1 - d;
    std::vector<int> D;
    for (int c = 1; c <= d - 1; c++)
        for (int b = 0; b < (1 << (c - 1)); b++) {
            for (int g = 0; g < d - 1 - c; g++) D.push_back(d);
            D.push_back(c);
        }
    if (static_cast<int>(D.size()) != m) throw std::logic_error("broadcast: depth pattern size");
    auto depth_of = [&](int k, int i) { return D[((k - i) % m + m) % m]; };

    // Segments 0..s-2: the root hands segment k to a rotating leader; the
    // leader fans out into the pool by depth; depth-d pool nodes and the other
    // leaders get their copy in round k+d from the pool.
    for (int k = 0; k + 1 < s; k++) {
        int leader = 1 + (k % d);
        add(k, 0, leader, k);
        if (d == 1) continue;
        std::vector<std::vector<int>> by_depth(d + 1);
        for (int i = 0; i < m; i++) by_depth[depth_of(k, i)].push_back(d + 1 + i);
        std::vector<int> pool_senders;
        for (int c = 1; c <= d - 1; c++) {
            const auto& recv = by_depth[c];
            std::vector<int> snd = {leader};
            snd.insert(snd.end(), pool_senders.begin(), pool_senders.end());
            if (snd.size() != recv.size()) throw std::logic_error("broadcast: fan-out mismatch");
            for (size_t x = 0; x < recv.size(); x++) add(k + c, snd[x], recv[x], k);
            pool_senders.insert(pool_senders.end(), recv.begin(), recv.end());
        }
        std::vector<int> recv = by_depth[d];
        for (int l = 1; l <= d; l++)
            if (l != leader) recv.push_back(l);
        if (pool_senders.size() != recv.size()) throw std::logic_error("broadcast: final round mismatch");
        for (size_t x = 0; x < recv.size(); x++) add(k + d, pool_senders[x], recv[x], k);
    }

    // Last segment: every node has exactly one round in the tail window where
    // the steady-state pattern gives it nothing to receive (its slot belongs
    // to a segment past the end). Those free slots form a doubling tree.
    {
        int k = s - 1;
        std::vector<int> rv(p, -1);
        for (int L = 1; L <= d; L++) rv[L] = (s - 1) + (((L - 1) - (s - 1)) % d + d) % d;
        for (int i = 0; i < m; i++) {
            for (int kp = s - 1; kp <= last; kp++) {
                int c = depth_of(kp, i);
                if (kp + c <= last) {
                    rv[d + 1 + i] = kp + c;
                    break;
                }
            }
            if (rv[d + 1 + i] < 0) throw std::logic_error("broadcast: pool node has no tail slot");
        }
        std::vector<int> holders = {0};
        for (int j = 0; j < d; j++) {
            int t = s - 1 + j;
            std::vector<int> recv;
            for (int v = 1; v < p; v++)
                if (rv[v] == t) recv.push_back(v);
            if (recv.size() != holders.size()) throw std::logic_error("broadcast: tail slot count");
            for (size_t x = 0; x < recv.size(); x++) add(t, holders[x], recv[x], k);
            holders.insert(holders.end(), recv.begin(), recv.end());
            std::sort(holders.begin(), holders.end());
        }
    }
    return sched;
}

RoundSchedule chain_broadcast(NodeId root, const std::vector<NodeId>& group, int s,
                              const std::string& pfx, const std::string& stage) {
    int g = static_cast<int>(group.size());
    if (g < 1) throw std::invalid_argument("chain_broadcast: empty group");
    if (s < 1) throw std::invalid_argument("chain_broadcast: segments < 1");
    for (NodeId v : group)
        if (v == root) throw std::invalid_argument("chain_broadcast: root inside group");
    RoundSchedule sched{stage, {}};
    RoundSchedule inner = broadcast_pipelined(group, s, pfx, stage);
    int total = std::max(static_cast<int>(inner.rounds.size()) + 1, s);
    sched.rounds.resize(total);
    for (int k = 0; k < s; k++)
        sched.rounds[k].push_back({root, group[0], {{seg_key(pfx, k), seg_key(pfx, k)}}, false});
    for (size_t t = 0; t < inner.rounds.size(); t++)
        for (const auto& tr : inner.rounds[t]) sched.rounds[t + 1].push_back(tr);
    return sched;
}

RoundSchedule reverse_schedule(const RoundSchedule& sched) {
    RoundSchedule out{sched.stage, {}};
    out.rounds.resize(sched.rounds.size());
    size_t n = sched.rounds.size();
    for (size_t t = 0; t < n; t++)
        for (const auto& tr : sched.rounds[n - 1 - t]) {
            Transfer rev;
            rev.src = tr.dst;
            rev.dst = tr.src;
            rev.accumulate = true;
            for (const auto& mv : tr.moves) rev.moves.push_back({mv.dst_key, mv.src_key});
            out.rounds[t].push_back(std::move(rev));
        }
    return out;
}

std::vector<ComplexMatrix> split_segments(const ComplexMatrix& m, int s) {
    long long total = static_cast<long long>(m.data.size());
    if (s < 1 || total % s != 0) throw std::invalid_argument("split_segments: s must divide the size");
    long long chunk = total / s;
    std::vector<ComplexMatrix> out;
    out.reserve(s);
    for (int k = 0; k < s; k++) {
        ComplexMatrix seg(1, static_cast<int>(chunk));
        std::copy(m.data.begin() + k * chunk, m.data.begin() + (k + 1) * chunk, seg.data.begin());
        out.push_back(std::move(seg));
    }
    return out;
}

ComplexMatrix join_segments(const std::vector<ComplexMatrix>& segs, int rows, int cols) {
    ComplexMatrix out(rows, cols);
    size_t at = 0;
    for (const auto& seg : segs) {
        if (at + seg.data.size() > out.data.size()) throw std::invalid_argument("join_segments: overflow");
        std::copy(seg.data.begin(), seg.data.end(), out.data.begin() + at);
        at += seg.data.size();
    }
    if (at != out.data.size()) throw std::invalid_argument("join_segments: size mismatch");
    return out;
}

namespace {

void check_composite_args(int p, int r, const std::vector<NodeId>& group,
                          const std::vector<NodeId>& others, const std::set<NodeId>& erased,
                          const char* who) {
    if (r < 1 || p < 1 || p % r != 0 || !is_pow2(r) || !is_pow2(p / r))
        throw std::invalid_argument(std::string(who) + ": need r | p with r and p/r powers of two");
    for (NodeId v : group)
        if (erased.count(v)) throw std::invalid_argument(std::string(who) + ": erased group node");
    for (NodeId v : others)
        for (NodeId g : group)
            if (v == g) throw std::invalid_argument(std::string(who) + ": sink/source inside group");
}

} // namespace

void run_multi_broadcast(NodeStore& store, const std::vector<NodeId>& group,
                         const std::vector<NodeId>& sources, const std::vector<std::string>& msg_keys,
                         int segments, const std::set<NodeId>& erased, CostLedger& ledger,
                         const std::string& stage, const CostParams& params) {
    int p = static_cast<int>(group.size());
    int r = static_cast<int>(sources.size());
    if (msg_keys.size() != sources.size())
        throw std::invalid_argument("run_multi_broadcast: keys/sources mismatch");
    check_composite_args(p, r, group, sources, erased, "run_multi_broadcast");
    for (NodeId v : sources)
        if (erased.count(v)) throw std::invalid_argument("run_multi_broadcast: erased source");

    int q = p / r;
    long long n = static_cast<long long>(store.get(sources[0], msg_keys[0]).data.size());
    int rows = store.get(sources[0], msg_keys[0]).rows;
    int cols = store.get(sources[0], msg_keys[0]).cols;
    int s = segments > 0 ? segments : tune_segments(q + 1, n, params);
    if (n % s != 0) throw std::invalid_argument("run_multi_broadcast: segments must divide message size");

    // Phase 1: source i streams its message down its own subgroup.
    RoundSchedule phase1{stage, {}};
    for (int i = 0; i < r; i++) {
        std::string pfx = "mb" + std::to_string(i) + "_";
        auto segs = split_segments(store.get(sources[i], msg_keys[i]), s);
        for (int k = 0; k < s; k++) store.put(sources[i], seg_key(pfx, k), std::move(segs[k]));
        std::vector<NodeId> sub(group.begin() + static_cast<size_t>(i) * q,
                                group.begin() + static_cast<size_t>(i + 1) * q);
        merge_into(phase1, chain_broadcast(sources[i], sub, s, pfx, stage));
    }
    run_schedule(store, phase1, erased, ledger);
    for (int i = 0; i < r; i++) {
        std::string pfx = "mb" + std::to_string(i) + "_";
        for (int j = 0; j < q; j++) {
            NodeId v = group[static_cast<size_t>(i) * q + j];
            std::vector<ComplexMatrix> segs;
            for (int k = 0; k < s; k++) segs.push_back(store.take(v, seg_key(pfx, k)));
            store.put(v, "mb_m" + std::to_string(i), join_segments(segs, rows, cols));
        }
        for (int k = 0; k < s; k++) store.drop(sources[i], seg_key(pfx, k));
    }

    // Phase 2: across subgroups, position j of every subgroup gathers all r
    // messages by recursive doubling.
    if (r > 1) {
        RoundSchedule phase2{stage, {}};
        for (int j = 0; j < q; j++) {
            std::vector<NodeId> pos;
            std::vector<std::string> keys;
            for (int u = 0; u < r; u++) {
                pos.push_back(group[static_cast<size_t>(u) * q + j]);
                keys.push_back("mb_m" + std::to_string(u));
            }
            merge_into(phase2, all_gather_rd(pos, keys, stage));
        }
        run_schedule(store, phase2, erased, ledger);
    }
    for (NodeId v : group)
        for (int i = 0; i < r; i++) {
            store.put(v, msg_keys[i], store.take(v, "mb_m" + std::to_string(i)));
        }
}

void run_multi_reduce(NodeStore& store, const std::vector<NodeId>& group,
                      const std::vector<std::string>& data_keys, const std::vector<NodeId>& sinks,
                      const std::vector<std::string>& out_keys, const ComplexMatrix& coeffs,
                      int segments, const std::set<NodeId>& erased, CostLedger& ledger,
                      const std::string& stage, const CostParams& params) {
    int p = static_cast<int>(group.size());
    int r = static_cast<int>(sinks.size());
    if (data_keys.size() != group.size() || out_keys.size() != sinks.size())
        throw std::invalid_argument("run_multi_reduce: keys mismatch");
    if (coeffs.rows != r || coeffs.cols != p)
        throw std::invalid_argument("run_multi_reduce: coeffs must be r x p");
    check_composite_args(p, r, group, sinks, erased, "run_multi_reduce");

    int q = p / r;
    const ComplexMatrix& sample = store.get(group[0], data_keys[0]);
    int rows = sample.rows, cols = sample.cols;
    long long n = static_cast<long long>(sample.data.size());
    int s = segments > 0 ? segments : tune_segments(q + 1, n, params);
    if (n % s != 0) throw std::invalid_argument("run_multi_reduce: segments must divide message size");

    auto dkey = [](int j) { return "mr_d" + std::to_string(j); };
    for (int j = 0; j < p; j++) store.put(group[j], dkey(j), store.get(group[j], data_keys[j]));

    // Phase 1: within each position column {u*q + j : u}, gather all r inputs.
    if (r > 1) {
        RoundSchedule gather{stage, {}};
        for (int j = 0; j < q; j++) {
            std::vector<NodeId> pos;
            std::vector<std::string> keys;
            for (int u = 0; u < r; u++) {
                pos.push_back(group[static_cast<size_t>(u) * q + j]);
                keys.push_back(dkey(u * q + j));
            }
            merge_into(gather, all_gather_rd(pos, keys, stage));
        }
        run_schedule(store, gather, erased, ledger);
    }

    // Local combines: the node at position (i, j) owns sink i's partial over
    // its column.
    for (int i = 0; i < r; i++)
        for (int j = 0; j < q; j++) {
            NodeId v = group[static_cast<size_t>(i) * q + j];
            ComplexMatrix acc(rows, cols);
            for (int u = 0; u < r; u++) add_scaled(acc, coeffs(i, u * q + j), store.get(v, dkey(u * q + j)));
            auto segs = split_segments(acc, s);
            for (int k = 0; k < s; k++) store.put(v, seg_key("mr_", k), std::move(segs[k]));
        }
    for (int j = 0; j < p; j++)
        for (int u = 0; u < p; u++) store.drop(group[j], dkey(u));

    // Phase 2: each sink runs the reversal of a pipelined broadcast over its
    // subgroup, accumulating the q partials segment by segment.
    RoundSchedule reduce{stage, {}};
    for (int i = 0; i < r; i++) {
        std::vector<NodeId> sub(group.begin() + static_cast<size_t>(i) * q,
                                group.begin() + static_cast<size_t>(i + 1) * q);
        merge_into(reduce, reverse_schedule(chain_broadcast(sinks[i], sub, s, "mr_", stage)));
    }
    run_schedule(store, reduce, erased, ledger);

    for (int i = 0; i < r; i++) {
        bool have = !erased.count(sinks[i]);
        for (int k = 0; have && k < s; k++)
            if (!store.has(sinks[i], seg_key("mr_", k))) have = false;
        if (have) {
            std::vector<ComplexMatrix> segs;
            for (int k = 0; k < s; k++) segs.push_back(store.take(sinks[i], seg_key("mr_", k)));
            store.put(sinks[i], out_keys[i], join_segments(segs, rows, cols));
        }
    }
    for (NodeId v : group)
        for (int k = 0; k < s; k++) store.drop(v, seg_key("mr_", k));
}

} // namespace fftsim
