#pragma once

#include "fftsim/complex_matrix.hpp"
#include "fftsim/cost_model.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace fftsim {

using NodeId = int;

struct KeyMove {
    std::string src_key;
    std::string dst_key;
};

// One point-to-point message: all moves travel together in one round.
struct Transfer {
    NodeId src = -1;
    NodeId dst = -1;
    std::vector<KeyMove> moves;
    bool accumulate = false;  // add into (or create) dst_key instead of overwriting
};

using Round = std::vector<Transfer>;

struct RoundSchedule {
    std::string stage;
    std::vector<Round> rounds;
};

// Per-node keyed block storage.
class NodeStore {
public:
    void put(NodeId node, const std::string& key, ComplexMatrix m);
    bool has(NodeId node, const std::string& key) const;
    const ComplexMatrix& get(NodeId node, const std::string& key) const;
    ComplexMatrix take(NodeId node, const std::string& key);
    void drop(NodeId node, const std::string& key);
    void drop_node(NodeId node);
    std::vector<std::string> keys(NodeId node) const;

private:
    std::map<NodeId, std::map<std::string, ComplexMatrix>> data_;
};

struct FaultEvent {
    enum class Kind { erase, straggle };
    std::string stage;
    NodeId node = -1;
    Kind kind = Kind::erase;
    double delay = 0.0;
};

// One event per line, "stage,node,kind[,delay]"; '#' comments and blank
// lines are skipped. delay is required for straggle and forbidden for erase.
std::vector<FaultEvent> parse_fault_scenario(const std::string& text);

struct ScheduleStats {
    long long schedules_run = 0;
    long long schedules_validated = 0;
    void reset() { schedules_run = schedules_validated = 0; }
};
// Global tally of every schedule executed and every one that passed the
// one-port check (run_schedule refuses to run anything that fails it).
ScheduleStats& schedule_stats();

// Empty string if every node sends at most once and receives at most once
// per round and no transfer is a self-loop; otherwise a diagnostic.
std::string validate_one_port(const RoundSchedule& sched);

// Validate, then execute: transfers touching erased nodes are dropped,
// surviving transfers move (or accumulate) blocks, and each round that still
// carries traffic appends a ledger entry. A live transfer referencing a
// missing key is an internal error and throws.
void run_schedule(NodeStore& store, const RoundSchedule& sched, const std::set<NodeId>& erased,
                  CostLedger& ledger);

// ---- schedule builders -----------------------------------------------------
// Logical rank = index into `nodes`; keys use logical ranks, so the caller
// maps physical ids once. Block keys follow the pfx<dst>_<src> convention.

// nodes[v] starts with pfx<d>_<v> for every d; ends with pfx<v>_<s> for
// every s. ceil(log2 p) rounds of n/2 symbols per port.
RoundSchedule all_to_all_bruck(const std::vector<NodeId>& nodes, const std::string& pfx,
                               const std::string& stage);
// p-1 rounds of n/p symbols per port.
RoundSchedule all_to_all_pairwise(const std::vector<NodeId>& nodes, const std::string& pfx,
                                  const std::string& stage);
RoundSchedule all_to_all(const std::vector<NodeId>& nodes, const std::string& pfx,
                         const std::string& stage, Regime regime);

// The first n_senders of `receivers` each hold pfx<j>_<v> for every receiver
// rank j; after p-1 rotation rounds receiver j holds its chunk from every
// sender. Senders keep their own chunk in place.
RoundSchedule rearrange_rotation(const std::vector<NodeId>& receivers, int n_senders,
                                 const std::string& pfx, const std::string& stage);

// nodes[i] starts holding keys[i]; afterwards every node holds all of them.
// |nodes| must be a power of two. Recursive doubling.
RoundSchedule all_gather_rd(const std::vector<NodeId>& nodes,
                            const std::vector<std::string>& keys, const std::string& stage);

// nodes[0] holds pfx + "seg<k>" for k in [0, s); afterwards everyone does.
// |nodes| = 2^d; exactly d + s - 1 rounds, one segment per port per round.
RoundSchedule broadcast_pipelined(const std::vector<NodeId>& nodes, int s, const std::string& pfx,
                                  const std::string& stage);

// Same, but the root sits outside the group (group size 2^a): a + s rounds,
// i.e. ceil(log2(2^a + 1)) + s - 1.
RoundSchedule chain_broadcast(NodeId root, const std::vector<NodeId>& group, int s,
                              const std::string& pfx, const std::string& stage);

// Reverse a broadcast-shaped schedule into the matching accumulation: rounds
// reversed, transfers flipped, accumulate set. Every leaf contribution ends
// summed at the original root.
RoundSchedule reverse_schedule(const RoundSchedule& sched);

// Flatten m into s equal row-vector chunks / reassemble them.
std::vector<ComplexMatrix> split_segments(const ComplexMatrix& m, int s);
ComplexMatrix join_segments(const std::vector<ComplexMatrix>& segs, int rows, int cols);

// ---- composite collectives --------------------------------------------------
// Both require r | p with p/r and r powers of two (r = 1 allowed), and all
// group/source nodes alive; sinks may be erased. segments <= 0 auto-tunes.

// sources[i] (outside the group) holds msg_keys[i]; afterwards every group
// node holds every msg_keys[i].
void run_multi_broadcast(NodeStore& store, const std::vector<NodeId>& group,
                         const std::vector<NodeId>& sources,
                         const std::vector<std::string>& msg_keys, int segments,
                         const std::set<NodeId>& erased, CostLedger& ledger,
                         const std::string& stage, const CostParams& params);

// group[j] holds data_keys[j]; sinks[i] (outside the group) ends with
// out_keys[i] = sum_j coeffs(i, j) * data_j.
void run_multi_reduce(NodeStore& store, const std::vector<NodeId>& group,
                      const std::vector<std::string>& data_keys, const std::vector<NodeId>& sinks,
                      const std::vector<std::string>& out_keys, const ComplexMatrix& coeffs,
                      int segments, const std::set<NodeId>& erased, CostLedger& ledger,
                      const std::string& stage, const CostParams& params);

} // namespace fftsim
