#pragma once

#include "fftsim/cost_model.hpp"
#include "fftsim/net_sim.hpp"
#include "fftsim/pipeline.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fftsim {

// Everything the CLI can set, either from a config file or --set overrides.
struct ExperimentConfig {
    int n = 256;
    int n1 = 0;  // 0 = pick the most square split that the node count divides
    int n2 = 0;
    int k = 4;
    int p = 5;
    double alpha = 1.0;
    double beta = 0.001;
    unsigned long long seed = 1;
    Regime regime = Regime::min_rounds;
    int segments = 0;  // 0 = auto-tune the re-encode pipeline depth

    // sweep grid; empty lists fall back to the scalar fields above
    std::vector<int> sweep_k;
    std::vector<int> sweep_pk;  // parity node counts (p - k)
    std::vector<double> sweep_alpha;
    std::vector<double> sweep_beta;
    long long sweep_scale = 0;  // when > 0, each sweep point uses n = scale * k^2

    bool operator==(const ExperimentConfig&) const = default;
};

// key=value lines, '#' comments; unknown keys are an error.
ExperimentConfig parse_config(const std::string& text);
void apply_setting(ExperimentConfig& cfg, const std::string& key_value);
std::string serialize_config(const ExperimentConfig& cfg);

const std::string& csv_header();

// Derive the n1 x n2 grid for a config (honoring explicit n1/n2) and check
// the run is buildable; throws invalid_argument otherwise.
DftPlan plan_from_config(const ExperimentConfig& cfg);

// Deterministic input for a given length and seed.
std::vector<cplx> experiment_signal(int n, unsigned long long seed);

// Analytic cost table for the configured geometry.
int cmd_bounds(const ExperimentConfig& cfg, std::ostream& out);

// One protected + one plain run under the same fault scenario (faults on
// nodes the plain run doesn't have are dropped from it). Human-readable
// report to `out`; one CSV row (with header) to `csv` when non-null.
// Returns 0, 2 when the protected run is unrecoverable, or 3 when an
// output misses its accuracy bar.
int cmd_run(const ExperimentConfig& cfg, const std::vector<FaultEvent>& faults, std::ostream& out,
            std::ostream* csv);

// Fault-free grid sweep over k x parity x alpha x beta; unbuildable points
// are reported to `out` and skipped. CSV rows to `csv` (or `out` if null).
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream* csv);

} // namespace fftsim
