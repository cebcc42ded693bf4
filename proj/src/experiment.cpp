#include "fftsim/experiment.hpp"

#include "fftsim/dft.hpp"
#include "fftsim/mds_code.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fftsim {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) out.push_back(trim(cur));
    return out;
}

long long parse_ll(const std::string& s) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
    } catch (...) {
    }
    throw std::invalid_argument("bad integer '" + s + "'");
}

double parse_d(const std::string& s) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (...) {
    }
    throw std::invalid_argument("bad number '" + s + "'");
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& t : split_list(s)) out.push_back((int)parse_ll(t));
    return out;
}

std::vector<double> parse_d_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& t : split_list(s)) out.push_back(parse_d(t));
    return out;
}

const char* regime_name(Regime r) {
    return r == Regime::min_rounds ? "min_rounds" : "min_bandwidth";
}

Regime parse_regime(const std::string& s) {
    if (s == "min_rounds") return Regime::min_rounds;
    if (s == "min_bandwidth") return Regime::min_bandwidth;
    throw std::invalid_argument("regime must be min_rounds or min_bandwidth, got '" + s + "'");
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt_list(const std::vector<int>& v) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); i++) os << (i ? "," : "") << v[i];
    return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); i++) os << (i ? "," : "") << fmt(v[i]);
    return os.str();
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double vec_rel_err(const std::vector<cplx>& got, const std::vector<cplx>& want) {
    if (got.size() != want.size()) return INFINITY;
    double num = 0, den = 0;
    for (size_t i = 0; i < got.size(); i++) {
        num += std::norm(got[i] - want[i]);
        den += std::norm(want[i]);
    }
    if (den < 1e-300) return std::sqrt(num);
    return std::sqrt(num / den);
}

// Both runs for one parameter point, plus accuracy against the best
// available oracle (direct transform when affordable, else the plain run).
struct PointOutcome {
    PipelineResult plain;
    PipelineResult coded;
    double err_plain = kNan;  // vs direct transform only
    double err_coded = kNan;
    bool plain_checked = false;
    bool coded_checked = false;
};

constexpr int kDirectOracleLimit = 8192;

PointOutcome run_point(const ExperimentConfig& cfg, const std::vector<FaultEvent>& faults) {
    DftPlan plan = plan_from_config(cfg);
    std::vector<cplx> x = experiment_signal(plan.n, cfg.seed);
    CostParams params{cfg.alpha, cfg.beta};
    MdsCodeSpec code = make_systematic_mds(cfg.p, cfg.k);

    std::vector<FaultEvent> plain_faults;
    for (const auto& ev : faults)
        if (ev.node < cfg.k) plain_faults.push_back(ev);

    PointOutcome o;
    o.plain = run_uncoded(x, plan, plain_faults, cfg.regime, params);
    o.coded = run_coded(x, plan, code, code, faults, cfg.regime, params, cfg.segments);

    if (plan.n <= kDirectOracleLimit) {
        std::vector<cplx> want = dft_direct(x);
        if (o.plain.recoverable) {
            o.err_plain = vec_rel_err(o.plain.output, want);
            o.plain_checked = true;
        }
        if (o.coded.recoverable) {
            o.err_coded = vec_rel_err(o.coded.output, want);
            o.coded_checked = true;
        }
    } else if (o.plain.recoverable && o.coded.recoverable) {
        o.err_coded = vec_rel_err(o.coded.output, o.plain.output);
        o.coded_checked = true;
    }
    return o;
}

void emit_csv_row(const ExperimentConfig& cfg, const PointOutcome& o, std::ostream& csv) {
    const CostLedger& led = o.coded.ledger;
    CostParams params{cfg.alpha, cfg.beta};
    double max_err = kNan;
    if (!std::isnan(o.err_plain)) max_err = o.err_plain;
    if (!std::isnan(o.err_coded)) max_err = std::isnan(max_err) ? o.err_coded
                                                                : std::max(max_err, o.err_coded);
    std::string measured = "nan";
    if (led.c1("encode2") > 0 && led.c1("transpose") > 0)
        measured = led.time("encode2", params) < led.time("transpose", params) ? "true" : "false";
    csv << cfg.k << ',' << cfg.p << ',' << cfg.n << ',' << fmt(cfg.alpha) << ',' << fmt(cfg.beta)
        << ',' << cfg.seed << ',' << led.c1("rearrange") << ',' << led.c2("rearrange") << ','
        << led.c1("transpose") << ',' << led.c2("transpose") << ',' << led.c1("encode2") << ','
        << led.c2("encode2") << ',' << (o.plain.recoverable ? fmt(o.plain.comm_time) : "nan")
        << ',' << (o.coded.recoverable ? fmt(o.coded.comm_time) : "nan") << ',' << fmt(max_err)
        << ',' << (crossover_check(cfg.p, cfg.k) ? "true" : "false") << ',' << measured << ','
        << (o.coded.recoverable ? "true" : "false") << '\n';
}

int point_exit_code(const PointOutcome& o) {
    if (!o.coded.recoverable) return 2;
    if (o.plain_checked && o.err_plain > 1e-10) return 3;
    if (o.coded_checked && o.err_coded > 1e-8) return 3;
    return 0;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key_value) {
    size_t eq = key_value.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("expected key=value, got '" + key_value + "'");
    std::string key = trim(key_value.substr(0, eq));
    std::string val = trim(key_value.substr(eq + 1));
    if (key == "n") cfg.n = (int)parse_ll(val);
    else if (key == "n1") cfg.n1 = (int)parse_ll(val);
    else if (key == "n2") cfg.n2 = (int)parse_ll(val);
    else if (key == "k") cfg.k = (int)parse_ll(val);
    else if (key == "p") cfg.p = (int)parse_ll(val);
    else if (key == "alpha") cfg.alpha = parse_d(val);
    else if (key == "beta") cfg.beta = parse_d(val);
    else if (key == "seed") cfg.seed = (unsigned long long)parse_ll(val);
    else if (key == "regime") cfg.regime = parse_regime(val);
    else if (key == "segments") cfg.segments = (int)parse_ll(val);
    else if (key == "sweep_k") cfg.sweep_k = parse_int_list(val);
    else if (key == "sweep_pk") cfg.sweep_pk = parse_int_list(val);
    else if (key == "sweep_alpha") cfg.sweep_alpha = parse_d_list(val);
    else if (key == "sweep_beta") cfg.sweep_beta = parse_d_list(val);
    else if (key == "sweep_scale") cfg.sweep_scale = parse_ll(val);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        lineno++;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            apply_setting(cfg, line);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "n=" << cfg.n << "\n";
    if (cfg.n1 > 0) os << "n1=" << cfg.n1 << "\n";
    if (cfg.n2 > 0) os << "n2=" << cfg.n2 << "\n";
    os << "k=" << cfg.k << "\n";
    os << "p=" << cfg.p << "\n";
    os << "alpha=" << fmt(cfg.alpha) << "\n";
    os << "beta=" << fmt(cfg.beta) << "\n";
    os << "seed=" << cfg.seed << "\n";
    os << "regime=" << regime_name(cfg.regime) << "\n";
    os << "segments=" << cfg.segments << "\n";
    if (!cfg.sweep_k.empty()) os << "sweep_k=" << fmt_list(cfg.sweep_k) << "\n";
    if (!cfg.sweep_pk.empty()) os << "sweep_pk=" << fmt_list(cfg.sweep_pk) << "\n";
    if (!cfg.sweep_alpha.empty()) os << "sweep_alpha=" << fmt_list(cfg.sweep_alpha) << "\n";
    if (!cfg.sweep_beta.empty()) os << "sweep_beta=" << fmt_list(cfg.sweep_beta) << "\n";
    if (cfg.sweep_scale > 0) os << "sweep_scale=" << cfg.sweep_scale << "\n";
    return os.str();
}

const std::string& csv_header() {
    static const std::string h =
        "K,P,N,alpha,beta,seed,C1_rearrange,C2_rearrange,C1_transpose,C2_transpose,"
        "C1_encode2,C2_encode2,T_uncoded,T_coded,max_rel_err,predicted_crossover,"
        "measured_crossover,recoverable";
    return h;
}

DftPlan plan_from_config(const ExperimentConfig& cfg) {
    int n1 = cfg.n1, n2 = cfg.n2;
    if (n1 > 0 && n2 == 0) {
        if (cfg.n % n1 != 0) throw std::invalid_argument("n1 must divide n");
        n2 = cfg.n / n1;
    } else if (n2 > 0 && n1 == 0) {
        if (cfg.n % n2 != 0) throw std::invalid_argument("n2 must divide n");
        n1 = cfg.n / n2;
    } else if (n1 == 0 && n2 == 0) {
        // most square split with k dividing both sides
        for (int d = 1; (long long)d * d <= cfg.n; d++) {
            if (cfg.n % d) continue;
            if (d % cfg.k == 0 && (cfg.n / d) % cfg.k == 0) { n1 = d; n2 = cfg.n / d; }
        }
        if (n1 == 0)
            throw std::invalid_argument("no n1 x n2 split of n=" + std::to_string(cfg.n) +
                                        " has k=" + std::to_string(cfg.k) + " dividing both sides");
    }
    return make_plan(cfg.n, n1, n2, cfg.k, cfg.p);
}

std::vector<cplx> experiment_signal(int n, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    auto u = [&] { return (rng() >> 11) * (1.0 / 9007199254740992.0); };
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(u(), u());
    return x;
}

int cmd_bounds(const ExperimentConfig& cfg, std::ostream& out) {
    DftPlan plan = plan_from_config(cfg);
    CostParams params{cfg.alpha, cfg.beta};
    CostBound tr = transpose_cost(cfg.k, plan.n);
    CostBound enc = encoding_cost(cfg.p, cfg.k, plan.n);
    out << "geometry: n=" << plan.n << " (" << plan.n1 << "x" << plan.n2 << "), k=" << cfg.k
        << ", p=" << cfg.p << ", alpha=" << fmt(cfg.alpha) << ", beta=" << fmt(cfg.beta) << "\n";
    out << "transpose            C1=" << fmt(tr.c1) << " C2=" << fmt(tr.c2)
        << " time=" << fmt(tr.time(params)) << "\n";
    out << "encode2-upper        C1=" << fmt(enc.c1) << " C2=" << fmt(enc.c2)
        << " time=" << fmt(enc.time(params)) << "\n";
    out << "crossover-threshold  parity=" << (cfg.p - cfg.k)
        << " threshold=" << fmt(crossover_threshold(cfg.k))
        << " re-encode-wins=" << (crossover_check(cfg.p, cfg.k) ? "true" : "false") << "\n";
    return 0;
}

int cmd_run(const ExperimentConfig& cfg, const std::vector<FaultEvent>& faults, std::ostream& out,
            std::ostream* csv) {
    PointOutcome o = run_point(cfg, faults);
    const DftPlan& plan = o.coded.plan;
    CostParams params{cfg.alpha, cfg.beta};

    out << "run: n=" << plan.n << " (" << plan.n1 << "x" << plan.n2 << ") k=" << cfg.k
        << " p=" << cfg.p << " alpha=" << fmt(cfg.alpha) << " beta=" << fmt(cfg.beta)
        << " seed=" << cfg.seed << " regime=" << regime_name(cfg.regime) << "\n";
    out << "protected stages:\n";
    for (const auto& s : stage_cost_report(o.coded))
        out << "  " << std::setw(10) << std::left << s.stage << " C1=" << s.c1 << " C2=" << s.c2
            << " time=" << fmt((double)s.c1 * cfg.alpha + (double)s.c2 * cfg.beta) << "\n";
    if (o.plain.recoverable)
        out << "plain:     C1=" << o.plain.ledger.c1() << " C2=" << o.plain.ledger.c2()
            << " time=" << fmt(o.plain.comm_time) << "\n";
    else
        out << "plain:     unrecoverable (" << o.plain.failure_reason << ")\n";
    if (o.coded.recoverable)
        out << "protected: C1=" << o.coded.ledger.c1() << " C2=" << o.coded.ledger.c2()
            << " time=" << fmt(o.coded.comm_time) << "\n";
    else
        out << "protected: unrecoverable (" << o.coded.failure_reason << ")\n";
    if (o.plain_checked || o.coded_checked)
        out << "accuracy vs " << (plan.n <= kDirectOracleLimit ? "direct transform" : "plain run")
            << ": plain=" << fmt(o.err_plain) << " protected=" << fmt(o.err_coded) << "\n";
    const CostLedger& led = o.coded.ledger;
    if (led.c1("encode2") > 0 && led.c1("transpose") > 0)
        out << "re-encode vs transpose: predicted-cheaper="
            << (crossover_check(cfg.p, cfg.k) ? "true" : "false") << " measured-cheaper="
            << (led.time("encode2", params) < led.time("transpose", params) ? "true" : "false")
            << "\n";
    for (const auto& line : o.coded.recovery_log) out << "  note: " << line << "\n";

    if (csv) {
        *csv << csv_header() << "\n";
        emit_csv_row(cfg, o, *csv);
    }
    return point_exit_code(o);
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream* csv) {
    std::ostream& rows = csv ? *csv : out;
    rows << csv_header() << "\n";
    std::vector<int> ks = cfg.sweep_k.empty() ? std::vector<int>{cfg.k} : cfg.sweep_k;
    std::vector<int> prs =
        cfg.sweep_pk.empty() ? std::vector<int>{cfg.p - cfg.k} : cfg.sweep_pk;
    std::vector<double> alphas =
        cfg.sweep_alpha.empty() ? std::vector<double>{cfg.alpha} : cfg.sweep_alpha;
    std::vector<double> betas =
        cfg.sweep_beta.empty() ? std::vector<double>{cfg.beta} : cfg.sweep_beta;

    int worst = 0;
    for (int k : ks)
        for (int pr : prs)
            for (double a : alphas)
                for (double b : betas) {
                    ExperimentConfig pt = cfg;
                    pt.k = k;
                    pt.p = k + pr;
                    pt.alpha = a;
                    pt.beta = b;
                    if (cfg.sweep_scale > 0) {
                        long long nn = cfg.sweep_scale * (long long)k * k;
                        if (nn > std::numeric_limits<int>::max()) {
                            out << "skip k=" << k << " parity=" << pr << ": n=" << nn
                                << " too large\n";
                            continue;
                        }
                        pt.n = (int)nn;
                        pt.n1 = pt.n2 = 0;
                    }
                    try {
                        PointOutcome o = run_point(pt, {});
                        emit_csv_row(pt, o, rows);
                        worst = std::max(worst, point_exit_code(o));
                    } catch (const std::invalid_argument& e) {
                        out << "skip k=" << k << " parity=" << pr << ": " << e.what() << "\n";
                    }
                }
    return worst;
}

} // namespace fftsim
