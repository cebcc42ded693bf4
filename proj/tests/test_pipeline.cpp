#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fftsim/dft.hpp"
#include "fftsim/mds_code.hpp"
#include "fftsim/pipeline.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace fftsim;

namespace {

std::vector<cplx> signal(int n, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    auto u = [&] { return (rng() >> 11) * (1.0 / 9007199254740992.0); };
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(u(), u());
    return x;
}

double rel_err(const std::vector<cplx>& got, const std::vector<cplx>& want) {
    REQUIRE(got.size() == want.size());
    double num = 0, den = 0;
    for (size_t i = 0; i < got.size(); i++) {
        num += std::norm(got[i] - want[i]);
        den += std::norm(want[i]);
    }
    return std::sqrt(num / den);
}

bool log_mentions(const PipelineResult& r, const std::string& what) {
    for (const auto& line : r.recovery_log)
        if (line.find(what) != std::string::npos) return true;
    return false;
}

const CostParams kParams{1.0, 0.01};

}  // namespace

TEST_CASE("plain run: frozen ledger for the smallest grid") {
    DftPlan plan = make_plan(16, 4, 4, 2, 2);
    PipelineResult r = run_uncoded(signal(16, 1), plan, {}, Regime::min_rounds, kParams);
    REQUIRE(r.recoverable);
    CHECK(r.ledger.c1() == 2);
    CHECK(r.ledger.c2() == 8);
    CHECK(r.ledger.c1("rearrange") == 1);
    CHECK(r.ledger.c2("rearrange") == 4);
    CHECK(r.ledger.c1("transpose") == 1);
    CHECK(r.ledger.c2("transpose") == 4);
    CHECK(r.comm_time == doctest::Approx(2 * 1.0 + 8 * 0.01));
}

TEST_CASE("plain run matches the direct transform") {
    struct Case {
        int n, n1, n2, k;
    };
    for (Case c : {Case{16, 4, 4, 2}, Case{32, 4, 8, 2}, Case{36, 6, 6, 2}, Case{64, 8, 8, 4},
                   Case{256, 16, 16, 4}}) {
        CAPTURE(c.n);
        DftPlan plan = make_plan(c.n, c.n1, c.n2, c.k, c.k);
        std::vector<cplx> x = signal(c.n, 42 + c.n);
        PipelineResult r = run_uncoded(x, plan, {}, Regime::min_rounds, kParams);
        REQUIRE(r.recoverable);
        CHECK(rel_err(r.output, dft_direct(x)) < 1e-10);
    }
}

TEST_CASE("protected run without faults is bit-identical to the plain run") {
    for (int p : {3, 5}) {
        int k = p - 1;
        int n = k * k * 4;
        DftPlan plan = make_plan(n, 2 * k, n / (2 * k), k, p);
        std::vector<cplx> x = signal(n, 7);
        PipelineResult plain = run_uncoded(x, plan, {}, Regime::min_rounds, kParams);
        MdsCodeSpec code = make_checksum_code(k);
        PipelineResult coded =
            run_coded(x, plan, code, code, {}, Regime::min_rounds, kParams, 2);
        REQUIRE(plain.recoverable);
        REQUIRE(coded.recoverable);
        REQUIRE(coded.output.size() == plain.output.size());
        for (size_t i = 0; i < plain.output.size(); i++) CHECK(coded.output[i] == plain.output[i]);
        CHECK(log_mentions(coded, "no decode needed"));
    }
}

TEST_CASE("protected run: frozen per-stage ledger") {
    DftPlan plan = make_plan(64, 8, 8, 4, 5);
    MdsCodeSpec code = make_systematic_mds(5, 4);
    PipelineResult r =
        run_coded(signal(64, 3), plan, code, code, {}, Regime::min_rounds, kParams, 2);
    REQUIRE(r.recoverable);
    // k senders rotate 4-symbol chunks to p nodes for p-1 rounds
    CHECK(r.ledger.c1("rearrange") == 4);
    CHECK(r.ledger.c2("rearrange") == 16);
    // survivor exchange of n = 16 symbols per node over k = 4 nodes
    CHECK(r.ledger.c1("transpose") == 2);
    CHECK(r.ledger.c2("transpose") == 16);
    // one parity sink: 2-segment accumulation chain over 5 nodes
    CHECK(r.ledger.c1("encode2") == 4);
    CHECK(r.ledger.c2("encode2") == 32);

    // stage table partitions the totals
    long long c1 = 0, c2 = 0;
    for (const auto& s : stage_cost_report(r)) {
        c1 += s.c1;
        c2 += s.c2;
    }
    CHECK(c1 == r.ledger.c1());
    CHECK(c2 == r.ledger.c2());
}

TEST_CASE("protected run in the bandwidth-minimal regime") {
    DftPlan plan = make_plan(64, 8, 8, 4, 5);
    MdsCodeSpec code = make_systematic_mds(5, 4);
    std::vector<cplx> x = signal(64, 9);
    PipelineResult r = run_coded(x, plan, code, code, {}, Regime::min_bandwidth, kParams, 2);
    REQUIRE(r.recoverable);
    CHECK(r.ledger.c1("transpose") == 3);  // pairwise: p-1 rounds
    CHECK(r.ledger.c2("transpose") == 12);  // (p-1) * n/p
    CHECK(rel_err(r.output, dft_direct(x)) < 1e-10);
}

TEST_CASE("stragglers steer selection but never break the answer") {
    DftPlan plan = make_plan(16, 4, 4, 2, 3);
    MdsCodeSpec code = make_checksum_code(2);
    std::vector<cplx> x = signal(16, 11);
    std::vector<FaultEvent> faults{{"rowfft", 0, FaultEvent::Kind::straggle, 5.0}};
    PipelineResult r = run_coded(x, plan, code, code, faults, Regime::min_rounds, kParams, 1);
    REQUIRE(r.recoverable);
    CHECK(log_mentions(r, "selected 1,2"));
    CHECK(log_mentions(r, "decoded row blocks"));
    CHECK(rel_err(r.output, dft_direct(x)) < 1e-8);
    // the straggler itself now hosts the parity column block
    CHECK(log_mentions(r, "onto 0"));
}

TEST_CASE("row-pass erasures: every survivor pair decodes") {
    DftPlan plan = make_plan(64, 8, 8, 4, 6);
    MdsCodeSpec code = make_systematic_mds(6, 4);
    std::vector<cplx> x = signal(64, 13);
    std::vector<cplx> want = dft_direct(x);
    for (int a = 0; a < 6; a++)
        for (int b = a + 1; b < 6; b++) {
            CAPTURE(a);
            CAPTURE(b);
            std::vector<FaultEvent> faults{{"rowfft", a, FaultEvent::Kind::erase, 0},
                                           {"rowfft", b, FaultEvent::Kind::erase, 0}};
            PipelineResult r =
                run_coded(x, plan, code, code, faults, Regime::min_rounds, kParams, 1);
            REQUIRE(r.recoverable);
            CHECK(rel_err(r.output, want) < 1e-8);
        }
}

TEST_CASE("column-pass erasure: the parity block carries the decode") {
    DftPlan plan = make_plan(16, 4, 4, 2, 3);
    MdsCodeSpec code = make_checksum_code(2);
    std::vector<cplx> x = signal(16, 17);
    std::vector<FaultEvent> faults{{"colfft", 0, FaultEvent::Kind::erase, 0}};
    PipelineResult r = run_coded(x, plan, code, code, faults, Regime::min_rounds, kParams, 1);
    REQUIRE(r.recoverable);
    CHECK(log_mentions(r, "decoded column blocks"));
    CHECK(rel_err(r.output, dft_direct(x)) < 1e-8);
}

TEST_CASE("plain run: any erasure is fatal and stops at the stage it hits") {
    DftPlan plan = make_plan(16, 4, 4, 2, 2);
    std::vector<cplx> x = signal(16, 19);
    std::vector<FaultEvent> faults{{"twiddle", 1, FaultEvent::Kind::erase, 0}};
    PipelineResult r = run_uncoded(x, plan, faults, Regime::min_rounds, kParams);
    CHECK_FALSE(r.recoverable);
    CHECK(r.output.empty());
    CHECK(r.ledger.c1() == 2);  // rearrange and transpose still ran
    CHECK(r.failure_reason.find("twiddle") != std::string::npos);
}

TEST_CASE("protected run: losing a data node before distribution is fatal") {
    DftPlan plan = make_plan(16, 4, 4, 2, 3);
    MdsCodeSpec code = make_checksum_code(2);
    for (const char* stage : {"encode1", "rearrange"}) {
        std::vector<FaultEvent> faults{{stage, 0, FaultEvent::Kind::erase, 0}};
        PipelineResult r =
            run_coded(signal(16, 23), plan, code, code, faults, Regime::min_rounds, kParams, 1);
        CHECK_FALSE(r.recoverable);
        CHECK(r.ledger.c1() == 0);
        CHECK(r.failure_reason.find("never distributed") != std::string::npos);
    }
}

TEST_CASE("protected run: losing a committed node mid-window is fatal") {
    DftPlan plan = make_plan(16, 4, 4, 2, 3);
    MdsCodeSpec code = make_checksum_code(2);
    std::vector<FaultEvent> faults{{"transpose", 0, FaultEvent::Kind::erase, 0}};
    PipelineResult r =
        run_coded(signal(16, 29), plan, code, code, faults, Regime::min_rounds, kParams, 1);
    CHECK_FALSE(r.recoverable);
    CHECK(r.ledger.c1() == 2);  // the rearrange ran; the transpose never started
    CHECK(r.failure_reason.find("transpose") != std::string::npos);
    CHECK(r.failure_reason.find("node 0") != std::string::npos);
}

TEST_CASE("protected run: too few row-pass survivors is fatal") {
    DftPlan plan = make_plan(64, 8, 8, 4, 6);
    MdsCodeSpec code = make_systematic_mds(6, 4);
    std::vector<FaultEvent> faults{{"rowfft", 1, FaultEvent::Kind::erase, 0},
                                   {"rowfft", 2, FaultEvent::Kind::erase, 0},
                                   {"rowfft", 4, FaultEvent::Kind::erase, 0}};
    PipelineResult r =
        run_coded(signal(64, 31), plan, code, code, faults, Regime::min_rounds, kParams, 1);
    CHECK_FALSE(r.recoverable);
    CHECK(r.failure_reason.find("3 of 6") != std::string::npos);
}

TEST_CASE("protected run: too few column blocks at the end is fatal") {
    DftPlan plan = make_plan(16, 4, 4, 2, 3);
    MdsCodeSpec code = make_checksum_code(2);
    std::vector<FaultEvent> faults{{"decode2", 1, FaultEvent::Kind::erase, 0},
                                   {"encode2", 2, FaultEvent::Kind::erase, 0}};
    PipelineResult r =
        run_coded(signal(16, 37), plan, code, code, faults, Regime::min_rounds, kParams, 1);
    CHECK_FALSE(r.recoverable);
    CHECK(r.failure_reason.find("only 1") != std::string::npos);
}

TEST_CASE("no parity nodes degenerates to the plain data flow") {
    DftPlan plan = make_plan(64, 8, 8, 4, 4);
    MdsCodeSpec code = make_systematic_mds(4, 4);
    std::vector<cplx> x = signal(64, 41);
    PipelineResult coded = run_coded(x, plan, code, code, {}, Regime::min_rounds, kParams, 1);
    PipelineResult plain = run_uncoded(x, plan, {}, Regime::min_rounds, kParams);
    REQUIRE(coded.recoverable);
    CHECK(coded.ledger.c1("encode2") == 0);
    for (size_t i = 0; i < plain.output.size(); i++) CHECK(coded.output[i] == plain.output[i]);
}

TEST_CASE("geometry and code preconditions are enforced") {
    MdsCodeSpec c34 = make_systematic_mds(4, 3);
    CHECK_THROWS_AS(run_coded(signal(36, 1), make_plan(36, 6, 6, 3, 4), c34, c34, {},
                              Regime::min_rounds, kParams, 1),
                    std::invalid_argument);  // k not a power of two
    MdsCodeSpec c47 = make_systematic_mds(7, 4);
    CHECK_THROWS_AS(run_coded(signal(64, 1), make_plan(64, 8, 8, 4, 7), c47, c47, {},
                              Regime::min_rounds, kParams, 1),
                    std::invalid_argument);  // 3 parity nodes do not divide k=4
    MdsCodeSpec c23 = make_checksum_code(2);
    CHECK_THROWS_AS(run_coded(signal(64, 1), make_plan(64, 8, 8, 4, 5), c23, c23, {},
                              Regime::min_rounds, kParams, 1),
                    std::invalid_argument);  // code shape mismatch
    CHECK_THROWS_AS(run_uncoded(signal(16, 1), make_plan(16, 4, 4, 2, 2),
                                {{"rowfft", 5, FaultEvent::Kind::erase, 0}}, Regime::min_rounds,
                                kParams),
                    std::invalid_argument);  // fault on a node the run does not have
    CHECK_THROWS_AS(stage_index("warmup"), std::invalid_argument);
}

TEST_CASE("re-encode vs transpose comparison on a small geometry") {
    // k=16, one parity node, beta = 1/k: the re-encode chain beats the
    // transpose (100 vs 132 time units)
    OverheadComparison oc = overhead_comparison(16, 17, 16384, CostParams{1.0, 1.0 / 16});
    CHECK(oc.predicted);
    CHECK(oc.measured);
    CHECK_FALSE(oc.boundary);
    CHECK(oc.transpose_time == doctest::Approx(132.0));
    CHECK(oc.encode2_time == doctest::Approx(100.0));

    // k=4, r=1 sits exactly on the threshold log2(4)/2 = 1
    OverheadComparison bd = overhead_comparison(4, 5, 1024, CostParams{1.0, 0.25});
    CHECK_FALSE(bd.predicted);
    CHECK(bd.boundary);
    CHECK(bd.transpose_time == doctest::Approx(66.0));
    CHECK(bd.encode2_time == doctest::Approx(90.0));
}

TEST_CASE("column recombination cannot be hoisted past the twiddle") {
    MdsCodeSpec code = make_checksum_code(2);
    double bad = hoisted_recombine_witness(4, 4, code, {0, 2}, 7);
    CHECK(bad > 1e-3);
    // with the systematic survivors the mix is the identity and nothing moves
    double good = hoisted_recombine_witness(4, 4, code, {0, 1}, 7);
    CHECK(good < 1e-12);
}
