#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "ltrank/errors.hpp"
#include "ltrank/evaluation.hpp"
#include "ltrank/students_t.hpp"
#include "support/oracles.hpp"

using namespace ltrank;

namespace {

Qrels simple_qrels() {
    Qrels qrels;
    qrels.add("q1", "d1", 1);
    qrels.add("q1", "d2", 2);
    qrels.add("q1", "d4", 0);
    return qrels;
}

}  // namespace

TEST_CASE("average_precision") {
    Qrels qrels = simple_qrels();

    std::vector<std::string> ranked{"d3", "d1", "d2"};
    CHECK(average_precision(ranked, "q1", qrels) == doctest::Approx((0.5 + 2.0 / 3.0) / 2.0).epsilon(1e-12));

    std::vector<std::string> perfect{"d1", "d2", "d3"};
    CHECK(average_precision(perfect, "q1", qrels) == 1.0);

    Qrels one;
    one.add("q1", "d1", 1);
    std::vector<std::string> second{"d9", "d1"};
    CHECK(average_precision(second, "q1", one) == 0.5);

    CHECK_THROWS_WITH_AS(average_precision(ranked, "missing", qrels), doctest::Contains("missing"),
                         Error);
    Qrels no_rel;
    no_rel.add("q1", "d1", 0);
    CHECK_THROWS_AS(average_precision(ranked, "q1", no_rel), Error);
}

TEST_CASE("precision_at_k") {
    Qrels qrels;
    for (int i = 1; i <= 3; ++i) qrels.add("q1", "r" + std::to_string(i), 1);

    std::vector<std::string> ten{"r1", "x1", "r2", "x2", "x3", "r3", "x4", "x5", "x6", "x7"};
    CHECK(precision_at_k(ten, "q1", qrels, 10) == doctest::Approx(0.3));

    CHECK(precision_at_k({}, "q1", qrels, 10) == 0.0);

    std::vector<std::string> five{"r1", "x1", "r2", "x2", "x3"};  // short list pads as non-relevant
    CHECK(precision_at_k(five, "q1", qrels, 10) == doctest::Approx(0.2));
}

TEST_CASE("evaluate_run aggregates over queries with relevant documents") {
    Qrels qrels;
    qrels.add("q1", "d1", 1);
    qrels.add("q2", "d2", 1);
    qrels.add("q3", "d9", 0);  // judged but nothing relevant

    RunResult run;
    run.per_query["q1"] = {{"d1", 2.0}, {"d7", 1.0}};
    run.per_query["q2"] = {{"d8", 2.0}, {"d2", 1.0}};
    run.per_query["q3"] = {{"d1", 1.0}};
    run.per_query["q4"] = {{"d1", 1.0}};  // not judged at all

    EvalSummary summary = evaluate_run(run, qrels);
    CHECK(summary.evaluated == 2);
    CHECK(summary.map == doctest::Approx((1.0 + 0.5) / 2.0));
    CHECK(summary.skipped_qids == std::vector<std::string>{"q3", "q4"});

    // single query: MAP equals AP
    RunResult single;
    single.per_query["q1"] = {{"d1", 1.0}};
    CHECK(evaluate_run(single, qrels).map == 1.0);
}

TEST_CASE("metrics match the naive oracle exactly on randomized runs") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> pool_dist(5, 40);
    std::uniform_int_distribution<int> rel_dist(1, 8);
    std::uniform_int_distribution<int> len_dist(0, 30);

    for (int trial = 0; trial < 1000; ++trial) {
        int pool = pool_dist(rng);
        std::vector<std::string> docnos;
        for (int i = 0; i < pool; ++i) docnos.push_back("doc" + std::to_string(i));

        Qrels qrels;
        std::set<std::string> relevant;
        int rel = rel_dist(rng);
        std::shuffle(docnos.begin(), docnos.end(), rng);
        for (int i = 0; i < rel && i < pool; ++i) {
            relevant.insert(docnos[static_cast<std::size_t>(i)]);
            qrels.add("q1", docnos[static_cast<std::size_t>(i)], 1);
        }

        std::shuffle(docnos.begin(), docnos.end(), rng);
        int len = std::min<int>(len_dist(rng), pool);
        std::vector<std::string> ranked(docnos.begin(), docnos.begin() + len);

        CHECK(average_precision(ranked, "q1", qrels) ==
              test::naive_average_precision(ranked, relevant, relevant.size()));
        CHECK(precision_at_k(ranked, "q1", qrels, 10) == test::naive_precision_at_k(ranked, relevant, 10));
    }
}

TEST_CASE("run files round-trip and reject malformed input") {
    RunResult run;
    run.run_tag = "tagX";
    run.per_query["q1"] = {{"d2", 1.5}, {"d1", 0.25}};
    run.per_query["q2"] = {{"d9", -3.125}};

    std::ostringstream out;
    write_run(run, out, "model=dirichlet mu=44");
    std::string text = out.str();
    CHECK(text.substr(0, 2) == "# ");
    CHECK(text.find("q1 Q0 d2 1 1.500000 tagX\n") != std::string::npos);
    CHECK(text.find("q1 Q0 d1 2 0.250000 tagX\n") != std::string::npos);
    CHECK(text.find("q2 Q0 d9 1 -3.125000 tagX\n") != std::string::npos);

    std::istringstream in(text);
    RunResult parsed = read_run(in);
    CHECK(parsed.run_tag == run.run_tag);
    REQUIRE(parsed.per_query.size() == 2);
    CHECK(parsed.per_query["q1"][0].docno == "d2");
    CHECK(parsed.per_query["q1"][0].score == 1.5);
    CHECK(parsed.per_query["q1"][1].score == 0.25);

    // arbitrary whitespace is tolerated
    std::istringstream spaced("q1\tQ0   d1\t 1   0.5\trun\n");
    CHECK(read_run(spaced).per_query["q1"].size() == 1);

    std::istringstream gap("q1 Q0 d1 2 0.5 run\n");
    CHECK_THROWS_WITH_AS(read_run(gap), doctest::Contains("non-contiguous rank"), Error);

    std::istringstream rising("q1 Q0 d1 1 0.5 run\nq1 Q0 d2 2 0.9 run\n");
    CHECK_THROWS_WITH_AS(read_run(rising), doctest::Contains("increasing score"), Error);

    std::istringstream short_line("q1 Q0 d1 1\n");
    CHECK_THROWS_WITH_AS(read_run(short_line), doctest::Contains("malformed run line 1"), Error);
}

TEST_CASE("qrels parsing") {
    std::istringstream in("q1 0 d1 1\nq1 0 d2 0\n q2\t0 d1  2 \n");
    Qrels qrels = read_qrels(in);
    CHECK(qrels.relevant_count("q1") == 1);
    CHECK(qrels.relevant_count("q2") == 1);
    CHECK(qrels.grade("q2", "d1") == 2);
    CHECK(qrels.judgment_count() == 3);

    std::istringstream dup("q1 0 d1 1\nq1 0 d1 1\n");
    CHECK_THROWS_WITH_AS(read_qrels(dup), doctest::Contains("line 2"), Error);

    std::istringstream bad("q1 0 d1\n");
    CHECK_THROWS_WITH_AS(read_qrels(bad), doctest::Contains("malformed qrels line 1"), Error);

    std::istringstream neg("q1 0 d1 -1\n");
    CHECK_THROWS_AS(read_qrels(neg), Error);
}

TEST_CASE("regularized incomplete beta sanity") {
    // I_x(1, 1) = x
    for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        CHECK(regularized_incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
    }
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK(regularized_incomplete_beta(2.5, 1.5, 0.3) ==
          doctest::Approx(1.0 - regularized_incomplete_beta(1.5, 2.5, 0.7)).epsilon(1e-10));
    CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("student t two-sided p against closed forms") {
    // df = 1 is the Cauchy distribution: p = 1 - (2/pi) atan(|t|)
    for (double t : {0.25, 1.0, 2.0, 7.5}) {
        double expected = 1.0 - 2.0 / 3.14159265358979323846 * std::atan(t);
        CHECK(student_t_two_sided_p(t, 1.0) == doctest::Approx(expected).epsilon(1e-10));
    }
    // df = 2: p = 1 - t / sqrt(2 + t^2)
    for (double t : {0.5, 1.0, 3.0}) {
        double expected = 1.0 - t / std::sqrt(2.0 + t * t);
        CHECK(student_t_two_sided_p(t, 2.0) == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(student_t_two_sided_p(0.0, 9.0) == 1.0);
    CHECK(student_t_two_sided_p(-2.0, 9.0) == student_t_two_sided_p(2.0, 9.0));
}

TEST_CASE("student t two-sided p against the quadrature oracle") {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> t_dist(-6.0, 6.0);
    std::uniform_int_distribution<int> df_dist(1, 200);
    for (int trial = 0; trial < 300; ++trial) {
        double t = t_dist(rng);
        double df = df_dist(rng);
        double expected = test::t_two_sided_p_by_quadrature(t, df);
        CHECK(student_t_two_sided_p(t, df) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("paired t-test on the pinned ten-pair sample") {
    std::vector<double> a{0.60, 0.55, 0.70, 0.42, 0.90, 0.33, 0.50, 0.61, 0.48, 0.75};
    std::vector<double> b{0.55, 0.50, 0.72, 0.40, 0.85, 0.35, 0.45, 0.60, 0.50, 0.70};

    // closed-form computation, independent arithmetic path
    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mean += (a[i] - b[i]) / 10.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double dev = (a[i] - b[i]) - mean;
        ss += dev * dev;
    }
    double expected_t = mean / std::sqrt(ss / 9.0 / 10.0);

    TTestResult result = paired_t_test(a, b);
    CHECK(result.t == doctest::Approx(expected_t).epsilon(1e-9));
    CHECK(result.t == doctest::Approx(2.1572774).epsilon(1e-6));
    CHECK_FALSE(result.degenerate);

    double expected_p = test::t_two_sided_p_by_quadrature(expected_t, 9.0);
    CHECK(result.p == doctest::Approx(expected_p).epsilon(1e-6));

    // antisymmetry
    TTestResult swapped = paired_t_test(b, a);
    CHECK(swapped.t == doctest::Approx(-result.t).epsilon(1e-12));
    CHECK(swapped.p == doctest::Approx(result.p).epsilon(1e-12));
}

TEST_CASE("paired t-test degenerate cases") {
    std::vector<double> same{0.5, 0.25, 0.75};
    TTestResult equal = paired_t_test(same, same);
    CHECK(equal.t == 0.0);
    CHECK(equal.p == 1.0);
    CHECK_FALSE(equal.degenerate);

    std::vector<double> shifted{0.6, 0.35, 0.85};  // constant nonzero difference
    TTestResult constant = paired_t_test(shifted, same);
    CHECK(constant.degenerate);
    CHECK(std::isinf(constant.t));
    CHECK(constant.p == 0.0);

    CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
    CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), Error);
}
