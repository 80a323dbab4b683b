#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "evbranch/io.hpp"
#include "oracles.hpp"

using namespace evbranch;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("evbranch_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "evbranch");
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    void write(const std::string& name, const std::string& text) { io::write_text(path(name), text); }

    void write_params(const std::string& name, const std::string& a, const std::string& mu = "[0.5, 0.3]") {
        write(name, R"({"mu": )" + mu + R"(, "A": )" + a + R"(, "beta": 1.0})");
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const char* kStableA = "[[0.3, 0.2], [0.2, 0.3]]";

}  // namespace

TEST_F(CliTest, SimulateIsDeterministic) {
    write_params("p.json", kStableA);
    ASSERT_EQ(run({"simulate", "--params", path("p.json"), "--out", path("a.jsonl"), "--num-seqs", "5",
                   "--horizon", "20", "--seed", "3"}),
              0)
        << err_.str();
    ASSERT_EQ(run({"simulate", "--params", path("p.json"), "--out", path("b.jsonl"), "--num-seqs", "5",
                   "--horizon", "20", "--seed", "3", "--threads", "1"}),
              0);
    EXPECT_EQ(io::read_text(path("a.jsonl")), io::read_text(path("b.jsonl")));
    EXPECT_EQ(io::read_text(path("a.jsonl.labels.jsonl")), io::read_text(path("b.jsonl.labels.jsonl")));
    EXPECT_TRUE(fs::exists(path("a.jsonl.manifest.json")));
    EXPECT_EQ(io::read_sequences(path("a.jsonl")).size(), 5u);
}

TEST_F(CliTest, SimulateZeroBackgroundAndUnstable) {
    write_params("zero.json", kStableA, "[0, 0]");
    ASSERT_EQ(run({"simulate", "--params", path("zero.json"), "--out", path("z.jsonl"), "--num-seqs", "3"}), 0);
    for (const auto& s : io::read_sequences(path("z.jsonl"))) EXPECT_TRUE(s.empty());

    write_params("hot.json", "[[0.6, 0.6], [0.6, 0.6]]");
    EXPECT_EQ(run({"simulate", "--params", path("hot.json"), "--out", path("h.jsonl")}), 2);
    EXPECT_NE(err_.str().find("error"), std::string::npos);
}

TEST_F(CliTest, IoAndValidationExitCodes) {
    EXPECT_EQ(run({"simulate", "--params", path("nope.json"), "--out", path("x.jsonl")}), 3);
    EXPECT_EQ(run({"simulate", "--params"}), 4);
    EXPECT_EQ(run({"fit", "--data", path("nope.jsonl"), "--out", path("f.json")}), 3);
    write("bad.jsonl", "{\"id\":\"a\",\"T\":1,\"events\":[]}\n{\"T\":1,\"events\":[{\"t\":\"x\",\"c\":0}]}\n");
    EXPECT_EQ(run({"fit", "--data", path("bad.jsonl"), "--out", path("f.json")}), 4);
    EXPECT_NE(err_.str().find(":2:"), std::string::npos) << err_.str();
    EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, FitModesAndEval) {
    write_params("p.json", kStableA);
    ASSERT_EQ(run({"simulate", "--params", path("p.json"), "--out", path("d.jsonl"), "--num-seqs", "8",
                   "--horizon", "30", "--seed", "1"}),
              0);

    ASSERT_EQ(run({"fit", "--data", path("d.jsonl"), "--out", path("one.json"), "--em-iters", "1"}), 0)
        << err_.str();
    const auto one = io::json::parse(io::read_text(path("one.json")));
    EXPECT_EQ(one.at("iterations_run"), 1);
    EXPECT_TRUE(one.at("config").at("badmm").is_null());

    ASSERT_EQ(run({"fit", "--data", path("d.jsonl"), "--out", path("grid.json"), "--em-iters", "3",
                   "--lambda-grid", "0.01,1,1e2", "--save-resp", "triplet"}),
              0)
        << err_.str();
    for (const char* f : {"grid_lambda0.01.json", "grid_lambda1.json", "grid_lambda100.json"})
        EXPECT_TRUE(fs::exists(path(f))) << f;

    ASSERT_EQ(run({"fit", "--data", path("d.jsonl"), "--out", path("s.json"), "--em-iters", "5",
                   "--lambda", "0.1", "--save-resp", "dense"}),
              0);
    ASSERT_EQ(run({"eval", "--fit", path("s.json"), "--data", path("d.jsonl"), "--labels",
                   path("d.jsonl.labels.jsonl"), "--out", path("m")}),
              0)
        << err_.str();
    const auto metrics = io::json::parse(io::read_text(path("m.metrics.json")));
    EXPECT_TRUE(metrics.contains("branch"));
    EXPECT_TRUE(fs::exists(path("m.metrics.tsv")));

    write("short.jsonl", "{\"id\":\"a\",\"parent\":[-1]}\n");
    EXPECT_EQ(run({"eval", "--fit", path("s.json"), "--data", path("d.jsonl"), "--labels",
                   path("short.jsonl"), "--out", path("m2")}),
              4);
}

TEST_F(CliTest, FitConfigPrecedence) {
    write_params("p.json", kStableA);
    ASSERT_EQ(run({"simulate", "--params", path("p.json"), "--out", path("d.jsonl"), "--num-seqs", "4",
                   "--horizon", "20"}),
              0);
    write("cfg.json", R"({"em_iters": 2, "lambda": 0.5, "alpha": 0.25})");
    ASSERT_EQ(run({"fit", "--data", path("d.jsonl"), "--out", path("f.json"), "--config", path("cfg.json"),
                   "--alpha", "0.75"}),
              0)
        << err_.str();
    const auto j = io::json::parse(io::read_text(path("f.json")));
    EXPECT_EQ(j.at("iterations_run"), 2);
    EXPECT_EQ(j.at("config").at("badmm").at("lambda"), 0.5);
    EXPECT_EQ(j.at("config").at("badmm").at("alpha"), 0.75);
}

TEST_F(CliTest, InferIdentityAtZeroLambdaAndDeterminism) {
    std::mt19937_64 rng(2);
    const Matrix B0 = oracle::random_stochastic_lower(rng, 6);
    write("b0.json", io::matrix_to_dense_json(B0).dump());
    ASSERT_EQ(run({"infer", "--matrix", path("b0.json"), "--out-prefix", path("z"), "--lambda", "0"}), 0)
        << err_.str();
    const Matrix B = io::matrix_from_json(io::json::parse(io::read_text(path("z.B.json"))));
    EXPECT_LT((B - B0).cwiseAbs().maxCoeff(), 1e-9);

    ASSERT_EQ(run({"infer", "--matrix", path("b0.json"), "--out-prefix", path("a"), "--lambda", "1"}), 0);
    ASSERT_EQ(run({"infer", "--matrix", path("b0.json"), "--out-prefix", path("b"), "--lambda", "1"}), 0);
    EXPECT_EQ(io::read_text(path("a.B.json")), io::read_text(path("b.B.json")));
    EXPECT_EQ(io::read_text(path("a.X1.json")), io::read_text(path("b.X1.json")));
    EXPECT_TRUE(fs::exists(path("a.stats.json")));

    Matrix bad = B0;
    bad(3, 0) += 0.5;
    write("bad.json", io::matrix_to_dense_json(bad).dump());
    EXPECT_EQ(run({"infer", "--matrix", path("bad.json"), "--out-prefix", path("c")}), 4);
    EXPECT_NE(err_.str().find("row_sum"), std::string::npos) << err_.str();
}

TEST_F(CliTest, RankMatchesLibraryAndRejectsMismatch) {
    write("b.json", io::matrix_to_dense_json(Matrix::Identity(5, 5)).dump());
    write("types.json", "[0, 1, 1, 0, 1]");
    ASSERT_EQ(run({"rank", "--matrix", path("b.json"), "--types", path("types.json"), "--out", path("r.tsv")}), 0)
        << err_.str();
    const std::string tsv = io::read_text(path("r.tsv"));
    EXPECT_NE(tsv.find("1\t1\t3"), std::string::npos) << tsv;
    EXPECT_NE(tsv.find("2\t0\t2"), std::string::npos) << tsv;

    write("short.json", "[0, 1]");
    EXPECT_EQ(run({"rank", "--matrix", path("b.json"), "--types", path("short.json"), "--out", path("r2.tsv")}), 4);
}
