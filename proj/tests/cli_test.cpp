#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "temp_dir.hpp"

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
protected:
  testing_util::TempDir dir;

  Result run(const std::string& args, const std::string& stdin_text = {}) {
    const auto in = dir.write("stdin.txt", stdin_text);
    const std::string command = std::string("'") + SUBSEG_CLI_PATH + "' " + args + " < '" + in + "' > '" +
                                dir.file("stdout.txt") + "' 2> '" + dir.file("stderr.txt") + "'";
    const int raw = std::system(command.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, dir.read("stdout.txt"), dir.read("stderr.txt")};
  }

  std::string path(const std::string& name) { return "'" + dir.file(name) + "'"; }
};

}  // namespace

TEST_F(Cli, NormalizeFromStdin) {
  const auto r = run("normalize", "  “x”\t２０１０ \n");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "\"x\" 2010\n");
}

TEST_F(Cli, VnbpeWorkedExample) {
  dir.write("in.txt", "a b c\na b d\na b c\n");
  const auto r = run("vnbpe-learn --input " + path("in.txt") + " --codes " + path("codes") + " --apply-out " +
                     path("out.txt"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(dir.read("codes"), "#vnbpe:v1\tmin_freq=2\na\tb\t3\nb\tc\t2\n");
  EXPECT_EQ(dir.read("out.txt"), "a_b c\na_b d\na_b c\n");
  const auto back = run("vnbpe-unapply --codes " + path("codes") + " --input " + path("out.txt"));
  EXPECT_EQ(back.out, "a b c\na b d\na b c\n");
  const auto again = run("vnbpe-apply --codes " + path("codes") + " --input " + path("in.txt"));
  EXPECT_EQ(again.out, "a_b c\na_b d\na_b c\n");
}

TEST_F(Cli, StrictThreshold) {
  dir.write("in.txt", "p q\np q\nr s\n");
  ASSERT_EQ(run("vnbpe-learn --input " + path("in.txt") + " --codes " + path("c1")).status, 0);
  ASSERT_EQ(run("vnbpe-learn --strict-gt --input " + path("in.txt") + " --codes " + path("c2")).status, 0);
  EXPECT_EQ(dir.read("c1"), "#vnbpe:v1\tmin_freq=2\np\tq\t2\n");
  EXPECT_EQ(dir.read("c2"), "#vnbpe:v1\tmin_freq=2\n");
}

TEST_F(Cli, UnderscoreWarning) {
  dir.write("in.txt", "a_b c\n");
  const auto r = run("vnbpe-learn --input " + path("in.txt") + " --codes " + path("codes"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST_F(Cli, BpeRoundTrip) {
  dir.write("in.txt", "受け入れる 入れる\n受け入れる best\n");
  ASSERT_EQ(run("bpe-learn --input " + path("in.txt") + " --codes " + path("codes") + " --merges 5").status, 0);
  const auto seg = run("bpe-apply --codes " + path("codes") + " --input " + path("in.txt") + " --output " +
                       path("seg.txt"));
  ASSERT_EQ(seg.status, 0) << seg.err;
  EXPECT_NE(dir.read("seg.txt").find("@@"), std::string::npos);
  const auto back = run("bpe-deseg --input " + path("seg.txt"));
  EXPECT_EQ(back.out, dir.read("in.txt"));
}

TEST_F(Cli, BpeMergesRequired) {
  dir.write("in.txt", "ab\n");
  const auto r = run("bpe-learn --input " + path("in.txt") + " --codes " + path("codes"));
  EXPECT_EQ(r.status, 10);
  EXPECT_NE(r.err.find("code=invalid_argument"), std::string::npos);
}

TEST_F(Cli, BacktransAlignmentError) {
  dir.write("mono.txt", "a\nb\nc\n");
  dir.write("trans.txt", "x\ny\n");
  const auto r = run("backtrans --mono " + path("mono.txt") + " --trans " + path("trans.txt") + " --src-out " +
                     path("s") + " --tgt-out " + path("t"));
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.err.find("code=alignment"), std::string::npos);
}

TEST_F(Cli, Backtrans) {
  dir.write("mono.txt", "a\nb\n");
  dir.write("trans.txt", "x\ny\n");
  const auto r = run("backtrans --mono " + path("mono.txt") + " --trans " + path("trans.txt") + " --src-out " +
                     path("s") + " --tgt-out " + path("t"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(dir.read("s"), "x\ny\n");
  EXPECT_EQ(dir.read("t"), "a\nb\n");
}

TEST_F(Cli, CleanReport) {
  dir.write("s", "a\na\n\nc\n");
  dir.write("t", "b\nb\nz\nd\n");
  const auto r = run("clean --src " + path("s") + " --tgt " + path("t") + " --src-out " + path("so") +
                     " --tgt-out " + path("to"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "input_pairs=4\nblank_removed=1\nduplicate_removed=1\noutput_pairs=2\n");
  EXPECT_EQ(dir.read("so"), "a\nc\n");
  EXPECT_EQ(dir.read("to"), "b\nd\n");
}

TEST_F(Cli, SubsampleSeed42) {
  dir.write("in.txt", "0\n1\n2\n3\n4\n5\n6\n7\n8\n9\n");
  const auto r = run("subsample --input " + path("in.txt") + " --k 4 --seed 42");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "7\n3\n8\n9\n");
  const auto bad = run("subsample --input " + path("in.txt") + " --k 11 --seed 42");
  EXPECT_EQ(bad.status, 5);
  EXPECT_NE(bad.err.find("code=range"), std::string::npos);
}

TEST_F(Cli, Stats) {
  dir.write("in.txt", "a b\n\na b\n");
  const auto r = run("stats --input " + path("in.txt"));
  EXPECT_EQ(r.out, "sentence_count=3\ntoken_count=4\ntype_count=2\nblank_count=1\nduplicate_count=1\n");
  const auto j = run("stats --json --input " + path("in.txt"));
  EXPECT_NE(j.out.find("\"sentence_count\":3"), std::string::npos);
}

TEST_F(Cli, AttnCheck) {
  const auto r = run("attncheck --seed 1 --n 6 --dim 5");
  EXPECT_EQ(r.status, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("all=pass"), std::string::npos);
}

TEST_F(Cli, MissingInputIsIoError) {
  const auto r = run("normalize --input /nonexistent/subseg");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("code=io"), std::string::npos);
}

TEST_F(Cli, PipelineIsReproducible) {
  dir.write("ja.txt", "こんにちは 世界\n  ありがとう\nこんにちは 世界\n");
  dir.write("vi.txt", "xin chào thế giới\ncảm ơn\nxin chào thế giới\n");
  std::string first;
  for (int round = 0; round < 2; ++round) {
    ASSERT_EQ(run("normalize --input " + path("ja.txt") + " --output " + path("ja.n")).status, 0);
    ASSERT_EQ(run("normalize --input " + path("vi.txt") + " --output " + path("vi.n")).status, 0);
    ASSERT_EQ(run("vnbpe-learn --input " + path("vi.n") + " --codes " + path("codes") + " --apply-out " +
                  path("vi.v")).status, 0);
    ASSERT_EQ(run("mixsource --src " + path("ja.n") + " --tgt " + path("vi.v") + " --mono " + path("vi.v") +
                  " --src-lang ja --tgt-lang vi --src-out " + path("ms.s") + " --tgt-out " + path("ms.t")).status, 0);
    ASSERT_EQ(run("mix --orig-src " + path("ja.n") + " --orig-tgt " + path("vi.v") + " --syn-src " + path("ms.s") +
                  " --syn-tgt " + path("ms.t") + " --seed 9 --src-out " + path("mx.s") + " --tgt-out " +
                  path("mx.t")).status, 0);
    const auto output = dir.read("codes") + dir.read("mx.s") + dir.read("mx.t");
    if (round == 0)
      first = output;
    else
      EXPECT_EQ(output, first);
  }
  EXPECT_NE(first.find("__vi__chào_thế"), std::string::npos);
}
