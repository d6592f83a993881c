#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dense_oracle.hpp"
#include "gsr/imageio.hpp"
#include "gsr/kriging.hpp"

using namespace gsr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gsr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) {
    const std::string cmd = std::string(GSR_CLI_PATH) + " " + args + " > " + p("stdout.txt") + " 2> " + p("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string err() const { return slurp(dir_ / "stderr.txt"); }
  std::string out() const { return slurp(dir_ / "stdout.txt"); }

  // HR ADSN texture written as PFM (float-exact values).
  Channels write_texture(const std::string& name, int w, int h) {
    std::mt19937_64 rng(91);
    const AdsnModel m = AdsnModel::from_textons({oracle::random_texton(w, h, rng)}, {0.5});
    Channels u = adsn_sample(m, NoiseSeed{5});
    for (double& v : u[0].data()) v = static_cast<float>(v);
    write_pfm(u, p(name));
    return u;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DegradeMatchesLibrary) {
  const Channels hr = write_texture("hr.pfm", 16, 16);
  ASSERT_EQ(run("degrade --input " + p("hr.pfm") + " --stride 2 --output " + p("lr")), 0) << err();
  const Channels lr = read_pfm(p("lr.pfm")).planes;
  const Channels want = degrade(bicubic_operator(16, 16, 2), hr);
  EXPECT_LT(max_abs(lr[0] - want[0]), 1e-6);
  EXPECT_TRUE(fs::exists(p("lr.png")));
  const std::string cfg = slurp(p("lr.config.txt"));
  EXPECT_NE(cfg.find("command=degrade\n"), std::string::npos);
  EXPECT_NE(cfg.find("stride=2\n"), std::string::npos);

  write_pfm({PlanarImage(8, 8, 3.0)}, p("const.pfm"));
  ASSERT_EQ(run("degrade --input " + p("const.pfm") + " --stride 4 --output " + p("c")), 0) << err();
  EXPECT_LT(max_abs(read_pfm(p("c.pfm")).planes[0] - 3.0), 1e-6);
}

TEST_F(Cli, DegradeWithKernelFile) {
  write_texture("hr.pfm", 16, 16);
  std::ofstream(p("k.txt")) << "1 1 0 0\n1\n";
  ASSERT_EQ(run("degrade --input " + p("hr.pfm") + " --stride 4 --operator file:" + p("k.txt") + " --output " + p("lr")), 0)
      << err();
  EXPECT_EQ(read_pfm(p("lr.pfm")).planes[0], subsample(read_pfm(p("hr.pfm")).planes[0], 4));
  EXPECT_EQ(err(), "");

  std::ofstream(p("k2.txt")) << "1 1 0 0\n2\n";
  ASSERT_EQ(run("degrade --input " + p("hr.pfm") + " --stride 4 --operator file:" + p("k2.txt") + " --output " + p("lr2")),
            0);
  EXPECT_NE(err().find("warning:"), std::string::npos);
  EXPECT_EQ(slurp(p("lr2.pfm")), slurp(p("lr.pfm")));
}

TEST_F(Cli, SampleIsDeterministicAndConsistent) {
  write_texture("hr.pfm", 32, 32);
  ASSERT_EQ(run("degrade --input " + p("hr.pfm") + " --stride 2 --output " + p("lr")), 0) << err();
  const std::string args = "sample --input " + p("lr.pfm") + " --reference " + p("hr.pfm") +
                           " --stride 2 --count 2 --seed 11 --peak 1 --output ";
  ASSERT_EQ(run(args + p("a")), 0) << err();
  ASSERT_EQ(run(args + p("b")), 0) << err();
  for (const char* f : {"_sample_0.pfm", "_sample_1.pfm", "_kriging.pfm", "_innovation_1.pfm"}) {
    EXPECT_EQ(slurp(p(std::string("a") + f)), slurp(p(std::string("b") + f))) << f;
  }
  EXPECT_NE(slurp(p("a_sample_0.pfm")), slurp(p("a_sample_1.pfm")));
  EXPECT_TRUE(fs::exists(p("a_innovation_0.png")));

  ASSERT_EQ(run("metrics --input " + p("a_sample_0.pfm") + " --reference " + p("hr.pfm") +
                " --stride 2 --peak 1 --output " + p("m")),
            0)
      << err();
  const std::string report = slurp(p("m.txt"));
  const auto pos = report.find("lr_psnr=");
  ASSERT_NE(pos, std::string::npos) << report;
  EXPECT_GE(std::stod(report.substr(pos + 8)), 120.0);
  EXPECT_TRUE(fs::exists(p("m.json")));
  EXPECT_EQ(out(), report);
}

TEST_F(Cli, ConstantReferenceGivesLrMean) {
  write_pfm({PlanarImage(16, 16, 0.25)}, p("ref.pfm"));
  std::mt19937_64 rng(92);
  const PlanarImage lr = oracle::random_image(8, 8, rng, 0.0, 1.0);
  write_pfm({lr}, p("lr.pfm"));
  ASSERT_EQ(run("sample --input " + p("lr.pfm") + " --reference " + p("ref.pfm") + " --stride 2 --output " + p("s")), 0)
      << err();
  const PlanarImage s = read_pfm(p("s_sample_0.pfm")).planes[0];
  const double m = mean(read_pfm(p("lr.pfm")).planes[0]);
  EXPECT_LT(max_abs(s - m), 1e-6);
  EXPECT_NE(err().find("warning:"), std::string::npos);
}

TEST_F(Cli, CgdSampleWritesResidualReport) {
  write_texture("hr.pfm", 16, 16);
  ASSERT_EQ(run("degrade --input " + p("hr.pfm") + " --stride 2 --output " + p("lr")), 0) << err();
  ASSERT_EQ(run("cgd-sample --input " + p("lr.pfm") + " --reference " + p("hr.pfm") +
                " --stride 2 --cgd-steps 50 --output " + p("c")),
            0)
      << err();
  const std::string rep = slurp(p("c_residual.txt"));
  EXPECT_NE(rep.find("residual="), std::string::npos);
  EXPECT_NE(rep.find("iterations="), std::string::npos);
  EXPECT_TRUE(fs::exists(p("c_sample_0.pfm")));
  EXPECT_TRUE(fs::exists(p("c_kriging.png")));
}

TEST_F(Cli, VarianceAndInspectKernel) {
  write_texture("hr.pfm", 16, 16);
  ASSERT_EQ(run("variance --reference " + p("hr.pfm") + " --stride 2 --count 3 --output " + p("v")), 0) << err();
  const PlanarImage theory = read_pfm(p("v_theoretical.pfm")).planes[0];
  EXPECT_EQ(theory(0, 0), theory(2, 4));
  EXPECT_TRUE(fs::exists(p("v_empirical.pfm")));
  ASSERT_EQ(run("inspect-kernel --reference " + p("hr.pfm") + " --stride 2 --output " + p("k")), 0) << err();
  for (const char* f : {"k_lambda.png", "k_kappa.png", "k_kappa_pinv.png", "k_kernel.txt"}) {
    EXPECT_TRUE(fs::exists(p(f))) << f;
  }
}

TEST_F(Cli, ExitCodes) {
  write_texture("hr.pfm", 16, 16);
  EXPECT_EQ(run("degrade --input " + p("missing.pfm") + " --stride 2 --output " + p("x")), 3);
  const std::string message = err();
  EXPECT_EQ(message.rfind("error:", 0), 0u);
  EXPECT_EQ(std::count(message.begin(), message.end(), '\n'), 1);
  EXPECT_EQ(run("degrade --input " + p("hr.pfm") + " --stride 3 --output " + p("x")), 2);
  EXPECT_EQ(run("degrade --input " + p("hr.pfm") + " --operator gauss --output " + p("x")), 2);
  EXPECT_EQ(run("degrade --input " + p("hr.pfm") + " --bogus"), 2);
  EXPECT_EQ(run("sample --reference " + p("hr.pfm") + " --output " + p("x")), 2);
  std::ofstream(p("bad.txt")) << "2 2 0 0\n1 1\n";
  EXPECT_EQ(run("degrade --input " + p("hr.pfm") + " --operator file:" + p("bad.txt") + " --output " + p("x")), 3);
}
