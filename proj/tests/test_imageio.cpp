#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "dense_oracle.hpp"
#include "gsr/analysis.hpp"
#include "gsr/error.hpp"
#include "gsr/imageio.hpp"
#include "gsr/kriging.hpp"

using namespace gsr;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gsr_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

PlanarImage float_exact(PlanarImage u) {
  for (double& v : u.data()) v = static_cast<float>(v);
  return u;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

using ImageIo = TempDir;

TEST_F(ImageIo, PfmRoundTripIsBitExact) {
  std::mt19937_64 rng(81);
  const Channels gray = {float_exact(oracle::random_image(7, 5, rng, -1e3, 1e3))};
  write_pfm(gray, path("g.pfm"));
  const RasterImage g = read_image(path("g.pfm"));
  EXPECT_EQ(g.planes, gray);
  EXPECT_EQ(g.value_scale, 1.0);
  const Channels rgb = {float_exact(oracle::random_image(3, 4, rng)), float_exact(oracle::random_image(3, 4, rng)),
                        float_exact(oracle::random_image(3, 4, rng))};
  write_image(rgb, path("c.pfm"), ImageFormat::Pfm);
  EXPECT_EQ(read_pfm(path("c.pfm")).planes, rgb);
}

TEST_F(ImageIo, PfmHandBuiltLittleEndian) {
  // 2x2 grayscale, bottom row first: (0,1)=1 (1,1)=2 then (0,0)=3 (1,0)=4
  std::string bytes = "Pf\n2 2\n-1.0\n";
  for (float f : {1.0f, 2.0f, 3.0f, 4.0f}) {
    unsigned char b[4];
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    bytes.append(reinterpret_cast<const char*>(b), 4);
  }
  write_bytes(path("h.pfm"), bytes);
  const PlanarImage u = read_pfm(path("h.pfm")).planes[0];
  EXPECT_EQ(u(0, 0), 3.0);
  EXPECT_EQ(u(1, 0), 4.0);
  EXPECT_EQ(u(0, 1), 1.0);
  EXPECT_EQ(u(1, 1), 2.0);
}

TEST_F(ImageIo, PfmBigEndianAndScale) {
  std::string bytes = "Pf\n1 1\n2.0\n";
  const float f = 1.5f;
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  for (int i = 3; i >= 0; --i) bytes.push_back(static_cast<char>(bits >> (8 * i)));
  write_bytes(path("b.pfm"), bytes);
  const RasterImage r = read_pfm(path("b.pfm"));
  EXPECT_EQ(r.planes[0](0, 0), 1.5);
  EXPECT_EQ(r.value_scale, 2.0);
}

TEST_F(ImageIo, PfmErrors) {
  write_bytes(path("bad.pfm"), "P5\n1 1\n-1.0\n0000");
  EXPECT_EQ(code_of([&] { read_pfm(path("bad.pfm")); }), ErrorCode::CorruptHeader);
  write_bytes(path("short.pfm"), "Pf\n2 2\n-1.0\n0000");
  EXPECT_EQ(code_of([&] { read_pfm(path("short.pfm")); }), ErrorCode::CorruptHeader);
  EXPECT_EQ(code_of([&] { read_pfm(path("missing.pfm")); }), ErrorCode::IoError);
  EXPECT_EQ(code_of([&] { read_image(path("x.tiff")); }), ErrorCode::UnsupportedFormat);
}

TEST_F(ImageIo, PngSinglePixel) {
  write_png({PlanarImage(1, 1, 7.0)}, path("p.png"));
  const RasterImage r = read_image(path("p.png"));
  ASSERT_EQ(r.planes.size(), 1u);
  EXPECT_EQ(r.planes[0](0, 0), 7.0);
  EXPECT_EQ(r.value_scale, 255.0);
}

TEST_F(ImageIo, PngQuantization) {
  EXPECT_EQ(quantize(127.5, 255.0), 128);
  EXPECT_EQ(quantize(-3.0, 255.0), 0);
  EXPECT_EQ(quantize(300.0, 255.0), 255);
  EXPECT_EQ(quantize(0.5, 1.0), 128);
  for (int v = 1; v < 256; ++v) EXPECT_LE(quantize(v - 0.7, 255.0), quantize(v - 0.2, 255.0));

  std::mt19937_64 rng(82);
  const Channels rgb = {oracle::random_image(6, 3, rng, -20, 280), oracle::random_image(6, 3, rng, 0, 255),
                        oracle::random_image(6, 3, rng, 0, 255)};
  write_png(rgb, path("c.png"));
  const Channels once = read_png(path("c.png")).planes;
  write_png(once, path("c2.png"));
  EXPECT_EQ(read_png(path("c2.png")).planes, once);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < rgb[c].size(); ++i) {
      EXPECT_EQ(once[c].data()[i], quantize(rgb[c].data()[i], 255.0));
    }
  }
}

TEST_F(ImageIo, NegativesClampInPngSurviveInPfm) {
  const Channels neg = {PlanarImage(2, 2, -4.0)};
  write_image(neg, path("n.png"), ImageFormat::Png8);
  write_image(neg, path("n.pfm"), ImageFormat::Pfm);
  EXPECT_EQ(read_image(path("n.png")).planes[0](1, 1), 0.0);
  EXPECT_EQ(read_image(path("n.pfm")).planes[0](1, 1), -4.0);
}

TEST_F(ImageIo, SamplePipelineFidelity) {
  std::mt19937_64 rng(83);
  const PlanarImage t = oracle::random_texton(16, 16, rng);
  const AdsnModel m = AdsnModel::from_textons({t}, {0.0});
  const DegradationOperator A = bicubic_operator(16, 16, 2);
  const Channels u_lr = degrade(A, adsn_sample(m, NoiseSeed{1}));
  Channels sample = sr_sample(m, u_lr, A, NoiseSeed{2}).sample;
  sample[0] = float_exact(sample[0]);
  write_pfm(sample, path("s.pfm"));
  const Channels back = read_image(path("s.pfm")).planes;
  EXPECT_EQ(lr_psnr(back, u_lr, A, 1.0), lr_psnr(sample, u_lr, A, 1.0));
  EXPECT_EQ(ssim(back, sample), 1.0);
}

TEST(KernelFile, ParsesStrictFormat) {
  const KernelTaps k = parse_kernel("2 3 1 2\n0.1 0.2 0.3  \n0.4 0.5 0.6\n\n");
  EXPECT_EQ(k.taps.width(), 3);
  EXPECT_EQ(k.taps.height(), 2);
  EXPECT_EQ(k.center_row, 1);
  EXPECT_EQ(k.center_col, 2);
  EXPECT_EQ(k.taps(2, 1), 0.6);
  EXPECT_EQ(k.taps(0, 0), 0.1);
}

TEST(KernelFile, RejectsMalformedInput) {
  for (const char* bad : {"", "2 2 0\n1 1\n1 1\n", "2 2 0 0\n1 1\n", "2 2 0 0\n1 1\n1 x\n",
                          "1 2 0 0\n1 1 1\n", "1 1 0 0\n1\n2\n", "1 1 1 0\n1\n"}) {
    try {
      parse_kernel(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::CorruptHeader) << bad;
    }
  }
}

TEST(SpectrumVisual, CentredLogModulus) {
  const PlanarImage v = spectrum_visual(dft2(PlanarImage(4, 4, 1.0)));
  EXPECT_NEAR(v(2, 2), 255.0, 1e-9);
  EXPECT_NEAR(v(0, 0), 0.0, 1e-10);
}
