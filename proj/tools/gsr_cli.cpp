// gsr: command-line front end for Gaussian microtexture super-resolution.
//
// Exit status: 0 success, 2 configuration error, 3 I/O error,
// 4 numerical failure. Errors are reported on stderr as one "error: ..." line.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "gsr/adsn.hpp"
#include "gsr/analysis.hpp"
#include "gsr/cgd.hpp"
#include "gsr/degradation.hpp"
#include "gsr/error.hpp"
#include "gsr/grid.hpp"
#include "gsr/imageio.hpp"
#include "gsr/kriging.hpp"

namespace fs = std::filesystem;
using namespace gsr;

namespace {

struct RunConfig {
  std::string command;
  std::string input;
  std::string reference;
  std::string output;
  int stride = 2;
  std::string op = "bicubic";
  double epsilon = kDefaultPseudoInverseTolerance;
  std::uint64_t seed = 0;
  int count = 1;
  int cgd_steps = 1000;
  double cgd_eps = 0.0;
  double peak = kDefaultPeak;
  bool no_periodic = false;
  bool gray = false;
  bool stride_given = false;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::CorruptHeader:
      return 3;
    case ErrorCode::AllFrequenciesZeroed:
    case ErrorCode::DegenerateModel:
    case ErrorCode::NumericalBreakdown:
    case ErrorCode::NonHermitianSpectrum:
      return 4;
    default:
      return 2;
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

// --output may carry a .pfm/.png extension; outputs are derived from the stem.
std::string output_prefix(const RunConfig& cfg) {
  require(!cfg.output.empty(), "--output is required");
  fs::path p(cfg.output);
  const std::string ext = p.extension().string();
  if (ext == ".pfm" || ext == ".png" || ext == ".PFM" || ext == ".PNG") p.replace_extension();
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

Channels to_gray(const Channels& planes) {
  if (planes.size() != 3) return planes;
  return {0.299 * planes[0] + 0.587 * planes[1] + 0.114 * planes[2]};
}

Channels load(const std::string& path, const RunConfig& cfg, const char* flag) {
  require(!path.empty(), std::string(flag) + " is required");
  Channels planes = read_image(path).planes;
  return cfg.gray ? to_gray(planes) : planes;
}

DegradationOperator make_operator(const RunConfig& cfg, int hr_width, int hr_height) {
  if (cfg.op == "bicubic") return bicubic_operator(hr_width, hr_height, cfg.stride);
  if (cfg.op.rfind("file:", 0) == 0) {
    const KernelTaps k = read_kernel(cfg.op.substr(5));
    DegradationOperator A = custom_operator(k.taps, hr_width, hr_height, cfg.stride, k.center_row, k.center_col);
    if (A.renormalized()) std::cerr << "warning: kernel taps renormalised to sum to one\n";
    return A;
  }
  fail(ErrorCode::InvalidArgument, "--operator must be 'bicubic' or 'file:<path>'");
}

void write_pair(const Channels& planes, const std::string& stem, double peak) {
  write_pfm(planes, stem + ".pfm");
  write_png(planes, stem + ".png", peak);
}

Channels shifted(Channels planes, const std::vector<double>& means) {
  for (std::size_t c = 0; c < planes.size(); ++c) planes[c] += means[c];
  return planes;
}

// Display scaling for non-negative maps: max value -> 255.
void write_map_png(const PlanarImage& map, const std::string& path) {
  const double hi = max_abs(map);
  write_png({hi > 0.0 ? map * (255.0 / hi) : map}, path, 255.0);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot create " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

void echo_config(const RunConfig& cfg, const std::string& prefix) {
  std::ostringstream out;
  out.precision(17);
  out << "command=" << cfg.command << '\n'
      << "input=" << cfg.input << '\n'
      << "reference=" << cfg.reference << '\n'
      << "output=" << cfg.output << '\n'
      << "stride=" << cfg.stride << '\n'
      << "operator=" << cfg.op << '\n'
      << "epsilon=" << cfg.epsilon << '\n'
      << "seed=" << cfg.seed << '\n'
      << "count=" << cfg.count << '\n'
      << "cgd_steps=" << cfg.cgd_steps << '\n'
      << "cgd_eps=" << cfg.cgd_eps << '\n'
      << "peak=" << cfg.peak << '\n'
      << "use_periodic=" << (cfg.no_periodic ? "false" : "true") << '\n'
      << "gray=" << (cfg.gray ? "true" : "false") << '\n';
  write_text(prefix + ".config.txt", out.str());
}

void warn_degenerate(bool degenerate) {
  if (degenerate) {
    std::cerr << "warning: degenerate model (kappa is zero); the kriging step returns the mean\n";
  }
}

// Reference model and matching operator for an LR observation.
struct Setup {
  AdsnModel model;
  DegradationOperator A;
  Channels u_lr;
};

Setup load_setup(const RunConfig& cfg) {
  Channels reference = load(cfg.reference, cfg, "--reference");
  Channels u_lr;
  if (!cfg.input.empty()) {
    u_lr = load(cfg.input, cfg, "--input");
    require(u_lr.size() == reference.size(),
            "--input and --reference must have the same channel count (use --gray)");
    if (u_lr[0].width() * cfg.stride != reference[0].width() ||
        u_lr[0].height() * cfg.stride != reference[0].height()) {
      fail(ErrorCode::DimensionMismatch, "--reference must be --stride times the --input size");
    }
  }
  DegradationOperator A = make_operator(cfg, reference[0].width(), reference[0].height());
  if (u_lr.empty()) u_lr = degrade(A, reference);
  return Setup{build_model(reference, !cfg.no_periodic), std::move(A), std::move(u_lr)};
}

int cmd_degrade(const RunConfig& cfg) {
  const std::string prefix = output_prefix(cfg);
  const Channels u = load(cfg.input, cfg, "--input");
  const DegradationOperator A = make_operator(cfg, u[0].width(), u[0].height());
  write_pair(degrade(A, u), prefix, cfg.peak);
  echo_config(cfg, prefix);
  return 0;
}

int cmd_build_model(const RunConfig& cfg) {
  const std::string prefix = output_prefix(cfg);
  const AdsnModel model = build_model(load(cfg.reference, cfg, "--reference"), !cfg.no_periodic);
  write_pfm(model.textons(), prefix + "_texton.pfm");
  std::ostringstream means;
  means.precision(17);
  for (std::size_t c = 0; c < model.channels(); ++c) means << "mean_" << c << '=' << model.means()[c] << '\n';
  write_text(prefix + "_means.txt", means.str());
  write_pair(adsn_sample(model, NoiseSeed{cfg.seed}), prefix + "_adsn", cfg.peak);
  echo_config(cfg, prefix);
  return 0;
}

int cmd_sample(const RunConfig& cfg) {
  require(cfg.count >= 1, "--count must be >= 1");
  const std::string prefix = output_prefix(cfg);
  require(!cfg.input.empty(), "--input is required");
  const Setup s = load_setup(cfg);
  const KrigingKernel k = kriging_kernel(s.model, s.A, cfg.epsilon);
  warn_degenerate(k.degenerate());
  for (int i = 0; i < cfg.count; ++i) {
    const SrSample out = sr_sample(s.model, k, s.u_lr, s.A, NoiseSeed{cfg.seed}.next(static_cast<std::uint64_t>(i)));
    if (i == 0) write_pair(out.kriging_component, prefix + "_kriging", cfg.peak);
    const std::string tag = std::to_string(i);
    write_pair(out.sample, prefix + "_sample_" + tag, cfg.peak);
    write_pfm(out.innovation_component, prefix + "_innovation_" + tag + ".pfm");
    write_png(shifted(out.innovation_component, out.mean), prefix + "_innovation_" + tag + ".png", cfg.peak);
  }
  echo_config(cfg, prefix);
  return 0;
}

int cmd_cgd_sample(const RunConfig& cfg) {
  require(cfg.count >= 1, "--count must be >= 1");
  const std::string prefix = output_prefix(cfg);
  require(!cfg.input.empty(), "--input is required");
  const Setup s = load_setup(cfg);
  const CgdConfig cgd{cfg.cgd_eps, cfg.cgd_steps};
  cgd.validate();

  Channels centred = s.u_lr;
  for (auto& plane : centred) plane -= mean(plane);
  const NormalOperator B(s.model, s.A);
  const double b_phi = norm2(B.apply(centred));

  std::ostringstream report;
  report.precision(17);
  for (int i = 0; i < cfg.count; ++i) {
    const CgdSample out = cgd_sr_sample(s.model, s.u_lr, s.A, NoiseSeed{cfg.seed}.next(static_cast<std::uint64_t>(i)), cgd);
    const SrSample& smp = out.sample;
    if (i == 0) {
      write_pair(smp.kriging_component, prefix + "_kriging", cfg.peak);
      const Channels psi = unflatten(out.kriging_solve.solution, centred.size(), s.A.lr_width(), s.A.lr_height());
      const double res = residual(s.model, s.A, centred, psi);
      report << "residual=" << res << '\n'
             << "relative_residual=" << (b_phi > 0.0 ? res / b_phi : 0.0) << '\n'
             << "iterations=" << out.kriging_solve.iterations << '\n'
             << "restarts=" << out.kriging_solve.restarts << '\n'
             << "max_steps=" << cfg.cgd_steps << '\n';
    }
    const std::string tag = std::to_string(i);
    write_pair(smp.sample, prefix + "_sample_" + tag, cfg.peak);
    write_pfm(smp.innovation_component, prefix + "_innovation_" + tag + ".pfm");
    write_png(shifted(smp.innovation_component, smp.mean), prefix + "_innovation_" + tag + ".png", cfg.peak);
    report << "innovation_iterations_" << tag << '=' << out.innovation_solve.iterations << '\n';
  }
  write_text(prefix + "_residual.txt", report.str());
  echo_config(cfg, prefix);
  return 0;
}

int cmd_variance(const RunConfig& cfg) {
  require(cfg.count >= 1, "--count must be >= 1");
  const std::string prefix = output_prefix(cfg);
  const Setup s = load_setup(cfg);
  const KrigingKernel k = kriging_kernel(s.model, s.A, cfg.epsilon);
  warn_degenerate(k.degenerate());
  const VarianceMap theory = theoretical_variance_map(s.model, s.A, k);
  write_pfm({theory.total}, prefix + "_theoretical.pfm");
  write_map_png(theory.total, prefix + "_theoretical.png");
  if (cfg.count >= 2) {
    std::vector<Channels> samples;
    for (int i = 0; i < cfg.count; ++i) {
      samples.push_back(sr_sample(s.model, k, s.u_lr, s.A, NoiseSeed{cfg.seed}.next(static_cast<std::uint64_t>(i))).sample);
    }
    const VarianceMap empirical = empirical_variance_map(samples);
    write_pfm({empirical.total}, prefix + "_empirical.pfm");
    write_map_png(empirical.total, prefix + "_empirical.png");
  }
  echo_config(cfg, prefix);
  return 0;
}

int cmd_metrics(const RunConfig& cfg) {
  const std::string prefix = output_prefix(cfg);
  const Channels image = load(cfg.input, cfg, "--input");
  const Channels reference = load(cfg.reference, cfg, "--reference");
  require(image.size() == reference.size(), "--input and --reference channel counts differ");
  MetricsReport report;
  if (cfg.stride_given) {
    const DegradationOperator A = make_operator(cfg, reference[0].width(), reference[0].height());
    const Channels u_lr = degrade(A, reference);
    report = compute_metrics(image, reference, cfg.peak, &u_lr, &A);
  } else {
    report = compute_metrics(image, reference, cfg.peak);
  }
  write_text(prefix + ".txt", report.to_text());
  write_text(prefix + ".json", report.to_json());
  std::cout << report.to_text();
  echo_config(cfg, prefix);
  return 0;
}

int cmd_inspect_kernel(const RunConfig& cfg) {
  const std::string prefix = output_prefix(cfg);
  const Setup s = load_setup(cfg);
  const KrigingKernel k = kriging_kernel(s.model, s.A, cfg.epsilon);
  warn_degenerate(k.degenerate());
  std::ostringstream report;
  report.precision(17);
  for (std::size_t c = 0; c < k.channels(); ++c) {
    const std::string tag = k.channels() == 1 ? "" : "_c" + std::to_string(c);
    write_spectrum_png(k.lambda_spectrum(c), prefix + "_lambda" + tag + ".png");
    write_spectrum_png(k.kappa_spectrum(c), prefix + "_kappa" + tag + ".png");
    write_spectrum_png(k.kappa_pinv_spectrum(c), prefix + "_kappa_pinv" + tag + ".png");
    report << "zeroed_frequencies_" << c << '=' << k.zeroed_frequencies(c) << '\n'
           << "max_lambda_modulus_" << c << '=' << k.max_lambda_modulus(c) << '\n'
           << "degenerate_" << c << '=' << (k.degenerate(c) ? "true" : "false") << '\n';
  }
  write_text(prefix + "_kernel.txt", report.str());
  echo_config(cfg, prefix);
  return 0;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "Input image (PNG or PFM)");
  sub->add_option("--reference", cfg.reference, "Reference texture image");
  sub->add_option("--output", cfg.output, "Output prefix");
  sub->add_option("--stride", cfg.stride, "Zoom factor r")->check(CLI::PositiveNumber);
  sub->add_option("--operator", cfg.op, "bicubic | file:<kernel.txt>");
  sub->add_option("--epsilon", cfg.epsilon, "Relative pseudo-inverse cutoff");
  sub->add_option("--seed", cfg.seed, "Base noise seed");
  sub->add_option("--count", cfg.count, "Number of samples");
  sub->add_option("--cgd-steps", cfg.cgd_steps, "Conjugate gradient step budget");
  sub->add_option("--cgd-eps", cfg.cgd_eps, "Conjugate gradient stopping threshold");
  sub->add_option("--peak", cfg.peak, "Peak value for PSNR/SSIM and PNG scaling");
  sub->add_flag("--no-periodic", cfg.no_periodic, "Skip the periodic component");
  sub->add_flag("--gray", cfg.gray, "Convert inputs to grayscale");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic super-resolution of Gaussian microtextures"};
  app.require_subcommand(1);
  RunConfig cfg;
  const std::pair<const char*, const char*> commands[] = {
      {"degrade", "Apply the zoom-out operator A = S C_c"},
      {"build-model", "Estimate the ADSN texton from a reference"},
      {"sample", "Draw conditional super-resolution samples"},
      {"cgd-sample", "Conditional samples with the conjugate gradient solver"},
      {"variance", "Theoretical and empirical variance maps"},
      {"metrics", "PSNR, SSIM, MSE and LR-PSNR against a reference"},
      {"inspect-kernel", "Log-modulus spectra of lambda, kappa and kappa^+"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, cfg);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    for (CLI::App* sub : subs) {
      if (!sub->parsed()) continue;
      cfg.command = sub->get_name();
      cfg.stride_given = sub->count("--stride") > 0;
      if (cfg.command == "degrade") return cmd_degrade(cfg);
      if (cfg.command == "build-model") return cmd_build_model(cfg);
      if (cfg.command == "sample") return cmd_sample(cfg);
      if (cfg.command == "cgd-sample") return cmd_cgd_sample(cfg);
      if (cfg.command == "variance") return cmd_variance(cfg);
      if (cfg.command == "metrics") return cmd_metrics(cfg);
      if (cfg.command == "inspect-kernel") return cmd_inspect_kernel(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: IoError: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 2;
}
