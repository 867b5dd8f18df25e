// Batch command-line surface over the fovkit library. One-shot subcommands
// only; every run is deterministic given its flags.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "fovkit/fovkit.hpp"

using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitNumerical = 4;

fovkit::cplx parse_amplitude(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2)
    return {j.at(0).get<double>(), j.at(1).get<double>()};
  throw fovkit::FormatError("amplitude must be a number or [re, im]");
}

fovkit::PhantomSpec parse_phantom_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw fovkit::FormatError("cannot open phantom spec: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw fovkit::FormatError("bad phantom spec JSON: " + std::string(e.what()));
  }
  try {
    fovkit::PhantomSpec spec;
    spec.dims = fovkit::GridDims(j.at("rows").get<int>(), j.at("cols").get<int>());
    spec.support_margin = j.value("support_margin", 0);
    for (const auto& js : j.value("shapes", json::array())) {
      fovkit::Shape s;
      const std::string kind = js.at("kind").get<std::string>();
      if (kind == "ellipse")
        s.kind = fovkit::Shape::Kind::ellipse;
      else if (kind == "rectangle")
        s.kind = fovkit::Shape::Kind::rectangle;
      else
        throw fovkit::FormatError("unknown shape kind: " + kind);
      const auto& center = js.at("center");
      s.center_row = center.at(0).get<double>();
      s.center_col = center.at(1).get<double>();
      const auto& half = js.contains("half_axes") ? js.at("half_axes") : js.at("half_extents");
      s.half_rows = half.at(0).get<double>();
      s.half_cols = half.at(1).get<double>();
      s.amplitude = parse_amplitude(js.at("amplitude"));
      spec.shapes.push_back(s);
    }
    return spec;
  } catch (const json::exception& e) {
    throw fovkit::FormatError("bad phantom spec JSON: " + std::string(e.what()));
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw fovkit::FormatError("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

// acquired data on disk is a full-grid raster; gather pulls the marked values
fovkit::KSpaceData load_kspace(const std::string& data_path, const std::string& pattern_path) {
  const fovkit::CfovFile file = fovkit::read_cfov(data_path);
  const fovkit::SamplingPattern pattern = fovkit::read_pbm_pattern(pattern_path);
  if (!(file.dims() == pattern.dims))
    throw fovkit::DimMismatch("data and pattern grids differ");
  std::vector<std::vector<fovkit::cplx>> samples;
  samples.reserve(file.coils.size());
  for (const auto& grid : file.coils) samples.push_back(fovkit::gather(pattern, grid));
  // the KSpaceData constructor rejects non-finite marked samples; unmarked
  // grid entries are ignored entirely
  return fovkit::KSpaceData(pattern, std::move(samples));
}

fovkit::CoilSet load_coils(const std::string& sens_path, const fovkit::SupportMask& fov,
                           double theta) {
  const fovkit::CfovFile file = fovkit::read_cfov(sens_path);
  if (!(file.dims() == fov.dims))
    throw fovkit::DimMismatch("sensitivity and mask grids differ");
  std::vector<fovkit::SupportMask> supports;
  supports.reserve(file.coils.size());
  for (const auto& sens : file.coils) {
    fovkit::SupportMask sup = fovkit::coil_support(sens, theta);
    for (std::size_t i = 0; i < sup.data.size(); ++i) sup.data[i] &= fov.data[i];
    supports.push_back(std::move(sup));
  }
  return fovkit::CoilSet(file.coils, std::move(supports));
}

json report_of(const fovkit::SolveReport& report) {
  return json{{"iterations", report.iterations},
              {"residual_history", report.residual_history},
              {"stop_reason", fovkit::to_string(report.stop_reason)}};
}

struct ReconArgs {
  std::string algorithm;
  std::string data_path, pattern_path, mask_path, out_path;
  std::string coils_path, report_path;
  double tol = 1e-8;
  int max_iters = 500;
  double support_theta = 0.05;
};

int run_recon(const ReconArgs& args) {
  const fovkit::SupportMask mask = fovkit::read_pbm_mask(args.mask_path);
  const fovkit::KSpaceData data = load_kspace(args.data_path, args.pattern_path);
  std::optional<fovkit::CoilSet> coils;
  if (!args.coils_path.empty())
    coils = load_coils(args.coils_path, mask, args.support_theta);
  if (data.coils > 1 && !coils)
    throw fovkit::CoilCountMismatch("multi-coil data needs --coils");
  if (coils && coils->count() != data.coils)
    throw fovkit::CoilCountMismatch("coil counts of data and sensitivities differ");

  fovkit::ComplexImage out;
  json report;
  report["algorithm"] = args.algorithm;

  if (args.algorithm == "direct") {
    if (data.coils == 1 && !coils) {
      const fovkit::Decomposition dec = fovkit::decompose(mask);
      out = fovkit::recon_direct(data, dec);
      report["m"] = dec.m;
      report["H_inner"] = dec.inner_interval.height;
    } else {
      std::vector<fovkit::Decomposition> decs;
      for (const auto& sup : coils->supports) decs.push_back(fovkit::decompose(sup));
      out = fovkit::recon_direct_parallel(data, decs, *coils);
      report["m"] = data.pattern.subsample_factor_m;
    }
  } else if (args.algorithm == "lsqr") {
    std::vector<fovkit::cplx> b;
    for (const auto& coil : data.samples) b.insert(b.end(), coil.begin(), coil.end());
    const fovkit::ForwardModel model =
        coils ? fovkit::ForwardModel(mask, data.pattern, *coils)
              : fovkit::ForwardModel(mask, data.pattern);
    const auto [x, solve_report] =
        coils ? fovkit::solve_parallel(model, b, args.tol, args.max_iters)
              : fovkit::solve_lsqr(model, b, args.tol, args.max_iters);
    out = fovkit::scatter(mask, x);
    report.update(report_of(solve_report));
  } else {  // pocs
    if (data.coils != 1)
      throw fovkit::MultiCoilNotAllowed("pocs is single-coil; use lsqr for parallel data");
    const auto [img, solve_report] =
        fovkit::solve_pocs(mask, data.pattern, data.samples.front(), args.tol, args.max_iters);
    out = img;
    report.update(report_of(solve_report));
  }

  if (!fovkit::all_finite(out)) throw fovkit::Error("reconstruction produced non-finite values");
  fovkit::write_cfov(args.out_path, {out});
  if (!args.report_path.empty()) write_json(args.report_path, report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-FOV k-space sampling and reconstruction toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads for transforms (default 1)");

  // phantom
  std::string spec_path, out_img, out_mask;
  auto* phantom = app.add_subcommand("phantom", "render a synthetic phantom");
  phantom->add_option("--spec", spec_path, "phantom spec JSON")->required();
  phantom->add_option("--out-img", out_img, "output image (CFOV1)")->required();
  phantom->add_option("--out-mask", out_mask, "output FOV mask (PBM)")->required();

  // pattern
  std::string mask_path, pattern_out, pattern_report;
  auto* pattern = app.add_subcommand("pattern", "synthesize the reduced sampling pattern");
  pattern->add_option("--mask", mask_path, "FOV mask (PBM)")->required();
  pattern->add_option("--out", pattern_out, "output pattern (PBM)")->required();
  pattern->add_option("--report", pattern_report, "decomposition report (JSON)");

  // simulate
  std::string sim_img, sim_pattern, sim_coils, sim_out;
  double noise = 0.0;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "acquire k-space data from an image");
  simulate->add_option("--img", sim_img, "image (CFOV1)")->required();
  simulate->add_option("--pattern", sim_pattern, "sampling pattern (PBM)")->required();
  simulate->add_option("--coils", sim_coils, "coil sensitivities (CFOV1)");
  simulate->add_option("--noise", noise, "complex Gaussian noise sigma per component");
  simulate->add_option("--seed", seed, "noise seed");
  simulate->add_option("--out", sim_out, "output k-space data (CFOV1)")->required();

  // recon
  ReconArgs recon_args;
  auto* recon = app.add_subcommand("recon", "reconstruct an image from k-space data");
  recon->add_option("algorithm", recon_args.algorithm, "direct | lsqr | pocs")
      ->required()
      ->check(CLI::IsMember({"direct", "lsqr", "pocs"}));
  recon->add_option("--data", recon_args.data_path, "k-space data (CFOV1)")->required();
  recon->add_option("--pattern", recon_args.pattern_path, "sampling pattern (PBM)")->required();
  recon->add_option("--mask", recon_args.mask_path, "FOV mask (PBM)")->required();
  recon->add_option("--coils", recon_args.coils_path, "coil sensitivities (CFOV1)");
  recon->add_option("--tol", recon_args.tol, "iterative solver tolerance");
  recon->add_option("--max-iters", recon_args.max_iters, "iteration cap");
  recon->add_option("--support-theta", recon_args.support_theta,
                    "intensity fraction for per-coil supports");
  recon->add_option("--out", recon_args.out_path, "output image (CFOV1)")->required();
  recon->add_option("--report", recon_args.report_path, "solver report (JSON)");

  // combine
  std::string comb_imgs, comb_sens, comb_out;
  auto* combine = app.add_subcommand("combine", "Roemer-combine per-coil images");
  combine->add_option("--imgs", comb_imgs, "per-coil images (multi-coil CFOV1)")->required();
  combine->add_option("--sens", comb_sens, "coil sensitivities (CFOV1)")->required();
  combine->add_option("--out", comb_out, "output image (CFOV1)")->required();

  // compare
  std::string cmp_a, cmp_b, cmp_mask, cmp_out;
  auto* compare = app.add_subcommand("compare", "error metrics between two images");
  compare->add_option("--a", cmp_a, "image A (CFOV1)")->required();
  compare->add_option("--b", cmp_b, "reference image B (CFOV1)")->required();
  compare->add_option("--mask", cmp_mask, "restrict metrics to a mask (PBM)");
  compare->add_option("--out", cmp_out, "metrics (JSON)")->required();

  // export
  std::string exp_img, exp_out;
  std::optional<double> exp_scale;
  auto* exporter = app.add_subcommand("export", "write a 16-bit magnitude PGM");
  exporter->add_option("--img", exp_img, "image (CFOV1)")->required();
  exporter->add_option("--out", exp_out, "output image (PGM)")->required();
  exporter->add_option("--scale", exp_scale,
                       "fixed magnitude scale (min-max stretch when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (threads > 0) fovkit::set_threads(threads);

  try {
    if (*phantom) {
      const fovkit::PhantomSpec spec = parse_phantom_spec(spec_path);
      const auto [img, mask] = fovkit::render_phantom(spec);
      fovkit::write_cfov(out_img, {img});
      fovkit::write_pbm(out_mask, mask);
      return kExitOk;
    }
    if (*pattern) {
      const fovkit::SupportMask mask = fovkit::read_pbm_mask(mask_path);
      const fovkit::Decomposition dec = fovkit::decompose(mask);
      const fovkit::SamplingPattern p = fovkit::reduced_pattern(dec);
      fovkit::write_pbm(pattern_out, p);
      if (!pattern_report.empty())
        write_json(pattern_report, json{{"H_inner", dec.inner_interval.height},
                                        {"m", dec.m},
                                        {"burden", fovkit::burden(p)}});
      return kExitOk;
    }
    if (*simulate) {
      const fovkit::CfovFile img_file = fovkit::read_cfov(sim_img);
      if (img_file.coils.size() != 1)
        throw fovkit::FormatError("simulate expects a single-coil image file");
      if (!fovkit::all_finite(img_file.coils.front()))
        throw fovkit::Error("image contains non-finite values");
      const fovkit::SamplingPattern p = fovkit::read_pbm_pattern(sim_pattern);
      std::optional<fovkit::CoilSet> coils;
      if (!sim_coils.empty()) {
        const fovkit::CfovFile sens = fovkit::read_cfov(sim_coils);
        std::vector<fovkit::SupportMask> all(sens.coils.size(),
                                             fovkit::SupportMask(sens.dims()));
        for (auto& s : all) std::fill(s.data.begin(), s.data.end(), std::uint8_t{1});
        coils = fovkit::CoilSet(sens.coils, std::move(all));
      }
      const fovkit::KSpaceData data =
          fovkit::simulate_kspace(img_file.coils.front(), p, coils, noise, seed);
      std::vector<fovkit::ComplexImage> grids;
      grids.reserve(static_cast<std::size_t>(data.coils));
      for (const auto& s : data.samples) grids.push_back(fovkit::scatter(p, s));
      fovkit::write_cfov(sim_out, grids, fovkit::kCfovFlagKSpace);
      return kExitOk;
    }
    if (*recon) return run_recon(recon_args);
    if (*combine) {
      const fovkit::CfovFile imgs = fovkit::read_cfov(comb_imgs);
      const fovkit::CfovFile sens = fovkit::read_cfov(comb_sens);
      if (!(imgs.dims() == sens.dims()))
        throw fovkit::DimMismatch("image and sensitivity grids differ");
      std::vector<fovkit::SupportMask> all(sens.coils.size(), fovkit::SupportMask(sens.dims()));
      for (auto& s : all) std::fill(s.data.begin(), s.data.end(), std::uint8_t{1});
      const fovkit::CoilSet coils(sens.coils, std::move(all));
      fovkit::write_cfov(comb_out, {fovkit::roemer_combine(imgs.coils, coils)});
      return kExitOk;
    }
    if (*compare) {
      const fovkit::CfovFile a = fovkit::read_cfov(cmp_a);
      const fovkit::CfovFile b = fovkit::read_cfov(cmp_b);
      if (a.coils.size() != 1 || b.coils.size() != 1)
        throw fovkit::FormatError("compare expects single-coil images");
      std::optional<fovkit::SupportMask> mask;
      if (!cmp_mask.empty()) mask = fovkit::read_pbm_mask(cmp_mask);
      const fovkit::Metrics m = fovkit::metrics(a.coils.front(), b.coils.front(), mask);
      write_json(cmp_out,
                 json{{"mse", m.mse}, {"max_abs_diff", m.max_abs_diff}, {"rel_l2", m.rel_l2}});
      return kExitOk;
    }
    if (*exporter) {
      const fovkit::CfovFile img = fovkit::read_cfov(exp_img);
      if (img.coils.size() != 1)
        throw fovkit::FormatError("export expects a single-coil image");
      fovkit::write_pgm16(exp_out, img.coils.front(), exp_scale);
      return kExitOk;
    }
  } catch (const fovkit::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const fovkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
