// agkmap: density maps from line labels, evaluation, dataset dedup and the
// annotation service.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "agkmap/pipeline.hpp"
#include "agkmap/service.hpp"

namespace {

using namespace agkmap;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
}

void add_kernel_flags(CLI::App& cmd, KernelConfig& cfg) {
  cmd.add_option("--sigma-basic", cfg.sigma_basic, "Base sigma in pixels")->capture_default_str();
  cmd.add_option("--a", cfg.a, "Expanding factor of the line sigma schedule")->capture_default_str();
  cmd.add_option("--ar", cfg.aspect_ratio, "Object aspect ratio (sigma1 / sigma2)")->capture_default_str();
  cmd.add_option("--alpha", cfg.alpha, "FWHM penalizer")->capture_default_str();
  cmd.add_option("--fwhm", cfg.fwhm_const, "FWHM / sigma constant")->capture_default_str();
  cmd.add_option("--trunc-mult", cfg.trunc_mult, "Kernel window half-width in sigmas")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density maps from line-segment labels"};
  app.require_subcommand(1);

  JobConfig job;
  std::string scheme = "agk";
  std::vector<std::string> masks;
  std::string image_dir;
  bool round_counts = false;
  std::string summary_path;
  auto* generate = app.add_subcommand("generate", "Write one DMAP file per annotated image");
  generate->add_option("annotations", job.annotation_paths, "Annotation JSON files or directories")->required();
  generate->add_option("-o,--out", job.output_dir, "Output directory")->required();
  generate->add_option("--scheme", scheme, "Labeling scheme")
      ->check(CLI::IsMember({"dot", "line", "agk"}))
      ->capture_default_str();
  add_kernel_flags(*generate, job.kernel);
  generate->add_option("--images", image_dir, "Image directory (for --mask)");
  generate->add_option("--mask", masks, "Watermark rectangle x,y,w,h filled black in masked image copies");
  generate->add_option("-j,--jobs", job.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  generate->add_flag("--pgm", job.write_pgm, "Also write 16-bit PGM previews");
  generate->add_flag("--round-counts", round_counts, "Round counts in the summary");
  generate->add_option("--summary", summary_path, "Write the JSON summary here instead of stdout");

  std::string gt_dir, pred_dir, report_path, csv_path;
  auto* eval = app.add_subcommand("eval", "Score predicted DMAPs against ground truth");
  eval->add_option("--gt", gt_dir, "Ground-truth DMAP directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--pred", pred_dir, "Predicted DMAP directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--report", report_path, "JSON report path (default stdout)");
  eval->add_option("--csv", csv_path, "Per-image CSV path");
  eval->add_flag("--round-counts", round_counts, "Round counts in the CSV");

  DedupOptions dedup_opts;
  std::string features_dir, dedup_images, dedup_report;
  auto* dedup = app.add_subcommand("dedup", "Drop near-duplicate images by feature distance");
  auto* feat_opt = dedup->add_option("--features", features_dir, "Directory of FST5 feature stacks")
                       ->check(CLI::ExistingDirectory);
  dedup->add_option("--images", dedup_images, "Directory of PGM/PPM images (built-in pyramid)")
      ->check(CLI::ExistingDirectory)
      ->excludes(feat_opt);
  dedup->add_option("--threshold", dedup_opts.threshold, "Drop when distance < threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  dedup->add_option("--report", dedup_report, "JSON report path (default stdout)");

  int port = 8080;
  std::string host = "0.0.0.0", serve_images, serve_annotations;
  auto* serve_cmd = app.add_subcommand("serve", "Run the annotation HTTP service");
  serve_cmd->add_option("--port", port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--images", serve_images, "Image directory")->required()->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--annotations", serve_annotations, "Annotation directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      job.scheme = parse_scheme(scheme);
      if (!image_dir.empty()) job.image_dir = image_dir;
      for (const auto& m : masks) job.masks.push_back(parse_mask(m));
      if (!job.masks.empty() && !job.image_dir) throw std::invalid_argument("--mask needs --images");

      const auto summary = run_generate(job);
      for (const auto& img : summary.images) {
        for (const auto& w : img.warnings) std::cerr << "warning: " << w << '\n';
      }
      for (const auto& e : summary.errors) std::cerr << "error: " << e << '\n';
      const auto text = summary_to_json(summary, round_counts).dump(2) + "\n";
      if (summary_path.empty()) std::cout << text;
      else write_text(summary_path, text);
      return summary.ok() ? 0 : 1;
    }
    if (*eval) {
      const auto report = run_eval(gt_dir, pred_dir);
      const auto text = report_to_json(report).dump(2) + "\n";
      if (report_path.empty()) std::cout << text;
      else write_text(report_path, text);
      if (!csv_path.empty()) write_text(csv_path, records_to_csv(report, round_counts));
      return 0;
    }
    if (*dedup) {
      if (!features_dir.empty()) dedup_opts.features_dir = features_dir;
      if (!dedup_images.empty()) dedup_opts.images_dir = dedup_images;
      const auto result = run_dedup(dedup_opts);
      const auto text = dedup_to_json(result, dedup_opts.threshold).dump(2) + "\n";
      if (dedup_report.empty()) std::cout << text;
      else write_text(dedup_report, text);
      std::cerr << "kept " << result.kept.size() << ", dropped " << result.dropped.size() << '\n';
      return 0;
    }
    if (*serve_cmd) {
      std::cerr << "serving on " << host << ":" << port << '\n';
      serve(port, serve_images, serve_annotations, host);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
