#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agkmap/dedup.hpp"
#include "agkmap/density_map.hpp"
#include "agkmap/evaluation.hpp"
#include "agkmap/image.hpp"
#include "agkmap/kernels.hpp"

namespace agkmap {

namespace fs = std::filesystem;

struct JobConfig {
  std::vector<fs::path> annotation_paths;  // files or directories of *.json
  std::optional<fs::path> image_dir;
  fs::path output_dir;
  Scheme scheme = Scheme::agk;
  KernelConfig kernel;
  std::vector<MaskRect> masks;
  std::size_t jobs = 1;
  bool write_pgm = false;
};

struct ImageSummary {
  std::string image_id;
  std::size_t labels = 0;
  double count = 0.0;
  fs::path output;
  std::vector<std::string> warnings;
};

struct GenerateSummary {
  std::vector<ImageSummary> images;  // in input order
  std::vector<std::string> errors;   // per-file failures
  double wall_seconds = 0.0;

  [[nodiscard]] bool ok() const noexcept { return errors.empty(); }
};

/// Parses "x,y,w,h". Throws std::invalid_argument.
MaskRect parse_mask(const std::string& text);

/// Expands directories to their *.json files (sorted by name).
std::vector<fs::path> collect_files(const std::vector<fs::path>& paths, const std::string& extension);

/// Writes <output_dir>/<image_id>.dmap for every annotation. Output bytes do
/// not depend on `jobs`. Malformed files are reported in `errors` and
/// skipped.
GenerateSummary run_generate(const JobConfig& config);

nlohmann::json summary_to_json(const GenerateSummary& summary, bool round_counts);

/// Loads every *.dmap in a directory, keyed by file stem.
MapSet load_map_dir(const fs::path& dir);

EvalReport run_eval(const fs::path& gt_dir, const fs::path& pred_dir);

nlohmann::json report_to_json(const EvalReport& report);
std::string records_to_csv(const EvalReport& report, bool round_counts);

struct DedupOptions {
  std::optional<fs::path> features_dir;  // *.fst files
  std::optional<fs::path> images_dir;    // *.pgm / *.ppm through the built-in pyramid
  double threshold = kDefaultDedupThreshold;
};

/// Inputs are scanned in file-name order.
DedupResult run_dedup(const DedupOptions& options);

nlohmann::json dedup_to_json(const DedupResult& result, double threshold);

/// True for ids usable as a single file name component.
bool valid_image_id(const std::string& id);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomically(const fs::path& path, const std::string& contents);

}  // namespace agkmap
