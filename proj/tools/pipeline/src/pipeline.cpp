#include "agkmap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "agkmap/formats.hpp"

namespace agkmap {

using nlohmann::json;

MaskRect parse_mask(const std::string& text) {
  MaskRect rect;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> rect.x >> c1 >> rect.y >> c2 >> rect.w >> c3 >> rect.h) || c1 != ',' || c2 != ',' || c3 != ',' ||
      !(in >> std::ws).eof()) {
    throw std::invalid_argument("mask '" + text + "': expected x,y,w,h");
  }
  if (rect.w <= 0 || rect.h <= 0) throw std::invalid_argument("mask '" + text + "': width and height must be positive");
  return rect;
}

std::vector<fs::path> collect_files(const std::vector<fs::path>& paths, const std::string& extension) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

bool valid_image_id(const std::string& id) {
  if (id.empty() || id.size() > 255 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '.';
  });
}

void write_atomically(const fs::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp." + std::to_string(rd()) + "." +
                                            std::to_string(counter.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error(tmp.string() + ": write failed");
    }
  }
  fs::rename(tmp, path);
}

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
}

std::optional<fs::path> find_image(const fs::path& dir, const std::string& id) {
  for (const char* ext : {".pgm", ".ppm"}) {
    const fs::path p = dir / (id + ext);
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

}  // namespace

GenerateSummary run_generate(const JobConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.kernel.validate();
  GenerateSummary summary;

  std::vector<AnnotationSet> sets;
  std::vector<std::vector<std::string>> warnings;
  std::set<std::string> seen;
  for (const auto& file : collect_files(config.annotation_paths, ".json")) {
    try {
      for (auto& loaded : read_annotation_file(file)) {
        const auto& id = loaded.set.image_id;
        if (!valid_image_id(id)) {
          summary.errors.push_back(file.string() + ": image id '" + id + "' is not a valid file name");
          continue;
        }
        if (!seen.insert(id).second) {
          summary.errors.push_back(file.string() + ": duplicate image id '" + id + "'");
          continue;
        }
        sets.push_back(std::move(loaded.set));
        warnings.push_back(std::move(loaded.warnings));
      }
    } catch (const std::exception& e) {
      summary.errors.push_back(e.what());
    }
  }

  fs::create_directories(config.output_dir);
  summary.images.resize(sets.size());
  std::vector<std::string> failures(sets.size());

  parallel_for(sets.size(), config.jobs, [&](std::size_t i) {
    const auto& ann = sets[i];
    auto& out = summary.images[i];
    out.image_id = ann.image_id;
    out.labels = ann.count();
    out.warnings = warnings[i];
    try {
      const DensityMap map = density_map(ann, config.scheme, config.kernel);
      out.count = count_from_density(map);
      out.output = config.output_dir / (ann.image_id + ".dmap");
      write_dmap(out.output, map);
      if (config.write_pgm) write_pgm16(config.output_dir / (ann.image_id + ".pgm"), map);

      if (config.image_dir && !config.masks.empty()) {
        if (const auto src = find_image(*config.image_dir, ann.image_id)) {
          Image img = read_netpbm(*src);
          for (const auto& rect : config.masks) fill_black(img, rect);
          write_netpbm(config.output_dir / (ann.image_id + "_masked" + src->extension().string()), img);
        } else {
          out.warnings.push_back(ann.image_id + ": no PGM/PPM image found to mask");
        }
      }
    } catch (const std::exception& e) {
      failures[i] = ann.image_id + ": " + e.what();
    }
  });

  for (auto& f : failures) {
    if (!f.empty()) summary.errors.push_back(std::move(f));
  }
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

json summary_to_json(const GenerateSummary& summary, bool round_counts) {
  json images = json::array();
  for (const auto& img : summary.images) {
    json count = round_counts ? json(std::llround(img.count)) : json(img.count);
    images.push_back({{"image", img.image_id},
                      {"labels", img.labels},
                      {"count", std::move(count)},
                      {"output", img.output.string()},
                      {"warnings", img.warnings}});
  }
  return {{"images", std::move(images)}, {"errors", summary.errors}, {"wall_seconds", summary.wall_seconds}};
}

MapSet load_map_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + ": not a directory");
  MapSet maps;
  for (const auto& file : collect_files({dir}, ".dmap")) maps.emplace(file.stem().string(), read_dmap(file));
  return maps;
}

EvalReport run_eval(const fs::path& gt_dir, const fs::path& pred_dir) {
  return evaluate_dataset(load_map_dir(gt_dir), load_map_dir(pred_dir));
}

json report_to_json(const EvalReport& report) {
  auto stratum = [](const StratumReport& s) {
    json j = {{"n", s.n_images}};
    if (s.metrics) {
      j["mae"] = s.metrics->mae;
      j["rmse"] = s.metrics->rmse;
      j["pixel_mse"] = s.metrics->mean_pixel_mse;
    }
    return j;
  };
  return {{"overall", stratum(report.overall)},
          {"low", stratum(report.low)},
          {"medium", stratum(report.medium)},
          {"high", stratum(report.high)}};
}

std::string records_to_csv(const EvalReport& report, bool round_counts) {
  std::ostringstream out;
  out.precision(10);
  out << "image_id,gt_count,pred_count,level,abs_error,pixel_mse\n";
  for (const auto& r : report.records) {
    out << r.image_id << ',';
    if (round_counts) {
      out << std::llround(r.gt_count) << ',' << std::llround(r.pred_count);
    } else {
      out << r.gt_count << ',' << r.pred_count;
    }
    out << ',' << to_string(r.level) << ',' << std::abs(r.gt_count - r.pred_count) << ',' << r.pixel_mse << '\n';
  }
  return out.str();
}

DedupResult run_dedup(const DedupOptions& options) {
  if (options.features_dir.has_value() == options.images_dir.has_value()) {
    throw std::invalid_argument("dedup needs exactly one of a features directory or an images directory");
  }
  std::vector<FeatureStack> stacks;
  if (options.features_dir) {
    for (const auto& file : collect_files({*options.features_dir}, ".fst")) stacks.push_back(read_feature_stack(file));
  } else {
    auto files = collect_files({*options.images_dir}, ".pgm");
    auto ppm = collect_files({*options.images_dir}, ".ppm");
    files.insert(files.end(), ppm.begin(), ppm.end());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) stacks.push_back(builtin_feature_pyramid(read_netpbm(file), file.stem().string()));
  }
  return deduplicate(stacks, options.threshold);
}

json dedup_to_json(const DedupResult& result, double threshold) {
  json dropped = json::array();
  for (const auto& d : result.dropped) {
    dropped.push_back({{"image", d.dropped_id}, {"kept", d.kept_id}, {"distance", d.distance}});
  }
  return {{"threshold", threshold}, {"kept", result.kept}, {"dropped", std::move(dropped)}};
}

}  // namespace agkmap
