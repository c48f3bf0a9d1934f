#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace httplib {
class Server;
}

namespace agkmap {

// HTTP API behind the annotation UI:
//   GET  /api/images               -> ["id", ...]
//   GET  /api/images/{id}          -> image bytes
//   GET  /api/annotations/{id}     -> annotation JSON
//   PUT  /api/annotations/{id}     <- annotation JSON
//   POST /api/preview              <- {width, height, labels, scheme, config}
//                                  -> {count, heatmap, width, height, ...}
class AnnotationService {
 public:
  AnnotationService(std::filesystem::path image_dir, std::filesystem::path annotation_dir);

  void mount(httplib::Server& server) const;

  [[nodiscard]] std::vector<std::string> list_images() const;
  [[nodiscard]] std::optional<std::filesystem::path> image_path(const std::string& id) const;

  // Longest heatmap side.
  static constexpr int kPreviewMaxSide = 256;
  // Throws std::invalid_argument on bad requests.
  static nlohmann::json preview(const nlohmann::json& request);

 private:
  std::filesystem::path image_dir_;
  std::filesystem::path annotation_dir_;
};

/// Blocks serving on host:port. Throws std::runtime_error if the port cannot
/// be bound.
void serve(int port, const std::filesystem::path& image_dir, const std::filesystem::path& annotation_dir,
           const std::string& host = "0.0.0.0");

}  // namespace agkmap
