#include "agkmap/service.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

#include "agkmap/density_map.hpp"
#include "agkmap/formats.hpp"
#include "agkmap/pipeline.hpp"

namespace agkmap {

using nlohmann::json;

namespace {

constexpr std::int64_t kMaxPreviewPixels = std::int64_t{1} << 24;

const char* content_type_for(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".pgm" || ext == ".ppm") return "image/x-portable-anymap";
  if (ext == ".bmp") return "image/bmp";
  return "application/octet-stream";
}

bool is_image_file(const fs::path& p) {
  return std::string(content_type_for(p)) != "application/octet-stream";
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, {{"error", message}}, status);
}

KernelConfig config_from_json(const json& doc) {
  KernelConfig cfg;
  if (doc.is_null()) return cfg;
  if (!doc.is_object()) throw std::invalid_argument("\"config\": expected an object");
  auto read = [&doc](const char* key, double& field) {
    if (const auto it = doc.find(key); it != doc.end()) {
      if (!it->is_number()) throw std::invalid_argument(std::string("config.") + key + ": expected a number");
      field = it->get<double>();
    }
  };
  read("sigma_basic", cfg.sigma_basic);
  read("a", cfg.a);
  read("aspect_ratio", cfg.aspect_ratio);
  read("fwhm_const", cfg.fwhm_const);
  read("alpha", cfg.alpha);
  read("trunc_mult", cfg.trunc_mult);
  cfg.validate();
  return cfg;
}

}  // namespace

AnnotationService::AnnotationService(fs::path image_dir, fs::path annotation_dir)
    : image_dir_(std::move(image_dir)), annotation_dir_(std::move(annotation_dir)) {
  if (!fs::is_directory(image_dir_)) throw std::runtime_error(image_dir_.string() + ": not a directory");
  if (!fs::is_directory(annotation_dir_)) throw std::runtime_error(annotation_dir_.string() + ": not a directory");
}

std::vector<std::string> AnnotationService::list_images() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(image_dir_)) {
    if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
    auto id = entry.path().stem().string();
    if (valid_image_id(id)) ids.push_back(std::move(id));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::optional<fs::path> AnnotationService::image_path(const std::string& id) const {
  if (!valid_image_id(id)) return std::nullopt;
  std::vector<fs::path> matches;
  for (const auto& entry : fs::directory_iterator(image_dir_)) {
    if (entry.is_regular_file() && is_image_file(entry.path()) && entry.path().stem() == id) {
      matches.push_back(entry.path());
    }
  }
  if (matches.empty()) return std::nullopt;
  return *std::min_element(matches.begin(), matches.end());
}

json AnnotationService::preview(const json& request) {
  if (!request.is_object()) throw std::invalid_argument("preview: expected a JSON object");
  json doc = {{"image", "preview"}};
  for (const char* key : {"width", "height", "labels"}) {
    if (!request.contains(key)) throw std::invalid_argument(std::string("missing \"") + key + "\"");
    doc[key] = request[key];
  }
  LoadedAnnotation loaded = load_annotation(doc);
  const auto& ann = loaded.set;
  if (static_cast<std::int64_t>(ann.width) * ann.height > kMaxPreviewPixels) {
    throw std::invalid_argument("preview canvas too large");
  }
  Scheme scheme = Scheme::agk;
  if (const auto it = request.find("scheme"); it != request.end()) {
    if (!it->is_string()) throw std::invalid_argument("\"scheme\": expected a string");
    scheme = parse_scheme(it->get<std::string>());
  }
  const KernelConfig cfg = config_from_json(request.value("config", json()));
  const DensityMap map = density_map(ann, scheme, cfg);

  // Block-sum down to at most kPreviewMaxSide per side, then scale to 0..255.
  const int factor = std::max(1, static_cast<int>(std::ceil(static_cast<double>(std::max(ann.width, ann.height)) /
                                                            kPreviewMaxSide)));
  const int hw = (ann.width + factor - 1) / factor;
  const int hh = (ann.height + factor - 1) / factor;
  std::vector<double> blocks(static_cast<std::size_t>(hw) * hh, 0.0);
  for (int y = 0; y < ann.height; ++y) {
    for (int x = 0; x < ann.width; ++x) blocks[static_cast<std::size_t>(y / factor) * hw + x / factor] += map.at(x, y);
  }
  const double peak = *std::max_element(blocks.begin(), blocks.end());
  std::string pixels(blocks.size(), '\0');
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const double v = peak > 0.0 ? std::clamp(blocks[i] / peak, 0.0, 1.0) * 255.0 : 0.0;
    pixels[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v)));
  }

  return {{"count", count_from_density(map)},
          {"heatmap", httplib::detail::base64_encode(pixels)},
          {"width", hw},
          {"height", hh},
          {"source_width", ann.width},
          {"source_height", ann.height},
          {"scheme", to_string(scheme)},
          {"warnings", loaded.warnings}};
}

void AnnotationService::mount(httplib::Server& server) const {
  server.Get("/api/images", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, list_images());
  });

  server.Get(R"(/api/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto path = image_path(req.matches[1]);
    if (!path) return send_error(res, 404, "no such image");
    std::ifstream in(*path, std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    res.set_content(bytes.str(), content_type_for(*path));
  });

  server.Get(R"(/api/annotations/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!valid_image_id(id)) return send_error(res, 400, "invalid image id");
    const fs::path file = annotation_dir_ / (id + ".json");
    std::ifstream in(file);
    if (!in) return send_error(res, 404, "no annotation for " + id);
    try {
      send_json(res, json::parse(in));
    } catch (const json::parse_error& e) {
      send_error(res, 500, std::string("stored annotation is corrupt: ") + e.what());
    }
  });

  server.Put(R"(/api/annotations/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!valid_image_id(id)) return send_error(res, 400, "invalid image id");
    AnnotationSet ann;
    try {
      const json doc = json::parse(req.body);
      ann = annotation_from_json(doc);
    } catch (const json::parse_error& e) {
      return send_error(res, 400, std::string("invalid JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
      return send_error(res, 400, std::string("invalid annotation: ") + e.what());
    }
    if (!ann.image_id.empty() && ann.image_id != id) {
      return send_error(res, 400, "annotation image id '" + ann.image_id + "' does not match URL id '" + id + "'");
    }
    ann.image_id = id;
    const json stored = annotation_to_json(ann);
    try {
      write_atomically(annotation_dir_ / (id + ".json"), stored.dump(2));
    } catch (const std::exception& e) {
      return send_error(res, 500, e.what());
    }
    send_json(res, stored);
  });

  server.Post("/api/preview", [](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, preview(json::parse(req.body)));
    } catch (const json::parse_error& e) {
      send_error(res, 400, std::string("invalid JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, 400, e.what());
    }
  });
}

void serve(int port, const fs::path& image_dir, const fs::path& annotation_dir, const std::string& host) {
  const AnnotationService service(image_dir, annotation_dir);
  httplib::Server server;
  // SO_REUSEADDR only: with httplib's default SO_REUSEPORT a second server
  // could bind a busy port without error.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  service.mount(server);
  if (!server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
  }
  if (!server.listen_after_bind()) throw std::runtime_error("server stopped unexpectedly");
}

}  // namespace agkmap
