#include "agkmap/formats.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace agkmap {

using nlohmann::json;

namespace {

double require_number(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(where + ": missing \"" + key + "\"");
  if (!it->is_number()) throw std::invalid_argument(where + "." + key + ": expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw std::invalid_argument(where + "." + key + ": not finite");
  return v;
}

int require_dimension(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing \"") + key + "\"");
  if (!it->is_number_integer() || it->get<std::int64_t>() <= 0 ||
      it->get<std::int64_t>() > std::numeric_limits<int>::max()) {
    throw std::invalid_argument(std::string("\"") + key + "\": expected a positive integer");
  }
  return it->get<int>();
}

}  // namespace

AnnotationSet annotation_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("annotation: expected a JSON object");
  AnnotationSet ann;
  if (const auto it = doc.find("image"); it != doc.end()) {
    if (!it->is_string()) throw std::invalid_argument("\"image\": expected a string");
    ann.image_id = it->get<std::string>();
  }
  ann.width = require_dimension(doc, "width");
  ann.height = require_dimension(doc, "height");

  const auto labels = doc.find("labels");
  if (labels == doc.end()) throw std::invalid_argument("missing \"labels\"");
  if (!labels->is_array()) throw std::invalid_argument("\"labels\": expected an array");
  ann.labels.reserve(labels->size());
  for (std::size_t i = 0; i < labels->size(); ++i) {
    const auto& item = (*labels)[i];
    const std::string where = "labels[" + std::to_string(i) + "]";
    if (!item.is_object()) throw std::invalid_argument(where + ": expected an object");
    ann.labels.push_back({{require_number(item, "x1", where), require_number(item, "y1", where)},
                          {require_number(item, "x2", where), require_number(item, "y2", where)}});
  }
  return ann;
}

json annotation_to_json(const AnnotationSet& ann) {
  json labels = json::array();
  for (const auto& l : ann.labels) labels.push_back({{"x1", l.a.x}, {"y1", l.a.y}, {"x2", l.b.x}, {"y2", l.b.y}});
  return {{"image", ann.image_id}, {"width", ann.width}, {"height", ann.height}, {"labels", std::move(labels)}};
}

LoadedAnnotation load_annotation(const json& doc) {
  LoadedAnnotation loaded{annotation_from_json(doc), {}};
  for (std::size_t i : clamp_to_bounds(loaded.set)) {
    loaded.warnings.push_back((loaded.set.image_id.empty() ? std::string("<unnamed>") : loaded.set.image_id) +
                              ": label " + std::to_string(i) + " extends past the image and was clamped");
  }
  return loaded;
}

std::vector<LoadedAnnotation> read_annotation_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }

  std::vector<LoadedAnnotation> out;
  auto load_one = [&](const json& item, const std::string& where) {
    try {
      auto loaded = load_annotation(item);
      if (loaded.set.image_id.empty()) loaded.set.image_id = path.stem().string();
      out.push_back(std::move(loaded));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path.string() + where + ": " + e.what());
    }
  };
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (!doc[i].contains("image")) {
        throw std::runtime_error(path.string() + "[" + std::to_string(i) + "]: dataset entries need an \"image\" id");
      }
      load_one(doc[i], "[" + std::to_string(i) + "]");
    }
  } else {
    load_one(doc, "");
  }
  return out;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                  static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes.data(), 4);
}

void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (in.gcount() != 4) throw std::runtime_error(std::string(what) + ": unexpected end of file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in, const char* what) { return std::bit_cast<float>(get_u32(in, what)); }

void expect_magic(std::istream& in, std::string_view magic, const char* what) {
  std::array<char, 4> got{};
  in.read(got.data(), 4);
  if (in.gcount() != 4 || std::string_view(got.data(), 4) != magic) {
    throw std::runtime_error(std::string(what) + ": bad magic (expected " + std::string(magic) + ")");
  }
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

template <typename Fn>
auto read_file(const std::filesystem::path& path, Fn&& body) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  try {
    return body(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace

void write_dmap(std::ostream& out, const DensityMap& map) {
  out.write("DMAP", 4);
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  for (double v : map.values()) put_f32(out, static_cast<float>(v));
}

DensityMap read_dmap(std::istream& in) {
  expect_magic(in, "DMAP", "DMAP");
  const auto width = get_u32(in, "DMAP header");
  const auto height = get_u32(in, "DMAP header");
  if (width == 0 || height == 0 || width > 1u << 16 || height > 1u << 16) {
    throw std::runtime_error("DMAP: implausible dimensions " + std::to_string(width) + "x" + std::to_string(height));
  }
  std::vector<double> values(static_cast<std::size_t>(width) * height);
  for (double& v : values) v = get_f32(in, "DMAP data");
  return DensityMap(static_cast<int>(width), static_cast<int>(height), std::move(values));
}

void write_dmap(const std::filesystem::path& path, const DensityMap& map) {
  write_file(path, [&](std::ostream& out) { write_dmap(out, map); });
}

DensityMap read_dmap(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in) { return read_dmap(in); });
}

void write_pgm16(const std::filesystem::path& path, const DensityMap& map) {
  const auto values = map.values();
  const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  write_file(path, [&](std::ostream& out) {
    out << "P5\n" << map.width() << ' ' << map.height() << "\n65535\n";
    for (double v : values) {
      const double scaled = peak > 0.0 ? std::clamp(v / peak, 0.0, 1.0) * 65535.0 : 0.0;
      const auto q = static_cast<std::uint16_t>(std::lround(scaled));
      const char be[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
      out.write(be, 2);
    }
  });
}

void write_feature_stack(std::ostream& out, const FeatureStack& stack) {
  out.write("FST5", 4);
  put_u32(out, static_cast<std::uint32_t>(kFeatureLayers));
  for (const auto& layer : stack.layers) {
    if (layer.values.size() != layer.element_count()) {
      throw std::invalid_argument("feature layer value count does not match its shape");
    }
    put_u32(out, static_cast<std::uint32_t>(layer.channels));
    put_u32(out, static_cast<std::uint32_t>(layer.height));
    put_u32(out, static_cast<std::uint32_t>(layer.width));
    for (float v : layer.values) put_f32(out, v);
  }
}

FeatureStack read_feature_stack(std::istream& in, std::string image_id) {
  expect_magic(in, "FST5", "FST5");
  const auto layers = get_u32(in, "FST5 header");
  if (layers != kFeatureLayers) {
    throw std::runtime_error("FST5: expected 5 layers, found " + std::to_string(layers));
  }
  FeatureStack stack;
  stack.image_id = std::move(image_id);
  for (std::size_t j = 0; j < kFeatureLayers; ++j) {
    auto& t = stack.layers[j];
    t.channels = get_u32(in, "FST5 layer header");
    t.height = get_u32(in, "FST5 layer header");
    t.width = get_u32(in, "FST5 layer header");
    if (t.channels == 0 || t.height == 0 || t.width == 0) {
      throw std::runtime_error("FST5: layer " + std::to_string(j) + " has a zero dimension");
    }
    if (t.element_count() > (std::size_t{1} << 30)) {
      throw std::runtime_error("FST5: layer " + std::to_string(j) + " is implausibly large");
    }
    t.values.resize(t.element_count());
    for (float& v : t.values) v = get_f32(in, "FST5 layer data");
  }
  return stack;
}

void write_feature_stack(const std::filesystem::path& path, const FeatureStack& stack) {
  write_file(path, [&](std::ostream& out) { write_feature_stack(out, stack); });
}

FeatureStack read_feature_stack(const std::filesystem::path& path) {
  return read_file(path, [&](std::istream& in) { return read_feature_stack(in, path.stem().string()); });
}

}  // namespace agkmap
