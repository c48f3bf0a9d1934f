#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agkmap/annotations.hpp"
#include "agkmap/dedup.hpp"
#include "agkmap/density_map.hpp"

namespace agkmap {

// Annotation JSON:
//   {"image": "<id>", "width": W, "height": H,
//    "labels": [{"x1": .., "y1": .., "x2": .., "y2": ..}, ...]}
// A dataset file may hold an array of such objects.

struct LoadedAnnotation {
  AnnotationSet set;
  std::vector<std::string> warnings;  // one per clamped label
};

// Throws std::invalid_argument with a path-qualified message on schema
// errors. Does not clamp.
AnnotationSet annotation_from_json(const nlohmann::json& doc);
nlohmann::json annotation_to_json(const AnnotationSet& ann);

/// Parses and validates, then clamps out-of-bounds labels with a warning.
LoadedAnnotation load_annotation(const nlohmann::json& doc);

/// Reads one file (object or array of objects). Throws std::runtime_error on
/// I/O or parse errors, with the file name in the message.
std::vector<LoadedAnnotation> read_annotation_file(const std::filesystem::path& path);

// DMAP: "DMAP", u32 width, u32 height, width*height f32, all little-endian,
// row-major, origin top-left.
void write_dmap(std::ostream& out, const DensityMap& map);
DensityMap read_dmap(std::istream& in);
void write_dmap(const std::filesystem::path& path, const DensityMap& map);
DensityMap read_dmap(const std::filesystem::path& path);

/// 16-bit binary PGM with values scaled so the map maximum is 65535.
void write_pgm16(const std::filesystem::path& path, const DensityMap& map);

// FST5: "FST5", u32 layer count (5), then per layer u32 C, H, W and C*H*W
// f32 values, all little-endian.
void write_feature_stack(std::ostream& out, const FeatureStack& stack);
FeatureStack read_feature_stack(std::istream& in, std::string image_id = {});
void write_feature_stack(const std::filesystem::path& path, const FeatureStack& stack);
/// The image id defaults to the file stem.
FeatureStack read_feature_stack(const std::filesystem::path& path);

}  // namespace agkmap
