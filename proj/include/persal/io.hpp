// Copyright 2026 The persal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persal/grid.hpp"
#include "persal/metrics.hpp"
#include "persal/preference.hpp"
#include "persal/tuning.hpp"

namespace persal {

// FGRD layout, all integers little-endian:
//   "FGRD" | version u8 | height u32 | width u32 | h*w float32 | FNV-1a-64 u64
// The checksum covers the payload bytes only.
inline constexpr std::uint8_t kFgrdVersion = 1;
inline constexpr std::size_t kFgrdHeaderSize = 13;

std::vector<std::uint8_t> encode_grid(const SaliencyGrid& g);
// Throws TruncatedFile, BadMagic, ChecksumMismatch, InvalidArgument.
SaliencyGrid decode_grid(std::span<const std::uint8_t> bytes);

void write_grid(const SaliencyGrid& g, const std::filesystem::path& path);
SaliencyGrid read_grid(const std::filesystem::path& path);

// Binary (P5) 8-bit PGM with values min-max scaled to 0..255.
void export_pgm(const SaliencyGrid& g, const std::filesystem::path& path);

// Comma-separated rows of numbers, one grid row per line.
SaliencyGrid read_csv_grid(const std::filesystem::path& path);
void write_csv_grid(const SaliencyGrid& g, const std::filesystem::path& path);

// FNV-1a-64 of a file's bytes. Throws Io.
std::uint64_t file_digest(const std::filesystem::path& path);
std::string hex_digest(std::uint64_t digest);

// {"super_categories": [...], "map": {"<id or COCO name>": index}, "catch_all": index}
CategoryMapping parse_mapping(const std::string& json_text);
CategoryMapping load_mapping(const std::filesystem::path& path);
std::string mapping_to_json(const CategoryMapping& mapping);

// {"names": [...], "weights": [...]}
PreferenceVector parse_pvec(const std::string& json_text);
PreferenceVector load_pvec(const std::filesystem::path& path);
std::string pvec_to_json(const PreferenceVector& pvec);

// {"names": [...], "ratings": [0..10, ...]} -> from_ratings.
PreferenceVector load_ratings(const std::filesystem::path& path);

// One per-image record of a detection or annotation manifest.
struct ImageRecord {
  DetectionSet detections;
  // Fixation grid reference, resolved against the manifest's directory.
  std::optional<std::filesystem::path> fixation;
};

// JSON array of {image_id, width, height, timestamp?, fixation?,
// detections: [{category_id, score, bbox: [x,y,w,h]}]}. Boxes are clamped.
std::vector<ImageRecord> parse_image_manifest(const std::string& json_text,
                                              const std::filesystem::path& base_dir = {});
std::vector<ImageRecord> load_image_manifest(const std::filesystem::path& path);
// Every *.json file of a directory in name order; each holds one record or an
// array of records. Records without a timestamp take the file's mtime.
std::vector<ImageRecord> load_manifest_dir(const std::filesystem::path& dir);
// Maps an image id onto a portable file name (no directory separators).
std::string safe_file_stem(const std::string& id);

// Fixation paths are written relative to base_dir when one is given.
std::string image_manifest_to_json(std::span<const ImageRecord> records,
                                   const std::filesystem::path& base_dir = {});

// One row per image: id,cc,sim,kld_judd,kld_plain,emd,flags.
std::string report_csv(const MetricReport& report);
// {"means": {...}, "counts": {...}, "config": {...}}
std::string report_json(const MetricReport& report);

// One row per candidate: swept,alpha,beta,gamma,mean_cc,mean_sim,objective,...
std::string sweep_csv(const SweepResult& result);

// Round-trip exact decimal rendering of a double.
std::string format_double(double v);

}  // namespace persal
