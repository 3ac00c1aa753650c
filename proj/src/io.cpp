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

#include "persal/io.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "persal/error.hpp"
#include "persal/random.hpp"

namespace persal {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const fs::path& path, const void* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

// Runs a JSON field accessor, translating library type errors into Parse.
template <typename F>
auto field(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

std::optional<std::int64_t> file_mtime(const fs::path& path) {
  struct stat st {};
  if (::stat(path.c_str(), &st) != 0) return std::nullopt;
  return static_cast<std::int64_t>(st.st_mtime);
}

ImageRecord parse_record(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "manifest record must be an object");
  ImageRecord rec;
  DetectionSet& d = rec.detections;
  field("manifest record", [&] {
    const json& id = j.at("image_id");
    d.image_id = id.is_string() ? id.get<std::string>() : id.dump();
    d.image_width = j.at("width").get<std::size_t>();
    d.image_height = j.at("height").get<std::size_t>();
    if (j.contains("timestamp") && !j.at("timestamp").is_null()) {
      d.timestamp = static_cast<std::int64_t>(std::floor(j.at("timestamp").get<double>()));
    }
    if (j.contains("fixation") && !j.at("fixation").is_null()) {
      const fs::path p = j.at("fixation").get<std::string>();
      rec.fixation = p.is_absolute() ? p : base_dir / p;
    }
    const json dets = j.value("detections", json::array());
    for (const json& det : dets) {
      const auto bbox = det.at("bbox").get<std::vector<double>>();
      if (bbox.size() != 4) throw Error(ErrorCode::Parse, "bbox needs four numbers");
      d.detections.push_back({det.at("category_id").get<int>(), det.at("score").get<double>(),
                              Box{bbox[0], bbox[1], bbox[2], bbox[3]}});
    }
    return 0;
  });
  d.validate();
  return rec;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::vector<std::uint8_t> encode_grid(const SaliencyGrid& g) {
  if (g.empty()) throw Error(ErrorCode::ZeroDim, "cannot encode an empty grid");
  std::vector<std::uint8_t> out{'F', 'G', 'R', 'D', kFgrdVersion};
  put_u32(out, static_cast<std::uint32_t>(g.height()));
  put_u32(out, static_cast<std::uint32_t>(g.width()));
  const std::size_t payload_begin = out.size();
  for (double v : g.values()) {
    const auto f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put_u32(out, bits);
  }
  put_u64(out, fnv1a64(out.data() + payload_begin, out.size() - payload_begin));
  return out;
}

SaliencyGrid decode_grid(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFgrdHeaderSize) throw Error(ErrorCode::TruncatedFile, "FGRD header truncated");
  if (std::memcmp(bytes.data(), "FGRD", 4) != 0) throw Error(ErrorCode::BadMagic, "not an FGRD file");
  if (bytes[4] != kFgrdVersion) {
    throw Error(ErrorCode::BadMagic, "unsupported FGRD version " + std::to_string(bytes[4]));
  }
  const std::uint32_t h = get_u32(bytes.data() + 5);
  const std::uint32_t w = get_u32(bytes.data() + 9);
  const std::uint64_t n = static_cast<std::uint64_t>(h) * w;
  const std::uint64_t expected = kFgrdHeaderSize + 4 * n + 8;
  if (bytes.size() < expected) throw Error(ErrorCode::TruncatedFile, "FGRD payload truncated");
  if (bytes.size() > expected) throw Error(ErrorCode::InvalidArgument, "trailing bytes after FGRD data");
  const std::uint8_t* payload = bytes.data() + kFgrdHeaderSize;
  if (fnv1a64(payload, 4 * n) != get_u64(payload + 4 * n)) {
    throw Error(ErrorCode::ChecksumMismatch, "FGRD checksum mismatch");
  }
  std::vector<double> values(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t bits = get_u32(payload + 4 * i);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    values[i] = f;
  }
  return SaliencyGrid(h, w, std::move(values));
}

void write_grid(const SaliencyGrid& g, const fs::path& path) {
  const auto bytes = encode_grid(g);
  write_bytes(path, bytes.data(), bytes.size());
}

SaliencyGrid read_grid(const fs::path& path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_grid(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void export_pgm(const SaliencyGrid& g, const fs::path& path) {
  const SaliencyGrid scaled = minmax_normalize(g);
  std::string out = "P5\n" + std::to_string(g.width()) + " " + std::to_string(g.height()) + "\n255\n";
  for (double v : scaled.values()) {
    out.push_back(static_cast<char>(static_cast<std::uint8_t>(std::lround(v * 255.0))));
  }
  write_bytes(path, out.data(), out.size());
}

SaliencyGrid read_csv_grid(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t height = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t row_len = 0;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, path.string() + ": bad number '" + cell + "'");
      }
      ++row_len;
    }
    if (height == 0) width = row_len;
    if (row_len != width) throw Error(ErrorCode::Parse, path.string() + ": ragged rows");
    ++height;
  }
  return SaliencyGrid(height, width, std::move(values));
}

void write_csv_grid(const SaliencyGrid& g, const fs::path& path) {
  std::string out;
  for (std::size_t r = 0; r < g.height(); ++r) {
    for (std::size_t c = 0; c < g.width(); ++c) {
      if (c) out += ',';
      out += format_double(g.at(r, c));
    }
    out += '\n';
  }
  write_bytes(path, out.data(), out.size());
}

std::uint64_t file_digest(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return fnv1a64(bytes.data(), bytes.size());
}

std::string hex_digest(std::uint64_t digest) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, digest >>= 4) s[i] = kHex[digest & 0xf];
  return s;
}

CategoryMapping parse_mapping(const std::string& json_text) {
  const json j = parse_json(json_text, "mapping");
  return field("mapping", [&] {
    auto names = j.at("super_categories").get<std::vector<std::string>>();
    std::map<int, std::size_t> entries;
    const json map = j.value("map", json::object());
    for (const auto& [key, value] : map.items()) {
      int id = 0;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
      if (ec != std::errc() || ptr != key.data() + key.size()) {
        const auto coco = coco_category_id(key);
        if (!coco) throw Error(ErrorCode::Parse, "mapping key '" + key + "' is not a category");
        id = *coco;
      }
      entries[id] = value.get<std::size_t>();
    }
    std::optional<std::size_t> catch_all;
    if (j.contains("catch_all") && !j.at("catch_all").is_null()) {
      catch_all = j.at("catch_all").get<std::size_t>();
    }
    return CategoryMapping(std::move(names), std::move(entries), catch_all);
  });
}

CategoryMapping load_mapping(const fs::path& path) { return parse_mapping(read_text(path)); }

std::string mapping_to_json(const CategoryMapping& mapping) {
  json j;
  j["super_categories"] = mapping.super_names();
  json map = json::object();
  for (const auto& [id, index] : mapping.entries()) map[std::to_string(id)] = index;
  j["map"] = map;
  if (mapping.catch_all()) j["catch_all"] = *mapping.catch_all();
  return j.dump(2);
}

PreferenceVector parse_pvec(const std::string& json_text) {
  const json j = parse_json(json_text, "preference vector");
  return field("preference vector", [&] {
    return PreferenceVector(j.at("names").get<std::vector<std::string>>(),
                            j.at("weights").get<std::vector<double>>());
  });
}

PreferenceVector load_pvec(const fs::path& path) { return parse_pvec(read_text(path)); }

std::string pvec_to_json(const PreferenceVector& pvec) {
  json j;
  j["names"] = pvec.names();
  j["weights"] = pvec.weights();
  return j.dump(2);
}

PreferenceVector load_ratings(const fs::path& path) {
  const json j = parse_json(read_text(path), "ratings");
  auto [names, ratings] = field("ratings", [&] {
    return std::pair{j.at("names").get<std::vector<std::string>>(),
                     j.at("ratings").get<std::vector<int>>()};
  });
  return from_ratings(std::move(names), ratings);
}

std::vector<ImageRecord> parse_image_manifest(const std::string& json_text, const fs::path& base_dir) {
  const json j = parse_json(json_text, "manifest");
  std::vector<ImageRecord> out;
  if (j.is_object()) {
    out.push_back(parse_record(j, base_dir));
    return out;
  }
  if (!j.is_array()) throw Error(ErrorCode::Parse, "manifest must be an array of image records");
  for (const json& rec : j) out.push_back(parse_record(rec, base_dir));
  return out;
}

std::string safe_file_stem(const std::string& id) {
  std::string out = id.empty() ? std::string("_") : id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  if (out == "." || out == "..") out = "_";
  return out;
}

std::string image_manifest_to_json(std::span<const ImageRecord> records,
                                   const fs::path& base_dir) {
  json out = json::array();
  for (const ImageRecord& rec : records) {
    const DetectionSet& d = rec.detections;
    json j;
    j["image_id"] = d.image_id;
    j["width"] = d.image_width;
    j["height"] = d.image_height;
    if (d.timestamp) j["timestamp"] = *d.timestamp;
    if (rec.fixation) {
      const fs::path rel = base_dir.empty() ? *rec.fixation : rec.fixation->lexically_relative(base_dir);
      j["fixation"] = (rel.empty() ? *rec.fixation : rel).generic_string();
    }
    json dets = json::array();
    for (const Detection& det : d.detections) {
      dets.push_back({{"category_id", det.category_id},
                      {"score", det.confidence},
                      {"bbox", {det.box.x, det.box.y, det.box.w, det.box.h}}});
    }
    j["detections"] = std::move(dets);
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::vector<ImageRecord> load_image_manifest(const fs::path& path) {
  return parse_image_manifest(read_text(path), path.parent_path());
}

std::vector<ImageRecord> load_manifest_dir(const fs::path& dir) {
  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::Io, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<ImageRecord> out;
  for (const fs::path& f : files) {
    auto records = load_image_manifest(f);
    const auto mtime = file_mtime(f);
    for (ImageRecord& r : records) {
      if (!r.detections.timestamp) r.detections.timestamp = mtime;
      out.push_back(std::move(r));
    }
  }
  return out;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string report_csv(const MetricReport& report) {
  std::string out = "id,cc,sim,kld_judd,kld_plain,emd,flags\n";
  for (const PairMetrics& m : report.images) {
    std::string flags;
    for (const std::string& f : m.flags) flags += (flags.empty() ? "" : ";") + f;
    out += csv_escape(m.id) + ',' + opt(m.cc) + ',' + opt(m.sim) + ',' + opt(m.kld_judd) + ',' +
           opt(m.kld_plain) + ',' + opt(m.emd) + ',' + csv_escape(flags) + '\n';
  }
  return out;
}

std::string report_json(const MetricReport& report) {
  json j;
  j["means"] = {{"cc", report.means.cc},
                {"sim", report.means.sim},
                {"kld_judd", report.means.kld_judd},
                {"kld_plain", report.means.kld_plain},
                {"emd", report.means.emd}};
  const MetricCounts& c = report.counts;
  j["counts"] = {{"images", c.images},     {"cc", c.cc},
                 {"sim", c.sim},           {"kld_judd", c.kld_judd},
                 {"kld_plain", c.kld_plain}, {"emd", c.emd},
                 {"cc_excluded", c.cc_excluded}, {"failed", c.failed}};
  j["config"] = {{"emd_resolution", report.emd_options.max_resolution},
                 {"ground_distance", to_string(report.emd_options.distance)},
                 {"kld_epsilon", kJuddEpsilon}};
  return j.dump(2);
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "swept,alpha,beta,gamma,mean_cc,mean_sim,objective,scored,cc_excluded,best,error\n";
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    const SweepCandidate& c = result.candidates[i];
    out += format_double(c.swept) + ',' + format_double(c.weights.alpha) + ',' +
           format_double(c.weights.beta) + ',' + format_double(c.weights.gamma) + ',';
    if (c.failed) {
      out += ",,,";
    } else {
      out += format_double(c.mean_cc) + ',' + format_double(c.mean_sim) + ',' +
             format_double(c.objective) + ',';
    }
    out += std::to_string(c.scored) + ',' + std::to_string(c.cc_excluded) + ',' +
           (i == result.best_index ? "1" : "0") + ',' + csv_escape(c.error) + '\n';
  }
  return out;
}

}  // namespace persal
