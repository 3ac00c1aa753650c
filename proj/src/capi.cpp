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

#include "persal/persal.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "persal/baselines.hpp"
#include "persal/error.hpp"
#include "persal/groundtruth.hpp"
#include "persal/io.hpp"
#include "persal/metrics.hpp"
#include "persal/preference.hpp"
#include "persal/random.hpp"
#include "persal/raster.hpp"
#include "persal/tuning.hpp"

struct persal_grid {
  persal::SaliencyGrid grid;
};

struct persal_mapping {
  persal::CategoryMapping mapping;
};

struct persal_pvec {
  persal::PreferenceVector pvec;
};

struct persal_dataset {
  std::vector<persal::ImageRecord> records;
  std::vector<std::optional<persal::SaliencyGrid>> sals;  // in-memory fixation maps
};

struct persal_report {
  persal::MetricReport report;
};

struct persal_sweep {
  persal::SweepResult result;
};

namespace {

thread_local std::string g_last_error;

persal_status to_status(persal::ErrorCode code) {
  // Enumerators share numbering with persal::ErrorCode.
  return static_cast<persal_status>(static_cast<int>(code));
}

template <typename F>
persal_status guard(F&& f) noexcept {
  try {
    f();
    g_last_error.clear();
    return PERSAL_OK;
  } catch (const persal::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PERSAL_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PERSAL_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PERSAL_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw persal::Error(persal::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

template <typename T, typename... Args>
T* make(Args&&... args) {
  return new T{std::forward<Args>(args)...};
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

persal_grid* wrap(persal::SaliencyGrid g) { return make<persal_grid>(std::move(g)); }

const persal::ImageRecord& record(const persal_dataset* d, size_t index) {
  require(d, "dataset");
  if (index >= d->records.size()) {
    throw persal::Error(persal::ErrorCode::OutOfRange, "image index " + std::to_string(index) +
                                                           " outside dataset of " +
                                                           std::to_string(d->records.size()));
  }
  return d->records[index];
}

persal::SaliencyGrid fixation_of(const persal_dataset* d, size_t index) {
  const persal::ImageRecord& rec = record(d, index);
  if (d->sals[index]) return *d->sals[index];
  if (!rec.fixation) {
    throw persal::Error(persal::ErrorCode::InvalidArgument,
                        "image '" + rec.detections.image_id + "' has no fixation map");
  }
  return persal::read_grid(*rec.fixation);
}

persal::EmdOptions emd_options(const persal_emd_options* o) {
  persal::EmdOptions opts;
  if (o) {
    opts.max_resolution = o->max_resolution;
    opts.distance = o->distance == PERSAL_DISTANCE_MANHATTAN ? persal::GroundDistance::Manhattan
                                                             : persal::GroundDistance::Euclidean;
  }
  return opts;
}

persal_status run_sweep(bool alpha, const persal_dataset* d, const persal_grid* const* sals,
                        const persal_grid* const* labels, const persal_mapping* mapping,
                        const persal_pvec* pvec, const persal_sweep_spec* spec, size_t height,
                        size_t width, size_t jobs, persal_sweep** out) {
  return guard([&] {
    require(d, "dataset");
    require(labels, "labels");
    require(mapping, "mapping");
    require(pvec, "pvec");
    require(spec, "spec");
    require(spec->grid, "spec grid");
    require(out, "out");
    std::vector<persal::AnnotatedImage> images;
    std::vector<persal::SaliencyGrid> refs;
    for (size_t i = 0; i < d->records.size(); ++i) {
      persal::SaliencyGrid sal = (sals && sals[i]) ? sals[i]->grid : fixation_of(d, i);
      images.push_back({std::move(sal), d->records[i].detections});
      require(labels[i], "label");
      refs.push_back(labels[i]->grid);
    }
    persal::SweepSpec s;
    const std::vector<double> grid(spec->grid, spec->grid + spec->grid_size);
    s.fixed_alpha = spec->fixed_alpha;
    s.fixed_beta_fraction = spec->fixed_beta_fraction;
    if (alpha) {
      s.alpha_grid = grid;
    } else {
      s.ratio_grid = grid;
    }
    persal::SweepInputs in{images, refs, mapping->mapping, pvec->pvec, {height, width, 1.0}, jobs};
    *out = make<persal_sweep>(alpha ? persal::sweep_alpha(in, s) : persal::sweep_ratio(in, s));
  });
}

}  // namespace

extern "C" {

int persal_status_is_io(persal_status status) {
  return status == PERSAL_E_IO || status == PERSAL_E_TRUNCATED_FILE ||
         status == PERSAL_E_BAD_MAGIC || status == PERSAL_E_CHECKSUM_MISMATCH;
}

const char* persal_status_name(persal_status status) {
  if (status == PERSAL_OK) return "OK";
  if (status == PERSAL_E_INTERNAL) return "Internal";
  if (status >= PERSAL_E_INVALID_ARGUMENT && status <= PERSAL_E_PARSE) {
    return persal::to_string(static_cast<persal::ErrorCode>(status));
  }
  return "Unknown";
}

const char* persal_last_error(void) { return g_last_error.c_str(); }

const char* persal_version(void) { return PERSAL_VERSION_STRING; }

void persal_string_free(char* s) { std::free(s); }

// ---- grids

persal_status persal_grid_create(size_t height, size_t width, const double* values,
                                 persal_grid** out) {
  return guard([&] {
    require(out, "out");
    if (!values) {
      *out = wrap(persal::SaliencyGrid(height, width));
      return;
    }
    *out = wrap(persal::SaliencyGrid(height, width, std::vector<double>(values, values + height * width)));
  });
}

persal_status persal_grid_clone(const persal_grid* g, persal_grid** out) {
  return guard([&] {
    require(g, "grid");
    require(out, "out");
    *out = wrap(g->grid);
  });
}

void persal_grid_destroy(persal_grid* g) { delete g; }
size_t persal_grid_height(const persal_grid* g) { return g ? g->grid.height() : 0; }
size_t persal_grid_width(const persal_grid* g) { return g ? g->grid.width() : 0; }
int persal_grid_is_normalized(const persal_grid* g) { return g && g->grid.normalized() ? 1 : 0; }

persal_status persal_grid_values(const persal_grid* g, double* out, size_t capacity) {
  return guard([&] {
    require(g, "grid");
    require(out, "out");
    if (capacity < g->grid.size()) {
      throw persal::Error(persal::ErrorCode::OutOfRange, "output buffer too small");
    }
    std::copy(g->grid.values().begin(), g->grid.values().end(), out);
  });
}

persal_status persal_grid_read(const char* path, persal_grid** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(persal::read_grid(path));
  });
}

persal_status persal_grid_write(const persal_grid* g, const char* path) {
  return guard([&] {
    require(g, "grid");
    require(path, "path");
    persal::write_grid(g->grid, path);
  });
}

persal_status persal_grid_read_csv(const char* path, persal_grid** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(persal::read_csv_grid(path));
  });
}

persal_status persal_grid_write_csv(const persal_grid* g, const char* path) {
  return guard([&] {
    require(g, "grid");
    require(path, "path");
    persal::write_csv_grid(g->grid, path);
  });
}

persal_status persal_grid_export_pgm(const persal_grid* g, const char* path) {
  return guard([&] {
    require(g, "grid");
    require(path, "path");
    persal::export_pgm(g->grid, path);
  });
}

persal_status persal_grid_minmax(const persal_grid* g, persal_grid** out, int* was_constant) {
  return guard([&] {
    require(g, "grid");
    require(out, "out");
    bool constant = false;
    *out = wrap(persal::minmax_normalize(g->grid, &constant));
    if (was_constant) *was_constant = constant ? 1 : 0;
  });
}

persal_status persal_grid_softmax(const persal_grid* g, double scale, persal_grid** out) {
  return guard([&] {
    require(g, "grid");
    require(out, "out");
    *out = wrap(persal::softmax_normalize(g->grid, scale));
  });
}

persal_status persal_grid_normalize_sum(const persal_grid* g, persal_grid** out) {
  return guard([&] {
    require(g, "grid");
    require(out, "out");
    *out = wrap(persal::normalize_sum(g->grid));
  });
}

persal_status persal_grid_resample(const persal_grid* g, size_t height, size_t width,
                                   persal_grid** out) {
  return guard([&] {
    require(g, "grid");
    require(out, "out");
    *out = wrap(persal::resample(g->grid, height, width));
  });
}

persal_status persal_grid_stats_of(const persal_grid* g, persal_grid_stats* out) {
  return guard([&] {
    require(g, "grid");
    require(out, "out");
    const persal::GridStats s = persal::stats(g->grid);
    *out = {s.min, s.max, s.sum, s.mean, s.stddev};
  });
}

persal_status persal_file_digest(const char* path, uint64_t* out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = persal::file_digest(path);
  });
}

// ---- mappings and preference vectors

persal_status persal_mapping_load(const char* path, persal_mapping** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = make<persal_mapping>(persal::load_mapping(path));
  });
}

persal_status persal_mapping_parse(const char* json_text, persal_mapping** out) {
  return guard([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = make<persal_mapping>(persal::parse_mapping(json_text));
  });
}

persal_status persal_mapping_coco_default(persal_mapping** out) {
  return guard([&] {
    require(out, "out");
    *out = make<persal_mapping>(persal::CategoryMapping::coco_default());
  });
}

void persal_mapping_destroy(persal_mapping* m) { delete m; }
size_t persal_mapping_n_super(const persal_mapping* m) { return m ? m->mapping.n_super() : 0; }

const char* persal_mapping_super_name(const persal_mapping* m, size_t index) {
  if (!m || index >= m->mapping.n_super()) return nullptr;
  return m->mapping.super_names()[index].c_str();
}

persal_status persal_mapping_to_json(const persal_mapping* m, char** out) {
  return guard([&] {
    require(m, "mapping");
    require(out, "out");
    *out = dup_string(persal::mapping_to_json(m->mapping));
  });
}

persal_status persal_pvec_create(const char* const* names, const double* weights, size_t n,
                                 persal_pvec** out) {
  return guard([&] {
    require(out, "out");
    if (n > 0) {
      require(names, "names");
      require(weights, "weights");
    }
    std::vector<std::string> labels;
    for (size_t i = 0; i < n; ++i) labels.emplace_back(names[i] ? names[i] : "");
    *out = make<persal_pvec>(persal::PreferenceVector(std::move(labels),
                                                      std::vector<double>(weights, weights + n)));
  });
}

persal_status persal_pvec_from_ratings(const char* const* names, const int* ratings, size_t n,
                                       persal_pvec** out) {
  return guard([&] {
    require(out, "out");
    if (n > 0) {
      require(names, "names");
      require(ratings, "ratings");
    }
    std::vector<std::string> labels;
    for (size_t i = 0; i < n; ++i) labels.emplace_back(names[i] ? names[i] : "");
    *out = make<persal_pvec>(persal::from_ratings(std::move(labels), {ratings, n}));
  });
}

persal_status persal_pvec_load(const char* path, persal_pvec** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = make<persal_pvec>(persal::load_pvec(path));
  });
}

persal_status persal_pvec_load_ratings(const char* path, persal_pvec** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = make<persal_pvec>(persal::load_ratings(path));
  });
}

persal_status persal_pvec_pad(const persal_pvec* p, size_t channels, persal_pvec** out) {
  return guard([&] {
    require(p, "pvec");
    require(out, "out");
    *out = make<persal_pvec>(persal::pad_to_channels(p->pvec, channels));
  });
}

void persal_pvec_destroy(persal_pvec* p) { delete p; }
size_t persal_pvec_size(const persal_pvec* p) { return p ? p->pvec.size() : 0; }

double persal_pvec_weight(const persal_pvec* p, size_t index) {
  return p && index < p->pvec.size() ? p->pvec.weight(index) : 0.0;
}

const char* persal_pvec_name(const persal_pvec* p, size_t index) {
  if (!p || index >= p->pvec.size()) return nullptr;
  return p->pvec.names()[index].c_str();
}

persal_status persal_pvec_to_json(const persal_pvec* p, char** out) {
  return guard([&] {
    require(p, "pvec");
    require(out, "out");
    *out = dup_string(persal::pvec_to_json(p->pvec));
  });
}

// ---- datasets

persal_status persal_dataset_load(const char* path, persal_dataset** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    auto records = persal::load_image_manifest(path);
    const size_t n = records.size();
    *out = make<persal_dataset>(std::move(records),
                                std::vector<std::optional<persal::SaliencyGrid>>(n));
  });
}

persal_status persal_dataset_load_dir(const char* dir, persal_dataset** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    auto records = persal::load_manifest_dir(dir);
    const size_t n = records.size();
    *out = make<persal_dataset>(std::move(records),
                                std::vector<std::optional<persal::SaliencyGrid>>(n));
  });
}

void persal_synthetic_options_default(persal_synthetic_options* out) {
  if (!out) return;
  const persal::SyntheticOptions d;
  *out = {d.n_images,    d.seed,        d.image_width, d.image_height,
          d.grid_height, d.grid_width,  d.min_objects, d.max_objects,
          nullptr,       0,             d.off_center_category, d.required_category};
}

persal_status persal_dataset_synthetic(const persal_synthetic_options* options,
                                       persal_dataset** out) {
  return guard([&] {
    require(options, "options");
    require(out, "out");
    persal::SyntheticOptions o;
    o.n_images = options->n_images;
    o.seed = options->seed;
    o.image_width = options->image_width;
    o.image_height = options->image_height;
    o.grid_height = options->grid_height;
    o.grid_width = options->grid_width;
    o.min_objects = options->min_objects;
    o.max_objects = options->max_objects;
    if (options->categories) {
      o.categories.assign(options->categories, options->categories + options->n_categories);
    }
    o.off_center_category = options->off_center_category;
    o.required_category = options->required_category;
    auto images = persal::make_synthetic_dataset(o);
    auto* d = make<persal_dataset>();
    std::unique_ptr<persal_dataset> owner(d);
    for (auto& img : images) {
      d->records.push_back({std::move(img.boxes), std::nullopt});
      d->sals.emplace_back(std::move(img.sal));
    }
    *out = owner.release();
  });
}

void persal_dataset_destroy(persal_dataset* d) { delete d; }
size_t persal_dataset_size(const persal_dataset* d) { return d ? d->records.size() : 0; }

const char* persal_dataset_image_id(const persal_dataset* d, size_t index) {
  if (!d || index >= d->records.size()) return nullptr;
  return d->records[index].detections.image_id.c_str();
}

persal_status persal_dataset_image_size(const persal_dataset* d, size_t index, size_t* width,
                                        size_t* height) {
  return guard([&] {
    const auto& rec = record(d, index);
    if (width) *width = rec.detections.image_width;
    if (height) *height = rec.detections.image_height;
  });
}

size_t persal_dataset_detection_count(const persal_dataset* d, size_t index) {
  if (!d || index >= d->records.size()) return 0;
  return d->records[index].detections.detections.size();
}

persal_status persal_dataset_fixation(const persal_dataset* d, size_t index, persal_grid** out) {
  return guard([&] {
    require(out, "out");
    *out = wrap(fixation_of(d, index));
  });
}

int persal_dataset_has_fixation(const persal_dataset* d, size_t index) {
  if (!d || index >= d->records.size()) return 0;
  return d->sals[index] || d->records[index].fixation ? 1 : 0;
}

const char* persal_dataset_fixation_path(const persal_dataset* d, size_t index) {
  if (!d || index >= d->records.size() || !d->records[index].fixation) return nullptr;
  thread_local std::string path;
  path = d->records[index].fixation->string();
  return path.c_str();
}

persal_status persal_dataset_apply_nms(persal_dataset* d, const persal_nms_config* nms) {
  return guard([&] {
    require(d, "dataset");
    require(nms, "nms");
    const persal::NmsConfig cfg{nms->confidence_threshold, nms->iou_threshold};
    cfg.validate();
    for (persal::ImageRecord& rec : d->records) rec.detections = persal::nms(rec.detections, cfg);
  });
}

persal_status persal_dataset_write(const persal_dataset* d, const char* dir) {
  return guard([&] {
    require(d, "dataset");
    require(dir, "dir");
    const std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::create_directories(root / "fixations", ec);
    if (ec) throw persal::Error(persal::ErrorCode::Io, "cannot create " + root.string());
    std::vector<persal::ImageRecord> out = d->records;
    for (size_t i = 0; i < out.size(); ++i) {
      if (!d->sals[i] && !out[i].fixation) continue;
      const auto path =
          root / "fixations" / (persal::safe_file_stem(out[i].detections.image_id) + ".fgrd");
      persal::write_grid(fixation_of(d, i), path);
      out[i].fixation = path;
    }
    const std::string text = persal::image_manifest_to_json(out, root);
    std::ofstream f(root / "manifest.json", std::ios::binary);
    f << text;
    if (!f) throw persal::Error(persal::ErrorCode::Io, "cannot write manifest in " + root.string());
  });
}

persal_status persal_safe_file_stem(const char* id, char** out) {
  return guard([&] {
    require(id, "id");
    require(out, "out");
    *out = dup_string(persal::safe_file_stem(id));
  });
}

// ---- preferences and the preference-fitting stream

persal_status persal_extract_preferences(const persal_dataset* history,
                                         const persal_mapping* mapping, int64_t now,
                                         int window_days, persal_pvec** out) {
  return guard([&] {
    require(history, "history");
    require(mapping, "mapping");
    require(out, "out");
    std::vector<persal::DetectionSet> sets;
    sets.reserve(history->records.size());
    for (const auto& r : history->records) sets.push_back(r.detections);
    *out = make<persal_pvec>(persal::extract_preferences(sets, mapping->mapping, now, window_days));
  });
}

persal_status persal_nms_preset(const char* preset, persal_nms_config* out) {
  return guard([&] {
    require(preset, "preset");
    require(out, "out");
    const persal::NmsConfig c = persal::NmsConfig::preset(preset);
    *out = {c.confidence_threshold, c.iou_threshold};
  });
}

persal_status persal_preference_map(const persal_dataset* d, size_t index,
                                    const persal_mapping* mapping, const persal_pvec* pvec,
                                    const persal_nms_config* nms, size_t height, size_t width,
                                    persal_grid** out) {
  return guard([&] {
    require(mapping, "mapping");
    require(pvec, "pvec");
    require(nms, "nms");
    require(out, "out");
    const auto& rec = record(d, index);
    const persal::NmsConfig cfg{nms->confidence_threshold, nms->iou_threshold};
    const persal::DetectionSet kept = persal::nms(rec.detections, cfg);
    int max_id = 0;
    for (const auto& det : kept.detections) max_id = std::max(max_id, det.category_id);
    for (const auto& [id, index_] : mapping->mapping.entries()) max_id = std::max(max_id, id);
    const persal::ClassTensor t =
        persal::rasterize(kept, height, width, static_cast<size_t>(max_id) + 1);
    const persal::PreferenceVector padded = persal::pad_to_channels(pvec->pvec);
    *out = wrap(persal::preference_map(persal::map_to_super(t, mapping->mapping, padded)));
  });
}

// ---- ground truth

persal_status persal_final_weights(double alpha, double beta_fraction, persal_weights* out) {
  return guard([&] {
    require(out, "out");
    const persal::GtWeights w = persal::final_weights(alpha, beta_fraction);
    *out = {w.alpha, w.beta, w.gamma};
  });
}

persal_status persal_pmap(const persal_dataset* d, size_t index, const persal_mapping* mapping,
                          const persal_pvec* pvec, size_t height, size_t width,
                          persal_grid** out) {
  return guard([&] {
    require(mapping, "mapping");
    require(pvec, "pvec");
    require(out, "out");
    *out = wrap(persal::pmap(record(d, index).detections, mapping->mapping, pvec->pvec, height,
                             width));
  });
}

persal_status persal_generate_psal(const persal_dataset* d, size_t index, const persal_grid* sal,
                                   const persal_mapping* mapping, const persal_pvec* pvec,
                                   const persal_weights* weights, size_t height, size_t width,
                                   double softmax_scale, persal_grid** out, int* was_constant) {
  return guard([&] {
    require(mapping, "mapping");
    require(pvec, "pvec");
    require(weights, "weights");
    require(out, "out");
    const auto& rec = record(d, index);
    const persal::AnnotatedImage img{sal ? sal->grid : fixation_of(d, index), rec.detections};
    bool constant = false;
    *out = wrap(persal::generate_psal(img, mapping->mapping, pvec->pvec,
                                      {weights->alpha, weights->beta, weights->gamma},
                                      {height, width, softmax_scale}, &constant));
    if (was_constant) *was_constant = constant ? 1 : 0;
  });
}

persal_status persal_center_prior(const persal_grid* const* sals, size_t n, persal_grid** out,
                                  int* was_constant) {
  return guard([&] {
    require(out, "out");
    if (n > 0) require(sals, "sals");
    std::vector<persal::SaliencyGrid> maps;
    maps.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      require(sals[i], "fixation map");
      maps.push_back(sals[i]->grid);
    }
    bool constant = false;
    *out = wrap(persal::center_prior(maps, &constant));
    if (was_constant) *was_constant = constant ? 1 : 0;
  });
}

// ---- baselines

persal_status persal_center_prior_baseline(const persal_grid* prior, persal_grid** out) {
  return guard([&] {
    require(prior, "prior");
    require(out, "out");
    *out = wrap(persal::center_prior_baseline(prior->grid));
  });
}

persal_status persal_detection_baseline(const persal_dataset* d, size_t index,
                                        const persal_mapping* mapping, const persal_pvec* pvec,
                                        double threshold, uint64_t seed, size_t height,
                                        size_t width, persal_grid** out, int* used_fallback) {
  return guard([&] {
    require(mapping, "mapping");
    require(pvec, "pvec");
    require(out, "out");
    const persal::BaselineConfig cfg{persal::BaselineKind::Detection, seed, threshold};
    bool fallback = false;
    *out = wrap(persal::detection_baseline(record(d, index).detections, mapping->mapping,
                                           pvec->pvec, cfg, height, width, &fallback));
    if (used_fallback) *used_fallback = fallback ? 1 : 0;
  });
}

uint64_t persal_derive_seed(uint64_t seed, const char* key) {
  return persal::derive_seed(seed, key ? key : "");
}

// ---- metrics

void persal_emd_options_default(persal_emd_options* out) {
  if (out) *out = {persal::EmdOptions{}.max_resolution, PERSAL_DISTANCE_EUCLIDEAN};
}

#define PERSAL_PAIR_METRIC(name)                                           \
  persal_status persal_##name(const persal_grid* p, const persal_grid* q, \
                              double* out) {                               \
    return guard([&] {                                                     \
      require(p, "p");                                                     \
      require(q, "q");                                                     \
      require(out, "out");                                                 \
      *out = persal::name(p->grid, q->grid);                               \
    });                                                                    \
  }

PERSAL_PAIR_METRIC(cc)
PERSAL_PAIR_METRIC(sim)
PERSAL_PAIR_METRIC(kld_judd)
PERSAL_PAIR_METRIC(kld_plain)

#undef PERSAL_PAIR_METRIC

persal_status persal_emd(const persal_grid* p, const persal_grid* q,
                         const persal_emd_options* options, double* out, size_t* flow_count) {
  return guard([&] {
    require(p, "p");
    require(q, "q");
    require(out, "out");
    const persal::EmdResult r = persal::emd(p->grid, q->grid, emd_options(options));
    *out = r.value;
    if (flow_count) *flow_count = r.plan.flows.size();
  });
}

persal_status persal_evaluate(const char* const* ids, const persal_grid* const* preds,
                              const persal_grid* const* refs, size_t n,
                              const persal_emd_options* options, size_t jobs,
                              persal_report** out) {
  return guard([&] {
    require(out, "out");
    if (n > 0) {
      require(preds, "preds");
      require(refs, "refs");
    }
    std::vector<persal::EvalPair> pairs;
    pairs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      require(preds[i], "prediction");
      require(refs[i], "reference");
      pairs.push_back({ids && ids[i] ? ids[i] : std::to_string(i), preds[i]->grid, refs[i]->grid});
    }
    *out = make<persal_report>(persal::evaluate_batch(pairs, emd_options(options), jobs));
  });
}

void persal_report_destroy(persal_report* r) { delete r; }

persal_status persal_report_means_of(const persal_report* r, persal_report_means* out) {
  return guard([&] {
    require(r, "report");
    require(out, "out");
    const auto& m = r->report.means;
    const auto& c = r->report.counts;
    *out = {m.cc, m.sim, m.kld_judd, m.kld_plain, m.emd, c.images, c.cc_excluded, c.failed};
  });
}

persal_status persal_report_csv(const persal_report* r, char** out) {
  return guard([&] {
    require(r, "report");
    require(out, "out");
    *out = dup_string(persal::report_csv(r->report));
  });
}

persal_status persal_report_json(const persal_report* r, char** out) {
  return guard([&] {
    require(r, "report");
    require(out, "out");
    *out = dup_string(persal::report_json(r->report));
  });
}

// ---- tuning

persal_status persal_sweep_alpha(const persal_dataset* d, const persal_grid* const* sals,
                                 const persal_grid* const* labels, const persal_mapping* mapping,
                                 const persal_pvec* pvec, const persal_sweep_spec* spec,
                                 size_t height, size_t width, size_t jobs, persal_sweep** out) {
  return run_sweep(true, d, sals, labels, mapping, pvec, spec, height, width, jobs, out);
}

persal_status persal_sweep_ratio(const persal_dataset* d, const persal_grid* const* sals,
                                 const persal_grid* const* labels, const persal_mapping* mapping,
                                 const persal_pvec* pvec, const persal_sweep_spec* spec,
                                 size_t height, size_t width, size_t jobs, persal_sweep** out) {
  return run_sweep(false, d, sals, labels, mapping, pvec, spec, height, width, jobs, out);
}

void persal_sweep_destroy(persal_sweep* s) { delete s; }
size_t persal_sweep_size(const persal_sweep* s) { return s ? s->result.candidates.size() : 0; }
size_t persal_sweep_best_index(const persal_sweep* s) { return s ? s->result.best_index : 0; }

persal_status persal_sweep_candidate_at(const persal_sweep* s, size_t index,
                                        persal_sweep_candidate* out) {
  return guard([&] {
    require(s, "sweep");
    require(out, "out");
    if (index >= s->result.candidates.size()) {
      throw persal::Error(persal::ErrorCode::OutOfRange, "candidate index out of range");
    }
    const auto& c = s->result.candidates[index];
    *out = {{c.weights.alpha, c.weights.beta, c.weights.gamma},
            c.swept,
            c.mean_cc,
            c.mean_sim,
            c.objective,
            c.scored,
            c.cc_excluded,
            c.failed ? 1 : 0};
  });
}

persal_status persal_sweep_csv(const persal_sweep* s, char** out) {
  return guard([&] {
    require(s, "sweep");
    require(out, "out");
    *out = dup_string(persal::sweep_csv(s->result));
  });
}

}  // extern "C"
