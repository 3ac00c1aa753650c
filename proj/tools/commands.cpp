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

#include "commands.hpp"

#include <cmath>
#include <ctime>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>

namespace persal::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json pvec_json(const persal_pvec* p) {
  char* s = nullptr;
  check(persal_pvec_to_json(p, &s), "preference vector");
  return json::parse(take_string(s));
}

std::string describe_source(const std::string& path) { return path.empty() ? "builtin:coco" : path; }

persal_weights parse_weights(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 3) fail("--weights needs three values alpha,beta,gamma");
  for (double x : v) {
    if (!(x >= 0.0)) fail("--weights must be nonnegative");
  }
  if (std::abs(v[0] + v[1] + v[2] - 1.0) > 1e-9) fail("--weights must sum to 1");
  return {v[0], v[1], v[2]};
}

json weights_json(const persal_weights& w) { return json::array({w.alpha, w.beta, w.gamma}); }

// Output file stem per image; duplicate stems are rejected before any output.
std::vector<std::string> image_stems(const persal_dataset* d) {
  std::vector<std::string> stems;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < persal_dataset_size(d); ++i) {
    const std::string id = persal_dataset_image_id(d, i);
    std::string stem = file_stem_for(id);
    if (!seen.insert(stem).second) fail("two images map to the output name '" + stem + "'");
    stems.push_back(std::move(stem));
  }
  return stems;
}

void record_dataset(RunRecorder& rec, const std::string& path, const persal_dataset* d) {
  for (const fs::path& f : dataset_files(path, d)) rec.input(f);
}

void export_pgm(const persal_grid* g, const fs::path& path) {
  check(persal_grid_export_pgm(g, path.string().c_str()), "writing " + path.string());
}

// ---------------------------------------------------------------- profile

struct ProfileOptions {
  std::string detections;
  std::string mapping;
  std::string ratings;
  int window_days = 90;
  std::optional<std::int64_t> now;
  std::string out;
};

int run_profile(const ProfileOptions& o, const Context& ctx) {
  if (o.detections.empty() == o.ratings.empty()) fail("give exactly one of --detections or --ratings");
  RunRecorder rec(ctx, "profile");
  Pvec pvec;
  if (!o.ratings.empty()) {
    persal_pvec* p = nullptr;
    check(persal_pvec_load_ratings(o.ratings.c_str(), &p), "ratings " + o.ratings);
    pvec.reset(p);
    rec.input(o.ratings);
    rec.config()["source"] = "ratings";
  } else {
    const Mapping mapping = load_mapping(o.mapping);
    const Dataset history = load_dataset(o.detections);
    std::int64_t now = 0;
    if (o.now) {
      now = *o.now;
    } else {
      now = static_cast<std::int64_t>(std::time(nullptr));
      rec.add_arg("--now", std::to_string(now));
    }
    persal_pvec* p = nullptr;
    check(persal_extract_preferences(history.get(), mapping.get(), now, o.window_days, &p),
          "preference extraction");
    pvec.reset(p);
    record_dataset(rec, o.detections, history.get());
    if (!o.mapping.empty()) rec.input(o.mapping);
    rec.config()["source"] = "detections";
    rec.config()["mapping"] = describe_source(o.mapping);
    rec.config()["window_days"] = o.window_days;
    rec.config()["now"] = now;
  }
  const json result = pvec_json(pvec.get());
  rec.config()["pvec"] = result;
  const std::string text = result.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    rec.finish("run_manifest.json");
  } else {
    write_text(o.out, text);
    rec.output(o.out);
    rec.finish(manifest_beside_file(o.out));
  }
  return kExitOk;
}

// ----------------------------------------------------------------- gen-gt

struct GenGtOptions {
  std::string annotations;
  std::string pvec;
  std::string mapping;
  std::string weights = "0.06,0.752,0.188";
  std::string grid = "38x38";
  bool full_res = false;
  double softmax_scale = 1.0;
  std::string out;
  bool pgm = false;
};

int run_gen_gt(const GenGtOptions& o, const Context& ctx) {
  const persal_weights w = parse_weights(o.weights);
  const Shape shape = parse_shape(o.grid);
  if (!(o.softmax_scale > 0.0)) fail("--softmax-scale must be positive");
  const Mapping mapping = load_mapping(o.mapping);
  const Pvec pvec = load_pvec(o.pvec);
  const Dataset data = load_dataset(o.annotations);
  const std::size_t n = persal_dataset_size(data.get());
  const auto stems = image_stems(data.get());
  for (std::size_t i = 0; i < n; ++i) {
    if (!persal_dataset_has_fixation(data.get(), i)) {
      fail(std::string("image '") + persal_dataset_image_id(data.get(), i) + "' has no fixation map");
    }
  }

  std::vector<Grid> results(n);
  std::vector<int> flat(n, 0);
  parallel_for(n, ctx.jobs, [&](std::size_t i) {
    persal_grid* sal = nullptr;
    check(persal_dataset_fixation(data.get(), i, &sal), "fixation map");
    const Grid owned(sal);
    const std::size_t h = o.full_res ? persal_grid_height(sal) : shape.height;
    const std::size_t wd = o.full_res ? persal_grid_width(sal) : shape.width;
    persal_grid* g = nullptr;
    check(persal_generate_psal(data.get(), i, sal, mapping.get(), pvec.get(), &w, h, wd,
                               o.softmax_scale, &g, &flat[i]),
          std::string("image '") + persal_dataset_image_id(data.get(), i) + "'");
    results[i].reset(g);
  });

  RunRecorder rec(ctx, "gen-gt");
  record_dataset(rec, o.annotations, data.get());
  rec.input(o.pvec);
  if (!o.mapping.empty()) rec.input(o.mapping);
  ensure_dir(o.out);
  for (std::size_t i = 0; i < n; ++i) {
    const fs::path path = fs::path(o.out) / (stems[i] + ".fgrd");
    write_grid(results[i].get(), path);
    rec.output(path);
    if (o.pgm) {
      const fs::path pgm = fs::path(o.out) / (stems[i] + ".pgm");
      export_pgm(results[i].get(), pgm);
      rec.output(pgm);
    }
    if (flat[i]) {
      std::cerr << "warning: image '" << persal_dataset_image_id(data.get(), i)
                << "' produced a constant map before softmax\n";
    }
  }
  json& cfg = rec.config();
  cfg["weights"] = weights_json(w);
  cfg["grid"] = o.full_res ? json("full") : json(o.grid);
  cfg["softmax_scale"] = o.softmax_scale;
  cfg["mapping"] = describe_source(o.mapping);
  cfg["pvec"] = pvec_json(pvec.get());
  rec.finish(fs::path(o.out) / "run_manifest.json");
  std::cout << "wrote " << n << " ground-truth maps to " << o.out << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ prior

struct PriorOptions {
  std::string annotations;
  std::string fixations;
  std::string grid;
  std::string out;
  std::string pgm;
};

int run_prior(const PriorOptions& o, const Context& ctx) {
  if (o.annotations.empty() == o.fixations.empty()) fail("give exactly one of --annotations or --fixations");
  RunRecorder rec(ctx, "prior");
  std::vector<Grid> maps;
  std::vector<std::string> names;
  if (!o.annotations.empty()) {
    const Dataset data = load_dataset(o.annotations);
    for (std::size_t i = 0; i < persal_dataset_size(data.get()); ++i) {
      persal_grid* g = nullptr;
      check(persal_dataset_fixation(data.get(), i, &g), "fixation map");
      maps.emplace_back(g);
      names.emplace_back(persal_dataset_image_id(data.get(), i));
    }
    record_dataset(rec, o.annotations, data.get());
  } else {
    for (const fs::path& f : list_files(o.fixations, ".fgrd")) {
      maps.push_back(read_grid(f));
      names.push_back(f.filename().string());
      rec.input(f);
    }
  }
  if (maps.empty()) fail("no fixation maps found");

  if (!o.grid.empty()) {
    const Shape s = parse_shape(o.grid);
    for (Grid& g : maps) {
      persal_grid* r = nullptr;
      check(persal_grid_resample(g.get(), s.height, s.width, &r), "resample");
      g.reset(r);
    }
  } else {
    for (std::size_t i = 1; i < maps.size(); ++i) {
      if (grid_shape(maps[i].get()) != grid_shape(maps[0].get())) {
        fail("fixation maps differ in size (" + names[0] + " is " + grid_shape(maps[0].get()) +
             ", " + names[i] + " is " + grid_shape(maps[i].get()) + "); pass --grid to resample");
      }
    }
  }
  std::vector<const persal_grid*> raw;
  for (const Grid& g : maps) raw.push_back(g.get());
  persal_grid* prior = nullptr;
  int flat = 0;
  check(persal_center_prior(raw.data(), raw.size(), &prior, &flat), "center prior");
  const Grid owned(prior);
  if (flat) std::cerr << "warning: the summed fixation maps are constant; prior is all zero\n";

  if (fs::path(o.out).has_parent_path()) ensure_dir(fs::path(o.out).parent_path());
  write_grid(prior, o.out);
  rec.output(o.out);
  if (!o.pgm.empty()) {
    export_pgm(prior, o.pgm);
    rec.output(o.pgm);
  }
  rec.config()["grid"] = o.grid.empty() ? json("native") : json(o.grid);
  rec.config()["maps"] = maps.size();
  rec.finish(manifest_beside_file(o.out));
  return kExitOk;
}

// --------------------------------------------------------------- baseline

struct BaselineOptions {
  std::string kind = "detection";
  std::string annotations;
  std::string prior;
  std::string mapping;
  std::string pvec;
  std::uint64_t seed = 0;
  std::optional<double> threshold;
  std::string preset;
  std::optional<double> iou;
  std::string grid = "38x38";
  bool grid_given = false;
  std::string out;
  bool pgm = false;
};

int run_baseline(const BaselineOptions& o, const Context& ctx) {
  const bool detection = o.kind == "detection";
  if (!detection && o.kind != "center_prior" && o.kind != "center-prior") {
    fail("unknown baseline kind '" + o.kind + "' (expected center_prior or detection)");
  }
  const Shape shape = parse_shape(o.grid);
  double threshold = 0.5;
  if (!o.preset.empty()) {
    persal_nms_config preset{};
    check(persal_nms_preset(o.preset.c_str(), &preset), "--preset");
    threshold = preset.confidence_threshold;
  }
  if (o.threshold) threshold = *o.threshold;
  if (!(threshold >= 0.0 && threshold <= 1.0)) fail("--threshold must lie in [0,1]");

  Dataset data = load_dataset(o.annotations);
  const std::size_t n = persal_dataset_size(data.get());
  const auto stems = image_stems(data.get());
  RunRecorder rec(ctx, "baseline");
  json& cfg = rec.config();
  cfg["kind"] = detection ? "detection" : "center_prior";
  for (const fs::path& f : dataset_files(o.annotations, data.get())) {
    if (f.extension() == ".json") rec.input(f);
  }

  std::vector<Grid> results(n);
  std::size_t fallbacks = 0;
  if (detection) {
    if (o.pvec.empty()) fail("--pvec is required for the detection baseline");
    const Mapping mapping = load_mapping(o.mapping);
    const Pvec pvec = load_pvec(o.pvec);
    if (o.iou) {
      const persal_nms_config nms{threshold, *o.iou};
      check(persal_dataset_apply_nms(data.get(), &nms), "--iou");
    }
    std::vector<int> used(n, 0);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
      const char* id = persal_dataset_image_id(data.get(), i);
      persal_grid* g = nullptr;
      check(persal_detection_baseline(data.get(), i, mapping.get(), pvec.get(), threshold,
                                      persal_derive_seed(o.seed, id), shape.height, shape.width,
                                      &g, &used[i]),
            std::string("image '") + id + "'");
      results[i].reset(g);
    });
    for (int u : used) fallbacks += u ? 1 : 0;
    rec.input(o.pvec);
    if (!o.mapping.empty()) rec.input(o.mapping);
    cfg["seed"] = o.seed;
    cfg["seed_derivation"] = "splitmix64(seed ^ fnv1a64(image_id))";
    cfg["threshold"] = threshold;
    cfg["iou"] = o.iou ? json(*o.iou) : json(nullptr);
    cfg["grid"] = o.grid;
    cfg["mapping"] = describe_source(o.mapping);
    cfg["pvec"] = pvec_json(pvec.get());
    cfg["fallbacks"] = fallbacks;
  } else {
    if (o.prior.empty()) fail("--prior is required for the center_prior baseline");
    Grid prior = read_grid(o.prior);
    rec.input(o.prior);
    if (o.grid_given) {
      persal_grid* r = nullptr;
      check(persal_grid_resample(prior.get(), shape.height, shape.width, &r), "resample");
      prior.reset(r);
    }
    persal_grid* g = nullptr;
    check(persal_center_prior_baseline(prior.get(), &g), "center prior baseline");
    const Grid map(g);
    for (Grid& r : results) {
      persal_grid* copy = nullptr;
      check(persal_grid_clone(map.get(), &copy), "clone");
      r.reset(copy);
    }
    cfg["grid"] = o.grid_given ? json(o.grid) : json("prior");
  }

  ensure_dir(o.out);
  for (std::size_t i = 0; i < n; ++i) {
    const fs::path path = fs::path(o.out) / (stems[i] + ".fgrd");
    write_grid(results[i].get(), path);
    rec.output(path);
    if (o.pgm) {
      const fs::path pgm = fs::path(o.out) / (stems[i] + ".pgm");
      export_pgm(results[i].get(), pgm);
      rec.output(pgm);
    }
  }
  rec.finish(fs::path(o.out) / "run_manifest.json");
  std::cout << "wrote " << n << " baseline maps to " << o.out;
  if (detection) std::cout << " (" << fallbacks << " used the random fallback)";
  std::cout << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- eval

struct EvalOptions {
  std::string pred;
  std::string gt;
  std::size_t emd_res = 32;
  std::string distance = "euclidean";
  std::string out;
};

int run_eval(const EvalOptions& o, const Context& ctx) {
  persal_emd_options emd{};
  persal_emd_options_default(&emd);
  emd.max_resolution = o.emd_res;
  if (o.distance == "euclidean") {
    emd.distance = PERSAL_DISTANCE_EUCLIDEAN;
  } else if (o.distance == "manhattan") {
    emd.distance = PERSAL_DISTANCE_MANHATTAN;
  } else {
    fail("unknown ground distance '" + o.distance + "' (expected euclidean or manhattan)");
  }
  if (o.emd_res == 0) fail("--emd-res must be positive");

  const auto gt_files = list_files(o.gt, ".fgrd");
  const auto pred_files = list_files(o.pred, ".fgrd");
  std::map<std::string, fs::path> preds;
  for (const fs::path& f : pred_files) preds[f.stem().string()] = f;
  std::set<std::string> gt_names;
  for (const fs::path& f : gt_files) gt_names.insert(f.stem().string());
  for (const auto& [name, path] : preds) {
    if (!gt_names.count(name)) fail("prediction " + path.string() + " has no ground-truth counterpart");
  }
  if (gt_files.empty()) fail("no .fgrd files in " + o.gt);

  RunRecorder rec(ctx, "eval");
  std::vector<std::string> ids;
  std::vector<Grid> p;
  std::vector<Grid> q;
  for (const fs::path& g : gt_files) {
    const std::string name = g.stem().string();
    const auto it = preds.find(name);
    if (it == preds.end()) fail("ground truth " + g.string() + " has no prediction in " + o.pred);
    ids.push_back(name);
    p.push_back(read_grid(it->second));
    q.push_back(read_grid(g));
    rec.input(it->second);
    rec.input(g);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (grid_shape(p[i].get()) != grid_shape(q[i].get())) {
      fail("size mismatch for '" + ids[i] + "': prediction " + grid_shape(p[i].get()) +
           ", ground truth " + grid_shape(q[i].get()));
    }
  }

  std::vector<const char*> id_ptrs;
  std::vector<const persal_grid*> p_raw;
  std::vector<const persal_grid*> q_raw;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    id_ptrs.push_back(ids[i].c_str());
    p_raw.push_back(p[i].get());
    q_raw.push_back(q[i].get());
  }
  persal_report* r = nullptr;
  check(persal_evaluate(id_ptrs.data(), p_raw.data(), q_raw.data(), ids.size(), &emd, ctx.jobs, &r),
        "evaluation");
  const Report report(r);
  char* csv = nullptr;
  check(persal_report_csv(report.get(), &csv), "report");
  char* js = nullptr;
  check(persal_report_json(report.get(), &js), "report");

  ensure_dir(o.out);
  const fs::path csv_path = fs::path(o.out) / "report.csv";
  const fs::path json_path = fs::path(o.out) / "report.json";
  write_text(csv_path, take_string(csv));
  write_text(json_path, take_string(js));
  rec.output(csv_path);
  rec.output(json_path);
  rec.config()["emd_resolution"] = o.emd_res;
  rec.config()["ground_distance"] = o.distance;
  rec.finish(fs::path(o.out) / "run_manifest.json");

  persal_report_means m{};
  check(persal_report_means_of(report.get(), &m), "report");
  std::cout << "images " << m.images << "  cc " << m.cc << "  sim " << m.sim << "  kld " << m.kld_judd
            << "  emd " << m.emd;
  if (m.failed) std::cout << "  (" << m.failed << " with undefined metrics)";
  std::cout << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- tune

struct SyntheticFlags {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t min_objects = 1;
  std::size_t max_objects = 4;
  std::string image_size = "300x300";
  int off_center_category = -1;
  int required_category = -1;
};

void add_synthetic_flags(CLI::App* app, SyntheticFlags& s) {
  app->add_option("--synthetic", s.count, "Generate this many synthetic annotated images");
  app->add_option("--seed", s.seed, "Seed for synthetic data")->capture_default_str();
  app->add_option("--min-objects", s.min_objects, "Fewest boxes per synthetic image")->capture_default_str();
  app->add_option("--max-objects", s.max_objects, "Most boxes per synthetic image")->capture_default_str();
  app->add_option("--image-size", s.image_size, "Synthetic image size WxH")->capture_default_str();
  app->add_option("--off-center-category", s.off_center_category,
                  "Keep boxes of this category away from the centre");
  app->add_option("--required-category", s.required_category,
                  "Put a box of this category in every synthetic image");
}

Dataset synthetic_dataset(const SyntheticFlags& s, const Shape& grid, json& cfg) {
  persal_synthetic_options opts{};
  persal_synthetic_options_default(&opts);
  const Shape img = parse_shape(s.image_size);  // parsed as WxH
  opts.n_images = s.count;
  opts.seed = s.seed;
  opts.image_width = img.height;
  opts.image_height = img.width;
  opts.grid_height = grid.height;
  opts.grid_width = grid.width;
  opts.min_objects = s.min_objects;
  opts.max_objects = s.max_objects;
  opts.off_center_category = s.off_center_category;
  opts.required_category = s.required_category;
  persal_dataset* d = nullptr;
  check(persal_dataset_synthetic(&opts, &d), "synthetic dataset");
  cfg["synthetic"] = {{"count", s.count},
                      {"seed", s.seed},
                      {"min_objects", s.min_objects},
                      {"max_objects", s.max_objects},
                      {"image_size", s.image_size},
                      {"grid", std::to_string(grid.height) + "x" + std::to_string(grid.width)},
                      {"off_center_category", s.off_center_category},
                      {"required_category", s.required_category}};
  return Dataset(d);
}

struct TuneOptions {
  std::string annotations;
  SyntheticFlags synthetic;
  std::string mapping;
  std::string pvec;
  std::string labels;
  std::string label_weights;
  std::string sweep = "both";
  std::string alpha_grid = "0.01,0.02,0.04,0.06,0.08,0.1,0.14,0.2";
  std::string ratio_grid = "0.5,0.6,0.7,0.8,0.9,1.0";
  double fixed_alpha = 0.06;
  std::string fixed_ratio = "0.8:0.2";
  std::string grid = "38x38";
  std::string out;
};

double parse_ratio(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const auto v = parse_list(text);
    if (v.size() != 1 || !(v[0] >= 0.0 && v[0] <= 1.0)) fail("--fixed-ratio must be b:g or a fraction in [0,1]");
    return v[0];
  }
  const auto b = parse_list(text.substr(0, colon));
  const auto g = parse_list(text.substr(colon + 1));
  if (b.size() != 1 || g.size() != 1 || !(b[0] >= 0.0) || !(g[0] >= 0.0) || b[0] + g[0] <= 0.0) {
    fail("--fixed-ratio must look like 0.8:0.2");
  }
  return b[0] / (b[0] + g[0]);
}

int run_tune(const TuneOptions& o, const Context& ctx) {
  const bool synthetic = o.synthetic.count > 0;
  if (synthetic == !o.annotations.empty()) fail("give exactly one of --annotations or --synthetic");
  if (o.labels.empty() == o.label_weights.empty()) fail("give exactly one of --labels or --label-weights");
  if (o.sweep != "alpha" && o.sweep != "ratio" && o.sweep != "both") {
    fail("--sweep must be alpha, ratio or both");
  }
  const Shape shape = parse_shape(o.grid);
  const auto alpha_grid = parse_list(o.alpha_grid);
  const auto ratio_grid = parse_list(o.ratio_grid);
  const double beta_fraction = parse_ratio(o.fixed_ratio);

  RunRecorder rec(ctx, "tune");
  json& cfg = rec.config();
  const Mapping mapping = load_mapping(o.mapping);
  const Pvec pvec = load_pvec(o.pvec);
  rec.input(o.pvec);
  if (!o.mapping.empty()) rec.input(o.mapping);
  Dataset data;
  if (synthetic) {
    data = synthetic_dataset(o.synthetic, shape, cfg);
  } else {
    data = load_dataset(o.annotations);
    record_dataset(rec, o.annotations, data.get());
  }
  const std::size_t n = persal_dataset_size(data.get());
  const auto stems = image_stems(data.get());

  std::vector<Grid> labels(n);
  if (!o.labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      const fs::path path = fs::path(o.labels) / (stems[i] + ".fgrd");
      labels[i] = read_grid(path);
      rec.input(path);
      if (persal_grid_height(labels[i].get()) != shape.height ||
          persal_grid_width(labels[i].get()) != shape.width) {
        fail("label " + path.string() + " is " + grid_shape(labels[i].get()) + ", expected " + o.grid);
      }
    }
    cfg["labels"] = o.labels;
  } else {
    const persal_weights w = parse_weights(o.label_weights);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
      persal_grid* g = nullptr;
      check(persal_generate_psal(data.get(), i, nullptr, mapping.get(), pvec.get(), &w,
                                 shape.height, shape.width, 1.0, &g, nullptr),
            "label generation");
      labels[i].reset(g);
    });
    cfg["label_weights"] = weights_json(w);
  }
  std::vector<const persal_grid*> label_ptrs;
  for (const Grid& g : labels) label_ptrs.push_back(g.get());

  ensure_dir(o.out);
  auto run = [&](bool alpha) {
    const auto& grid = alpha ? alpha_grid : ratio_grid;
    const persal_sweep_spec spec{grid.data(), grid.size(), o.fixed_alpha, beta_fraction};
    persal_sweep* s = nullptr;
    check((alpha ? persal_sweep_alpha : persal_sweep_ratio)(data.get(), nullptr, label_ptrs.data(),
                                                            mapping.get(), pvec.get(), &spec,
                                                            shape.height, shape.width, ctx.jobs, &s),
          alpha ? "alpha sweep" : "ratio sweep");
    const Sweep sweep(s);
    char* csv = nullptr;
    check(persal_sweep_csv(sweep.get(), &csv), "sweep");
    const fs::path path = fs::path(o.out) / (alpha ? "alpha_sweep.csv" : "ratio_sweep.csv");
    write_text(path, take_string(csv));
    rec.output(path);
    persal_sweep_candidate best{};
    check(persal_sweep_candidate_at(sweep.get(), persal_sweep_best_index(sweep.get()), &best), "sweep");
    std::cout << (alpha ? "alpha" : "ratio") << " sweep best: alpha " << best.weights.alpha << " beta "
              << best.weights.beta << " gamma " << best.weights.gamma << " (objective "
              << best.objective << ")\n";
  };
  if (o.sweep != "ratio") run(true);
  if (o.sweep != "alpha") run(false);

  cfg["sweep"] = o.sweep;
  cfg["alpha_grid"] = alpha_grid;
  cfg["ratio_grid"] = ratio_grid;
  cfg["fixed_alpha"] = o.fixed_alpha;
  cfg["fixed_beta_fraction"] = beta_fraction;
  cfg["grid"] = o.grid;
  cfg["mapping"] = describe_source(o.mapping);
  cfg["pvec"] = pvec_json(pvec.get());
  rec.finish(fs::path(o.out) / "run_manifest.json");
  return kExitOk;
}

// ---------------------------------------------------------------- convert

struct ConvertOptions {
  std::string in;
  std::string out;
  SyntheticFlags synthetic;
  std::string grid = "38x38";
};

int run_convert(const ConvertOptions& o, const Context& ctx) {
  if (o.out.empty()) fail("--out is required");
  RunRecorder rec(ctx, "convert");
  if (o.synthetic.count > 0) {
    if (!o.in.empty()) fail("--in and --synthetic are exclusive");
    const Dataset data = synthetic_dataset(o.synthetic, parse_shape(o.grid), rec.config());
    image_stems(data.get());
    ensure_dir(o.out);
    check(persal_dataset_write(data.get(), o.out.c_str()), "writing dataset");
    const Dataset written = load_dataset((fs::path(o.out) / "manifest.json").string());
    for (const fs::path& f : dataset_files((fs::path(o.out) / "manifest.json").string(), written.get())) {
      rec.output(f);
    }
    rec.finish(fs::path(o.out) / "run_manifest.json");
    std::cout << "wrote " << persal_dataset_size(data.get()) << " synthetic images to " << o.out << "\n";
    return kExitOk;
  }
  if (o.in.empty()) fail("give --in or --synthetic");
  const std::string from = fs::path(o.in).extension().string();
  const std::string to = fs::path(o.out).extension().string();
  Grid g;
  if (from == ".fgrd") {
    g = read_grid(o.in);
  } else if (from == ".csv") {
    persal_grid* raw = nullptr;
    check(persal_grid_read_csv(o.in.c_str(), &raw), "reading " + o.in);
    g.reset(raw);
  } else {
    fail("cannot read '" + from + "' files (expected .fgrd or .csv)");
  }
  rec.input(o.in);
  if (to == ".fgrd") {
    write_grid(g.get(), o.out);
  } else if (to == ".csv") {
    check(persal_grid_write_csv(g.get(), o.out.c_str()), "writing " + o.out);
  } else if (to == ".pgm") {
    export_pgm(g.get(), o.out);
  } else {
    fail("cannot write '" + to + "' files (expected .fgrd, .csv or .pgm)");
  }
  rec.output(o.out);
  rec.finish(manifest_beside_file(o.out));
  return kExitOk;
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  std::vector<Command> out;

  {
    auto o = std::make_shared<ProfileOptions>();
    CLI::App* sub = app.add_subcommand("profile", "Build a preference vector from detections or ratings");
    sub->add_option("--detections", o->detections, "Detection manifest file or directory");
    sub->add_option("--ratings", o->ratings, "Ratings JSON {names, ratings} instead of detections");
    sub->add_option("--mapping", o->mapping, "Category mapping JSON (default: built-in COCO)");
    sub->add_option("--window-days", o->window_days, "Recency window in days")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--now", o->now, "Reference time, unix seconds (default: current time)");
    sub->add_option("--out", o->out, "Write the vector here instead of stdout");
    out.push_back({sub, [o](const Context& c) { return run_profile(*o, c); }});
  }
  {
    auto o = std::make_shared<GenGtOptions>();
    CLI::App* sub = app.add_subcommand("gen-gt", "Generate personalized ground-truth maps");
    sub->add_option("--annotations", o->annotations, "Annotation manifest file or directory")->required();
    sub->add_option("--pvec", o->pvec, "Preference vector JSON")->required();
    sub->add_option("--mapping", o->mapping, "Category mapping JSON (default: built-in COCO)");
    sub->add_option("--weights", o->weights, "alpha,beta,gamma")->capture_default_str();
    sub->add_option("--grid", o->grid, "Output size HxW")->capture_default_str();
    sub->add_flag("--full-res", o->full_res, "Keep each fixation map's own size");
    sub->add_option("--softmax-scale", o->softmax_scale, "Softmax temperature scale")->capture_default_str();
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->add_flag("--pgm", o->pgm, "Also export PGM previews");
    out.push_back({sub, [o](const Context& c) { return run_gen_gt(*o, c); }});
  }
  {
    auto o = std::make_shared<PriorOptions>();
    CLI::App* sub = app.add_subcommand("prior", "Build the center prior from fixation maps");
    sub->add_option("--annotations", o->annotations, "Annotation manifest file or directory");
    sub->add_option("--fixations", o->fixations, "Directory of .fgrd fixation maps");
    sub->add_option("--grid", o->grid, "Resample every map to HxW first");
    sub->add_option("--out", o->out, "Output .fgrd file")->required();
    sub->add_option("--pgm", o->pgm, "Also export a PGM preview here");
    out.push_back({sub, [o](const Context& c) { return run_prior(*o, c); }});
  }
  {
    auto o = std::make_shared<BaselineOptions>();
    CLI::App* sub = app.add_subcommand("baseline", "Produce baseline saliency maps");
    sub->add_option("--kind", o->kind, "center_prior or detection")->capture_default_str();
    sub->add_option("--annotations", o->annotations, "Annotation manifest file or directory")->required();
    sub->add_option("--prior", o->prior, "Center prior .fgrd (center_prior kind)");
    sub->add_option("--mapping", o->mapping, "Category mapping JSON (default: built-in COCO)");
    sub->add_option("--pvec", o->pvec, "Preference vector JSON (detection kind)");
    sub->add_option("--seed", o->seed, "Seed for the random fallback")->capture_default_str();
    sub->add_option("--threshold", o->threshold, "Confidence threshold (default 0.5)");
    sub->add_option("--preset", o->preset, "Threshold preset: voc or coco");
    sub->add_option("--iou", o->iou, "Apply NMS with this IoU threshold first");
    auto* grid = sub->add_option("--grid", o->grid, "Output size HxW")->capture_default_str();
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->add_flag("--pgm", o->pgm, "Also export PGM previews");
    out.push_back({sub, [o, grid](const Context& c) {
                     o->grid_given = grid->count() > 0;
                     return run_baseline(*o, c);
                   }});
  }
  {
    auto o = std::make_shared<EvalOptions>();
    CLI::App* sub = app.add_subcommand("eval", "Score predictions against ground truth");
    sub->add_option("--pred", o->pred, "Directory of predicted .fgrd maps")->required();
    sub->add_option("--gt", o->gt, "Directory of ground-truth .fgrd maps")->required();
    sub->add_option("--emd-res", o->emd_res, "Largest EMD working size per axis")->capture_default_str();
    sub->add_option("--distance", o->distance, "EMD ground distance: euclidean or manhattan")
        ->capture_default_str();
    sub->add_option("--out", o->out, "Report directory")->required();
    out.push_back({sub, [o](const Context& c) { return run_eval(*o, c); }});
  }
  {
    auto o = std::make_shared<TuneOptions>();
    CLI::App* sub = app.add_subcommand("tune", "Sweep the ground-truth blend weights");
    sub->add_option("--annotations", o->annotations, "Annotation manifest file or directory");
    add_synthetic_flags(sub, o->synthetic);
    sub->add_option("--mapping", o->mapping, "Category mapping JSON (default: built-in COCO)");
    sub->add_option("--pvec", o->pvec, "Preference vector JSON")->required();
    sub->add_option("--labels", o->labels, "Directory of reference label .fgrd maps");
    sub->add_option("--label-weights", o->label_weights, "Synthesize labels with alpha,beta,gamma");
    sub->add_option("--sweep", o->sweep, "alpha, ratio or both")->capture_default_str();
    sub->add_option("--alpha-grid", o->alpha_grid, "Alpha values")->capture_default_str();
    sub->add_option("--ratio-grid", o->ratio_grid, "Beta fractions")->capture_default_str();
    sub->add_option("--fixed-alpha", o->fixed_alpha, "Alpha during the ratio sweep")->capture_default_str();
    sub->add_option("--fixed-ratio", o->fixed_ratio, "beta:gamma during the alpha sweep")->capture_default_str();
    sub->add_option("--grid", o->grid, "Working size HxW")->capture_default_str();
    sub->add_option("--out", o->out, "Output directory for sweep CSVs")->required();
    out.push_back({sub, [o](const Context& c) { return run_tune(*o, c); }});
  }
  {
    auto o = std::make_shared<ConvertOptions>();
    CLI::App* sub = app.add_subcommand("convert", "Convert grids or write a synthetic dataset");
    sub->add_option("--in", o->in, "Input grid (.fgrd or .csv)");
    sub->add_option("--out", o->out, "Output grid (.fgrd, .csv, .pgm) or dataset directory");
    add_synthetic_flags(sub, o->synthetic);
    sub->add_option("--grid", o->grid, "Synthetic fixation map size HxW")->capture_default_str();
    out.push_back({sub, [o](const Context& c) { return run_convert(*o, c); }});
  }
  return out;
}

}  // namespace persal::cli
