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

// Exercises the shared library through its C header only.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "persal/persal.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("persal_capi_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

persal_grid* grid(size_t h, size_t w, std::vector<double> v) {
  persal_grid* g = nullptr;
  REQUIRE(persal_grid_create(h, w, v.data(), &g) == PERSAL_OK);
  return g;
}

std::vector<double> values(const persal_grid* g) {
  std::vector<double> v(persal_grid_height(g) * persal_grid_width(g));
  REQUIRE(persal_grid_values(g, v.data(), v.size()) == PERSAL_OK);
  return v;
}

}  // namespace

TEST_CASE("status reporting") {
  persal_grid* g = nullptr;
  CHECK(persal_grid_create(0, 3, nullptr, &g) == PERSAL_E_ZERO_DIM);
  CHECK(g == nullptr);
  CHECK(std::strlen(persal_last_error()) > 0);
  CHECK(std::string(persal_status_name(PERSAL_E_CHECKSUM_MISMATCH)) == "ChecksumMismatch");
  CHECK(persal_status_is_io(PERSAL_E_TRUNCATED_FILE));
  CHECK_FALSE(persal_status_is_io(PERSAL_E_DIM_MISMATCH));
  CHECK(std::string(persal_version()) == "1.0.0");
  CHECK(persal_grid_create(2, 2, nullptr, nullptr) == PERSAL_E_INVALID_ARGUMENT);
  persal_grid_destroy(nullptr);
}

TEST_CASE("grid normalization") {
  persal_grid* g = grid(1, 3, {2, 4, 6});
  persal_grid* mm = nullptr;
  int flat = 1;
  REQUIRE(persal_grid_minmax(g, &mm, &flat) == PERSAL_OK);
  CHECK(flat == 0);
  CHECK(values(mm) == std::vector<double>{0, 0.5, 1});
  persal_grid* sm = nullptr;
  REQUIRE(persal_grid_softmax(mm, 1.0, &sm) == PERSAL_OK);
  CHECK(persal_grid_is_normalized(sm));
  persal_grid_stats st{};
  REQUIRE(persal_grid_stats_of(g, &st) == PERSAL_OK);
  CHECK(st.mean == 4.0);
  std::vector<double> small(1);
  CHECK(persal_grid_values(g, small.data(), small.size()) == PERSAL_E_OUT_OF_RANGE);
  persal_grid* zero = grid(1, 2, {0, 0});
  persal_grid* out = nullptr;
  CHECK(persal_grid_normalize_sum(zero, &out) == PERSAL_E_ZERO_MASS);
  for (persal_grid* x : {g, mm, sm, zero}) persal_grid_destroy(x);
}

TEST_CASE("metrics through the C API") {
  persal_grid* p = grid(2, 2, {1, 0, 0, 0});
  persal_grid* q = grid(2, 2, {0, 0, 0, 1});
  persal_emd_options opts{};
  persal_emd_options_default(&opts);
  CHECK(opts.max_resolution == 32);
  double v = 0.0;
  size_t flows = 0;
  REQUIRE(persal_emd(p, q, &opts, &v, &flows) == PERSAL_OK);
  CHECK(v == doctest::Approx(std::sqrt(2.0)));
  CHECK(flows == 1);
  CHECK(persal_cc(p, q, &v) == PERSAL_OK);
  CHECK(persal_sim(p, q, &v) == PERSAL_OK);
  CHECK(v == 0.0);
  CHECK(persal_kld_plain(p, q, &v) == PERSAL_E_UNDEFINED_RATIO);
  persal_grid* wide = grid(1, 4, {0.25, 0.25, 0.25, 0.25});
  CHECK(persal_sim(p, wide, &v) == PERSAL_E_DIM_MISMATCH);

  const char* ids[] = {"a", "b"};
  const persal_grid* preds[] = {p, p};
  const persal_grid* refs[] = {p, q};
  persal_report* r = nullptr;
  REQUIRE(persal_evaluate(ids, preds, refs, 2, &opts, 2, &r) == PERSAL_OK);
  persal_report_means m{};
  REQUIRE(persal_report_means_of(r, &m) == PERSAL_OK);
  CHECK(m.images == 2);
  CHECK(m.emd == doctest::Approx(std::sqrt(2.0) / 2));
  char* csv = nullptr;
  REQUIRE(persal_report_csv(r, &csv) == PERSAL_OK);
  CHECK(std::string(csv).rfind("id,cc,sim", 0) == 0);
  persal_string_free(csv);
  persal_report_destroy(r);
  for (persal_grid* x : {p, q, wide}) persal_grid_destroy(x);
}

TEST_CASE("files") {
  TempDir tmp;
  persal_grid* g = grid(2, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  const std::string path = (tmp.path / "g.fgrd").string();
  REQUIRE(persal_grid_write(g, path.c_str()) == PERSAL_OK);
  persal_grid* back = nullptr;
  REQUIRE(persal_grid_read(path.c_str(), &back) == PERSAL_OK);
  CHECK(persal_grid_height(back) == 2);
  CHECK(std::abs(values(back)[4] - 0.5) <= 1e-6);
  uint64_t digest = 0;
  CHECK(persal_file_digest(path.c_str(), &digest) == PERSAL_OK);
  CHECK(digest != 0);

  std::FILE* f = std::fopen(path.c_str(), "r+b");
  REQUIRE(f);
  std::fseek(f, 14, SEEK_SET);
  std::fputc(0x7f, f);
  std::fclose(f);
  persal_grid* bad = nullptr;
  CHECK(persal_grid_read(path.c_str(), &bad) == PERSAL_E_CHECKSUM_MISMATCH);
  CHECK(persal_grid_read((tmp.path / "none.fgrd").string().c_str(), &bad) == PERSAL_E_IO);
  persal_grid_destroy(g);
  persal_grid_destroy(back);
}

TEST_CASE("preferences and ground truth") {
  persal_mapping* mapping = nullptr;
  REQUIRE(persal_mapping_parse(
              R"({"super_categories": ["person", "other"], "map": {"person": 0}, "catch_all": 1})",
              &mapping) == PERSAL_OK);
  CHECK(persal_mapping_n_super(mapping) == 2);
  CHECK(std::string(persal_mapping_super_name(mapping, 1)) == "other");

  const char* names[] = {"person", "other"};
  const int ratings[] = {10, 3};
  persal_pvec* pvec = nullptr;
  REQUIRE(persal_pvec_from_ratings(names, ratings, 2, &pvec) == PERSAL_OK);
  CHECK(persal_pvec_weight(pvec, 1) == 0.3);
  const int bad_ratings[] = {10, 12};
  persal_pvec* bad = nullptr;
  CHECK(persal_pvec_from_ratings(names, bad_ratings, 2, &bad) == PERSAL_E_RATING_OUT_OF_RANGE);
  persal_pvec* padded = nullptr;
  REQUIRE(persal_pvec_pad(pvec, 20, &padded) == PERSAL_OK);
  CHECK(persal_pvec_size(padded) == 20);

  persal_synthetic_options so{};
  persal_synthetic_options_default(&so);
  so.n_images = 4;
  so.seed = 11;
  persal_dataset* d = nullptr;
  REQUIRE(persal_dataset_synthetic(&so, &d) == PERSAL_OK);
  REQUIRE(persal_dataset_size(d) == 4);
  CHECK(persal_dataset_has_fixation(d, 0));
  CHECK(persal_dataset_fixation_path(d, 0) == nullptr);

  const persal_weights w{0.06, 0.752, 0.188};
  persal_grid* psal = nullptr;
  int flat = 1;
  REQUIRE(persal_generate_psal(d, 0, nullptr, mapping, pvec, &w, 38, 38, 1.0, &psal, &flat) ==
          PERSAL_OK);
  CHECK(flat == 0);
  CHECK(persal_grid_is_normalized(psal));
  persal_weights fw{};
  REQUIRE(persal_final_weights(0.06, 0.8, &fw) == PERSAL_OK);
  CHECK((fw.alpha == 0.06 && fw.beta == 0.752 && fw.gamma == 0.188));

  persal_grid* det = nullptr;
  int fallback = -1;
  REQUIRE(persal_detection_baseline(d, 0, mapping, pvec, 0.5, persal_derive_seed(5, "syn0"), 38,
                                    38, &det, &fallback) == PERSAL_OK);
  CHECK(fallback == 0);
  CHECK(persal_derive_seed(5, "syn0") != persal_derive_seed(5, "syn1"));

  persal_grid* pm = nullptr;
  persal_nms_config nms{};
  REQUIRE(persal_nms_preset("coco", &nms) == PERSAL_OK);
  REQUIRE(persal_preference_map(d, 0, mapping, pvec, &nms, 38, 38, &pm) == PERSAL_OK);
  CHECK(persal_dataset_apply_nms(d, &nms) == PERSAL_OK);

  // Closed-loop sweep: labels from the generating weights.
  std::vector<persal_grid*> labels;
  for (size_t i = 0; i < 4; ++i) {
    persal_grid* l = nullptr;
    REQUIRE(persal_generate_psal(d, i, nullptr, mapping, pvec, &w, 38, 38, 1.0, &l, nullptr) ==
            PERSAL_OK);
    labels.push_back(l);
  }
  const double grid_values[] = {0.02, 0.06, 0.10};
  const persal_sweep_spec spec{grid_values, 3, 0.06, 0.8};
  persal_sweep* s = nullptr;
  REQUIRE(persal_sweep_alpha(d, nullptr, labels.data(), mapping, pvec, &spec, 38, 38, 2, &s) ==
          PERSAL_OK);
  CHECK(persal_sweep_size(s) == 3);
  CHECK(persal_sweep_best_index(s) == 1);
  persal_sweep_candidate c{};
  REQUIRE(persal_sweep_candidate_at(s, 1, &c) == PERSAL_OK);
  CHECK(std::abs(c.objective - 2.0) <= 1e-9);
  CHECK(persal_sweep_candidate_at(s, 9, &c) == PERSAL_E_OUT_OF_RANGE);

  TempDir tmp;
  REQUIRE(persal_dataset_write(d, tmp.path.string().c_str()) == PERSAL_OK);
  persal_dataset* reloaded = nullptr;
  REQUIRE(persal_dataset_load((tmp.path / "manifest.json").string().c_str(), &reloaded) == PERSAL_OK);
  CHECK(persal_dataset_size(reloaded) == 4);
  CHECK(persal_dataset_fixation_path(reloaded, 2) != nullptr);
  persal_grid* again = nullptr;
  REQUIRE(persal_generate_psal(reloaded, 0, nullptr, mapping, pvec, &w, 38, 38, 1.0, &again,
                               nullptr) == PERSAL_OK);
  // Fixation maps pass through float32 storage.
  const auto a = values(psal);
  const auto b = values(again);
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  CHECK(worst < 1e-6);

  persal_sweep_destroy(s);
  for (persal_grid* l : labels) persal_grid_destroy(l);
  for (persal_grid* x : {psal, det, pm, again}) persal_grid_destroy(x);
  persal_dataset_destroy(d);
  persal_dataset_destroy(reloaded);
  persal_pvec_destroy(pvec);
  persal_pvec_destroy(padded);
  persal_mapping_destroy(mapping);
}
