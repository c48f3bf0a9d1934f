#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "agkmap/formats.hpp"
#include "agkmap/pipeline.hpp"
#include "oracles.hpp"

namespace agkmap {
namespace {

using nlohmann::json;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("agkmap_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
             std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_ / "ann");
  }
  void TearDown() override { fs::remove_all(root_); }

  void write_annotation(const AnnotationSet& ann) {
    std::ofstream(root_ / "ann" / (ann.image_id + ".json")) << annotation_to_json(ann).dump();
  }

  std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path root_;
};

TEST_F(PipelineTest, GenerateConservesCounts) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3; ++i) {
    auto ann = testing::random_annotation(rng, 160, 120, 12, 40);
    ann.image_id = "img" + std::to_string(i);
    write_annotation(ann);
  }
  write_annotation({"empty", 50, 40, {}});

  JobConfig job;
  job.annotation_paths = {root_ / "ann"};
  job.output_dir = root_ / "out";
  job.scheme = Scheme::agk;
  const auto summary = run_generate(job);
  ASSERT_TRUE(summary.ok());
  ASSERT_EQ(summary.images.size(), 4u);
  for (const auto& img : summary.images) {
    const auto map = read_dmap(img.output);
    EXPECT_NEAR(count_from_density(map), static_cast<double>(img.labels), 1e-4) << img.image_id;
  }
  EXPECT_EQ(summary.images[0].image_id, "empty");
  EXPECT_EQ(count_from_density(read_dmap(root_ / "out" / "empty.dmap")), 0.0);
}

TEST_F(PipelineTest, DotAndLineDifferInSpreadNotMass) {
  write_annotation({"one", 120, 120, {{{30, 60}, {90, 60}}}});
  JobConfig job;
  job.annotation_paths = {root_ / "ann" / "one.json"};
  job.kernel.sigma_basic = 4;
  job.scheme = Scheme::dot;
  job.output_dir = root_ / "dot";
  ASSERT_TRUE(run_generate(job).ok());
  job.scheme = Scheme::line;
  job.output_dir = root_ / "line";
  ASSERT_TRUE(run_generate(job).ok());

  const auto dot = read_dmap(root_ / "dot" / "one.dmap");
  const auto line = read_dmap(root_ / "line" / "one.dmap");
  EXPECT_NEAR(count_from_density(dot), 1.0, 1e-5);
  EXPECT_NEAR(count_from_density(line), 1.0, 1e-5);
  // the line kernel reaches the endpoints, the dot kernel does not
  EXPECT_EQ(dot.at(30, 60), 0.0);
  EXPECT_GT(line.at(30, 60), 0.0);
}

TEST_F(PipelineTest, OutputIndependentOfJobs) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 6; ++i) {
    auto ann = testing::random_annotation(rng, 100, 90, 10, 30);
    ann.image_id = "f" + std::to_string(i);
    write_annotation(ann);
  }
  JobConfig job;
  job.annotation_paths = {root_ / "ann"};
  job.output_dir = root_ / "j1";
  job.jobs = 1;
  ASSERT_TRUE(run_generate(job).ok());
  job.output_dir = root_ / "j4";
  job.jobs = 4;
  const auto summary = run_generate(job);
  ASSERT_TRUE(summary.ok());
  for (const auto& img : summary.images) {
    EXPECT_EQ(read_bytes(root_ / "j1" / (img.image_id + ".dmap")), read_bytes(img.output));
  }
}

TEST_F(PipelineTest, MalformedFilesAreReported) {
  write_annotation({"good", 20, 20, {{{2, 2}, {8, 8}}}});
  std::ofstream(root_ / "ann" / "bad.json") << "{ not json";
  std::ofstream(root_ / "ann" / "dup.json") << R"({"image": "good", "width": 5, "height": 5, "labels": []})";
  JobConfig job;
  job.annotation_paths = {root_ / "ann"};
  job.output_dir = root_ / "out";
  const auto summary = run_generate(job);
  EXPECT_FALSE(summary.ok());
  EXPECT_EQ(summary.errors.size(), 2u);
  ASSERT_EQ(summary.images.size(), 1u);
  EXPECT_TRUE(fs::exists(root_ / "out" / "good.dmap"));
}

TEST_F(PipelineTest, ClampWarningsSurface) {
  std::ofstream(root_ / "ann" / "edge.json")
      << R"({"image": "edge", "width": 40, "height": 40, "labels": [{"x1": -5, "y1": 3, "x2": 20, "y2": 20}]})";
  JobConfig job;
  job.annotation_paths = {root_ / "ann"};
  job.output_dir = root_ / "out";
  const auto summary = run_generate(job);
  ASSERT_TRUE(summary.ok());
  ASSERT_EQ(summary.images[0].warnings.size(), 1u);
  EXPECT_NEAR(summary.images[0].count, 1.0, 1e-9);
}

TEST_F(PipelineTest, MaskWritesBlackenedCopy) {
  fs::create_directories(root_ / "img");
  Image img = make_image(40, 30, 1);
  std::fill(img.pixels.begin(), img.pixels.end(), 200);
  write_netpbm(root_ / "img" / "cam.pgm", img);
  write_annotation({"cam", 40, 30, {}});
  JobConfig job;
  job.annotation_paths = {root_ / "ann"};
  job.output_dir = root_ / "out";
  job.image_dir = root_ / "img";
  job.masks = {parse_mask("30,0,10,5")};
  ASSERT_TRUE(run_generate(job).ok());
  const auto masked = read_netpbm(root_ / "out" / "cam_masked.pgm");
  EXPECT_EQ(masked.at(35, 2), 0);
  EXPECT_EQ(masked.at(5, 20), 200);
}

TEST(ParseMask, Validates) {
  const auto r = parse_mask("1,2,30,40");
  EXPECT_EQ(r.x, 1);
  EXPECT_EQ(r.h, 40);
  EXPECT_THROW(parse_mask("1,2,3"), std::invalid_argument);
  EXPECT_THROW(parse_mask("1,2,0,4"), std::invalid_argument);
  EXPECT_THROW(parse_mask("1;2;3;4"), std::invalid_argument);
}

TEST(ValidImageId, RejectsPathTricks) {
  EXPECT_TRUE(valid_image_id("frame_001.v2"));
  EXPECT_FALSE(valid_image_id(""));
  EXPECT_FALSE(valid_image_id(".."));
  EXPECT_FALSE(valid_image_id("a/b"));
  EXPECT_FALSE(valid_image_id("a b"));
}

TEST_F(PipelineTest, EvalReportsScaledPrediction) {
  fs::create_directories(root_ / "gt");
  fs::create_directories(root_ / "pred");
  std::mt19937_64 rng(2);
  auto ten = testing::random_annotation(rng, 80, 80, 0, 1);
  std::uniform_real_distribution<double> u(5, 75);
  for (int i = 0; i < 10; ++i) ten.labels.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}});
  const auto gt10 = agk_density_map(ten, KernelConfig{});
  DensityMap scaled = gt10;
  for (double& v : scaled.values()) v *= 1.1;
  const AnnotationSet three{"three", 80, 80, {{{10, 10}, {20, 20}}, {{40, 40}, {50, 45}}, {{60, 10}, {70, 12}}}};
  const auto gt3 = agk_density_map(three, KernelConfig{});

  write_dmap(root_ / "gt" / "ten.dmap", gt10);
  write_dmap(root_ / "pred" / "ten.dmap", scaled);
  write_dmap(root_ / "gt" / "three.dmap", gt3);
  write_dmap(root_ / "pred" / "three.dmap", gt3);

  const auto report = run_eval(root_ / "gt", root_ / "pred");
  EXPECT_NEAR(report.overall.metrics->mae, 1.0 / 2.0, 1e-5);
  EXPECT_NEAR(report.medium.metrics->mae, 1.0, 1e-5);
  EXPECT_NEAR(report.low.metrics->mae, 0.0, 1e-12);

  const auto j = report_to_json(report);
  for (const char* key : {"overall", "low", "medium", "high"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["high"]["n"], 0);
  EXPECT_FALSE(j["high"].contains("mae"));
  EXPECT_EQ(j["overall"]["n"], 2);

  const auto self = report_to_json(run_eval(root_ / "gt", root_ / "gt"));
  EXPECT_EQ(self["overall"]["mae"], 0.0);
  EXPECT_EQ(self["overall"]["rmse"], 0.0);

  const auto csv = records_to_csv(report, true);
  EXPECT_NE(csv.find("ten,10,11,medium"), std::string::npos) << csv;

  fs::remove(root_ / "pred" / "three.dmap");
  EXPECT_THROW(run_eval(root_ / "gt", root_ / "pred"), std::invalid_argument);
}

TEST_F(PipelineTest, DedupFromFeatureFiles) {
  fs::create_directories(root_ / "fst");
  auto stack = [](float v) {
    FeatureStack s;
    for (auto& l : s.layers) l = {2, 2, 2, std::vector<float>(8, v)};
    return s;
  };
  write_feature_stack(root_ / "fst" / "a.fst", stack(0.0f));
  write_feature_stack(root_ / "fst" / "b.fst", stack(0.1f));   // distance 0.05 to a
  write_feature_stack(root_ / "fst" / "c.fst", stack(10.0f));
  DedupOptions opts;
  opts.features_dir = root_ / "fst";
  const auto result = run_dedup(opts);
  EXPECT_EQ(result.kept, (std::vector<std::string>{"a", "c"}));
  const auto j = dedup_to_json(result, 2.0);
  ASSERT_EQ(j["dropped"].size(), 1u);
  EXPECT_EQ(j["dropped"][0]["image"], "b");
  EXPECT_EQ(j["dropped"][0]["kept"], "a");
}

TEST_F(PipelineTest, DedupFromImages) {
  fs::create_directories(root_ / "img");
  Image img = make_image(40, 40, 1);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(i * 37 % 251);
  write_netpbm(root_ / "img" / "a.pgm", img);
  write_netpbm(root_ / "img" / "b.pgm", img);
  DedupOptions opts;
  opts.images_dir = root_ / "img";
  const auto result = run_dedup(opts);
  EXPECT_EQ(result.kept, (std::vector<std::string>{"a"}));
  opts.features_dir = root_;
  EXPECT_THROW(run_dedup(opts), std::invalid_argument);
}

TEST_F(PipelineTest, AtomicWriteReplaces) {
  write_atomically(root_ / "x.json", "one");
  write_atomically(root_ / "x.json", "two");
  EXPECT_EQ(read_bytes(root_ / "x.json"), "two");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(root_)) ++files;
  EXPECT_EQ(files, 2u);  // ann/ and x.json
}

}  // namespace
}  // namespace agkmap
