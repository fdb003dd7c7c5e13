#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "det4d/annotate/adaptation.hpp"
#include "det4d/geometry/quaternion.hpp"
#include "det4d/io/dataset.hpp"
#include "det4d/synth/scene.hpp"
#include "det4d/synth/sequence.hpp"

using namespace det4d;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    dir_ = fs::temp_directory_path() /
           ("det4d_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~TempDir() { fs::remove_all(dir_); }
  const fs::path& path() const { return dir_; }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

SequenceClip make_clip() {
  SceneConfig cfg;
  cfg.n_objects = 3;
  const auto scene = generate_scene(cfg, 5);
  const CameraIntrinsics k{110, 110, 64, 64, 128, 128};
  const auto raw = record_sequence(scene, 8, k, 17, {}, true);
  auto result = adapt_boxes(raw, {});
  result.clip.id = "seq_test_0";
  return result.clip;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(RasterIo, RoundTripAndHeader) {
  TempDir tmp;
  DepthMap depth(5, 3, 0.0f);
  depth.at(2, 1) = 7.25f;
  depth.at(4, 2) = 0.125f;
  write_raster(depth, tmp.path() / "d.d4dr");

  const auto bytes = slurp(tmp.path() / "d.d4dr");
  ASSERT_EQ(bytes.size(), 16u + 5u * 3u * 4u);
  EXPECT_EQ(bytes.substr(0, 4), "D4DR");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 5);  // width, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);  // height

  const auto back = read_raster<float>(tmp.path() / "d.d4dr");
  EXPECT_TRUE(back == depth);

  Mask2D mask(4, 4, 0);
  mask.at(1, 2) = 42;
  write_raster(mask, tmp.path() / "m.d4dr");
  EXPECT_TRUE(read_raster<std::int32_t>(tmp.path() / "m.d4dr") == mask);
}

TEST(RasterIo, RejectsCorruptHeader) {
  TempDir tmp;
  std::ofstream(tmp.path() / "bad.d4dr") << "NOPE garbage";
  EXPECT_THROW(read_raster<float>(tmp.path() / "bad.d4dr"), SchemaError);
  EXPECT_THROW(read_raster<float>(tmp.path() / "missing.d4dr"), IoError);
}

TEST(SequenceIo, RoundTripIsExact) {
  TempDir tmp;
  const auto clip = make_clip();
  write_sequence(clip, tmp.path() / "seq0");
  const auto back = read_sequence(tmp.path() / "seq0");

  EXPECT_EQ(back.id, clip.id);
  ASSERT_EQ(back.frames.size(), clip.frames.size());
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    const auto& a = clip.frames[i];
    const auto& b = back.frames[i];
    for (int j = 0; j < 9; ++j) EXPECT_EQ(a.pose_ref.rotation.m[j], b.pose_ref.rotation.m[j]);
    EXPECT_EQ((a.pose_ref.translation - b.pose_ref.translation).norm(), 0.0);
    EXPECT_EQ(a.intrinsics.fx, b.intrinsics.fx);
    EXPECT_TRUE(*a.depth == *b.depth);
    EXPECT_TRUE(*a.mask == *b.mask);
    ASSERT_EQ(a.annotations.size(), b.annotations.size());
    for (std::size_t o = 0; o < a.annotations.size(); ++o) {
      const auto& x = a.annotations[o];
      const auto& y = b.annotations[o];
      EXPECT_EQ(x.instance_id, y.instance_id);
      EXPECT_EQ(x.category, y.category);
      EXPECT_EQ(x.score, y.score);
      EXPECT_EQ((x.box_camera.center - y.box_camera.center).norm(), 0.0);
      EXPECT_EQ((x.box_camera.dims - y.box_camera.dims).norm(), 0.0);
      for (int j = 0; j < 9; ++j)
        EXPECT_EQ(x.box_camera.rotation.m[j], y.box_camera.rotation.m[j]);
      EXPECT_EQ((x.box_ref.center - y.box_ref.center).norm(), 0.0);
      EXPECT_EQ(x.prompt.x0, y.prompt.x0);
      EXPECT_EQ(x.prompt.y1, y.prompt.y1);
    }
  }
}

TEST(SequenceIo, CanonicalBytes) {
  TempDir tmp;
  const auto clip = make_clip();
  write_sequence(clip, tmp.path() / "a");
  write_sequence(clip, tmp.path() / "b");
  EXPECT_EQ(slurp(tmp.path() / "a/sequence.json"), slurp(tmp.path() / "b/sequence.json"));
  EXPECT_EQ(slurp(tmp.path() / "a/frames/depth_0000.d4dr"),
            slurp(tmp.path() / "b/frames/depth_0000.d4dr"));
}

TEST(SequenceIo, GtScoreIsOne) {
  TempDir tmp;
  const auto clip = make_clip();
  write_sequence(clip, tmp.path() / "seq");
  const auto back = read_sequence(tmp.path() / "seq");
  int count = 0;
  for (const auto& f : back.frames)
    for (const auto& ann : f.annotations) {
      EXPECT_EQ(ann.score, 1.0);
      ++count;
    }
  EXPECT_GT(count, 0);
}

TEST(SequenceIo, MissingRasterIsSchemaError) {
  TempDir tmp;
  const auto clip = make_clip();
  write_sequence(clip, tmp.path() / "seq");
  fs::remove(tmp.path() / "seq/frames/depth_0000.d4dr");
  EXPECT_THROW(read_sequence(tmp.path() / "seq"), SchemaError);
}

TEST(SequenceIo, UnknownVersionRejected) {
  TempDir tmp;
  const auto clip = make_clip();
  write_sequence(clip, tmp.path() / "seq");
  auto text = slurp(tmp.path() / "seq/sequence.json");
  const auto pos = text.find("\"schema_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, std::string("\"schema_version\": 1").size(), "\"schema_version\": 99");
  std::ofstream(tmp.path() / "seq/sequence.json", std::ios::trunc) << text;
  EXPECT_THROW(read_sequence(tmp.path() / "seq"), SchemaError);
}

TEST(SequenceIo, UnknownFieldsWarnButLoad) {
  TempDir tmp;
  const auto clip = make_clip();
  write_sequence(clip, tmp.path() / "seq");
  auto text = slurp(tmp.path() / "seq/sequence.json");
  text.insert(text.find("\"id\""), "\"extra_field\": 123,\n  ");
  std::ofstream(tmp.path() / "seq/sequence.json", std::ios::trunc) << text;
  std::vector<std::string> warnings;
  const auto back = read_sequence(tmp.path() / "seq", &warnings);
  EXPECT_EQ(back.frames.size(), clip.frames.size());
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("extra_field"), std::string::npos);
}

TEST(SequenceIo, YawFieldNullUnlessGravityAligned) {
  TempDir tmp;
  SequenceClip clip;
  clip.id = "yaw_check";
  FrameRecord frame;
  frame.intrinsics = {110, 110, 64, 64, 128, 128};
  frame.depth = std::make_shared<DepthMap>(2, 2, 1.0f);
  frame.mask = std::make_shared<Mask2D>(2, 2, 0);

  ObjectAnnotation aligned;
  aligned.instance_id = 1;
  aligned.category = "chair";
  aligned.box_camera = {{1, 2, 3}, {1, 1, 1}, yaw_rotation(0.5)};
  aligned.box_ref = aligned.box_camera;
  frame.annotations.push_back(aligned);

  ObjectAnnotation tilted = aligned;
  tilted.instance_id = 2;
  tilted.box_camera.rotation = Quaterniond{0.9, 0.3, 0.2, 0.1}.normalized().to_rotation();
  tilted.box_ref = tilted.box_camera;
  frame.annotations.push_back(tilted);
  clip.frames.push_back(frame);

  write_sequence(clip, tmp.path() / "seq");
  nlohmann::json doc;
  std::ifstream(tmp.path() / "seq/sequence.json") >> doc;
  const auto& objects = doc["frames"][0]["objects"];
  EXPECT_TRUE(objects[0]["bbox3d"][6].is_number());
  EXPECT_NEAR(objects[0]["bbox3d"][6].get<double>(), 0.5, 1e-9);
  EXPECT_TRUE(objects[1]["bbox3d"][6].is_null());

  // Round trip recovers the rotation matrix regardless.
  const auto back = read_sequence(tmp.path() / "seq");
  for (int j = 0; j < 9; ++j)
    EXPECT_EQ(back.frames[0].annotations[1].box_camera.rotation.m[j],
              tilted.box_camera.rotation.m[j]);
}

TEST(SplitScenes, DeterministicDisjoint) {
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("scene" + std::to_string(i));
  const auto [train, val] = split_scenes(ids, 0.2, 7);
  EXPECT_EQ(val.size(), 2u);
  EXPECT_EQ(train.size(), 8u);
  const auto [train2, val2] = split_scenes(ids, 0.2, 7);
  EXPECT_EQ(train, train2);
  EXPECT_EQ(val, val2);
  for (const auto& v : val)
    EXPECT_EQ(std::find(train.begin(), train.end(), v), train.end());
  EXPECT_THROW(split_scenes(ids, 0.0, 7), ConfigError);
  EXPECT_THROW(split_scenes(ids, 1.0, 7), ConfigError);
}

TEST(Predictions, RoundTripAndValidation) {
  TempDir tmp;
  std::vector<PredictionRecord> preds;
  PredictionRecord p;
  p.sequence_id = "seq0";
  p.frame_index = 3;
  p.instance_id = 7;
  p.category = "chair";
  p.box = {{0.5, 0.1, 2.0}, {1, 1, 1}, yaw_rotation(0.3)};
  p.score = 0.75;
  preds.push_back(p);
  write_predictions(preds, tmp.path() / "preds.json");
  const auto back = read_predictions(tmp.path() / "preds.json");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].sequence_id, "seq0");
  EXPECT_EQ(back[0].frame_index, 3);
  EXPECT_EQ(back[0].score, 0.75);
  EXPECT_EQ((back[0].box.center - p.box.center).norm(), 0.0);

  // Malformed rows carry the row index in the error.
  std::ofstream(tmp.path() / "bad.json")
      << R"([{"sequence_id":"s","frame_index":0,"instance_id":1,"score":2.0,)"
      << R"("bbox3d":[0,0,0,1,1,1,null],"rotation":[1,0,0,0,1,0,0,0,1]}])";
  try {
    read_predictions(tmp.path() / "bad.json");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("predictions[0]"), std::string::npos);
  }
}

TEST(Manifest, RoundTripAndDuplicateIds) {
  TempDir tmp;
  DatasetManifest m;
  m.sequences.push_back({"a", 10, "sequences/a", "train"});
  m.sequences.push_back({"b", 10, "sequences/b", "val"});
  write_manifest(m, tmp.path() / "manifest.json");
  const auto back = read_manifest(tmp.path() / "manifest.json");
  ASSERT_EQ(back.sequences.size(), 2u);
  EXPECT_EQ(back.sequences[0].id, "a");
  EXPECT_EQ(back.sequences[1].split, "val");

  m.sequences.push_back({"a", 5, "sequences/a2", "train"});
  write_manifest(m, tmp.path() / "dup.json");
  EXPECT_THROW(read_manifest(tmp.path() / "dup.json"), SchemaError);
}
