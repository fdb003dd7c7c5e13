#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "det4d/annotate/annotation.hpp"
#include "det4d/core/rng.hpp"
#include "det4d/io/raster_io.hpp"

namespace det4d {

inline constexpr int kSchemaVersion = 1;

struct ManifestEntry {
  std::string id;
  int frame_count = 0;
  std::string path;  // sequence directory, relative to the manifest
  std::string split; // "train" or "val"
};

struct DatasetManifest {
  int schema_version = kSchemaVersion;
  std::vector<ManifestEntry> sequences;
};

/// One predicted box for one frame of one sequence, in that frame's camera
/// coordinates.
struct PredictionRecord {
  std::string sequence_id;
  int frame_index = 0;
  std::int32_t instance_id = 0;
  std::string category;
  OrientedBox3D box;
  double score = 1.0;
};

namespace io_detail {

using nlohmann::json;

inline json dump_rotation(const Mat3d& r) {
  json a = json::array();
  for (int i = 0; i < 9; ++i) a.push_back(r.m[static_cast<std::size_t>(i)]);
  return a;
}

inline Mat3d parse_rotation(const json& a, const std::string& path) {
  if (!a.is_array() || a.size() != 9)
    throw SchemaError(path + ": rotation must be an array of 9 numbers");
  Mat3d r;
  for (int i = 0; i < 9; ++i) r.m[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
  return r;
}

// [x, y, z, w, h, l, yaw]; yaw serialized as null unless the rotation is a
// pure yaw within 1e-6, in which case both encodings agree.
inline json dump_box_attr(const OrientedBox3D& box) {
  json a = json::array();
  a.push_back(box.center.x);
  a.push_back(box.center.y);
  a.push_back(box.center.z);
  a.push_back(box.dims.x);
  a.push_back(box.dims.y);
  a.push_back(box.dims.z);
  if (is_gravity_aligned(box.rotation))
    a.push_back(extract_yaw(box.rotation));
  else
    a.push_back(nullptr);
  return a;
}

inline OrientedBox3D parse_box(const json& attr, const json& rotation, const std::string& path) {
  if (!attr.is_array() || attr.size() != 7)
    throw SchemaError(path + ": box attribute must be [x,y,z,w,h,l,yaw]");
  OrientedBox3D box;
  box.center = {attr[0], attr[1], attr[2]};
  box.dims = {attr[3], attr[4], attr[5]};
  box.rotation = parse_rotation(rotation, path + ".rotation");
  return box;
}

inline void warn_unknown_keys(const json& obj, const std::set<std::string>& known,
                              const std::string& path, std::vector<std::string>* warnings) {
  if (warnings == nullptr) return;
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key)) warnings->push_back(path + ": ignoring unknown field '" + key + "'");
}

template <class T>
T require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + ": missing field '" + key + "'");
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "." + key + ": wrong type");
  }
}

inline std::string frame_token(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return buf;
}

}  // namespace io_detail

/// Writes one sequence directory: sequence.json plus per-frame depth and
/// instance rasters. Rewriting the same clip produces byte-identical files.
inline ManifestEntry write_sequence(const SequenceClip& clip, const std::filesystem::path& dir) {
  using io_detail::json;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "frames", ec);
  if (ec) throw IoError("write_sequence: cannot create " + dir.string());

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["id"] = clip.id;
  json frames = json::array();
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    const FrameRecord& f = clip.frames[i];
    json jf;
    jf["intrinsics"] = {{"fx", f.intrinsics.fx},       {"fy", f.intrinsics.fy},
                        {"cx", f.intrinsics.cx},       {"cy", f.intrinsics.cy},
                        {"width", f.intrinsics.width}, {"height", f.intrinsics.height}};
    json pose = json::array();  // row-major [R | t]
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) pose.push_back(f.pose_ref.rotation(r, c));
      pose.push_back(f.pose_ref.translation[r]);
    }
    jf["pose"] = pose;

    const std::string token = io_detail::frame_token(i);
    jf["depth_file"] = "frames/depth_" + token + ".d4dr";
    jf["instance_file"] = "frames/instance_" + token + ".d4dr";
    if (f.depth == nullptr || f.mask == nullptr)
      throw IoError("write_sequence: frame " + std::to_string(i) + " has no rasters");
    write_raster(*f.depth, dir / ("frames/depth_" + token + ".d4dr"));
    write_raster(*f.mask, dir / ("frames/instance_" + token + ".d4dr"));

    json objects = json::array();
    for (const auto& ann : f.annotations) {
      json jo;
      jo["instance_id"] = ann.instance_id;
      jo["category"] = ann.category;
      jo["score"] = ann.score;
      jo["bbox3d"] = io_detail::dump_box_attr(ann.box_camera);
      jo["rotation"] = io_detail::dump_rotation(ann.box_camera.rotation);
      jo["bbox3d_world"] = io_detail::dump_box_attr(ann.box_ref);
      jo["rotation_world"] = io_detail::dump_rotation(ann.box_ref.rotation);
      jo["prompt"] = {ann.prompt.x0, ann.prompt.y0, ann.prompt.x1, ann.prompt.y1};
      objects.push_back(std::move(jo));
    }
    jf["objects"] = std::move(objects);
    frames.push_back(std::move(jf));
  }
  doc["frames"] = std::move(frames);

  std::ofstream out(dir / "sequence.json", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_sequence: cannot open " + (dir / "sequence.json").string());
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write_sequence: short write");

  return {clip.id, static_cast<int>(clip.frames.size()),
          dir.filename().string(), ""};
}

/// Exact inverse of write_sequence. Unknown fields are skipped with a
/// warning; structural problems throw SchemaError naming the field.
inline SequenceClip read_sequence(const std::filesystem::path& dir,
                                  std::vector<std::string>* warnings = nullptr) {
  using io_detail::json;
  namespace fs = std::filesystem;
  const fs::path doc_path = dir / "sequence.json";
  std::ifstream in(doc_path, std::ios::binary);
  if (!in) throw IoError("read_sequence: cannot open " + doc_path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SchemaError("read_sequence: " + doc_path.string() + ": " + e.what());
  }

  io_detail::warn_unknown_keys(doc, {"schema_version", "id", "frames"}, "sequence", warnings);
  const int version = io_detail::require<int>(doc, "schema_version", "sequence");
  if (version != kSchemaVersion)
    throw SchemaError("sequence.schema_version: unsupported version " + std::to_string(version));

  SequenceClip clip;
  clip.id = io_detail::require<std::string>(doc, "id", "sequence");
  const auto& frames = doc.find("frames");
  if (frames == doc.end() || !frames->is_array()) throw SchemaError("sequence.frames: missing");

  for (std::size_t i = 0; i < frames->size(); ++i) {
    const json& jf = (*frames)[i];
    const std::string path = "frames[" + std::to_string(i) + "]";
    io_detail::warn_unknown_keys(
        jf, {"intrinsics", "pose", "depth_file", "instance_file", "objects"}, path, warnings);

    FrameRecord f;
    const json& ji = io_detail::require<json>(jf, "intrinsics", path);
    f.intrinsics.fx = io_detail::require<double>(ji, "fx", path + ".intrinsics");
    f.intrinsics.fy = io_detail::require<double>(ji, "fy", path + ".intrinsics");
    f.intrinsics.cx = io_detail::require<double>(ji, "cx", path + ".intrinsics");
    f.intrinsics.cy = io_detail::require<double>(ji, "cy", path + ".intrinsics");
    f.intrinsics.width = io_detail::require<int>(ji, "width", path + ".intrinsics");
    f.intrinsics.height = io_detail::require<int>(ji, "height", path + ".intrinsics");
    f.intrinsics.validate();

    const json& pose = io_detail::require<json>(jf, "pose", path);
    if (!pose.is_array() || pose.size() != 12)
      throw SchemaError(path + ".pose: must be 12 numbers (row-major R|t)");
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c)
        f.pose_ref.rotation(r, c) = pose[static_cast<std::size_t>(r * 4 + c)];
      f.pose_ref.translation[r] = pose[static_cast<std::size_t>(r * 4 + 3)];
    }

    const auto depth_file = io_detail::require<std::string>(jf, "depth_file", path);
    const auto mask_file = io_detail::require<std::string>(jf, "instance_file", path);
    if (!fs::exists(dir / depth_file))
      throw SchemaError(path + ".depth_file: missing file " + depth_file);
    if (!fs::exists(dir / mask_file))
      throw SchemaError(path + ".instance_file: missing file " + mask_file);
    f.depth = std::make_shared<DepthMap>(read_raster<float>(dir / depth_file));
    f.mask = std::make_shared<Mask2D>(read_raster<std::int32_t>(dir / mask_file));

    const json& objects = io_detail::require<json>(jf, "objects", path);
    for (std::size_t o = 0; o < objects.size(); ++o) {
      const json& jo = objects[static_cast<std::size_t>(o)];
      const std::string opath = path + ".objects[" + std::to_string(o) + "]";
      io_detail::warn_unknown_keys(jo,
                                   {"instance_id", "category", "score", "bbox3d", "rotation",
                                    "bbox3d_world", "rotation_world", "prompt"},
                                   opath, warnings);
      ObjectAnnotation ann;
      ann.instance_id = io_detail::require<std::int32_t>(jo, "instance_id", opath);
      ann.category = io_detail::require<std::string>(jo, "category", opath);
      ann.score = io_detail::require<double>(jo, "score", opath);
      ann.box_camera = io_detail::parse_box(io_detail::require<json>(jo, "bbox3d", opath),
                                            io_detail::require<json>(jo, "rotation", opath), opath);
      ann.box_ref =
          io_detail::parse_box(io_detail::require<json>(jo, "bbox3d_world", opath),
                               io_detail::require<json>(jo, "rotation_world", opath), opath);
      const json& prompt = io_detail::require<json>(jo, "prompt", opath);
      if (!prompt.is_array() || prompt.size() != 4)
        throw SchemaError(opath + ".prompt: must be [x0,y0,x1,y1]");
      ann.prompt = {prompt[0], prompt[1], prompt[2], prompt[3]};
      f.annotations.push_back(std::move(ann));
    }
    clip.frames.push_back(std::move(f));
  }
  return clip;
}

inline void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  using io_detail::json;
  json doc;
  doc["schema_version"] = manifest.schema_version;
  json seqs = json::array();
  for (const auto& e : manifest.sequences)
    seqs.push_back({{"id", e.id},
                    {"frame_count", e.frame_count},
                    {"path", e.path},
                    {"split", e.split}});
  doc["sequences"] = std::move(seqs);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_manifest: cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
  using io_detail::json;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_manifest: cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SchemaError("manifest: " + std::string(e.what()));
  }
  DatasetManifest m;
  m.schema_version = io_detail::require<int>(doc, "schema_version", "manifest");
  if (m.schema_version != kSchemaVersion)
    throw SchemaError("manifest.schema_version: unsupported version");
  const json& seqs = io_detail::require<json>(doc, "sequences", "manifest");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const std::string path_i = "manifest.sequences[" + std::to_string(i) + "]";
    ManifestEntry e;
    e.id = io_detail::require<std::string>(seqs[i], "id", path_i);
    e.frame_count = io_detail::require<int>(seqs[i], "frame_count", path_i);
    e.path = io_detail::require<std::string>(seqs[i], "path", path_i);
    e.split = io_detail::require<std::string>(seqs[i], "split", path_i);
    if (!ids.insert(e.id).second) throw SchemaError(path_i + ".id: duplicate id " + e.id);
    m.sequences.push_back(std::move(e));
  }
  return m;
}

/// Deterministic scene-level split: scenes (never clips) are shuffled by the
/// seed and the first floor(n * val_fraction) go to validation.
inline std::pair<std::vector<std::string>, std::vector<std::string>> split_scenes(
    std::vector<std::string> scene_ids, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw ConfigError("split_scenes: val_fraction must be in (0, 1)");
  std::sort(scene_ids.begin(), scene_ids.end());
  Rng rng(seed);
  for (std::size_t i = scene_ids.size(); i > 1; --i)
    std::swap(scene_ids[i - 1], scene_ids[static_cast<std::size_t>(
                                    rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  const auto n_val = static_cast<std::size_t>(
      std::floor(static_cast<double>(scene_ids.size()) * val_fraction));
  std::vector<std::string> val(scene_ids.begin(), scene_ids.begin() + static_cast<long>(n_val));
  std::vector<std::string> train(scene_ids.begin() + static_cast<long>(n_val), scene_ids.end());
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());
  return {train, val};
}

/// Predictions are a flat JSON array; each row carries the sequence id, frame
/// index, instance id, camera-frame box, and score.
inline void write_predictions(const std::vector<PredictionRecord>& preds,
                              const std::filesystem::path& path) {
  using io_detail::json;
  json rows = json::array();
  for (const auto& p : preds) {
    json jo;
    jo["sequence_id"] = p.sequence_id;
    jo["frame_index"] = p.frame_index;
    jo["instance_id"] = p.instance_id;
    jo["category"] = p.category;
    jo["score"] = p.score;
    jo["bbox3d"] = io_detail::dump_box_attr(p.box);
    jo["rotation"] = io_detail::dump_rotation(p.box.rotation);
    rows.push_back(std::move(jo));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_predictions: cannot open " + path.string());
  out << rows.dump(2) << "\n";
}

inline std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  using io_detail::json;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_predictions: cannot open " + path.string());
  json rows;
  try {
    in >> rows;
  } catch (const json::exception& e) {
    throw SchemaError("predictions: " + std::string(e.what()));
  }
  if (!rows.is_array()) throw SchemaError("predictions: top-level value must be an array");
  std::vector<PredictionRecord> preds;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string path_i = "predictions[" + std::to_string(i) + "]";
    const json& jo = rows[i];
    PredictionRecord p;
    p.sequence_id = io_detail::require<std::string>(jo, "sequence_id", path_i);
    p.frame_index = io_detail::require<int>(jo, "frame_index", path_i);
    if (p.frame_index < 0) throw SchemaError(path_i + ".frame_index: negative");
    p.instance_id = io_detail::require<std::int32_t>(jo, "instance_id", path_i);
    p.category = jo.contains("category") ? jo["category"].get<std::string>() : "";
    p.score = io_detail::require<double>(jo, "score", path_i);
    if (!(p.score >= 0.0 && p.score <= 1.0))
      throw SchemaError(path_i + ".score: must be in [0, 1]");
    p.box = io_detail::parse_box(io_detail::require<json>(jo, "bbox3d", path_i),
                                 io_detail::require<json>(jo, "rotation", path_i), path_i);
    preds.push_back(std::move(p));
  }
  return preds;
}

}  // namespace det4d
