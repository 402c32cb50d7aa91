#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pecnet/errors.hpp"
#include "pecnet/social_pool.hpp"

namespace pecnet {

// One observation row: agent position at a frame. (frame, agent) is unique
// within a file.
struct RawRecord {
  std::int64_t frame = 0;
  std::int64_t agent = 0;
  double x = 0.0;
  double y = 0.0;
};

enum class TrajFormat { ethucy_txt, sdd_annot };

TrajFormat parse_format(const std::string& name);
const char* format_name(TrajFormat fmt);

// ethucy_txt: whitespace-separated "frame_id agent_id x y" per line.
// sdd_annot: "agent xmin ymin xmax ymax frame lost occluded generated label";
// keeps non-lost pedestrian rows with the box center as the position.
std::vector<RawRecord> load_trajectory_file(const std::string& path,
                                            TrajFormat fmt);

// One training/evaluation unit: an observed window and its future, in
// original coordinates. endpoint() is always the future's final row.
struct Sample {
  std::vector<std::array<double, 2>> past;    // t_p points
  std::vector<std::array<double, 2>> future;  // t_f points
  std::vector<std::int64_t> frames;           // t_p + t_f ids
  std::int64_t agent_id = 0;
  int scene_id = 0;

  std::array<double, 2> endpoint() const { return future.back(); }

  PastTrack past_track() const {
    PastTrack t;
    t.pos = past;
    t.frames.assign(frames.begin(), frames.begin() + past.size());
    return t;
  }
};

// Model-frame view of a sample: last observed position subtracted from all
// points, then divided by scale. Keeps the original alongside, so
// denormalize() is an exact inverse; model outputs go back through
// denorm_point (approximate to rounding).
struct NormSample {
  Sample base;
  std::vector<std::array<double, 2>> past;
  std::vector<std::array<double, 2>> future;
  std::array<double, 2> offset{0.0, 0.0};
  double scale = 1.0;
};

NormSample normalize(const Sample& s, double scale = 1.0);
Sample denormalize(const NormSample& s);

inline std::array<double, 2> denorm_point(const std::array<double, 2>& p,
                                          const std::array<double, 2>& offset,
                                          double scale) {
  return {p[0] * scale + offset[0], p[1] * scale + offset[1]};
}

struct WindowConfig {
  std::size_t t_past = 8;
  std::size_t t_future = 12;
  std::size_t stride = 20;         // offset between window starts
  std::int64_t frame_stride = 10;  // subsample: keep frame % frame_stride == 0
};

// Every maximal run of t_past + t_future consecutive (constant-stride)
// observations of one agent yields windows at the configured stride.
std::vector<Sample> window_samples(std::vector<RawRecord> records,
                                   const WindowConfig& wc, int scene_id);

struct SceneBatch {
  std::vector<Sample> samples;
  SocialMask mask = SocialMask(1);
};

// Connected components of the social-neighbour graph over samples, in
// first-appearance order; members in index order.
std::vector<std::vector<std::size_t>> neighbor_components(
    const std::vector<Sample>& samples, double t_dist);

std::size_t count_neighbor_edges(const std::vector<Sample>& samples,
                                 double t_dist);

// Partition samples so every connected component of the social-neighbour
// graph stays inside one batch; components are packed greedily up to
// max_batch, and an oversized component becomes its own batch.
std::vector<SceneBatch> group_into_batches(const std::vector<Sample>& samples,
                                           double t_dist,
                                           std::size_t max_batch = 512);

struct SynthConfig {
  int n_scenes = 32;
  int agents_per_scene = 3;
  double jitter = 0.05;
  std::uint64_t seed = 7;
};

// Straight-line, turning, and crossing agents with Gaussian jitter on a
// 10-frame grid. Scene s occupies frames [s*10000, ...] and agent ids
// [s*100, ...], so scenes never overlap temporally. With >= 2 agents per
// scene, every third scene (starting at 0) is a crossing pair, guaranteeing
// mask-connected agents.
std::vector<RawRecord> gen_synthetic(const SynthConfig& cfg);

// gen_synthetic + windowing, with scene ids recovered from the agent id
// blocks.
std::vector<Sample> synthetic_samples(const SynthConfig& cfg);

struct ManifestEntry {
  std::string scene;
  std::vector<std::string> paths;  // resolved relative to the manifest
};

// Flat text, one "scene_name: path [path ...]" per line; '#' comments.
std::vector<ManifestEntry> parse_manifest(const std::string& path);

void write_ethucy_file(const std::string& path,
                       const std::vector<RawRecord>& records);

}  // namespace pecnet
