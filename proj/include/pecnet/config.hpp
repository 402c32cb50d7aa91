#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pecnet/endpoint_vae.hpp"
#include "pecnet/model.hpp"

namespace pecnet {

// Flat run configuration. Every field has a key in the key=value config
// file; CLI flags override file values. String "auto" sentinels resolve at
// use time (sigma_t/truncate pair by K, waypoint to the last future point,
// frame_stride by dataset format).
struct RunConfig {
  // trainer
  double lr = 3e-4;
  std::size_t batch = 512;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  int epochs = 10;
  std::uint64_t seed = 1;
  int pool_rounds = 3;
  double t_dist = 2.0;
  std::string manifest;
  std::string test_scene;
  std::string format = "ethucy_txt";
  std::string precision = "f32";  // f32 | f64
  std::int64_t max_steps = 0;
  std::int64_t ckpt_every = 0;
  std::int64_t eval_every = 0;  // steps between in-training train-set evals

  // windowing / coordinates
  std::size_t t_past = 8;
  std::size_t t_future = 12;
  std::size_t stride_train = 20;
  std::size_t stride_eval = 20;
  std::int64_t frame_stride = 0;  // 0 = auto: 10 for ethucy_txt, 12 for sdd_annot
  double data_scale = 1.0;

  // sampling
  int k = 20;
  double sigma_t = 0.0;     // 0 = auto: 1.0 for K <= 3, 1.3 for K >= 4
  double truncation_c = 1.2;
  std::string truncate = "auto";  // auto | true | false

  // way-point conditioning
  std::size_t waypoint = 0;  // 0 = auto: t_future (the standard model)
  bool oracle = false;

  // evaluation
  int trials = 100;

  // synthetic data
  bool synthetic = false;
  int synth_scenes = 32;
  int synth_agents = 3;
  double synth_jitter = 0.05;
  std::uint64_t synth_seed = 7;

  // sub-network widths (defaults are the published table)
  ModelWidths widths;

  // bookkeeping
  std::string out_dir = "runs/out";
  std::string checkpoint;
  std::string run_id = "run0";
};

// Typed assignment; throws ConfigError for unknown keys or unparsable values.
void set_config_key(RunConfig& cfg, const std::string& key,
                    const std::string& value);

RunConfig load_config_file(const std::string& path);

// Canonical "key=value ..." echo of the full effective config, in a fixed
// key order (recorded into emitted CSV header lines).
std::string config_echo(const RunConfig& cfg);

SamplingConfig resolve_sampling(const RunConfig& cfg);
std::size_t resolve_waypoint(const RunConfig& cfg);
std::int64_t resolve_frame_stride(const RunConfig& cfg);

}  // namespace pecnet
