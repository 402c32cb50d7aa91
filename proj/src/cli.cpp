#include "pecnet/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "pecnet/evaluator.hpp"
#include "pecnet/svg_plot.hpp"
#include "pecnet/trainer.hpp"

namespace pecnet::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;

// every RunConfig key, exposed as a --key flag on each subcommand
const char* const kConfigKeys[] = {
    "lr",           "batch",          "lambda1",        "lambda2",
    "epochs",       "seed",           "pool_rounds",    "t_dist",
    "manifest",     "test_scene",     "format",         "precision",
    "max_steps",    "ckpt_every",     "eval_every",     "t_past",
    "t_future",     "stride_train",   "stride_eval",    "frame_stride",
    "data_scale",   "k",              "sigma_t",        "truncation_c",
    "truncate",     "waypoint",       "oracle",         "trials",
    "synthetic",    "synth_scenes",   "synth_agents",   "synth_jitter",
    "synth_seed",   "out_dir",        "checkpoint",     "run_id",
    "widths_e_past", "widths_e_end",  "widths_e_latent", "widths_d_latent",
    "widths_phi",   "widths_theta",   "widths_g",       "widths_p_future"};

std::string fmt_g(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.9g", v);
  return b;
}

int env_threads() {
  if (const char* e = std::getenv("PECNET_THREADS")) {
    const int t = std::atoi(e);
    if (t > 0) return t;
  }
  return 1;
}

std::string dataset_name(const RunConfig& cfg) {
  if (cfg.synthetic) return "synthetic";
  return cfg.test_scene.empty() ? "all" : cfg.test_scene;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

void metrics_header(std::ostream& os, const RunConfig& cfg) {
  os << "# config: " << config_echo(cfg) << "\n";
  os << "run_id,dataset,K,sigma_t,truncate,ADE,FDE,waypoint_err,trials\n";
}

void metrics_row(std::ostream& os, const RunConfig& cfg,
                 const SamplingConfig& s, const EvalResult& r) {
  os << cfg.run_id << "," << dataset_name(cfg) << "," << s.k << ","
     << fmt_g(s.sigma_t) << "," << (s.truncate ? "true" : "false") << ","
     << fmt_g(r.ade) << "," << fmt_g(r.fde) << "," << fmt_g(r.waypoint_err)
     << "," << r.trials << "\n";
}

std::vector<SceneBatch> batches_from_manifest(const RunConfig& cfg,
                                              bool eval_role) {
  if (cfg.manifest.empty())
    throw ConfigError(
        "config key 'manifest' is required unless synthetic=true");
  const auto entries = parse_manifest(cfg.manifest);
  const TrajFormat fmt = parse_format(cfg.format);
  if (eval_role && cfg.test_scene.empty())
    throw ConfigError("config key 'test_scene' is required to evaluate on a "
                      "manifest dataset");
  WindowConfig wc;
  wc.t_past = cfg.t_past;
  wc.t_future = cfg.t_future;
  wc.stride = eval_role ? cfg.stride_eval : cfg.stride_train;
  wc.frame_stride = resolve_frame_stride(cfg);

  std::vector<SceneBatch> out;
  int scene_id = 0;
  bool saw_test = false;
  for (const ManifestEntry& e : entries) {
    const bool is_test = e.scene == cfg.test_scene;
    saw_test = saw_test || is_test;
    for (const std::string& p : e.paths) {
      const int sid = scene_id++;
      if (is_test != eval_role) continue;
      auto samples =
          window_samples(load_trajectory_file(p, fmt), wc, sid);
      auto batches = group_into_batches(samples, cfg.t_dist, cfg.batch);
      out.insert(out.end(), std::make_move_iterator(batches.begin()),
                 std::make_move_iterator(batches.end()));
    }
  }
  if (!cfg.test_scene.empty() && !saw_test)
    throw ConfigError("test_scene '" + cfg.test_scene +
                      "' not found in manifest");
  return out;
}

std::vector<SceneBatch> synthetic_batches(const RunConfig& cfg,
                                          std::uint64_t seed) {
  SynthConfig sc;
  sc.n_scenes = cfg.synth_scenes;
  sc.agents_per_scene = cfg.synth_agents;
  sc.jitter = cfg.synth_jitter;
  sc.seed = seed;
  return group_into_batches(synthetic_samples(sc), cfg.t_dist, cfg.batch);
}

ForwardSettings forward_settings(const RunConfig& cfg) {
  ForwardSettings s;
  s.lambda1 = cfg.lambda1;
  s.lambda2 = cfg.lambda2;
  s.pool_rounds = cfg.pool_rounds;
  s.waypoint = resolve_waypoint(cfg);
  s.data_scale = cfg.data_scale;
  return s;
}

PredictSettings predict_settings(const RunConfig& cfg) {
  PredictSettings s;
  s.pool_rounds = cfg.pool_rounds;
  s.waypoint = resolve_waypoint(cfg);
  s.oracle = cfg.oracle;
  s.data_scale = cfg.data_scale;
  return s;
}

// ---------------------------------------------------------------------------
// commands (templated over scalar precision)
// ---------------------------------------------------------------------------

template <typename T>
int cmd_train(const RunConfig& cfg) {
  const auto batches = load_train_batches(cfg);
  ModelParams<T> model(cfg.widths);
  model.init(cfg.seed);
  AdamState<T> opt(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8}, model.param_shapes());
  if (!cfg.checkpoint.empty())
    load_training_checkpoint(cfg.checkpoint, model, &opt);

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  const std::string ckpt = (out / "checkpoint.pecn").string();

  TrainLoopConfig tlc;
  tlc.forward = forward_settings(cfg);
  tlc.adam = AdamConfig{cfg.lr, 0.9, 0.999, 1e-8};
  tlc.seed = cfg.seed;
  tlc.epochs = cfg.epochs;
  tlc.ckpt_every = cfg.ckpt_every;
  tlc.ckpt_path = ckpt;

  const auto n_batches = static_cast<std::int64_t>(batches.size());
  std::int64_t target = static_cast<std::int64_t>(cfg.epochs) * n_batches;
  if (cfg.max_steps > 0) target = std::min(target, cfg.max_steps);

  std::ofstream mcsv = open_out(out / "train_metrics.csv");
  mcsv << "# config: " << config_echo(cfg) << "\n";
  mcsv << "step,kl,ael,atl,total\n";
  std::ofstream ecsv;
  if (cfg.eval_every > 0) {
    ecsv = open_out(out / "train_eval.csv");
    ecsv << "# config: " << config_echo(cfg) << "\n";
    ecsv << "step,ade,fde\n";
  }

  SamplingConfig probe;  // deterministic best-of-1 probe of the train set
  probe.k = 1;
  probe.truncate = true;
  PredictSettings pp = predict_settings(cfg);
  pp.oracle = false;

  while (opt.t() < target) {
    tlc.max_steps = target;
    if (cfg.eval_every > 0)
      tlc.max_steps = std::min(target, opt.t() + cfg.eval_every);
    const std::int64_t before = opt.t();
    const TrainLoopResult res = run_train_loop(batches, model, opt, tlc);
    for (std::size_t i = 0; i < res.history.size(); ++i) {
      const LossParts& p = res.history[i];
      mcsv << (before + static_cast<std::int64_t>(i)) << "," << fmt_g(p.kl)
           << "," << fmt_g(p.ael) << "," << fmt_g(p.atl) << ","
           << fmt_g(p.total) << "\n";
    }
    if (res.diverged) {
      mcsv.flush();
      std::cerr << "pecnet train: " << res.divergence_message
                << " (last-good checkpoint: " << ckpt << ")\n";
      return kExitDiverged;
    }
    if (cfg.eval_every > 0) {
      const EvalResult r =
          evaluate_best_of_k(batches, model, probe, pp, 1, cfg.seed, 1);
      ecsv << opt.t() << "," << fmt_g(r.ade) << "," << fmt_g(r.fde) << "\n";
    }
    if (opt.t() == before) break;  // epochs exhausted
  }
  save_training_checkpoint(ckpt, model, opt);
  mcsv.flush();
  std::cout << "trained " << opt.t() << " steps over " << batches.size()
            << " batches; checkpoint: " << ckpt << "\n";
  return kExitOk;
}

template <typename T>
ModelParams<T> load_model(const RunConfig& cfg) {
  if (cfg.checkpoint.empty())
    throw ConfigError("config key 'checkpoint' is required");
  ModelParams<T> model(cfg.widths);
  load_training_checkpoint<T>(cfg.checkpoint, model, nullptr);
  return model;
}

template <typename T>
int cmd_eval(const RunConfig& cfg) {
  ModelParams<T> model = load_model<T>(cfg);
  const auto batches = load_eval_batches(cfg);
  const SamplingConfig scfg = resolve_sampling(cfg);
  const EvalResult r =
      evaluate_best_of_k(batches, model, scfg, predict_settings(cfg),
                         cfg.trials, cfg.seed, env_threads());
  std::ofstream os = open_out(fs::path(cfg.out_dir) / "eval_metrics.csv");
  metrics_header(os, cfg);
  metrics_row(os, cfg, scfg, r);
  std::cout << "ADE " << fmt_g(r.ade) << "  FDE " << fmt_g(r.fde)
            << "  waypoint_err " << fmt_g(r.waypoint_err) << "  (K=" << scfg.k
            << ", trials=" << r.trials << ")\n";
  return kExitOk;
}

template <typename T>
int cmd_predict(const RunConfig& cfg) {
  ModelParams<T> model = load_model<T>(cfg);
  const auto batches = load_eval_batches(cfg);
  const SamplingConfig scfg = resolve_sampling(cfg);
  const PredictSettings ps = predict_settings(cfg);
  std::ofstream os = open_out(fs::path(cfg.out_dir) / "predictions.csv");
  os << "# config: " << config_echo(cfg) << "\n";
  os << "scene_id,agent_id,sample_k,t,x,y\n";
  Rng rng(cfg.seed);
  for (std::size_t bi = 0; bi < batches.size(); ++bi) {
    Rng brng = rng.fork(bi);
    const PredictionSet pred = predict(batches[bi], model, scfg, ps, brng);
    for (std::size_t i = 0; i < batches[bi].samples.size(); ++i) {
      const Sample& s = batches[bi].samples[i];
      const AgentPrediction& ap = pred.agents[i];
      for (std::size_t k = 0; k < ap.futures.size(); ++k)
        for (std::size_t t = 0; t < ap.futures[k].size(); ++t)
          os << s.scene_id << "," << s.agent_id << "," << k << "," << (t + 1)
             << "," << fmt_g(ap.futures[k][t][0]) << ","
             << fmt_g(ap.futures[k][t][1]) << "\n";
    }
  }
  std::cout << "predictions written to "
            << (fs::path(cfg.out_dir) / "predictions.csv").string() << "\n";
  return kExitOk;
}

template <typename T>
int cmd_sweep_k(const RunConfig& cfg, std::vector<int> k_list,
                const std::string& trunc_modes) {
  ModelParams<T> model = load_model<T>(cfg);
  const auto batches = load_eval_batches(cfg);
  std::sort(k_list.begin(), k_list.end());
  k_list.erase(std::unique(k_list.begin(), k_list.end()), k_list.end());
  if (k_list.empty() || k_list.front() < 1)
    throw ConfigError("sweep-k: k list must contain integers >= 1");
  std::vector<bool> truncs;
  if (trunc_modes == "both") truncs = {false, true};
  else if (trunc_modes == "on") truncs = {true};
  else if (trunc_modes == "off") truncs = {false};
  else throw ConfigError("sweep-k: trunc mode must be both|on|off");

  const PredictSettings ps = predict_settings(cfg);
  std::ofstream os = open_out(fs::path(cfg.out_dir) / "sweep_k.csv");
  metrics_header(os, cfg);

  std::map<bool, PlotSeries> ade_series, fde_series;
  for (bool tr : truncs) {
    ade_series[tr] = {std::string("ADE ") + (tr ? "trunc" : "no-trunc"), {}};
    fde_series[tr] = {std::string("FDE ") + (tr ? "trunc" : "no-trunc"), {}};
  }
  std::vector<double> xs;
  for (int k : k_list) {
    xs.push_back(k);
    for (bool tr : truncs) {
      RunConfig rc = cfg;
      rc.k = k;
      rc.truncate = tr ? "true" : "false";
      const SamplingConfig scfg = resolve_sampling(rc);
      const EvalResult r = evaluate_best_of_k(
          batches, model, scfg, ps, cfg.trials, cfg.seed, env_threads());
      metrics_row(os, rc, scfg, r);
      ade_series[tr].ys.push_back(r.ade);
      fde_series[tr].ys.push_back(r.fde);
    }
  }
  std::vector<PlotSeries> series;
  for (bool tr : truncs) series.push_back(ade_series[tr]);
  for (bool tr : truncs) series.push_back(fde_series[tr]);
  write_line_chart((fs::path(cfg.out_dir) / "sweep_k.svg").string(),
                   "best-of-K error vs K", "K", "error", xs, series);
  std::cout << "sweep written to " << cfg.out_dir << "/sweep_k.{csv,svg}\n";
  return kExitOk;
}

template <typename T>
int cmd_ablate_waypoint(const RunConfig& cfg, std::vector<int> w_list) {
  if (w_list.empty())
    for (std::size_t w = 1; w <= cfg.t_future; ++w)
      w_list.push_back(static_cast<int>(w));
  std::sort(w_list.begin(), w_list.end());
  const auto train_b = load_train_batches(cfg);
  RunConfig eval_cfg = cfg;
  if (cfg.synthetic) eval_cfg.synth_seed = cfg.synth_seed + 1;  // held out
  const auto eval_b = load_eval_batches(eval_cfg);
  const SamplingConfig scfg = resolve_sampling(cfg);

  std::ofstream os = open_out(fs::path(cfg.out_dir) / "waypoint_ablation.csv");
  os << "# config: " << config_echo(cfg) << "\n";
  os << "run_id,dataset,w,oracle,K,ADE,FDE,waypoint_err,trials\n";

  for (int w : w_list) {
    if (w < 1 || static_cast<std::size_t>(w) > cfg.t_future)
      throw ConfigError("ablate-waypoint: w outside 1..t_future");
    // one model per conditioning position, trained from scratch
    ModelParams<T> model(cfg.widths);
    model.init(cfg.seed);
    AdamState<T> opt(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8},
                     model.param_shapes());
    TrainLoopConfig tlc;
    tlc.forward = forward_settings(cfg);
    tlc.forward.waypoint = static_cast<std::size_t>(w);
    tlc.adam = AdamConfig{cfg.lr, 0.9, 0.999, 1e-8};
    tlc.seed = cfg.seed;
    tlc.epochs = cfg.epochs;
    tlc.max_steps = cfg.max_steps;
    const TrainLoopResult res = run_train_loop(train_b, model, opt, tlc);
    if (res.diverged) {
      std::cerr << "pecnet ablate-waypoint: w=" << w << ": "
                << res.divergence_message << "\n";
      return kExitDiverged;
    }
    for (bool oracle : {false, true}) {
      PredictSettings ps = predict_settings(cfg);
      ps.waypoint = static_cast<std::size_t>(w);
      ps.oracle = oracle;
      const EvalResult r = evaluate_best_of_k(
          eval_b, model, scfg, ps, cfg.trials, cfg.seed, env_threads());
      os << cfg.run_id << "," << dataset_name(cfg) << "," << w << ","
         << (oracle ? "true" : "false") << "," << scfg.k << ","
         << fmt_g(r.ade) << "," << fmt_g(r.fde) << ","
         << fmt_g(r.waypoint_err) << "," << r.trials << "\n";
    }
  }
  std::cout << "ablation written to " << cfg.out_dir
            << "/waypoint_ablation.csv\n";
  return kExitOk;
}

int cmd_gen_synth(const RunConfig& cfg) {
  SynthConfig sc;
  sc.n_scenes = cfg.synth_scenes;
  sc.agents_per_scene = cfg.synth_agents;
  sc.jitter = cfg.synth_jitter;
  sc.seed = cfg.synth_seed;
  const auto records = gen_synthetic(sc);

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  std::vector<std::vector<RawRecord>> per_scene(
      static_cast<std::size_t>(sc.n_scenes));
  for (const RawRecord& r : records)
    per_scene.at(static_cast<std::size_t>(r.agent / 100)).push_back(r);

  std::ofstream man = open_out(out / "manifest.txt");
  char name[64];
  for (std::size_t s = 0; s < per_scene.size(); ++s) {
    std::snprintf(name, sizeof name, "scene_%03zu", s);
    const std::string file = std::string(name) + ".txt";
    write_ethucy_file((out / file).string(), per_scene[s]);
    man << name << ": " << file << "\n";
  }
  std::cout << "wrote " << per_scene.size() << " scene files + manifest to "
            << out.string() << "\n";
  return kExitOk;
}

int cmd_inspect_mask(const RunConfig& cfg) {
  // per-scene sample sets, matching how batching sees the data
  std::vector<std::pair<std::string, std::vector<Sample>>> scenes;
  if (cfg.synthetic) {
    SynthConfig sc;
    sc.n_scenes = cfg.synth_scenes;
    sc.agents_per_scene = cfg.synth_agents;
    sc.jitter = cfg.synth_jitter;
    sc.seed = cfg.synth_seed;
    scenes.emplace_back("synthetic", synthetic_samples(sc));
  } else {
    if (cfg.manifest.empty())
      throw ConfigError(
          "config key 'manifest' is required unless synthetic=true");
    const auto entries = parse_manifest(cfg.manifest);
    const TrajFormat fmt = parse_format(cfg.format);
    WindowConfig wc;
    wc.t_past = cfg.t_past;
    wc.t_future = cfg.t_future;
    wc.stride = cfg.stride_eval;
    wc.frame_stride = resolve_frame_stride(cfg);
    int sid = 0;
    for (const ManifestEntry& e : entries)
      for (const std::string& p : e.paths)
        scenes.emplace_back(
            e.scene + ":" + fs::path(p).filename().string(),
            window_samples(load_trajectory_file(p, fmt), wc, sid++));
  }

  std::size_t total_samples = 0, total_edges = 0;
  std::map<std::size_t, std::size_t> hist;
  for (const auto& [name, samples] : scenes) {
    const auto comps = neighbor_components(samples, cfg.t_dist);
    const std::size_t edges = count_neighbor_edges(samples, cfg.t_dist);
    total_samples += samples.size();
    total_edges += edges;
    for (const auto& c : comps) ++hist[c.size()];
    std::cout << name << ": " << samples.size() << " samples, " << edges
              << " edges, " << comps.size() << " components\n";
  }
  std::cout << "total: " << total_samples << " samples, " << total_edges
            << " edges (t_dist=" << fmt_g(cfg.t_dist) << ")\n";
  std::cout << "component size histogram:\n";
  for (const auto& [size, count] : hist)
    std::cout << "  size " << size <<": " << count << "\n";
  if (total_edges == 0 && total_samples > 1)
    std::cout << "WARNING: degenerate dataset, all agents isolated (consider "
                 "raising t_dist)\n";
  return kExitOk;
}

template <typename Fn>
int with_precision(const RunConfig& cfg, Fn&& fn) {
  if (cfg.precision == "f32") return fn.template operator()<float>();
  if (cfg.precision == "f64") return fn.template operator()<double>();
  throw ConfigError("config key 'precision' must be f32 or f64, got '" +
                    cfg.precision + "'");
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return out;
}

}  // namespace

std::vector<SceneBatch> load_train_batches(const RunConfig& cfg) {
  if (cfg.synthetic) return synthetic_batches(cfg, cfg.synth_seed);
  return batches_from_manifest(cfg, false);
}

std::vector<SceneBatch> load_eval_batches(const RunConfig& cfg) {
  if (cfg.synthetic) return synthetic_batches(cfg, cfg.synth_seed);
  return batches_from_manifest(cfg, true);
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"endpoint-conditioned multi-modal trajectory forecasting"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string k_list_str = "1,2,5,10,20";
  std::string trunc_modes = "both";
  std::string w_list_str;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file");
    for (const char* key : kConfigKeys) {
      cmd->add_option_function<std::string>(
          std::string("--") + key,
          [key, &overrides](const std::string& v) {
            overrides.emplace_back(key, v);
          },
          "config override");
    }
    // flag sugar for the common booleans
    cmd->add_flag_callback(
        "--use-synthetic",
        [&overrides] { overrides.emplace_back("synthetic", "true"); },
        "shorthand for --synthetic true");
    cmd->add_flag_callback(
        "--use-oracle",
        [&overrides] { overrides.emplace_back("oracle", "true"); },
        "shorthand for --oracle true");
  };

  CLI::App* train = app.add_subcommand("train", "train a model end to end");
  add_common(train);
  CLI::App* eval = app.add_subcommand("eval", "best-of-K evaluation");
  add_common(eval);
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "emit K sampled futures per agent");
  add_common(predict_cmd);
  CLI::App* sweep = app.add_subcommand("sweep-k", "error vs number of samples");
  add_common(sweep);
  sweep->add_option("--k-list", k_list_str, "comma-separated K values");
  sweep->add_option("--trunc-modes", trunc_modes, "both|on|off");
  CLI::App* ablate = app.add_subcommand(
      "ablate-waypoint", "retrain per conditioning position, with and "
                         "without the destination oracle");
  add_common(ablate);
  ablate->add_option("--w-list", w_list_str,
                     "comma-separated conditioning indices (default 1..t_f)");
  CLI::App* gensynth =
      app.add_subcommand("gen-synth", "write synthetic scene files + manifest");
  add_common(gensynth);
  CLI::App* inspect =
      app.add_subcommand("inspect-mask", "social-mask statistics for a dataset");
  add_common(inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& [k, v] : overrides) set_config_key(cfg, k, v);

    if (train->parsed())
      return with_precision(cfg, [&]<typename T>() { return cmd_train<T>(cfg); });
    if (eval->parsed())
      return with_precision(cfg, [&]<typename T>() { return cmd_eval<T>(cfg); });
    if (predict_cmd->parsed())
      return with_precision(cfg,
                            [&]<typename T>() { return cmd_predict<T>(cfg); });
    if (sweep->parsed())
      return with_precision(cfg, [&]<typename T>() {
        return cmd_sweep_k<T>(cfg, parse_int_list(k_list_str), trunc_modes);
      });
    if (ablate->parsed())
      return with_precision(cfg, [&]<typename T>() {
        return cmd_ablate_waypoint<T>(cfg, parse_int_list(w_list_str));
      });
    if (gensynth->parsed()) return cmd_gen_synth(cfg);
    if (inspect->parsed()) return cmd_inspect_mask(cfg);
    std::cerr << "pecnet: no command\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "pecnet: numerical failure: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "pecnet: error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("pecnet");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace pecnet::cli
