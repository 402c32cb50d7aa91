#include "pecnet/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pecnet/errors.hpp"

namespace pecnet {

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v +
                    "'");
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v +
                      "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" +
                      v + "'");
  }
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::size_t> parse_widths(const std::string& key,
                                      const std::string& v) {
  std::vector<std::size_t> out;
  std::istringstream is(v);
  std::string tok;
  while (std::getline(is, tok, ','))
    out.push_back(static_cast<std::size_t>(parse_int(key, tok)));
  if (out.size() < 2)
    throw ConfigError("config key '" + key + "': needs at least 2 widths");
  return out;
}

std::string join_widths(const std::vector<std::size_t>& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  return os.str();
}

}  // namespace

void set_config_key(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "lr") cfg.lr = parse_real(key, value);
  else if (key == "batch") cfg.batch = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "lambda1") cfg.lambda1 = parse_real(key, value);
  else if (key == "lambda2") cfg.lambda2 = parse_real(key, value);
  else if (key == "epochs") cfg.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "pool_rounds") cfg.pool_rounds = static_cast<int>(parse_int(key, value));
  else if (key == "t_dist") cfg.t_dist = parse_real(key, value);
  else if (key == "manifest") cfg.manifest = value;
  else if (key == "test_scene") cfg.test_scene = value;
  else if (key == "format") cfg.format = value;
  else if (key == "precision") cfg.precision = value;
  else if (key == "max_steps") cfg.max_steps = parse_int(key, value);
  else if (key == "ckpt_every") cfg.ckpt_every = parse_int(key, value);
  else if (key == "eval_every") cfg.eval_every = parse_int(key, value);
  else if (key == "t_past") cfg.t_past = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "t_future") cfg.t_future = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "stride_train") cfg.stride_train = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "stride_eval") cfg.stride_eval = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "frame_stride") cfg.frame_stride = parse_int(key, value);
  else if (key == "data_scale") cfg.data_scale = parse_real(key, value);
  else if (key == "k") cfg.k = static_cast<int>(parse_int(key, value));
  else if (key == "sigma_t") cfg.sigma_t = parse_real(key, value);
  else if (key == "truncation_c") cfg.truncation_c = parse_real(key, value);
  else if (key == "truncate") {
    if (value == "auto") cfg.truncate = "auto";
    else cfg.truncate = parse_bool(key, value) ? "true" : "false";
  }
  else if (key == "waypoint") cfg.waypoint = static_cast<std::size_t>(parse_int(key, value));
  else if (key == "oracle") cfg.oracle = parse_bool(key, value);
  else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
  else if (key == "synthetic") cfg.synthetic = parse_bool(key, value);
  else if (key == "synth_scenes") cfg.synth_scenes = static_cast<int>(parse_int(key, value));
  else if (key == "synth_agents") cfg.synth_agents = static_cast<int>(parse_int(key, value));
  else if (key == "synth_jitter") cfg.synth_jitter = parse_real(key, value);
  else if (key == "synth_seed") cfg.synth_seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "checkpoint") cfg.checkpoint = value;
  else if (key == "run_id") cfg.run_id = value;
  else if (key == "widths_e_past") cfg.widths.e_past = parse_widths(key, value);
  else if (key == "widths_e_end") cfg.widths.e_end = parse_widths(key, value);
  else if (key == "widths_e_latent") cfg.widths.e_latent = parse_widths(key, value);
  else if (key == "widths_d_latent") cfg.widths.d_latent = parse_widths(key, value);
  else if (key == "widths_phi") cfg.widths.phi = parse_widths(key, value);
  else if (key == "widths_theta") cfg.widths.theta = parse_widths(key, value);
  else if (key == "widths_g") cfg.widths.g = parse_widths(key, value);
  else if (key == "widths_p_future") cfg.widths.p_future = parse_widths(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    std::string key = line.substr(first, eq - first);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    set_config_key(cfg, key, value);
  }
  return cfg;
}

std::string config_echo(const RunConfig& c) {
  std::ostringstream os;
  os << "lr=" << fmt_real(c.lr) << " batch=" << c.batch
     << " lambda1=" << fmt_real(c.lambda1) << " lambda2=" << fmt_real(c.lambda2)
     << " epochs=" << c.epochs << " seed=" << c.seed
     << " pool_rounds=" << c.pool_rounds << " t_dist=" << fmt_real(c.t_dist)
     << " manifest=" << c.manifest << " test_scene=" << c.test_scene
     << " format=" << c.format << " precision=" << c.precision
     << " max_steps=" << c.max_steps << " ckpt_every=" << c.ckpt_every
     << " eval_every=" << c.eval_every
     << " t_past=" << c.t_past << " t_future=" << c.t_future
     << " stride_train=" << c.stride_train << " stride_eval=" << c.stride_eval
     << " frame_stride=" << c.frame_stride
     << " data_scale=" << fmt_real(c.data_scale) << " k=" << c.k
     << " sigma_t=" << fmt_real(c.sigma_t)
     << " truncation_c=" << fmt_real(c.truncation_c)
     << " truncate=" << c.truncate << " waypoint=" << c.waypoint
     << " oracle=" << (c.oracle ? "true" : "false") << " trials=" << c.trials
     << " synthetic=" << (c.synthetic ? "true" : "false")
     << " synth_scenes=" << c.synth_scenes
     << " synth_agents=" << c.synth_agents
     << " synth_jitter=" << fmt_real(c.synth_jitter)
     << " synth_seed=" << c.synth_seed << " out_dir=" << c.out_dir
     << " checkpoint=" << c.checkpoint << " run_id=" << c.run_id
     << " widths_e_past=" << join_widths(c.widths.e_past)
     << " widths_e_end=" << join_widths(c.widths.e_end)
     << " widths_e_latent=" << join_widths(c.widths.e_latent)
     << " widths_d_latent=" << join_widths(c.widths.d_latent)
     << " widths_phi=" << join_widths(c.widths.phi)
     << " widths_theta=" << join_widths(c.widths.theta)
     << " widths_g=" << join_widths(c.widths.g)
     << " widths_p_future=" << join_widths(c.widths.p_future);
  return os.str();
}

SamplingConfig resolve_sampling(const RunConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("config: k must be >= 1");
  SamplingConfig s;
  s.k = cfg.k;
  s.truncation_c = cfg.truncation_c;
  // few-shot default: unit variance with truncation; large K widens the
  // prior and drops truncation
  s.sigma_t = cfg.sigma_t > 0.0 ? cfg.sigma_t : (cfg.k <= 3 ? 1.0 : 1.3);
  if (cfg.truncate == "auto") s.truncate = cfg.k <= 3;
  else s.truncate = cfg.truncate == "true";
  return s;
}

std::size_t resolve_waypoint(const RunConfig& cfg) {
  const std::size_t w = cfg.waypoint == 0 ? cfg.t_future : cfg.waypoint;
  if (w < 1 || w > cfg.t_future)
    throw ConfigError("config: waypoint must lie in 1..t_future");
  return w;
}

std::int64_t resolve_frame_stride(const RunConfig& cfg) {
  if (cfg.frame_stride > 0) return cfg.frame_stride;
  return cfg.format == "sdd_annot" ? 12 : 10;
}

}  // namespace pecnet
