#include "pecnet/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "pecnet/rng.hpp"

namespace pecnet {

namespace fs = std::filesystem;

TrajFormat parse_format(const std::string& name) {
  if (name == "ethucy_txt") return TrajFormat::ethucy_txt;
  if (name == "sdd_annot") return TrajFormat::sdd_annot;
  throw ConfigError("unknown trajectory format '" + name +
                    "' (expected ethucy_txt or sdd_annot)");
}

const char* format_name(TrajFormat fmt) {
  return fmt == TrajFormat::ethucy_txt ? "ethucy_txt" : "sdd_annot";
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void malformed(const std::string& path, std::size_t line_no,
                            const std::string& why) {
  throw IoError(path + ":" + std::to_string(line_no) + ": " + why);
}

}  // namespace

std::vector<RawRecord> load_trajectory_file(const std::string& path,
                                            TrajFormat fmt) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open trajectory file: " + path);
  std::vector<RawRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::istringstream ls(line);
    if (fmt == TrajFormat::ethucy_txt) {
      // frame and agent ids are written as floats in some distributions
      double frame, agent, x, y;
      if (!(ls >> frame >> agent >> x >> y))
        malformed(path, line_no, "expected 'frame agent x y'");
      out.push_back({static_cast<std::int64_t>(std::llround(frame)),
                     static_cast<std::int64_t>(std::llround(agent)), x, y});
    } else {
      double agent, xmin, ymin, xmax, ymax, frame, lost, occl, gen;
      std::string label;
      if (!(ls >> agent >> xmin >> ymin >> xmax >> ymax >> frame >> lost >>
            occl >> gen >> label))
        malformed(path, line_no,
                  "expected 'agent xmin ymin xmax ymax frame lost occluded "
                  "generated label'");
      if (lost != 0.0) continue;
      // labels come quoted, e.g. "Pedestrian"
      std::erase(label, '"');
      if (lower(label) != "pedestrian") continue;
      out.push_back({static_cast<std::int64_t>(std::llround(frame)),
                     static_cast<std::int64_t>(std::llround(agent)),
                     (xmin + xmax) / 2.0, (ymin + ymax) / 2.0});
    }
  }
  return out;
}

NormSample normalize(const Sample& s, double scale) {
  if (scale <= 0.0)
    throw ConfigError("normalize: scale must be positive, got " +
                      std::to_string(scale));
  if (s.past.empty()) throw ShapeError("normalize: sample with empty past");
  NormSample n;
  n.base = s;
  n.offset = s.past.back();
  n.scale = scale;
  n.past.reserve(s.past.size());
  n.future.reserve(s.future.size());
  for (const auto& p : s.past)
    n.past.push_back({(p[0] - n.offset[0]) / scale, (p[1] - n.offset[1]) / scale});
  for (const auto& p : s.future)
    n.future.push_back(
        {(p[0] - n.offset[0]) / scale, (p[1] - n.offset[1]) / scale});
  return n;
}

Sample denormalize(const NormSample& s) { return s.base; }

std::vector<Sample> window_samples(std::vector<RawRecord> records,
                                   const WindowConfig& wc, int scene_id) {
  if (wc.t_past == 0 || wc.t_future == 0 || wc.stride == 0)
    throw ConfigError("window_samples: t_past, t_future, stride must be > 0");
  const std::int64_t fstride = wc.frame_stride > 0 ? wc.frame_stride : 1;
  if (fstride > 1) {
    std::erase_if(records,
                  [&](const RawRecord& r) { return r.frame % fstride != 0; });
  }
  std::sort(records.begin(), records.end(),
            [](const RawRecord& a, const RawRecord& b) {
              return a.agent != b.agent ? a.agent < b.agent : a.frame < b.frame;
            });

  const std::size_t win = wc.t_past + wc.t_future;
  std::vector<Sample> out;
  std::size_t i = 0;
  while (i < records.size()) {
    // [i, j) = one agent's maximal constant-stride run
    std::size_t j = i + 1;
    while (j < records.size() && records[j].agent == records[i].agent &&
           records[j].frame - records[j - 1].frame == fstride)
      ++j;
    const std::size_t run = j - i;
    if (run >= win) {
      for (std::size_t s = 0; s + win <= run; s += wc.stride) {
        Sample smp;
        smp.agent_id = records[i].agent;
        smp.scene_id = scene_id;
        smp.past.reserve(wc.t_past);
        smp.future.reserve(wc.t_future);
        smp.frames.reserve(win);
        for (std::size_t t = 0; t < win; ++t) {
          const RawRecord& r = records[i + s + t];
          smp.frames.push_back(r.frame);
          if (t < wc.t_past)
            smp.past.push_back({r.x, r.y});
          else
            smp.future.push_back({r.x, r.y});
        }
        out.push_back(std::move(smp));
      }
    }
    i = j;
  }
  return out;
}

std::vector<std::vector<std::size_t>> neighbor_components(
    const std::vector<Sample>& samples, double t_dist) {
  const std::size_t n = samples.size();
  std::vector<PastTrack> tracks;
  tracks.reserve(n);
  for (const Sample& s : samples) tracks.push_back(s.past_track());

  // union-find over the neighbour graph
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (tracks_are_neighbors(tracks[i], tracks[j], t_dist)) {
        const std::size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }

  // components in first-appearance order, members in index order
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> comp_of(n, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (comp_of[r] == static_cast<std::size_t>(-1)) {
      comp_of[r] = comps.size();
      comps.emplace_back();
    }
    comps[comp_of[r]].push_back(i);
  }
  return comps;
}

std::size_t count_neighbor_edges(const std::vector<Sample>& samples,
                                 double t_dist) {
  std::vector<PastTrack> tracks;
  tracks.reserve(samples.size());
  for (const Sample& s : samples) tracks.push_back(s.past_track());
  std::size_t e = 0;
  for (std::size_t i = 0; i < tracks.size(); ++i)
    for (std::size_t j = i + 1; j < tracks.size(); ++j)
      if (tracks_are_neighbors(tracks[i], tracks[j], t_dist)) ++e;
  return e;
}

std::vector<SceneBatch> group_into_batches(const std::vector<Sample>& samples,
                                           double t_dist,
                                           std::size_t max_batch) {
  if (max_batch == 0) throw ConfigError("group_into_batches: max_batch == 0");
  const std::size_t n = samples.size();
  std::vector<PastTrack> tracks;
  tracks.reserve(n);
  for (const Sample& s : samples) tracks.push_back(s.past_track());

  const std::vector<std::vector<std::size_t>> comps =
      neighbor_components(samples, t_dist);

  std::vector<std::vector<std::size_t>> packed;
  std::vector<std::size_t> cur;
  for (const auto& comp : comps) {
    if (!cur.empty() && cur.size() + comp.size() > max_batch) {
      packed.push_back(std::move(cur));
      cur.clear();
    }
    // an oversized component ships alone
    cur.insert(cur.end(), comp.begin(), comp.end());
    if (cur.size() >= max_batch) {
      packed.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) packed.push_back(std::move(cur));

  std::vector<SceneBatch> out;
  out.reserve(packed.size());
  for (const auto& idxs : packed) {
    SceneBatch b;
    b.samples.reserve(idxs.size());
    std::vector<PastTrack> bt;
    bt.reserve(idxs.size());
    for (std::size_t i : idxs) {
      b.samples.push_back(samples[i]);
      bt.push_back(tracks[i]);
    }
    b.mask = build_mask(bt, t_dist);
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

constexpr int kFramesPerScene = 10000;
constexpr int kAgentsPerSceneBlock = 100;
constexpr std::int64_t kSynthFrameStride = 10;
constexpr std::size_t kSynthPoints = 20;

enum class SceneKind { crossing, straight, turning };

}  // namespace

std::vector<RawRecord> gen_synthetic(const SynthConfig& cfg) {
  if (cfg.n_scenes < 1) throw ConfigError("gen_synthetic: n_scenes < 1");
  if (cfg.agents_per_scene < 1 ||
      cfg.agents_per_scene >= kAgentsPerSceneBlock)
    throw ConfigError("gen_synthetic: agents_per_scene out of range");
  if (cfg.jitter < 0.0) throw ConfigError("gen_synthetic: negative jitter");

  Rng root(cfg.seed);
  std::vector<RawRecord> out;
  out.reserve(static_cast<std::size_t>(cfg.n_scenes) *
              static_cast<std::size_t>(cfg.agents_per_scene) * kSynthPoints);

  for (int s = 0; s < cfg.n_scenes; ++s) {
    Rng srng = root.fork(static_cast<std::uint64_t>(s));
    const std::int64_t base_frame =
        static_cast<std::int64_t>(s) * kFramesPerScene;
    SceneKind kind = static_cast<SceneKind>(s % 3);
    if (kind == SceneKind::crossing && cfg.agents_per_scene < 2)
      kind = SceneKind::straight;

    // shared crossing geometry so both agents pass through the same point
    std::array<double, 2> cross{0, 0};
    double cross_step = 10.0;
    double angle0 = 0.0, angle_gap = 0.0;
    if (kind == SceneKind::crossing) {
      Rng crng = srng.fork(9999);
      cross = {crng.uniform(10.0, 30.0), crng.uniform(10.0, 30.0)};
      cross_step = crng.uniform(8.0, 12.0);
      angle0 = crng.uniform(0.0, 2.0 * std::numbers::pi);
      angle_gap = crng.uniform(std::numbers::pi / 3.0,
                               2.0 * std::numbers::pi / 3.0);
    }

    for (int a = 0; a < cfg.agents_per_scene; ++a) {
      Rng arng = srng.fork(static_cast<std::uint64_t>(a));
      const std::int64_t agent_id =
          static_cast<std::int64_t>(s) * kAgentsPerSceneBlock + a;

      const bool crossing_member = kind == SceneKind::crossing && a < 2;
      const bool turning = kind == SceneKind::turning;

      double speed, heading, omega = 0.0;
      std::array<double, 2> start{0, 0};
      if (crossing_member) {
        speed = arng.uniform(0.8, 1.2);
        heading = a == 0 ? angle0 : angle0 + angle_gap;
        start = {cross[0] - std::cos(heading) * speed * cross_step,
                 cross[1] - std::sin(heading) * speed * cross_step};
      } else {
        start = {arng.uniform(0.0, 40.0), arng.uniform(0.0, 40.0)};
        heading = arng.uniform(0.0, 2.0 * std::numbers::pi);
        speed = arng.uniform(0.5, 1.5);
        if (turning) {
          omega = arng.uniform(0.02, 0.08);
          if (arng.uniform() < 0.5) omega = -omega;
        }
      }

      std::array<double, 2> pos = start;
      for (std::size_t i = 0; i < kSynthPoints; ++i) {
        std::array<double, 2> p;
        if (turning) {
          p = pos;
          pos[0] += speed * std::cos(heading);
          pos[1] += speed * std::sin(heading);
          heading += omega;
        } else {
          // closed form keeps zero-jitter tracks exactly collinear
          p = {start[0] + std::cos(heading) * speed * static_cast<double>(i),
               start[1] + std::sin(heading) * speed * static_cast<double>(i)};
        }
        if (cfg.jitter > 0.0) {
          p[0] += cfg.jitter * arng.normal();
          p[1] += cfg.jitter * arng.normal();
        }
        out.push_back(
            {base_frame + static_cast<std::int64_t>(i) * kSynthFrameStride,
             agent_id, p[0], p[1]});
      }
    }
  }
  return out;
}

std::vector<Sample> synthetic_samples(const SynthConfig& cfg) {
  const std::vector<RawRecord> records = gen_synthetic(cfg);
  // split by scene block so each window carries its scene id
  std::vector<std::vector<RawRecord>> per_scene(
      static_cast<std::size_t>(cfg.n_scenes));
  for (const RawRecord& r : records) {
    const auto s = static_cast<std::size_t>(r.agent / kAgentsPerSceneBlock);
    per_scene.at(s).push_back(r);
  }
  WindowConfig wc;
  wc.frame_stride = kSynthFrameStride;
  std::vector<Sample> out;
  for (std::size_t s = 0; s < per_scene.size(); ++s) {
    auto part = window_samples(std::move(per_scene[s]), wc, static_cast<int>(s));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest: " + path);
  const fs::path dir = fs::path(path).parent_path();
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      malformed(path, line_no, "expected 'scene_name: path [path ...]'");
    ManifestEntry e;
    e.scene = line.substr(first, colon - first);
    while (!e.scene.empty() && (e.scene.back() == ' ' || e.scene.back() == '\t'))
      e.scene.pop_back();
    if (e.scene.empty()) malformed(path, line_no, "empty scene name");
    std::istringstream ps(line.substr(colon + 1));
    std::string p;
    while (ps >> p) {
      fs::path fp(p);
      if (fp.is_relative()) fp = dir / fp;
      e.paths.push_back(fp.string());
    }
    if (e.paths.empty()) malformed(path, line_no, "scene lists no files");
    out.push_back(std::move(e));
  }
  return out;
}

void write_ethucy_file(const std::string& path,
                       const std::vector<RawRecord>& records) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(17);
  for (const RawRecord& r : records)
    os << r.frame << " " << r.agent << " " << r.x << " " << r.y << "\n";
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace pecnet
