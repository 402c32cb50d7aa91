#include "pecnet/social_pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pecnet/errors.hpp"

namespace pecnet {

namespace {

struct Interval {
  std::int64_t lo, hi;
};

Interval frame_interval(const PastTrack& t) {
  auto [lo, hi] = std::minmax_element(t.frames.begin(), t.frames.end());
  return {*lo, *hi};
}

}  // namespace

bool tracks_are_neighbors(const PastTrack& a, const PastTrack& b,
                          double t_dist) {
  if (a.pos.empty() || b.pos.empty()) return false;
  const Interval fa = frame_interval(a), fb = frame_interval(b);
  if (std::max(fa.lo, fb.lo) > std::min(fa.hi, fb.hi)) return false;

  // cheap bounding-box reject before the all-pairs scan
  double ax0 = a.pos[0][0], ax1 = ax0, ay0 = a.pos[0][1], ay1 = ay0;
  for (const auto& p : a.pos) {
    ax0 = std::min(ax0, p[0]);
    ax1 = std::max(ax1, p[0]);
    ay0 = std::min(ay0, p[1]);
    ay1 = std::max(ay1, p[1]);
  }
  double bx0 = b.pos[0][0], bx1 = bx0, by0 = b.pos[0][1], by1 = by0;
  for (const auto& p : b.pos) {
    bx0 = std::min(bx0, p[0]);
    bx1 = std::max(bx1, p[0]);
    by0 = std::min(by0, p[1]);
    by1 = std::max(by1, p[1]);
  }
  const double dx = std::max({0.0, bx0 - ax1, ax0 - bx1});
  const double dy = std::max({0.0, by0 - ay1, ay0 - by1});
  if (dx * dx + dy * dy > t_dist * t_dist) return false;

  double best = std::numeric_limits<double>::infinity();
  for (const auto& pa : a.pos) {
    for (const auto& pb : b.pos) {
      const double ddx = pa[0] - pb[0], ddy = pa[1] - pb[1];
      best = std::min(best, ddx * ddx + ddy * ddy);
    }
  }
  return best <= t_dist * t_dist;
}

SocialMask build_mask(const std::vector<PastTrack>& tracks, double t_dist) {
  if (t_dist <= 0.0)
    throw ConfigError("build_mask: t_dist must be positive, got " +
                      std::to_string(t_dist));
  SocialMask m(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i)
    for (std::size_t j = i + 1; j < tracks.size(); ++j)
      if (tracks_are_neighbors(tracks[i], tracks[j], t_dist)) m.set_pair(i, j);
  return m;
}

}  // namespace pecnet
