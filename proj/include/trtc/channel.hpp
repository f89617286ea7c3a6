// SPDX-License-Identifier: Apache-2.0
#pragma once

// Geometry-driven channel models for a transmissive RIS fed by a horn:
// a spherical-wavefront LoS link from the feed to each element, and
// plane-wave Rician links from the surface to far-field users.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "trtc/core.hpp"
#include "trtc/rng.hpp"

namespace trtc::channel {

using Point = std::array<double, 3>;

inline double distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// RIS in the z = 0 plane, centred on the origin, feed at z < 0 and users
/// at z > 0. Element n = a + m_x * b sits at grid index (a, b).
struct Geometry {
  int m_x = 5;
  int m_y = 5;
  double spacing = 0.0;
  double wavelength = 0.0;
  Point feed{0.0, 0.0, -0.1};
  std::vector<Point> users;

  int elements() const { return m_x * m_y; }

  Point element_position(int n) const {
    const int a = n % m_x;
    const int b = n / m_x;
    return {(a - 0.5 * (m_x - 1)) * spacing, (b - 0.5 * (m_y - 1)) * spacing, 0.0};
  }

  /// Largest centre-to-centre distance across the surface.
  double aperture() const {
    return spacing * std::hypot(static_cast<double>(m_x - 1), static_cast<double>(m_y - 1));
  }

  void validate() const {
    require(m_x >= 1 && m_y >= 1, ErrorCode::DegenerateGeometry, "grid must be at least 1x1");
    require(spacing > 0.0 && wavelength > 0.0, ErrorCode::DegenerateGeometry,
            "spacing and wavelength must be positive");
    require(feed[2] < 0.0, ErrorCode::DegenerateGeometry, "feed must be behind the RIS (z < 0)");
    for (const auto& u : users) {
      require(u[2] > 0.0, ErrorCode::DegenerateGeometry, "users must be in front of the RIS (z > 0)");
    }
  }
};

/// Most-square factorization m_x * m_y = n with m_x <= m_y.
inline std::pair<int, int> grid_shape(int n) {
  require(n >= 1, ErrorCode::ConfigInvalid, "element count must be >= 1");
  int m = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (m > 1 && n % m != 0) --m;
  return {m, n / m};
}

struct FadingParams {
  double rice_factor = 1.0;        // linear LoS/NLoS power ratio
  double pathloss_exponent = 2.2;
  double reference_pathloss = 1.0; // linear gain at 1 m

  double pathloss(double dist) const { return reference_pathloss * std::pow(dist, -pathloss_exponent); }
};

struct ChannelRealization {
  CVec g;                 // feed -> element, N
  CMat h;                 // element -> user, N x K
  std::vector<CMat> h_ul; // per user, N x S
};

inline double rayleigh_distance(double aperture, double wavelength) {
  return 2.0 * aperture * aperture / wavelength;
}

/// Spherical-wave LoS from the feed: g_n = lambda / (4 pi d_n) e^{-j 2 pi d_n / lambda}.
inline CVec near_field_channel(const Geometry& geom) {
  const int n_el = geom.elements();
  CVec g(n_el);
  for (int n = 0; n < n_el; ++n) {
    const double d = distance(geom.feed, geom.element_position(n));
    require(d > 0.0, ErrorCode::DegenerateGeometry, "feed coincides with an element");
    g(n) = std::polar(geom.wavelength / (4.0 * kPi * d), -2.0 * kPi * d / geom.wavelength);
  }
  return g;
}

/// UPA response; `elevation` is measured from boresight (the +z axis).
inline CVec steering_vector(const Geometry& geom, double azimuth, double elevation) {
  const double k = 2.0 * kPi * geom.spacing / geom.wavelength;
  const double u = std::sin(elevation) * std::cos(azimuth);
  const double v = std::sin(elevation) * std::sin(azimuth);
  CVec a(geom.elements());
  for (int n = 0; n < geom.elements(); ++n) {
    const int ia = n % geom.m_x;
    const int ib = n / geom.m_x;
    a(n) = std::polar(1.0, k * (ia * u + ib * v));
  }
  return a;
}

struct Direction {
  double azimuth;
  double elevation;
  double range;
};

inline Direction direction_of(const Point& p) {
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  return {std::atan2(p[1], p[0]), std::acos(std::clamp(p[2] / r, -1.0, 1.0)), r};
}

inline Point point_at(double range, double azimuth, double elevation) {
  return {range * std::sin(elevation) * std::cos(azimuth), range * std::sin(elevation) * std::sin(azimuth),
          range * std::cos(elevation)};
}

/// h = sqrt(PL) (sqrt(k/(k+1)) los + sqrt(1/(k+1)) w), w ~ CN(0, I).
inline CVec rician_sample(const CVec& los, const FadingParams& fading, double dist, Rng& rng) {
  const double pl = std::sqrt(fading.pathloss(dist));
  const CVec w = cscg_vector(rng, los.size());
  if (std::isinf(fading.rice_factor)) return pl * los;
  const double kf = fading.rice_factor;
  return pl * (std::sqrt(kf / (kf + 1.0)) * los + std::sqrt(1.0 / (kf + 1.0)) * w);
}

inline CVec effective_dl_channel(const CVec& g, const CVec& h) {
  require(g.size() == h.size(), ErrorCode::DimensionMismatch, "g and h must have equal length");
  return g.cwiseProduct(h);
}

/// Far-field RIS -> user channels, one column per user.
inline CMat dl_user_channels(const Geometry& geom, const FadingParams& fading, Rng& rng) {
  CMat h(geom.elements(), static_cast<Eigen::Index>(geom.users.size()));
  for (std::size_t k = 0; k < geom.users.size(); ++k) {
    const auto dir = direction_of(geom.users[k]);
    h.col(static_cast<Eigen::Index>(k)) =
        rician_sample(steering_vector(geom, dir.azimuth, dir.elevation), fading, dir.range, rng);
  }
  return h;
}

/// Per-user N x S subcarrier channels. The LoS part is common to all
/// subcarriers; NLoS is redrawn for every block of `group_size` subcarriers.
inline std::vector<CMat> ul_subcarrier_channels(const Geometry& geom, const FadingParams& fading, int subcarriers,
                                                int group_size, Rng& rng) {
  require(subcarriers >= 1 && group_size >= 1, ErrorCode::DimensionMismatch,
          "need S >= 1 and coherence group size >= 1");
  std::vector<CMat> out;
  out.reserve(geom.users.size());
  for (const auto& user : geom.users) {
    const auto dir = direction_of(user);
    const CVec los = steering_vector(geom, dir.azimuth, dir.elevation);
    CMat hk(geom.elements(), subcarriers);
    for (int s = 0; s < subcarriers; s += group_size) {
      const CVec draw = rician_sample(los, fading, dir.range, rng);
      for (int j = s; j < std::min(subcarriers, s + group_size); ++j) hk.col(j) = draw;
    }
    out.push_back(std::move(hk));
  }
  return out;
}

}  // namespace trtc::channel
