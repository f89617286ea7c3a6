// SPDX-License-Identifier: Apache-2.0
#pragma once

// Experiment configuration: an INI document with the sections
// [geometry] [fading] [dl] [ul] [sweep] [link]. Every key is optional; the
// defaults describe the K=4 / N=25 downlink and K=5 / N=25 uplink setups.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "trtc/channel.hpp"
#include "trtc/core.hpp"
#include "trtc/tma.hpp"

namespace trtc {

struct GeometryConfig {
  double carrier_hz = 7.48e9;
  double spacing_wavelengths = 0.5;
  double feed_distance = 0.1;        // m behind the surface centre
  double user_distance = 20.0;       // m
  double user_elevation_deg = 30.0;  // from boresight
  double user_azimuth_span_deg = 120.0;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
};

struct FadingConfig {
  double rice_factor_db = 3.0;
  double pathloss_exponent = 2.2;
  std::optional<double> reference_pathloss_db;  // default: free space at 1 m, (lambda / 4 pi)^2
};

struct DlConfig {
  int users = 4;
  double power_budget = 1.0;
  int harmonic_order = 1;
  double reference_snr_db = 20.0;
  std::optional<double> noise_power;
  double outer_tol = 1e-4;
  int max_outer = 100;
  double inner_tol = 1e-6;
  int inner_max = 500;
  int restarts = 0;
};

struct UlConfig {
  int users = 5;
  int subcarriers = 16;
  int coherence_group = 1;
  double budget = 0.1;
  double reference_snr_db = 20.0;
  std::optional<double> noise_power;
  double outer_tol = 1e-4;
  int max_outer = 50;
  int dual_max_iter = 200;
  double dual_step_scale = 0.1;
  double dual_tol = 1e-3;
  bool user_starts = true;
};

struct SweepConfig {
  std::vector<int> elements{9, 16, 25, 36, 49};
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> algorithms{"proposed", "benchmark1", "benchmark2", "benchmark3"};
  int threads = 1;
  int reference_elements = 25;  // grid used to calibrate the default noise powers
  std::string output = "results.csv";
};

struct LinkConfig {
  int users = 2;
  int elements = 25;
  int psk_order = 4;
  int symbols = 10000;
  int slots_per_frame = 100;
  int samples_per_period = 16;
  std::vector<double> snr_db{0.0, 3.0, 6.0, 9.0, 12.0};
};

struct ExperimentConfig {
  GeometryConfig geometry;
  FadingConfig fading;
  DlConfig dl;
  UlConfig ul;
  SweepConfig sweep;
  LinkConfig link;

  channel::FadingParams fading_params() const {
    const double lambda = geometry.wavelength();
    channel::FadingParams f;
    f.rice_factor = db_to_linear(fading.rice_factor_db);
    f.pathloss_exponent = fading.pathloss_exponent;
    const double free_space = (lambda / (4.0 * kPi)) * (lambda / (4.0 * kPi));
    f.reference_pathloss = fading.reference_pathloss_db ? db_to_linear(*fading.reference_pathloss_db) : free_space;
    return f;
  }

  /// Surface of `n` elements on its most-square grid with `users` users spread
  /// evenly in azimuth at a common range and elevation.
  channel::Geometry geometry_for(int n, int users) const {
    const auto [mx, my] = channel::grid_shape(n);
    channel::Geometry g;
    g.m_x = mx;
    g.m_y = my;
    g.wavelength = geometry.wavelength();
    g.spacing = geometry.spacing_wavelengths * g.wavelength;
    g.feed = {0.0, 0.0, -geometry.feed_distance};
    const double el = geometry.user_elevation_deg * kPi / 180.0;
    const double span = geometry.user_azimuth_span_deg * kPi / 180.0;
    for (int k = 0; k < users; ++k) {
      const double az = users == 1 ? 0.0 : -0.5 * span + span * k / (users - 1);
      g.users.push_back(channel::point_at(geometry.user_distance, az, el));
    }
    return g;
  }

  /// Noise power giving `snr_db` for a single boresight LoS user served by
  /// every element at amplitude sqrt(power), on the reference grid.
  double calibrated_noise(double power, double snr_db) const {
    channel::Geometry g = geometry_for(sweep.reference_elements, 1);
    g.users = {{0.0, 0.0, geometry.user_distance}};
    const CVec near = channel::near_field_channel(g);
    const double far = std::sqrt(fading_params().pathloss(geometry.user_distance));
    const double coherent = near.cwiseAbs().sum() * far;
    return power * coherent * coherent / db_to_linear(snr_db);
  }

  double dl_amplitude_cap() const { return tma::max_harmonic_amplitude(dl.harmonic_order); }

  double dl_noise() const {
    if (dl.noise_power) return *dl.noise_power;
    const double cap = dl_amplitude_cap();
    return calibrated_noise(std::min(cap * cap, dl.power_budget), dl.reference_snr_db);
  }

  double ul_noise() const { return ul.noise_power ? *ul.noise_power : calibrated_noise(ul.budget, ul.reference_snr_db); }

  /// Field-level problems; empty when the config is valid.
  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    auto check = [&](bool ok, const std::string& msg) {
      if (!ok) out.push_back(msg);
    };
    check(geometry.carrier_hz > 0.0, "geometry.carrier_hz: must be > 0");
    check(geometry.spacing_wavelengths > 0.0, "geometry.spacing_wavelengths: must be > 0");
    check(geometry.feed_distance > 0.0, "geometry.feed_distance: must be > 0 (feed behind the surface)");
    check(geometry.user_distance > 0.0, "geometry.user_distance: must be > 0 (users in front of the surface)");
    check(geometry.user_elevation_deg >= 0.0 && geometry.user_elevation_deg < 90.0,
          "geometry.user_elevation_deg: must be in [0, 90)");
    check(fading.rice_factor_db > -300.0, "fading.rice_factor_db: out of range");
    check(fading.pathloss_exponent > 0.0, "fading.pathloss_exponent: must be > 0");
    check(dl.users >= 1, "dl.users: must be >= 1");
    check(dl.power_budget > 0.0, "dl.power_budget: must be > 0");
    check(dl.harmonic_order >= 1, "dl.harmonic_order: must be >= 1");
    check(!dl.noise_power || *dl.noise_power > 0.0, "dl.noise_power: must be > 0");
    check(dl.outer_tol > 0.0, "dl.outer_tol: must be > 0");
    check(dl.inner_tol > 0.0, "dl.inner_tol: must be > 0");
    check(dl.max_outer >= 1 && dl.inner_max >= 1, "dl.max_outer/dl.inner_max: must be >= 1");
    check(dl.restarts >= 0, "dl.restarts: must be >= 0");
    check(ul.users >= 1, "ul.users: must be >= 1");
    check(ul.subcarriers >= 1, "ul.subcarriers: must be >= 1");
    check(ul.coherence_group >= 1, "ul.coherence_group: must be >= 1");
    check(ul.budget > 0.0, "ul.budget: must be > 0");
    check(!ul.noise_power || *ul.noise_power > 0.0, "ul.noise_power: must be > 0");
    check(ul.outer_tol > 0.0 && ul.dual_tol > 0.0 && ul.dual_step_scale > 0.0,
          "ul.outer_tol/ul.dual_tol/ul.dual_step_scale: must be > 0");
    check(ul.max_outer >= 1 && ul.dual_max_iter >= 1, "ul.max_outer/ul.dual_max_iter: must be >= 1");
    check(sweep.trials >= 1, "sweep.trials: must be >= 1");
    check(sweep.threads >= 1, "sweep.threads: must be >= 1");
    check(!sweep.elements.empty(), "sweep.elements: must list at least one element count");
    check(!sweep.algorithms.empty(), "sweep.algorithms: must list at least one algorithm");
    for (const auto& a : sweep.algorithms) {
      check(a == "proposed" || a == "benchmark1" || a == "benchmark2" || a == "benchmark3",
            "sweep.algorithms: unknown algorithm '" + a + "'");
    }
    check(link.users >= 1 && link.elements >= link.users, "link.users/link.elements: need 1 <= users <= elements");
    check(link.psk_order == 2 || link.psk_order == 4 || link.psk_order == 8 || link.psk_order == 16,
          "link.psk_order: must be 2, 4, 8 or 16");
    check(link.symbols >= 1 && link.slots_per_frame >= 1, "link.symbols/link.slots_per_frame: must be >= 1");
    check(link.samples_per_period >= 2 * dl.harmonic_order + 1, "link.samples_per_period: must be >= 2l+1");
    if (!out.empty()) return out;

    const double lambda = geometry.wavelength();
    std::vector<int> grids = sweep.elements;
    grids.push_back(sweep.reference_elements);
    for (int n : grids) {
      const std::string tag = "sweep.elements: N=" + std::to_string(n);
      if (n < 1) {
        out.push_back(tag + " has no grid factorization");
        continue;
      }
      check(n >= dl.users, tag + " is smaller than dl.users (zero forcing needs N >= K)");
      const channel::Geometry g = geometry_for(n, 1);
      const double rayleigh = channel::rayleigh_distance(g.aperture(), lambda);
      check(geometry.user_distance > rayleigh,
            tag + ": users at " + std::to_string(geometry.user_distance) + " m are inside the Rayleigh distance " +
                std::to_string(rayleigh) + " m");
      check(geometry.feed_distance < rayleigh,
            tag + ": feed at " + std::to_string(geometry.feed_distance) +
                " m is outside the near-field region (Rayleigh distance " + std::to_string(rayleigh) + " m)");
    }
    return out;
  }

  void validate() const {
    const auto p = problems();
    if (p.empty()) return;
    std::ostringstream os;
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "; " : "") << p[i];
    throw Error(ErrorCode::ConfigInvalid, os.str());
  }
};

namespace detail {

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<T> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (p.empty()) continue;
    std::istringstream is(p);
    T v{};
    is >> v;
    require(!is.fail() && is.eof(), ErrorCode::ConfigInvalid, key + ": cannot parse '" + p + "'");
    out.push_back(v);
  }
  return out;
}

template <typename T>
void read(const boost::property_tree::ptree& pt, const std::string& key, T& target) {
  if (auto v = pt.get_optional<std::string>(key)) {
    std::istringstream is(boost::trim_copy(*v));
    T parsed{};
    is >> parsed;
    require(!is.fail() && is.eof(), ErrorCode::ConfigInvalid, key + ": cannot parse '" + *v + "'");
    target = parsed;
  }
}

inline void read(const boost::property_tree::ptree& pt, const std::string& key, std::string& target) {
  if (auto v = pt.get_optional<std::string>(key)) target = boost::trim_copy(*v);
}

inline void read(const boost::property_tree::ptree& pt, const std::string& key, bool& target) {
  if (auto v = pt.get_optional<std::string>(key)) {
    const std::string t = boost::to_lower_copy(boost::trim_copy(*v));
    require(t == "true" || t == "false" || t == "1" || t == "0", ErrorCode::ConfigInvalid,
            key + ": expected true or false, got '" + *v + "'");
    target = t == "true" || t == "1";
  }
}

template <typename T>
void read(const boost::property_tree::ptree& pt, const std::string& key, std::optional<T>& target) {
  if (pt.get_optional<std::string>(key)) {
    T v{};
    read(pt, key, v);
    target = v;
  }
}

template <typename T>
void read(const boost::property_tree::ptree& pt, const std::string& key, std::vector<T>& target) {
  if (auto v = pt.get_optional<std::string>(key)) target = parse_list<T>(*v, key);
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  static const char* known[] = {"geometry", "fading", "dl", "ul", "sweep", "link"};
  for (const auto& [section, _] : pt) {
    bool ok = false;
    for (const char* k : known) ok = ok || section == k;
    require(ok, ErrorCode::ConfigInvalid, "unknown section [" + section + "]");
  }

  ExperimentConfig c;
  using detail::read;
  read(pt, "geometry.carrier_hz", c.geometry.carrier_hz);
  read(pt, "geometry.spacing_wavelengths", c.geometry.spacing_wavelengths);
  read(pt, "geometry.feed_distance", c.geometry.feed_distance);
  read(pt, "geometry.user_distance", c.geometry.user_distance);
  read(pt, "geometry.user_elevation_deg", c.geometry.user_elevation_deg);
  read(pt, "geometry.user_azimuth_span_deg", c.geometry.user_azimuth_span_deg);

  read(pt, "fading.rice_factor_db", c.fading.rice_factor_db);
  read(pt, "fading.pathloss_exponent", c.fading.pathloss_exponent);
  read(pt, "fading.reference_pathloss_db", c.fading.reference_pathloss_db);

  read(pt, "dl.users", c.dl.users);
  read(pt, "dl.power_budget", c.dl.power_budget);
  read(pt, "dl.harmonic_order", c.dl.harmonic_order);
  read(pt, "dl.reference_snr_db", c.dl.reference_snr_db);
  read(pt, "dl.noise_power", c.dl.noise_power);
  read(pt, "dl.outer_tol", c.dl.outer_tol);
  read(pt, "dl.max_outer", c.dl.max_outer);
  read(pt, "dl.inner_tol", c.dl.inner_tol);
  read(pt, "dl.inner_max", c.dl.inner_max);
  read(pt, "dl.restarts", c.dl.restarts);

  read(pt, "ul.users", c.ul.users);
  read(pt, "ul.subcarriers", c.ul.subcarriers);
  read(pt, "ul.coherence_group", c.ul.coherence_group);
  read(pt, "ul.budget", c.ul.budget);
  read(pt, "ul.reference_snr_db", c.ul.reference_snr_db);
  read(pt, "ul.noise_power", c.ul.noise_power);
  read(pt, "ul.outer_tol", c.ul.outer_tol);
  read(pt, "ul.max_outer", c.ul.max_outer);
  read(pt, "ul.dual_max_iter", c.ul.dual_max_iter);
  read(pt, "ul.dual_step_scale", c.ul.dual_step_scale);
  read(pt, "ul.dual_tol", c.ul.dual_tol);
  read(pt, "ul.user_starts", c.ul.user_starts);

  read(pt, "sweep.elements", c.sweep.elements);
  read(pt, "sweep.trials", c.sweep.trials);
  read(pt, "sweep.seed", c.sweep.seed);
  read(pt, "sweep.algorithms", c.sweep.algorithms);
  read(pt, "sweep.threads", c.sweep.threads);
  read(pt, "sweep.reference_elements", c.sweep.reference_elements);
  read(pt, "sweep.output", c.sweep.output);

  read(pt, "link.users", c.link.users);
  read(pt, "link.elements", c.link.elements);
  read(pt, "link.psk_order", c.link.psk_order);
  read(pt, "link.symbols", c.link.symbols);
  read(pt, "link.slots_per_frame", c.link.slots_per_frame);
  read(pt, "link.samples_per_period", c.link.samples_per_period);
  read(pt, "link.snr_db", c.link.snr_db);
  return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace trtc
