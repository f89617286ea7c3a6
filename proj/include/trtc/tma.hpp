// SPDX-License-Identifier: Apache-2.0
#pragma once

// Time-modulated array (TMA) control waveforms: each element is switched
// on/off once per period, and the complex Fourier coefficient of the
// switching pattern at harmonic l carries the element's composite symbol.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "trtc/core.hpp"

namespace trtc::tma {

/// One element's periodic on/off control signal. The waveform is 1 on
/// [t_on, t_on + tau) modulo `period` and 0 elsewhere.
struct TmaWaveform {
  double t_on = 0.0;
  double tau = 0.0;
  double period = 1.0;

  bool valid() const {
    return period > 0.0 && t_on >= 0.0 && t_on < period && tau >= 0.0 && tau <= period;
  }

  /// Instantaneous state at time t.
  bool on_at(double t) const {
    const double u = std::fmod(std::fmod(t - t_on, period) + period, period);
    return u < tau;
  }

  /// Measure of the on-set inside [0, t); valid for any real t.
  double on_time_before(double t) const {
    const double cycles = std::floor(t / period);
    const double u = t - cycles * period;
    double within;
    if (t_on + tau <= period) {
      within = std::clamp(u - t_on, 0.0, tau);
    } else {
      within = std::clamp(u, 0.0, t_on + tau - period) + std::clamp(u - t_on, 0.0, period - t_on);
    }
    return cycles * tau + within;
  }
};

struct HarmonicTarget {
  double amplitude = 0.0;
  double phase = 0.0;
  int order = 1;
};

/// Frame of synthesized waveforms: `waveforms[slot][element]`.
struct SymbolFrame {
  std::vector<std::vector<TmaWaveform>> waveforms;
  int order = 1;
  double period = 1.0;
  double scaling = 1.0;  // common amplitude scale applied to every symbol
};

enum class PeakPolicy {
  FrameScaling,  // scale the whole frame so the peak symbol is representable
  Reject,        // throw AmplitudeUnreachable on any overshoot
};

/// Fourier coefficient c_l = (1/T) int_0^T U(t) e^{-j 2 pi l t / T} dt.
inline cplx harmonic_coefficient(const TmaWaveform& w, int l) {
  const double duty = w.tau / w.period;
  if (l == 0) return {duty, 0.0};
  const double pl = kPi * l;
  const double mag = std::sin(pl * duty) / pl;
  return std::polar(1.0, -pl * (2.0 * w.t_on + w.tau) / w.period) * mag;
}

/// Largest |c_l| any on/off waveform can reach; attained at tau = T / (2l).
inline double max_harmonic_amplitude(int l) {
  require(l >= 0, ErrorCode::UnsupportedOrder, "harmonic order must be >= 0");
  return l == 0 ? 1.0 : 1.0 / (kPi * l);
}

/// Inverts the closed form: the returned waveform has c_l = A e^{j phi}.
inline TmaWaveform solve_control(const HarmonicTarget& target, double period) {
  const int l = target.order;
  require(l >= 1, ErrorCode::UnsupportedOrder, "control synthesis needs harmonic order >= 1");
  require(period > 0.0, ErrorCode::AmplitudeUnreachable, "period must be positive");
  const double cap = max_harmonic_amplitude(l);
  // a hair of slack so boundary targets produced by scaling are accepted
  require(target.amplitude >= 0.0 && target.amplitude <= cap * (1.0 + 1e-12),
          ErrorCode::AmplitudeUnreachable, "target amplitude exceeds 1/(pi l)");

  const double pl = kPi * l;
  const double s = std::min(1.0, pl * target.amplitude);
  TmaWaveform w;
  w.period = period;
  w.tau = period / pl * std::asin(s);
  double t_on = 0.5 * (-target.phase * period / pl - w.tau);
  t_on = std::fmod(t_on, period);
  if (t_on < 0.0) t_on += period;
  if (t_on >= period) t_on = 0.0;
  w.t_on = t_on;
  return w;
}

/// Per-element composite symbols x = F diag(sqrt(p)) s.
inline CVec compose_element_symbols(const CMat& beams, const RVec& powers, const CVec& symbols) {
  require(beams.cols() == powers.size() && powers.size() == symbols.size(),
          ErrorCode::DimensionMismatch, "F is N x K, p and s must have K entries");
  require((powers.array() >= 0.0).all(), ErrorCode::DimensionMismatch, "powers must be >= 0");
  CVec weighted(symbols.size());
  for (Eigen::Index k = 0; k < symbols.size(); ++k) weighted(k) = std::sqrt(powers(k)) * symbols(k);
  return beams * weighted;
}

/// Maps every slot's composite symbols onto control waveforms.
inline SymbolFrame synthesize_frame(std::span<const CVec> slots, int l, double period,
                                    PeakPolicy policy = PeakPolicy::FrameScaling) {
  require(l >= 1, ErrorCode::UnsupportedOrder, "harmonic order must be >= 1");
  const double cap = max_harmonic_amplitude(l);
  double peak = 0.0;
  for (const auto& x : slots) {
    if (x.size() > 0) peak = std::max(peak, x.cwiseAbs().maxCoeff());
  }

  SymbolFrame frame;
  frame.order = l;
  frame.period = period;
  frame.scaling = 1.0;
  if (peak > cap) {
    require(policy == PeakPolicy::FrameScaling, ErrorCode::AmplitudeUnreachable,
            "frame peak exceeds the harmonic ceiling");
    frame.scaling = cap / peak;
  }

  frame.waveforms.reserve(slots.size());
  for (const auto& x : slots) {
    std::vector<TmaWaveform> row;
    row.reserve(static_cast<std::size_t>(x.size()));
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      const double a = std::min(std::abs(x(n)) * frame.scaling, cap);
      row.push_back(solve_control({a, std::arg(x(n)), l}, period));
    }
    frame.waveforms.push_back(std::move(row));
  }
  return frame;
}

/// Integrate-and-dump sampling: sample m is the mean of U over the cell of
/// width 1/fs centred on t = m / fs. The harmonic-l coefficient of the
/// result differs from the analog one by O((l / samples_per_period)^2).
inline RVec sample_waveform(const TmaWaveform& w, int samples_per_period, int periods = 1) {
  const int total = samples_per_period * periods;
  const double dt = w.period / samples_per_period;
  RVec out(total);
  for (int m = 0; m < total; ++m) {
    const double a = (m - 0.5) * dt;
    out(m) = (w.on_time_before(a + dt) - w.on_time_before(a)) / dt;
  }
  return out;
}

/// Single-bin DFT at frequency l / T, normalized so that a tone
/// c e^{j 2 pi l t / T} sampled at t = m / fs returns c.
inline cplx extract_harmonic(std::span<const cplx> samples, double sample_rate, double period, int l) {
  const double spp_real = sample_rate * period;
  const auto spp = static_cast<std::int64_t>(std::llround(spp_real));
  require(std::abs(spp_real - static_cast<double>(spp)) < 1e-9 * std::max(1.0, spp_real),
          ErrorCode::NonIntegerPeriod, "sample_rate * period must be an integer");
  require(spp >= 2 * static_cast<std::int64_t>(std::abs(l)) + 1, ErrorCode::NonIntegerPeriod,
          "need at least 2l+1 samples per period");
  const auto m_total = static_cast<std::int64_t>(samples.size());
  require(m_total > 0 && m_total % spp == 0, ErrorCode::NonIntegerPeriod,
          "samples must span an integer number of periods");

  // exact twiddles from the residue avoids phase drift over long spans
  cplx acc{0.0, 0.0};
  for (std::int64_t m = 0; m < m_total; ++m) {
    const auto r = (static_cast<std::int64_t>(l) * m) % spp;
    acc += samples[static_cast<std::size_t>(m)] *
           std::polar(1.0, -2.0 * kPi * static_cast<double>(r) / static_cast<double>(spp));
  }
  return acc / static_cast<double>(m_total);
}

// ---------------------------------------------------------------------------
// Gray-coded M-PSK. Constellation point k sits at angle 2 pi k / M + offset
// (offset pi/M for M >= 4, 0 for BPSK) and carries the bits of gray(k),
// most significant bit first. For QPSK: 00 -> e^{j pi/4}.

inline int bits_per_symbol(int m) {
  switch (m) {
    case 2: return 1;
    case 4: return 2;
    case 8: return 3;
    case 16: return 4;
    default: throw Error(ErrorCode::UnsupportedOrder, "PSK order must be 2, 4, 8 or 16");
  }
}

inline double psk_offset(int m) { return m >= 4 ? kPi / m : 0.0; }

inline cplx psk_point(int k, int m) { return std::polar(1.0, 2.0 * kPi * k / m + psk_offset(m)); }

inline std::vector<cplx> psk_map(std::span<const std::uint8_t> bits, int m) {
  const int b = bits_per_symbol(m);
  require(bits.size() % static_cast<std::size_t>(b) == 0, ErrorCode::DimensionMismatch,
          "bit count must be a multiple of log2(M)");
  std::vector<int> position_of_label(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) position_of_label[static_cast<std::size_t>(k ^ (k >> 1))] = k;

  std::vector<cplx> out;
  out.reserve(bits.size() / static_cast<std::size_t>(b));
  for (std::size_t i = 0; i < bits.size(); i += static_cast<std::size_t>(b)) {
    int label = 0;
    for (int j = 0; j < b; ++j) label = (label << 1) | (bits[i + static_cast<std::size_t>(j)] & 1);
    out.push_back(psk_point(position_of_label[static_cast<std::size_t>(label)], m));
  }
  return out;
}

/// Nearest-neighbour PSK decision: returns constellation positions.
inline int psk_decide(cplx y, int m) {
  double ang = std::arg(y) - psk_offset(m);
  int k = static_cast<int>(std::lround(ang * m / (2.0 * kPi)));
  return ((k % m) + m) % m;
}

inline std::vector<std::uint8_t> psk_demap(std::span<const cplx> symbols, int m) {
  const int b = bits_per_symbol(m);
  std::vector<std::uint8_t> out;
  out.reserve(symbols.size() * static_cast<std::size_t>(b));
  for (const auto& y : symbols) {
    const int k = psk_decide(y, m);
    const int label = k ^ (k >> 1);
    for (int j = b - 1; j >= 0; --j) out.push_back(static_cast<std::uint8_t>((label >> j) & 1));
  }
  return out;
}

}  // namespace trtc::tma
