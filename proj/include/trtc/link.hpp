// SPDX-License-Identifier: Apache-2.0
#pragma once

// End-to-end downlink demo (optimize -> compose -> TMA synthesis -> channel
// -> harmonic extraction -> PSK decision) and the estimation benchmark.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "trtc/chanest.hpp"
#include "trtc/channel.hpp"
#include "trtc/config.hpp"
#include "trtc/dl_opt.hpp"
#include "trtc/rng.hpp"
#include "trtc/sweep.hpp"
#include "trtc/tma.hpp"

namespace trtc {

struct LinkRow {
  int user = 0;
  double snr_db = 0.0;  // +inf for the noiseless pass
  int symbols = 0;
  int errors = 0;
  double realized_snr_db = 0.0;
  double analytic_ser = 0.0;  // interference-free M-PSK reference at the realized SNR

  double ser() const { return symbols > 0 ? static_cast<double>(errors) / symbols : 0.0; }
};

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Symbol error rate of Gray M-PSK in AWGN at symbol SNR `snr` (linear).
/// Exact for M = 2 and M = 4; the usual high-SNR approximation otherwise.
inline double psk_ser(int m, double snr) {
  if (m == 2) return q_function(std::sqrt(2.0 * snr));
  if (m == 4) {
    const double q = q_function(std::sqrt(snr));
    return 2.0 * q - q * q;
  }
  return 2.0 * q_function(std::sqrt(2.0 * snr) * std::sin(kPi / m));
}

struct LinkOptions {
  std::vector<double> snr_db;     // noiseless pass is always run first
  int symbols = 10000;
  std::uint64_t seed = 1;
};

/// Runs the full downlink chain. Each SNR point reuses the same symbols and
/// the same unit-variance noise draws, scaled to the target SNR.
inline std::vector<LinkRow> run_link_demo(const ExperimentConfig& c, const LinkOptions& opt) {
  c.validate();
  const int n = c.link.elements, k_users = c.link.users, m = c.link.psk_order;
  const int l = c.dl.harmonic_order;
  const int spp = c.link.samples_per_period;
  const double period = 1.0;

  ExperimentConfig cc = c;
  cc.dl.users = k_users;
  const dl::DlProblem pr = make_dl_problem(cc, n, derive_key(opt.seed, {static_cast<std::uint64_t>(Purpose::Channel)}));
  const dl::DlSolution sol = dl::alternating_optimize_dl(pr, dl_settings(cc));

  Rng sym_rng = make_rng(opt.seed, {static_cast<std::uint64_t>(Purpose::Symbols)});
  Rng noise_rng = make_rng(opt.seed, {static_cast<std::uint64_t>(Purpose::Noise)});
  const int bps = tma::bits_per_symbol(m);

  // transmitted labels and clean / noise-free extracted harmonics per user
  std::vector<std::vector<std::uint8_t>> bits(static_cast<std::size_t>(k_users));
  std::vector<std::vector<cplx>> clean(static_cast<std::size_t>(k_users));
  std::vector<std::vector<cplx>> gain(static_cast<std::size_t>(k_users));  // receiver's known effective gain
  std::vector<std::vector<cplx>> unit_noise(static_cast<std::size_t>(k_users));
  std::bernoulli_distribution coin(0.5);

  const RVec sqrt_p = sol.powers.cwiseSqrt();
  for (int start = 0; start < opt.symbols; start += c.link.slots_per_frame) {
    const int slots = std::min(c.link.slots_per_frame, opt.symbols - start);
    std::vector<CVec> x(static_cast<std::size_t>(slots));
    std::vector<CVec> s_slot(static_cast<std::size_t>(slots));
    for (int t = 0; t < slots; ++t) {
      CVec s(k_users);
      for (int k = 0; k < k_users; ++k) {
        std::vector<std::uint8_t> b(static_cast<std::size_t>(bps));
        for (auto& bit : b) bit = coin(sym_rng) ? 1 : 0;
        s(k) = tma::psk_map(b, m).front();
        auto& dst = bits[static_cast<std::size_t>(k)];
        dst.insert(dst.end(), b.begin(), b.end());
      }
      s_slot[static_cast<std::size_t>(t)] = s;
      x[static_cast<std::size_t>(t)] = tma::compose_element_symbols(sol.beams, sol.powers, s);
    }
    const tma::SymbolFrame frame = tma::synthesize_frame(x, l, period);

    for (int t = 0; t < slots; ++t) {
      // element waveforms for this slot, sampled once
      std::vector<RVec> wave(static_cast<std::size_t>(n));
      for (int e = 0; e < n; ++e)
        wave[static_cast<std::size_t>(e)] = tma::sample_waveform(frame.waveforms[static_cast<std::size_t>(t)][static_cast<std::size_t>(e)], spp);
      for (int k = 0; k < k_users; ++k) {
        std::vector<cplx> rx(static_cast<std::size_t>(spp), cplx{0.0, 0.0});
        for (int e = 0; e < n; ++e) {
          const cplx h = std::conj(pr.channels(e, k));
          for (int i = 0; i < spp; ++i) rx[static_cast<std::size_t>(i)] += h * wave[static_cast<std::size_t>(e)](i);
        }
        clean[static_cast<std::size_t>(k)].push_back(tma::extract_harmonic(rx, spp / period, period, l));
        const cplx eff = pr.channels.col(k).dot(sol.beams.col(k)) * sqrt_p(k) * frame.scaling;
        gain[static_cast<std::size_t>(k)].push_back(eff);
        // white noise of unit variance per harmonic: per-sample variance spp
        std::vector<cplx> nz(static_cast<std::size_t>(spp));
        for (auto& v : nz) v = cscg(noise_rng, static_cast<double>(spp));
        unit_noise[static_cast<std::size_t>(k)].push_back(tma::extract_harmonic(nz, spp / period, period, l));
      }
    }
  }

  std::vector<LinkRow> rows;
  std::vector<double> snrs{std::numeric_limits<double>::infinity()};
  snrs.insert(snrs.end(), opt.snr_db.begin(), opt.snr_db.end());
  for (double snr_db : snrs) {
    for (int k = 0; k < k_users; ++k) {
      const auto& y0 = clean[static_cast<std::size_t>(k)];
      double signal = 0.0;
      for (std::size_t i = 0; i < y0.size(); ++i) signal += std::norm(gain[static_cast<std::size_t>(k)][i]);
      signal /= static_cast<double>(y0.size());
      const double sigma = std::isinf(snr_db) ? 0.0 : std::sqrt(signal / db_to_linear(snr_db));

      std::vector<cplx> eq(y0.size());
      for (std::size_t i = 0; i < y0.size(); ++i) {
        const cplx y = y0[i] + sigma * unit_noise[static_cast<std::size_t>(k)][i];
        const cplx gk = gain[static_cast<std::size_t>(k)][i];
        eq[i] = y * std::conj(gk) / std::abs(gk);
      }
      const auto decided = tma::psk_demap(eq, m);
      const auto& sent = bits[static_cast<std::size_t>(k)];
      LinkRow row;
      row.user = k;
      row.snr_db = snr_db;
      row.symbols = static_cast<int>(y0.size());
      for (std::size_t i = 0; i < y0.size(); ++i) {
        bool bad = false;
        for (int j = 0; j < bps; ++j) bad = bad || decided[i * bps + j] != sent[i * bps + j];
        row.errors += bad ? 1 : 0;
      }
      row.realized_snr_db = std::isinf(snr_db) ? snr_db : 10.0 * std::log10(signal / (sigma * sigma));
      row.analytic_ser = std::isinf(snr_db) ? 0.0 : psk_ser(m, signal / (sigma * sigma));
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::string link_csv(const std::vector<LinkRow>& rows) {
  std::string out = "user,snr_db,symbols,symbol_errors,ser,analytic_ser,realized_snr_db\n";
  for (const auto& r : rows) {
    out += std::to_string(r.user) + "," + (std::isinf(r.snr_db) ? std::string("inf") : format_double(r.snr_db)) + "," +
           std::to_string(r.symbols) + "," + std::to_string(r.errors) + "," + format_double(r.ser()) + "," +
           format_double(r.analytic_ser) + "," +
           (std::isinf(r.realized_snr_db) ? std::string("inf") : format_double(r.realized_snr_db)) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Estimation benchmark: per-coefficient MSE against pilot SNR.

struct EstimationRow {
  double snr_db = 0.0;
  std::string estimator;
  int pilots = 0;
  int trials = 0;
  double mse = 0.0;  // normalized by the mean coefficient power
};

struct EstimationOptions {
  std::vector<double> snr_db{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  int elements = 16;
  int pilots = 32;
  int trials = 500;
  std::uint64_t seed = 1;
};

/// LS and MMSE on unit-power i.i.d. channels with orthogonal unit-modulus
/// pilots, and LS recovery of the cascaded uplink channel g .* h of the
/// configured geometry with DFT surface patterns.
inline std::vector<EstimationRow> run_estimation_bench(const ExperimentConfig& c, const EstimationOptions& opt) {
  const int n = opt.elements, t = opt.pilots;
  require(t >= n, ErrorCode::RankDeficient, "need at least as many pilots as elements");
  const CMat x = chanest::dft_patterns(t, n);
  const CMat prior = CMat::Identity(n, n);
  const channel::Geometry geom = c.geometry_for(n, 1);
  const CVec g = channel::near_field_channel(geom);

  std::vector<EstimationRow> rows;
  for (double snr_db : opt.snr_db) {
    const double s2 = 1.0 / db_to_linear(snr_db);
    Rng rng = make_rng(opt.seed, {static_cast<std::uint64_t>(Purpose::Noise),
                                  static_cast<std::uint64_t>(std::llround(snr_db * 1000.0))});
    double ls = 0.0, mmse = 0.0, casc = 0.0;
    for (int trial = 0; trial < opt.trials; ++trial) {
      const CVec h = cscg_vector(rng, n);
      const CVec y = x * h + cscg_vector(rng, t, s2);
      const chanest::PilotBlock block{x, y, s2};
      ls += (chanest::ls_estimate(block).col(0) - h).squaredNorm() / n;
      mmse += (chanest::mmse_estimate(block, prior).col(0) - h).squaredNorm() / n;

      const CMat hu = channel::dl_user_channels(geom, c.fading_params(), rng);
      const CVec cascaded = g.cwiseProduct(hu.col(0));
      const double power = cascaded.squaredNorm() / n;
      const CVec yc = x * cascaded + cscg_vector(rng, t, s2 * power);
      const CVec est = chanest::cascaded_ul_estimate(yc, CVec::Ones(t), x);
      casc += (est - cascaded).squaredNorm() / (n * power);
    }
    rows.push_back({snr_db, "ls", t, opt.trials, ls / opt.trials});
    rows.push_back({snr_db, "mmse", t, opt.trials, mmse / opt.trials});
    rows.push_back({snr_db, "cascaded_ls", t, opt.trials, casc / opt.trials});
  }
  return rows;
}

inline std::string estimation_csv(const std::vector<EstimationRow>& rows) {
  std::string out = "snr_db,estimator,pilots,trials,mse\n";
  for (const auto& r : rows) {
    out += format_double(r.snr_db) + "," + r.estimator + "," + std::to_string(r.pilots) + "," +
           std::to_string(r.trials) + "," + format_double(r.mse) + "\n";
  }
  return out;
}

}  // namespace trtc
