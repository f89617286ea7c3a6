// SPDX-License-Identifier: Apache-2.0
//
// trtc: command-line front end for the sweeps, the link demo, the
// estimation benchmark and config validation.
//
// Exit codes: 0 success, 1 invalid configuration or arguments, 2 I/O error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trtc/trtc.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIo = 2;

trtc::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream is(path);
  if (!is) throw trtc::Error(trtc::ErrorCode::IoError, "cannot open config '" + path + "'");
  return trtc::parse_config(is);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    trtc::write_text(out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmissive-RIS transceiver simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  bool timing = false;
  std::vector<double> snr_list;
  std::optional<int> symbols;

  auto add_sweep = [&](const std::string& name, const std::string& desc) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", config_path, "experiment config (INI)")->required();
    cmd->add_option("--out", out_path, "output file (.csv or .json)")->required();
    cmd->add_option("--seed", seed, "override sweep.seed");
    cmd->add_option("--trials", trials, "override sweep.trials");
    cmd->add_option("--threads", threads, "override sweep.threads");
    cmd->add_flag("--timing", timing, "record wall_ms (output no longer byte-reproducible)");
    return cmd;
  };
  auto* dl_cmd = add_sweep("dl-sweep", "downlink sum-rate vs number of elements");
  auto* ul_cmd = add_sweep("ul-sweep", "uplink sum-rate vs number of elements");

  auto* tma_cmd = app.add_subcommand("tma-demo", "end-to-end TMA downlink link: SER vs SNR");
  tma_cmd->add_option("--config", config_path, "experiment config (INI)");
  tma_cmd->add_option("--snr-list", snr_list, "SNR points in dB")->delimiter(',');
  tma_cmd->add_option("--symbols", symbols, "symbols per user");
  tma_cmd->add_option("--seed", seed, "random seed");
  tma_cmd->add_option("--out", out_path, "CSV output (default stdout)");

  auto* est_cmd = app.add_subcommand("chanest-bench", "estimation MSE vs pilot SNR");
  est_cmd->add_option("--config", config_path, "experiment config (INI)");
  est_cmd->add_option("--snr-list", snr_list, "SNR points in dB")->delimiter(',');
  est_cmd->add_option("--trials", trials, "trials per SNR point");
  est_cmd->add_option("--seed", seed, "random seed");
  est_cmd->add_option("--out", out_path, "CSV output (default stdout)");

  auto* val_cmd = app.add_subcommand("validate", "check a config file");
  val_cmd->add_option("--config", config_path, "experiment config (INI)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    trtc::ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.sweep.seed = *seed;
    if (trials) cfg.sweep.trials = *trials;
    if (threads) cfg.sweep.threads = *threads;

    if (*dl_cmd || *ul_cmd) {
      const trtc::SweepOptions opt{timing};
      const trtc::SweepResult r = *dl_cmd ? trtc::run_dl_sweep(cfg, opt) : trtc::run_ul_sweep(cfg, opt);
      trtc::write_results(r, out_path, trtc::format_for_path(out_path));
      for (const auto& p : trtc::point_means(r))
        std::cerr << p.algorithm << " N=" << p.n_elements << " mean=" << p.mean << " bps/Hz\n";
    } else if (*tma_cmd) {
      trtc::LinkOptions opt;
      opt.snr_db = snr_list.empty() ? cfg.link.snr_db : snr_list;
      opt.symbols = symbols.value_or(cfg.link.symbols);
      opt.seed = seed.value_or(cfg.sweep.seed);
      emit(trtc::link_csv(trtc::run_link_demo(cfg, opt)), out_path);
    } else if (*est_cmd) {
      trtc::EstimationOptions opt;
      if (!snr_list.empty()) opt.snr_db = snr_list;
      if (trials) opt.trials = *trials;
      opt.seed = seed.value_or(cfg.sweep.seed);
      emit(trtc::estimation_csv(trtc::run_estimation_bench(cfg, opt)), out_path);
    } else if (*val_cmd) {
      const auto problems = cfg.problems();
      for (const auto& p : problems) std::cerr << "invalid: " << p << "\n";
      if (!problems.empty()) return kInvalid;
      std::cout << "ok\n";
    }
  } catch (const trtc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == trtc::ErrorCode::IoError ? kIo : kInvalid;
  }
  return kOk;
}
