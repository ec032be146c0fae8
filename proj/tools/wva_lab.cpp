// wva-lab: config-driven runner for the weak value amplification experiments.
//
//   wva-lab run <config> [--out DIR] [--seed N] [--threads N]
//   wva-lab validate <config>
//
// Exit codes: 0 success, 2 config error, 3 domain error, 4 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wva/config.hpp"
#include "wva/error.hpp"
#include "wva/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitIo = 4;

void write_report(const wva::RunReport& r, const std::string& dir) {
  const std::string path = (std::filesystem::path(dir) / "report.json").string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << wva::to_json(r).dump(2) << "\n";
  out.close();
  if (!out) throw wva::IoError("cannot write `" + path + "`");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak value amplification lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file (key = value, or JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config's `output`)");
  run->add_option("--seed", seed, "Recorded in the report; all experiments are deterministic");
  run->add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::Range(1u, 1024u));

  auto* validate = app.add_subcommand("validate", "Parse a config and print it fully resolved");
  validate->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto cfg = wva::validate_config(config_path);
    if (*validate) {
      std::cout << wva::to_json(cfg).dump(2) << "\n";
      return 0;
    }
    const auto report = wva::run_experiment(cfg, {out_dir, threads, seed});
    const std::string dir = !out_dir.empty() ? out_dir : (!cfg.output.empty() ? cfg.output : ".");
    write_report(report, dir);
    std::cout << wva::to_string(report.experiment) << ":";
    for (const auto& [k, v] : report.headline) std::cout << " " << k << "=" << wva::csv::format(v);
    std::cout << "\n";
    for (const auto& p : report.outputs) std::cout << "wrote " << p << "\n";
    return 0;
  } catch (const wva::ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const wva::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const wva::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}
