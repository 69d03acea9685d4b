#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "goodpants/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"good pants pipeline"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::map<std::string, std::string> flag_values;
  app.add_option("--config", config_path, "key = value config file");
  // flag name -> config key
  const std::pair<const char*, const char*> flags[] = {
      {"--out", "out"}, {"--seed", "seed"}, {"--threads", "threads"},
      {"--eps", "eps"}, {"--R", "R"},       {"--max-word-len", "max_word_len"},
  };
  std::map<std::string, CLI::Option*> opts;
  for (auto& [flag, key] : flags) opts[key] = app.add_option(flag, flag_values[key]);
  auto set_opt = app.add_option("--set", [&](const CLI::results_t& rs) {
    for (const auto& r : rs) {
      auto eq = r.find('=');
      if (eq == std::string::npos) return false;
      overrides[r.substr(0, eq)] = r.substr(eq + 1);
    }
    return true;
  }, "extra key=value overrides");
  set_opt->allow_extra_args(false)->expected(1, 1 << 20)->type_name("KEY=VALUE");

  using Stage = gp::StageResult (*)(const gp::RunConfig&);
  const std::pair<const char*, Stage> stages[] = {
      {"curves", gp::cmd_curves},   {"pants", gp::cmd_pants},     {"match", gp::cmd_match},
      {"assemble", gp::cmd_assemble}, {"connect", gp::cmd_connect}, {"stats", gp::cmd_stats},
      {"flow", gp::cmd_flow},
  };
  std::map<CLI::App*, Stage> subs;
  for (auto& [name, fn] : stages) subs[app.add_subcommand(name)] = fn;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : gp::kExitUsage;
  }

  gp::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "missing config " << config_path << "\n";
        return gp::kExitMissingInput;
      }
      gp::parse_config(f, cfg);
      // relative group paths are taken from the config file's directory
      if (!cfg.group.empty() && std::filesystem::path(cfg.group).is_relative())
        cfg.group = (std::filesystem::path(config_path).parent_path() / cfg.group).string();
    }
    for (auto& [key, opt] : opts)
      if (opt->count()) cfg.set(key, flag_values[key]);
    for (auto& [key, value] : overrides) cfg.set(key, value);
  } catch (const gp::Error& e) {
    std::cerr << e.what() << "\n";
    return gp::exit_code_for(e.code());
  }

  for (auto& [sub, fn] : subs) {
    if (!sub->parsed()) continue;
    gp::StageResult r = gp::run_stage(fn, cfg);
    (r.code == gp::kExitOk || r.code == gp::kExitHallWitness ? std::cout : std::cerr)
        << sub->get_name() << ": " << r.summary << "\n";
    return r.code;
  }
  return gp::kExitUsage;
}
