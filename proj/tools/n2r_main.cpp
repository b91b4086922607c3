// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
//
// n2r: fit a voxel radiance field to posed images of a synthetic scene,
// render pose-transformed test images, and hunt for behavioral
// inconsistencies in image-processing systems under test.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "n2r/pipeline.hpp"

namespace {

// --key=value pairs left over after CLI11 parsing become config overrides.
void apply_extra_overrides(nlohmann::json& doc, const std::vector<std::string>& extras) {
  for (const auto& raw : extras) {
    if (raw.rfind("--", 0) != 0)
      throw n2r::ConfigError("unrecognized argument: " + raw);
    const std::string body = raw.substr(2);
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw n2r::ConfigError("config overrides use --key=value, got: " + raw);
    n2r::apply_config_override(doc, body.substr(0, eq), body.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NeRF-to-real metamorphic testing toolkit"};
  app.require_subcommand(1);
  app.allow_extras();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");

  struct SubDef {
    const char* name;
    const char* help;
    int (*fn)(const n2r::Config&, std::ostream&);
  };
  const SubDef defs[] = {
      {"synth", "generate a synthetic posed dataset", n2r::cmd_synth},
      {"fit", "fit the voxel radiance field to the dataset", n2r::cmd_fit},
      {"render", "render eval frames from a checkpoint", n2r::cmd_render},
      {"transform", "write pose files for the transformation suite", n2r::cmd_transform},
      {"mutate", "write mutated copies of the dataset images", n2r::cmd_mutate},
      {"test", "run the metamorphic campaign and write the report", n2r::cmd_test},
      {"analyze", "re-aggregate and summarize an existing report", n2r::cmd_analyze},
      {"bench", "measure render frame rates per resolution", n2r::cmd_bench},
  };
  for (const auto& def : defs) {
    auto* sub = app.add_subcommand(def.name, def.help);
    sub->allow_extras();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw n2r::IoFailure("cannot read config: " + config_path);
      in >> doc;
    }

    auto* sub = app.get_subcommands().front();
    std::vector<std::string> extras = app.remaining();
    const auto sub_extras = sub->remaining();
    extras.insert(extras.end(), sub_extras.begin(), sub_extras.end());
    apply_extra_overrides(doc, extras);

    const n2r::Config cfg = n2r::config_from_json(doc);

    for (const auto& def : defs)
      if (sub->get_name() == def.name) return def.fn(cfg, std::cout);
    return 1;
  } catch (const n2r::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const n2r::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad json: " << e.what() << "\n";
    return 1;
  }
}
