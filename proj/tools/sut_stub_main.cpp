// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference external SUT speaking the line-oriented JSON protocol on
// stdin/stdout. Useful as a plugging example and as a test double:
//   --task classify --classes K   uniform probabilities over K classes
//   --task detect --points N      a fixed diagonal grid of N points
//   --malform-id ID               reply with garbage to that request id
//   --drop-id ID                  exit without replying to that request id

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

int main(int argc, char** argv) {
  CLI::App app{"echo-stub external SUT"};
  std::string task = "classify";
  int classes = 3;
  int points = 5;
  long long malform_id = -1;
  long long drop_id = -1;
  app.add_option("--task", task)->check(CLI::IsMember({"classify", "detect"}));
  app.add_option("--classes", classes)->check(CLI::PositiveNumber);
  app.add_option("--points", points)->check(CLI::PositiveNumber);
  app.add_option("--malform-id", malform_id);
  app.add_option("--drop-id", drop_id);
  CLI11_PARSE(app, argc, argv);

  std::string line;
  while (std::getline(std::cin, line)) {
    nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
    if (request.is_discarded() || !request.contains("id")) {
      std::cout << "{\"error\": \"bad request\"}" << std::endl;
      continue;
    }
    const auto id = request.at("id").get<std::uint64_t>();
    if (static_cast<long long>(id) == drop_id) return 0;
    if (static_cast<long long>(id) == malform_id) {
      std::cout << "this is not json" << std::endl;
      continue;
    }

    nlohmann::json reply;
    reply["id"] = id;
    if (task == "classify") {
      std::vector<double> probs(static_cast<std::size_t>(classes),
                                1.0 / static_cast<double>(classes));
      reply["probs"] = probs;
    } else {
      const int width = request.value("width", 64);
      const int height = request.value("height", 64);
      nlohmann::json pts = nlohmann::json::array();
      for (int k = 0; k < points; ++k) {
        const double x = (k * 13 + 5) % std::max(1, width);
        const double y = (k * 7 + 3) % std::max(1, height);
        pts.push_back({x, y, 1.0 - 0.01 * k});
      }
      reply["points"] = pts;
    }
    std::cout << reply.dump() << std::endl;
  }
  return 0;
}
