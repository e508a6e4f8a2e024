/*
 * Copyright 2026 The Grasplab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "grasplab/config.h"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "grasplab/io_util.h"

namespace grasplab {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void Bad(std::string_view key, std::string_view value) {
  throw std::invalid_argument("config: bad value '" + std::string(value) +
                              "' for " + std::string(key));
}

template <typename T>
T ParseScalar(std::string_view key, std::string_view text) {
  text = Trim(text);
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    Bad(key, text);
  }
  return v;
}

std::vector<double> ParseList(std::string_view key, std::string_view text) {
  text = Trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') Bad(key, text);
    text = Trim(text.substr(1, text.size() - 2));
  }
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    out.push_back(ParseScalar<double>(key, text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string Number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string List(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += Number(values[i]);
  }
  return out + "]";
}

using Setter = std::function<void(PipelineConfig&, std::string_view,
                                  std::string_view)>;

template <typename T, typename Get>
Setter Scalar(Get get) {
  return [get](PipelineConfig& c, std::string_view key, std::string_view v) {
    get(c) = ParseScalar<T>(key, v);
  };
}

const std::map<std::string, Setter, std::less<>>& Setters() {
  static const auto* setters = new std::map<std::string, Setter, std::less<>>{
      {"gripper.max_width",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.gripper.max_width; })},
      {"gripper.finger_length",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.gripper.finger_length; })},
      {"gripper.finger_thickness",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.gripper.finger_thickness; })},
      {"gripper.base_depth",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.gripper.base_depth; })},
      {"gripper.angle_count",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.gripper.angle_count; })},
      {"gripper.depth_grid",
       [](PipelineConfig& c, std::string_view k, std::string_view v) {
         c.gripper.depth_grid = ParseList(k, v);
       }},
      {"annotation.view_count",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.view_count; })},
      {"annotation.voxel",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.voxel; })},
      {"annotation.mu_grid",
       [](PipelineConfig& c, std::string_view k, std::string_view v) {
         c.mu_grid = ParseList(k, v);
       }},
      {"annotation.top_views",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.top_views; })},
      {"bank.size", Scalar<int>([](PipelineConfig& c) -> int& { return c.bank.size; })},
      {"bank.alpha",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.bank.alpha; })},
      {"bank.feature_dim",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.bank.feature_dim; })},
      {"bank.model_dim",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.bank.model_dim; })},
      {"bank.heads", Scalar<int>([](PipelineConfig& c) -> int& { return c.bank.heads; })},
      {"network.points",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.network.points; })},
      {"network.seed_points",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.network.seed_points; })},
      {"network.c1", Scalar<int>([](PipelineConfig& c) -> int& { return c.network.c1; })},
      {"network.c2", Scalar<int>([](PipelineConfig& c) -> int& { return c.network.c2; })},
      {"network.group_size",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.network.group_size; })},
      {"noise.sigma0",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.noise.sigma0; })},
      {"noise.depth_gain",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.noise.depth_gain; })},
      {"noise.edge_band",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.noise.edge_band; })},
      {"noise.edge_sigma",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.noise.edge_sigma; })},
      {"noise.hole_rate",
       Scalar<double>([](PipelineConfig& c) -> double& { return c.noise.hole_rate; })},
      {"proposal.top_m",
       Scalar<int>([](PipelineConfig& c) -> int& { return c.top_m; })},
      {"run.seed",
       Scalar<std::uint64_t>([](PipelineConfig& c) -> std::uint64_t& { return c.seed; })},
  };
  return *setters;
}

}  // namespace

void PipelineConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  gripper.Validate();
  require(view_count >= 1, "annotation.view_count must be >= 1");
  require(voxel > 0.0, "annotation.voxel must be > 0");
  require(top_views >= 1, "annotation.top_views must be >= 1");
  require(!mu_grid.empty(), "annotation.mu_grid is empty");
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    require(mu_grid[i] > 0.0 && (i == 0 || mu_grid[i] > mu_grid[i - 1]),
            "annotation.mu_grid must be positive and increasing");
  }
  require(bank.size >= 1, "bank.size must be >= 1");
  require(bank.alpha >= 0.0 && bank.alpha <= 1.0, "bank.alpha outside [0, 1]");
  require(bank.feature_dim >= 1 && bank.model_dim >= 1,
          "bank dimensions must be >= 1");
  require(bank.heads >= 1 && bank.model_dim % bank.heads == 0,
          "bank.model_dim must be divisible by bank.heads");
  require(network.points >= 1 && network.seed_points >= 1 && network.c1 >= 1 &&
              network.c2 >= 1 && network.group_size >= 1,
          "network sizes must be >= 1");
  noise.Validate();
  require(top_m >= 0, "proposal.top_m must be >= 0");
}

AnnotationConfig PipelineConfig::Annotation() const {
  AnnotationConfig a;
  a.view_count = view_count;
  a.gripper = gripper;
  a.mu_grid = mu_grid;
  a.voxel = voxel;
  return a;
}

void ApplyOverride(PipelineConfig& config, std::string_view key,
                   std::string_view value) {
  const auto& setters = Setters();
  const auto it = setters.find(key);
  if (it == setters.end()) {
    throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
  }
  it->second(config, key, value);
}

PipelineConfig ParseConfig(const std::string& text) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    const auto hash = s.find('#');
    if (hash != std::string_view::npos) s = s.substr(0, hash);
    s = Trim(s);
    if (s.empty()) continue;
    if (s.front() == '[' && s.back() == ']' && s.find('=') == std::string_view::npos) {
      section = std::string(Trim(s.substr(1, s.size() - 2)));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string_view name = Trim(s.substr(0, eq));
    const std::string key = name.find('.') == std::string_view::npos && !section.empty()
                                ? section + "." + std::string(name)
                                : std::string(name);
    ApplyOverride(config, key, Trim(s.substr(eq + 1)));
  }
  config.Validate();
  return config;
}

std::string SerializeConfig(const PipelineConfig& c) {
  std::ostringstream out;
  out << "[annotation]\n"
      << "view_count = " << c.view_count << "\n"
      << "voxel = " << Number(c.voxel) << "\n"
      << "mu_grid = " << List(c.mu_grid) << "\n"
      << "top_views = " << c.top_views << "\n\n"
      << "[gripper]\n"
      << "max_width = " << Number(c.gripper.max_width) << "\n"
      << "finger_length = " << Number(c.gripper.finger_length) << "\n"
      << "finger_thickness = " << Number(c.gripper.finger_thickness) << "\n"
      << "base_depth = " << Number(c.gripper.base_depth) << "\n"
      << "depth_grid = " << List(c.gripper.depth_grid) << "\n"
      << "angle_count = " << c.gripper.angle_count << "\n\n"
      << "[bank]\n"
      << "size = " << c.bank.size << "\n"
      << "alpha = " << Number(c.bank.alpha) << "\n"
      << "feature_dim = " << c.bank.feature_dim << "\n"
      << "model_dim = " << c.bank.model_dim << "\n"
      << "heads = " << c.bank.heads << "\n\n"
      << "[network]\n"
      << "points = " << c.network.points << "\n"
      << "seed_points = " << c.network.seed_points << "\n"
      << "c1 = " << c.network.c1 << "\n"
      << "c2 = " << c.network.c2 << "\n"
      << "group_size = " << c.network.group_size << "\n\n"
      << "[noise]\n"
      << "sigma0 = " << Number(c.noise.sigma0) << "\n"
      << "depth_gain = " << Number(c.noise.depth_gain) << "\n"
      << "edge_band = " << c.noise.edge_band << "\n"
      << "edge_sigma = " << Number(c.noise.edge_sigma) << "\n"
      << "hole_rate = " << Number(c.noise.hole_rate) << "\n\n"
      << "[proposal]\n"
      << "top_m = " << c.top_m << "\n\n"
      << "[run]\n"
      << "seed = " << c.seed << "\n";
  return out.str();
}

PipelineConfig LoadConfig(const std::string& path) {
  return ParseConfig(ReadFileBytes(path));
}

std::uint64_t StageSeed(std::uint64_t root, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : stage) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = root ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace grasplab
