// Copyright 2026 The FSHNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fshnn/io/records.hpp"

#include <set>
#include <sstream>

#include "fshnn/error.hpp"
#include "fshnn/io/idx.hpp"
#include "json.hpp"

namespace fshnn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw FormatError("line " + std::to_string(line) + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::set<std::string>& required, std::size_t line) {
  if (!obj.is_object()) fail(line, "expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(line, "unknown field '" + key + "'");
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail(line, "missing field '" + key + "'");
  }
}

long long integer_field(const json& obj, const char* key, std::size_t line) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(line, std::string("'") + key + "' must be an integer");
  return v.get<long long>();
}

double number_field(const json& obj, const char* key, std::size_t line) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(line, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

BBox bbox_field(const json& obj, std::size_t line) {
  const auto& v = obj.at("bbox");
  if (!v.is_array() || v.size() != 4) fail(line, "'bbox' must be [x, y, w, h]");
  for (const auto& e : v) {
    if (!e.is_number()) fail(line, "'bbox' entries must be numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
          v[3].get<double>()};
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(number, std::string("malformed JSON: ") + e.what());
    }
    fn(obj, number);
  }
}

json bbox_json(const BBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

}  // namespace

std::vector<DetectionRecord> parse_detection_records(const std::string& text) {
  std::vector<DetectionRecord> out;
  for_each_line(text, [&](const json& obj, std::size_t line) {
    check_keys(obj, {"image_id", "bbox", "score", "label", "uncertainty"},
               {"image_id", "bbox", "score", "label"}, line);
    DetectionRecord r;
    r.image_id = integer_field(obj, "image_id", line);
    r.bbox = bbox_field(obj, line);
    r.score = number_field(obj, "score", line);
    r.label = integer_field(obj, "label", line);
    if (obj.contains("uncertainty")) r.uncertainty = number_field(obj, "uncertainty", line);
    try {
      validate(r);
    } catch (const InputError& e) {
      fail(line, e.what());
    }
    out.push_back(r);
  });
  return out;
}

std::vector<GroundTruth> parse_ground_truths(const std::string& text) {
  std::vector<GroundTruth> out;
  for_each_line(text, [&](const json& obj, std::size_t line) {
    check_keys(obj, {"image_id", "bbox", "label"}, {"image_id", "bbox", "label"}, line);
    GroundTruth g;
    g.image_id = integer_field(obj, "image_id", line);
    g.bbox = bbox_field(obj, line);
    g.label = integer_field(obj, "label", line);
    try {
      validate(g);
    } catch (const InputError& e) {
      fail(line, e.what());
    }
    out.push_back(g);
  });
  return out;
}

std::string format_detection_records(const std::vector<DetectionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json obj = {{"image_id", r.image_id},
                {"bbox", bbox_json(r.bbox)},
                {"score", r.score},
                {"label", r.label}};
    if (r.uncertainty) obj["uncertainty"] = *r.uncertainty;
    out += obj.dump() + "\n";
  }
  return out;
}

std::string format_ground_truths(const std::vector<GroundTruth>& records) {
  std::string out;
  for (const auto& g : records) {
    const json obj = {
        {"image_id", g.image_id}, {"bbox", bbox_json(g.bbox)}, {"label", g.label}};
    out += obj.dump() + "\n";
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<DetectionRecord> read_detection_records(const std::filesystem::path& path) {
  return parse_detection_records(read_text(path));
}

std::vector<GroundTruth> read_ground_truths(const std::filesystem::path& path) {
  return parse_ground_truths(read_text(path));
}

void write_detection_records(const std::filesystem::path& path,
                             const std::vector<DetectionRecord>& records) {
  write_text_atomic(path, format_detection_records(records));
}

void write_ground_truths(const std::filesystem::path& path,
                         const std::vector<GroundTruth>& records) {
  write_text_atomic(path, format_ground_truths(records));
}

}  // namespace fshnn
