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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fshnn/evaluation/evaluation.hpp"

namespace fshnn {

// JSON-lines, one object per line:
//   {"image_id": int, "bbox": [x, y, w, h], "score": float, "label": int,
//    "uncertainty": float}   ("uncertainty" optional)
// Ground truths carry only image_id, bbox and label. Blank lines are
// skipped; unknown fields, malformed lines and invalid values raise
// FormatError naming the 1-based line number.
std::vector<DetectionRecord> parse_detection_records(const std::string& text);
std::vector<GroundTruth> parse_ground_truths(const std::string& text);

std::string format_detection_records(const std::vector<DetectionRecord>& records);
std::string format_ground_truths(const std::vector<GroundTruth>& records);

std::vector<DetectionRecord> read_detection_records(const std::filesystem::path& path);
std::vector<GroundTruth> read_ground_truths(const std::filesystem::path& path);
void write_detection_records(const std::filesystem::path& path,
                             const std::vector<DetectionRecord>& records);
void write_ground_truths(const std::filesystem::path& path,
                         const std::vector<GroundTruth>& records);

// Writes text through a temp file and rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace fshnn
