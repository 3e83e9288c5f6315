/* Copyright 2026 The Hemi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "hemi/recording.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hemi/error.h"

namespace hemi::signal {
namespace {

constexpr std::array<std::string_view, kNumChannels> kChannelLabels = {
    "O2-A2",  "O1-A1",  "P4-A2",  "P3-A1", "C4-A2",  "C3-A1",  "F4-A2",
    "F3-A1",  "Fp2-A2", "Fp1-A1", "T6-A2", "T5-A1",  "T4-A2",  "T3-A1",
    "F8-A2",  "F7-A1",  "Oz-A2",  "Pz-A1", "Cz-A2",  "Fz-A1",  "Fpz-A2",
    "FT7-A1", "FC3-A1", "Fcz-A1", "FC4-A2", "FT8-A2", "TP7-A1", "CP3-A1",
    "Cpz-A1", "CP4-A2", "TP8-A2"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  if (first == last) return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string_view dataset_name(Dataset dataset) {
  return dataset == Dataset::kMonaLisa ? "MonaLisa" : "NeckerCube";
}

std::string_view dataset_short_name(Dataset dataset) {
  return dataset == Dataset::kMonaLisa ? "mona" : "necker";
}

Dataset parse_dataset(std::string_view name) {
  const std::string n = lower(name);
  if (n == "monalisa" || n == "mona" || n == "mona_lisa") {
    return Dataset::kMonaLisa;
  }
  if (n == "neckercube" || n == "necker" || n == "necker_cube") {
    return Dataset::kNeckerCube;
  }
  throw ValidationError("unknown dataset '" + std::string(name) + "'");
}

const std::array<std::string_view, kNumChannels>& channel_labels() {
  return kChannelLabels;
}

int label_channel(std::string_view label) {
  if (label.size() > 3) {
    const std::string_view suffix = label.substr(label.size() - 3);
    if (suffix == "-A1") return static_cast<int>(Hemisphere::kLeft);
    if (suffix == "-A2") return static_cast<int>(Hemisphere::kRight);
  }
  throw UnknownChannelError("channel '" + std::string(label) +
                            "' has no -A1/-A2 reference suffix");
}

void RawRecording::validate(std::size_t expected_length,
                            std::string_view source) const {
  const std::string where(source);
  if (samples.empty()) throw FormatError(where + ": recording has no channels");
  if (channel_labels.size() != kNumChannels || samples.size() != kNumChannels) {
    throw FormatError(where + ": expected " + std::to_string(kNumChannels) +
                      " channels, found " + std::to_string(samples.size()));
  }
  for (std::size_t c = 0; c < samples.size(); ++c) {
    try {
      label_channel(channel_labels[c]);
    } catch (const UnknownChannelError& e) {
      throw FormatError(where + ": " + e.what());
    }
    const std::size_t want = expected_length ? expected_length : samples[0].size();
    if (samples[c].size() != want || want == 0) {
      throw FormatError(where + ": channel '" + channel_labels[c] + "' has " +
                        std::to_string(samples[c].size()) +
                        " samples, expected " + std::to_string(want));
    }
  }
}

std::string recording_file_name(const RawRecording& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_p%02d_i%02d.txt",
                std::string(dataset_name(r.dataset)).c_str(), r.participant,
                static_cast<int>(std::lround(r.intensity * 10.0)));
  return buf;
}

void save_recording(const RawRecording& recording,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write recording " + path.string());
  std::string line = "# dataset=";
  line += dataset_name(recording.dataset);
  line += " participant=" + std::to_string(recording.participant);
  line += " intensity=";
  append_double(line, recording.intensity);
  line += " rate=";
  append_double(line, recording.sample_rate);
  line += '\n';
  out << line;
  for (std::size_t c = 0; c < recording.samples.size(); ++c) {
    line.clear();
    line += recording.channel_labels.at(c);
    for (double v : recording.samples[c]) {
      line += ',';
      append_double(line, v);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing recording " + path.string());
}

RawRecording load_recording(const std::filesystem::path& path,
                            std::size_t expected_length) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read recording " + path.string());
  const std::string file = path.string();
  auto error_at = [&](std::size_t line_no, const std::string& what) {
    return FormatError(file + ":" + std::to_string(line_no) + ": " + what);
  };

  RawRecording rec;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw error_at(1, "empty file");
  ++line_no;
  if (line.rfind("# ", 0) != 0) throw error_at(1, "missing '# ' header line");
  bool have_dataset = false, have_participant = false, have_intensity = false;
  {
    std::istringstream fields(line.substr(2));
    std::string field;
    while (fields >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw error_at(1, "bad header field '" + field + "'");
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      double number = 0.0;
      if (key == "dataset") {
        try {
          rec.dataset = parse_dataset(value);
        } catch (const ValidationError& e) {
          throw error_at(1, e.what());
        }
        have_dataset = true;
      } else if (key == "participant") {
        if (!parse_double(value, number) || number != std::floor(number)) {
          throw error_at(1, "bad participant '" + value + "'");
        }
        rec.participant = static_cast<int>(number);
        have_participant = true;
      } else if (key == "intensity") {
        if (!parse_double(value, number)) {
          throw error_at(1, "bad intensity '" + value + "'");
        }
        rec.intensity = number;
        have_intensity = true;
      } else if (key == "rate") {
        if (!parse_double(value, number) || !(number > 0.0)) {
          throw error_at(1, "bad rate '" + value + "'");
        }
        rec.sample_rate = number;
      } else {
        throw error_at(1, "unknown header key '" + key + "'");
      }
    }
  }
  if (!have_dataset || !have_participant || !have_intensity) {
    throw error_at(1, "header needs dataset, participant and intensity");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string label = line.substr(0, comma);
    try {
      label_channel(label);
    } catch (const UnknownChannelError& e) {
      throw error_at(line_no, e.what());
    }
    std::vector<double> values;
    if (expected_length) values.reserve(expected_length);
    std::size_t pos = comma;
    while (pos != std::string::npos) {
      const std::size_t next = line.find(',', pos + 1);
      const std::string_view token =
          std::string_view(line).substr(pos + 1, next == std::string::npos
                                                     ? std::string::npos
                                                     : next - pos - 1);
      double v = 0.0;
      if (!parse_double(token, v) || !std::isfinite(v)) {
        throw error_at(line_no, "bad sample value '" + std::string(token) + "'");
      }
      values.push_back(v);
      pos = next;
    }
    const std::size_t want = expected_length ? expected_length
                             : rec.samples.empty() ? values.size()
                                                   : rec.samples[0].size();
    if (values.size() != want || want == 0) {
      throw error_at(line_no, "channel '" + label + "' has " +
                                  std::to_string(values.size()) +
                                  " samples, expected " + std::to_string(want));
    }
    rec.channel_labels.push_back(label);
    rec.samples.push_back(std::move(values));
  }
  if (rec.samples.empty()) {
    throw error_at(line_no, "recording has no channels (header only)");
  }
  if (rec.samples.size() != kNumChannels) {
    throw error_at(line_no, "expected " + std::to_string(kNumChannels) +
                                " channels, found " +
                                std::to_string(rec.samples.size()));
  }
  return rec;
}

void save_recordings(const std::vector<RawRecording>& recordings,
                     const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  for (const RawRecording& r : recordings) {
    save_recording(r, dir / recording_file_name(r));
  }
}

std::vector<RawRecording> load_recordings(const std::filesystem::path& dir,
                                          std::size_t expected_length) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("corpus directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RawRecording> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_recording(f, expected_length));
  return out;
}

}  // namespace hemi::signal
