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

#include "hemi/report.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "hemi/error.h"

namespace hemi::runner {
namespace {

using nlohmann::json;

constexpr std::string_view kHeader =
    "rhythm,dataset,model,optimizer,train_acc,val_acc,test_acc,precision,"
    "recall,specificity,f1,roc_auc,efficient_class,shap_sign,epochs,"
    "preprocessing_s,train_s,inference_s,shap_s";
constexpr std::size_t kColumns = 19;

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string metric(double v, bool degenerate) {
  return degenerate ? "0*" : number(v);
}

std::string seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

double parse_number(std::string_view cell, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || p != cell.data() + cell.size()) {
    throw FormatError("report line " + std::to_string(line) + ": bad number '" +
                      std::string(cell) + "'");
  }
  return v;
}

double parse_metric(std::string_view cell, bool& degenerate, std::size_t line) {
  degenerate = cell == "0*";
  return degenerate ? 0.0 : parse_number(cell, line);
}

// Key columns shared by both formats.
void parse_key(RunResult& r, std::string_view rhythm, std::string_view dataset,
               std::string_view model, std::string_view optimizer,
               std::size_t line) {
  try {
    r.band = signal::parse_band(rhythm);
    r.dataset = signal::parse_dataset(dataset);
    r.model = nn::parse_model_kind(model);
    r.optimizer = optim::parse_rule(optimizer);
  } catch (const ValidationError& e) {
    throw FormatError("report line " + std::to_string(line) + ": " + e.what());
  }
}

void check_marks(const RunResult& r, std::size_t line) {
  const auto& ec = r.efficient_class;
  const auto& ss = r.shap_sign;
  if (ec != "L" && ec != "R" && ec != "-") {
    throw FormatError("report line " + std::to_string(line) +
                      ": efficient_class must be L, R or -");
  }
  if (ss != "+ve" && ss != "-ve" && ss != "-") {
    throw FormatError("report line " + std::to_string(line) +
                      ": shap_sign must be +ve, -ve or -");
  }
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (n == "csv") return ReportFormat::kCsv;
  if (n == "json") return ReportFormat::kJson;
  throw ValidationError("unknown report format '" + std::string(name) + "'");
}

ReportFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? ReportFormat::kJson : ReportFormat::kCsv;
}

std::string_view report_header() { return kHeader; }

void round_timings(ResultTable& table) {
  for (RunResult& r : table) {
    r.preprocessing_s = round2(r.preprocessing_s);
    r.train_s = round2(r.train_s);
    r.inference_s = round2(r.inference_s);
    r.shap_s = round2(r.shap_s);
  }
}

std::string to_csv(const ResultTable& table) {
  std::string out(kHeader);
  out += '\n';
  for (const RunResult& r : table) {
    std::vector<std::string> cells = {
        std::string(signal::band_name(r.band)),
        std::string(signal::dataset_short_name(r.dataset)),
        std::string(nn::model_kind_name(r.model)),
        std::string(optim::rule_name(r.optimizer))};
    if (r.failed()) {
      cells.resize(kColumns);
      cells[12] = "-";
      cells[13] = "-";
    } else {
      const auto& m = r.test;
      cells.push_back(number(r.train_acc));
      cells.push_back(number(r.val_acc));
      cells.push_back(number(r.test_acc));
      cells.push_back(metric(m.precision, m.precision_degenerate));
      cells.push_back(metric(m.recall, m.recall_degenerate));
      cells.push_back(metric(m.specificity, m.specificity_degenerate));
      cells.push_back(metric(m.f1, m.f1_degenerate));
      cells.push_back(metric(m.roc_auc, m.roc_auc_degenerate));
      cells.push_back(r.efficient_class);
      cells.push_back(r.shap_sign);
      cells.push_back(std::to_string(r.epochs));
      cells.push_back(seconds(r.preprocessing_s));
      cells.push_back(seconds(r.train_s));
      cells.push_back(seconds(r.inference_s));
      cells.push_back(seconds(r.shap_s));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }
  return out;
}

ResultTable parse_csv(std::string_view text) {
  ResultTable table;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != kHeader) {
        throw FormatError("report line 1: header does not match the report schema");
      }
      seen_header = true;
      continue;
    }
    std::vector<std::string_view> c;
    for (;;) {
      const auto comma = line.find(',');
      c.push_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (c.size() != kColumns) {
      throw FormatError("report line " + std::to_string(line_no) + ": expected " +
                        std::to_string(kColumns) + " columns, found " +
                        std::to_string(c.size()));
    }
    RunResult r;
    parse_key(r, c[0], c[1], c[2], c[3], line_no);
    if (c[4].empty()) {
      r.error = "failed";
      table.push_back(std::move(r));
      continue;
    }
    r.train_acc = parse_number(c[4], line_no);
    r.val_acc = parse_number(c[5], line_no);
    r.test_acc = parse_number(c[6], line_no);
    auto& m = r.test;
    m.accuracy = r.test_acc;
    m.precision = parse_metric(c[7], m.precision_degenerate, line_no);
    m.recall = parse_metric(c[8], m.recall_degenerate, line_no);
    m.specificity = parse_metric(c[9], m.specificity_degenerate, line_no);
    m.f1 = parse_metric(c[10], m.f1_degenerate, line_no);
    m.roc_auc = parse_metric(c[11], m.roc_auc_degenerate, line_no);
    r.efficient_class = std::string(c[12]);
    r.shap_sign = std::string(c[13]);
    check_marks(r, line_no);
    m.collapsed = r.efficient_class == "-";
    const double epochs = parse_number(c[14], line_no);
    if (epochs < 0 || epochs != std::floor(epochs)) {
      throw FormatError("report line " + std::to_string(line_no) +
                        ": epochs must be a whole number");
    }
    r.epochs = static_cast<std::size_t>(epochs);
    r.preprocessing_s = parse_number(c[15], line_no);
    r.train_s = parse_number(c[16], line_no);
    r.inference_s = parse_number(c[17], line_no);
    r.shap_s = parse_number(c[18], line_no);
    table.push_back(std::move(r));
  }
  if (!seen_header) throw FormatError("report is empty");
  return table;
}

std::string to_json(const ResultTable& table) {
  json rows = json::array();
  for (const RunResult& r : table) {
    json row;
    row["rhythm"] = signal::band_name(r.band);
    row["dataset"] = signal::dataset_short_name(r.dataset);
    row["model"] = nn::model_kind_name(r.model);
    row["optimizer"] = optim::rule_name(r.optimizer);
    if (r.failed()) {
      row["error"] = r.error;
      rows.push_back(std::move(row));
      continue;
    }
    const auto& m = r.test;
    row["train_acc"] = r.train_acc;
    row["val_acc"] = r.val_acc;
    row["test_acc"] = r.test_acc;
    row["precision"] = m.precision;
    row["recall"] = m.recall;
    row["specificity"] = m.specificity;
    row["f1"] = m.f1;
    row["roc_auc"] = m.roc_auc;
    json degenerate = json::array();
    if (m.precision_degenerate) degenerate.push_back("precision");
    if (m.recall_degenerate) degenerate.push_back("recall");
    if (m.specificity_degenerate) degenerate.push_back("specificity");
    if (m.f1_degenerate) degenerate.push_back("f1");
    if (m.roc_auc_degenerate) degenerate.push_back("roc_auc");
    row["degenerate"] = std::move(degenerate);
    row["efficient_class"] = r.efficient_class;
    row["shap_sign"] = r.shap_sign;
    row["epochs"] = r.epochs;
    row["preprocessing_s"] = round2(r.preprocessing_s);
    row["train_s"] = round2(r.train_s);
    row["inference_s"] = round2(r.inference_s);
    row["shap_s"] = round2(r.shap_s);
    rows.push_back(std::move(row));
  }
  json doc;
  doc["columns"] = json::array();
  std::string_view header = kHeader;
  while (!header.empty()) {
    const auto comma = header.find(',');
    doc["columns"].push_back(std::string(header.substr(0, comma)));
    header.remove_prefix(comma == std::string_view::npos ? header.size() : comma + 1);
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

ResultTable parse_json(std::string_view text) {
  ResultTable table;
  try {
    const json doc = json::parse(text);
    std::size_t index = 0;
    for (const json& row : doc.at("rows")) {
      ++index;
      RunResult r;
      parse_key(r, row.at("rhythm").get<std::string>(),
                row.at("dataset").get<std::string>(),
                row.at("model").get<std::string>(),
                row.at("optimizer").get<std::string>(), index);
      if (row.contains("error")) {
        r.error = row.at("error").get<std::string>();
        table.push_back(std::move(r));
        continue;
      }
      auto& m = r.test;
      r.train_acc = row.at("train_acc").get<double>();
      r.val_acc = row.at("val_acc").get<double>();
      r.test_acc = row.at("test_acc").get<double>();
      m.accuracy = r.test_acc;
      m.precision = row.at("precision").get<double>();
      m.recall = row.at("recall").get<double>();
      m.specificity = row.at("specificity").get<double>();
      m.f1 = row.at("f1").get<double>();
      m.roc_auc = row.at("roc_auc").get<double>();
      for (const json& d : row.at("degenerate")) {
        const auto name = d.get<std::string>();
        if (name == "precision") m.precision_degenerate = true;
        else if (name == "recall") m.recall_degenerate = true;
        else if (name == "specificity") m.specificity_degenerate = true;
        else if (name == "f1") m.f1_degenerate = true;
        else if (name == "roc_auc") m.roc_auc_degenerate = true;
        else throw FormatError("report row " + std::to_string(index) +
                               ": unknown degenerate metric '" + name + "'");
      }
      r.efficient_class = row.at("efficient_class").get<std::string>();
      r.shap_sign = row.at("shap_sign").get<std::string>();
      check_marks(r, index);
      m.collapsed = r.efficient_class == "-";
      r.epochs = row.at("epochs").get<std::size_t>();
      r.preprocessing_s = row.at("preprocessing_s").get<double>();
      r.train_s = row.at("train_s").get<double>();
      r.inference_s = row.at("inference_s").get<double>();
      r.shap_s = row.at("shap_s").get<double>();
      table.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON report: ") + e.what());
  }
  return table;
}

void emit_report(const ResultTable& table, ReportFormat format,
                 const std::filesystem::path& path) {
  if (table.empty()) throw ValidationError("refusing to write an empty report");
  const std::string text =
      format == ReportFormat::kJson ? to_json(table) : to_csv(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("failed writing report " + path.string());
}

ResultTable read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read report " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return format_for_path(path) == ReportFormat::kJson ? parse_json(buf.str())
                                                      : parse_csv(buf.str());
}

}  // namespace hemi::runner
