// Copyright 2026 the dgtqc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Immutable labeled-UI corpus: Pascal-VOC-style annotation files from the
// trusted labelers, a line-delimited JSON log of crowdworker submissions,
// CSV verification verdicts / completeness scores, and a single-file
// snapshot format that round-trips all of it.

#ifndef DGTQC_CORPUS_HPP_
#define DGTQC_CORPUS_HPP_

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dgtqc/csv.hpp"
#include "dgtqc/error.hpp"
#include "dgtqc/xml.hpp"

namespace dgtqc {

struct BoundingBox {
  long xmin = 0;
  long ymin = 0;
  long xmax = 0;
  long ymax = 0;
  std::string class_label;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class Verdict { kCorrect, kIncorrect };

enum class HitStatus { kAccepted, kRejected };

struct ScreenshotLabeling {
  std::string screenshot_id;
  std::string labeler_id;
  std::vector<BoundingBox> boxes;
  // Aligned with boxes when non-empty; an entry is absent until a verifier
  // has rated that box.
  std::vector<std::optional<Verdict>> verdicts;
  std::optional<double> completeness;  // 0..100

  bool fully_verified() const {
    if (boxes.empty() || verdicts.size() != boxes.size()) return false;
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const auto& v) { return v.has_value(); });
  }

  // (correct, incorrect) over the rated boxes.
  std::pair<long, long> verdict_counts() const {
    long correct = 0;
    long incorrect = 0;
    for (const auto& v : verdicts) {
      if (!v) continue;
      (*v == Verdict::kCorrect ? correct : incorrect) += 1;
    }
    return {correct, incorrect};
  }

  friend bool operator==(const ScreenshotLabeling&, const ScreenshotLabeling&) = default;
};

struct WorkerTaskRecord {
  std::string worker_id;
  std::string screenshot_id;
  HitStatus status = HitStatus::kAccepted;
  double time_on_task_s = 0.0;
  std::vector<BoundingBox> boxes;

  friend bool operator==(const WorkerTaskRecord&, const WorkerTaskRecord&) = default;
};

// The 20 classes offered to the trusted labelers.
inline std::vector<std::string> trusted_vocabulary_default() {
  return {"image",    "backgroundimage", "panel",     "list",      "table",
          "paragraph", "textblock",      "text",      "symbol",    "checkbox",
          "radiobutton", "selectbox",    "textinput", "textarea",  "button",
          "label",    "tabs",            "scrollbar", "pagination", "link"};
}

// The 10 classes offered in the crowdworker labeling HIT.
inline std::vector<std::string> worker_vocabulary_default() {
  return {"button", "link",  "check",           "input",      "dropdown",
          "table",  "image", "backgroundimage", "navigation", "panel"};
}

struct Corpus {
  std::vector<ScreenshotLabeling> trusted_labelings;
  std::vector<WorkerTaskRecord> worker_records;
  std::vector<std::string> trusted_vocabulary = trusted_vocabulary_default();
  std::vector<std::string> worker_vocabulary = worker_vocabulary_default();

  void validate() const {
    std::set<std::string> seen;
    for (const auto& labeling : trusted_labelings) {
      require(seen.insert(labeling.screenshot_id).second, ErrorKind::kConflict,
              "screenshot " + labeling.screenshot_id + " has more than one trusted labeling");
      require(labeling.verdicts.empty() || labeling.verdicts.size() == labeling.boxes.size(),
              ErrorKind::kField,
              "verdict count mismatch for screenshot " + labeling.screenshot_id);
      if (labeling.completeness) {
        require(*labeling.completeness >= 0.0 && *labeling.completeness <= 100.0,
                ErrorKind::kValue, "completeness out of [0, 100]");
      }
    }
    for (const auto* vocab : {&trusted_vocabulary, &worker_vocabulary}) {
      std::set<std::string> labels(vocab->begin(), vocab->end());
      require(labels.size() == vocab->size(), ErrorKind::kConflict,
              "vocabulary contains duplicate labels");
    }
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct CorpusSummary {
  std::size_t screenshots = 0;        // distinct ids across trusted + worker data
  std::size_t trusted_uis = 0;        // distinct trusted-labeled screenshots
  std::size_t trusted_labelers = 0;
  std::size_t workers = 0;
  long long trusted_elements = 0;
  long long worker_elements = 0;
  long long accepted_hits = 0;
  long long rejected_hits = 0;
};

namespace detail {

inline long parse_box_coordinate(const XmlNode& bndbox, const char* corner,
                                 std::size_t object_index) {
  const XmlNode* node = bndbox.child(corner);
  require(node != nullptr, ErrorKind::kField,
          "object " + std::to_string(object_index) + ": bndbox is missing " + corner);
  const std::string text = trim(node->text);
  try {
    std::size_t used = 0;
    const long value = std::stol(text, &used);
    require(used == text.size(), ErrorKind::kValue,
            "object " + std::to_string(object_index) + ": " + corner +
                " is not an integer: '" + text + "'");
    require(value >= 0, ErrorKind::kValue,
            "object " + std::to_string(object_index) + ": " + corner + " is negative");
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kValue, "object " + std::to_string(object_index) + ": " +
                                       corner + " is not an integer: '" + text + "'");
  }
}

inline void check_box_geometry(const BoundingBox& box, const std::string& where) {
  require(box.xmin < box.xmax, ErrorKind::kGeometry,
          where + ": xmin >= xmax (" + std::to_string(box.xmin) + " >= " +
              std::to_string(box.xmax) + ")");
  require(box.ymin < box.ymax, ErrorKind::kGeometry,
          where + ": ymin >= ymax (" + std::to_string(box.ymin) + " >= " +
              std::to_string(box.ymax) + ")");
}

}  // namespace detail

// Parses one Pascal-VOC-style annotation document. Boxes come back in
// document order with class labels kept verbatim apart from surrounding
// whitespace.
inline ScreenshotLabeling parse_annotation(std::string_view xml_text,
                                           const std::string& labeler_id,
                                           const std::string& screenshot_id) {
  const XmlNode root = parse_xml(xml_text);
  require(root.name == "annotation", ErrorKind::kParse,
          "root element is <" + root.name + ">, expected <annotation>");
  ScreenshotLabeling labeling;
  labeling.screenshot_id = screenshot_id;
  labeling.labeler_id = labeler_id;
  std::size_t object_index = 0;
  for (const XmlNode* object : root.children_named("object")) {
    const XmlNode* name = object->child("name");
    require(name != nullptr, ErrorKind::kField,
            "object " + std::to_string(object_index) + ": missing name");
    BoundingBox box;
    box.class_label = trim(name->text);
    require(!box.class_label.empty(), ErrorKind::kField,
            "object " + std::to_string(object_index) + ": empty class label");
    const XmlNode* bndbox = object->child("bndbox");
    require(bndbox != nullptr, ErrorKind::kField,
            "object " + std::to_string(object_index) + ": missing bndbox");
    box.xmin = detail::parse_box_coordinate(*bndbox, "xmin", object_index);
    box.ymin = detail::parse_box_coordinate(*bndbox, "ymin", object_index);
    box.xmax = detail::parse_box_coordinate(*bndbox, "xmax", object_index);
    box.ymax = detail::parse_box_coordinate(*bndbox, "ymax", object_index);
    detail::check_box_geometry(box, "object " + std::to_string(object_index));
    labeling.boxes.push_back(std::move(box));
    ++object_index;
  }
  return labeling;
}

// Serializes a labeling back to the annotation layout parse_annotation reads.
inline std::string annotation_to_xml(const ScreenshotLabeling& labeling) {
  std::ostringstream out;
  out << "<annotation>\n";
  out << "  <filename>" << xml_escape(labeling.screenshot_id) << ".png</filename>\n";
  for (const auto& box : labeling.boxes) {
    out << "  <object>\n";
    out << "    <name>" << xml_escape(box.class_label) << "</name>\n";
    out << "    <bndbox>\n";
    out << "      <xmin>" << box.xmin << "</xmin>\n";
    out << "      <ymin>" << box.ymin << "</ymin>\n";
    out << "      <xmax>" << box.xmax << "</xmax>\n";
    out << "      <ymax>" << box.ymax << "</ymax>\n";
    out << "    </bndbox>\n";
    out << "  </object>\n";
  }
  out << "</annotation>\n";
  return out.str();
}

namespace detail {

inline BoundingBox box_from_json(const nlohmann::json& j, const std::string& where) {
  BoundingBox box;
  require(j.is_object(), ErrorKind::kField, where + ": box entry is not an object");
  for (const char* key : {"class", "xmin", "ymin", "xmax", "ymax"}) {
    require(j.contains(key), ErrorKind::kField, where + ": box is missing " + key);
  }
  require(j["class"].is_string(), ErrorKind::kValue, where + ": box class must be a string");
  box.class_label = trim(j["class"].get<std::string>());
  require(!box.class_label.empty(), ErrorKind::kField, where + ": empty box class");
  auto coordinate = [&](const char* key) {
    const auto& v = j[key];
    require(v.is_number_integer() || v.is_number_unsigned(), ErrorKind::kValue,
            where + ": box " + key + " must be an integer");
    const long value = v.get<long>();
    require(value >= 0, ErrorKind::kValue, where + ": box " + key + " is negative");
    return value;
  };
  box.xmin = coordinate("xmin");
  box.ymin = coordinate("ymin");
  box.xmax = coordinate("xmax");
  box.ymax = coordinate("ymax");
  check_box_geometry(box, where);
  return box;
}

inline nlohmann::json box_to_json(const BoundingBox& box) {
  return nlohmann::json{{"class", box.class_label}, {"xmin", box.xmin},
                        {"ymin", box.ymin},         {"xmax", box.xmax},
                        {"ymax", box.ymax}};
}

}  // namespace detail

// Reads the crowdworker submission log: one JSON object per line, one line
// per HIT. Unknown fields are ignored.
inline std::vector<WorkerTaskRecord> load_worker_log(std::istream& stream) {
  std::vector<WorkerTaskRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string where = "line " + std::to_string(line_number);
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParse, where + ": " + e.what());
    }
    require(j.is_object(), ErrorKind::kParse, where + ": record is not a JSON object");
    WorkerTaskRecord record;
    for (const char* key : {"worker_id", "screenshot_id", "status", "time_on_task_s"}) {
      require(j.contains(key), ErrorKind::kField, where + ": missing " + key);
    }
    record.worker_id = j["worker_id"].get<std::string>();
    record.screenshot_id = j["screenshot_id"].get<std::string>();
    const std::string status = j["status"].get<std::string>();
    if (status == "accepted") record.status = HitStatus::kAccepted;
    else if (status == "rejected") record.status = HitStatus::kRejected;
    else throw Error(ErrorKind::kValue, where + ": unknown status '" + status + "'");
    require(j["time_on_task_s"].is_number(), ErrorKind::kValue,
            where + ": time_on_task_s must be a number");
    record.time_on_task_s = j["time_on_task_s"].get<double>();
    require(record.time_on_task_s >= 0.0, ErrorKind::kValue,
            where + ": time_on_task_s is negative");
    if (j.contains("boxes")) {
      require(j["boxes"].is_array(), ErrorKind::kValue, where + ": boxes must be an array");
      for (const auto& jb : j["boxes"]) {
        record.boxes.push_back(detail::box_from_json(jb, where));
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

inline std::vector<WorkerTaskRecord> load_worker_log(const std::string& text) {
  std::istringstream stream(text);
  return load_worker_log(stream);
}

// Applies verification rows to the trusted labelings and returns the amended
// corpus. Accepts either file layout:
//   screenshot_id, box_index, verdict   (per-box correct/incorrect ratings)
//   screenshot_id, sc                   (per-screenshot completeness 0..100)
inline Corpus load_verification(const std::string& csv_text, const Corpus& corpus) {
  Corpus updated = corpus;
  std::map<std::string, std::size_t> by_screenshot;
  for (std::size_t i = 0; i < updated.trusted_labelings.size(); ++i) {
    by_screenshot[updated.trusted_labelings[i].screenshot_id] = i;
  }
  const auto rows = parse_csv(csv_text);
  require(!rows.empty(), ErrorKind::kParse, "verification file has no header row");
  const auto& header = rows.front().fields;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("screenshot_id");
  require(id_col.has_value(), ErrorKind::kField, "missing screenshot_id column");
  const auto box_col = column("box_index");
  const auto verdict_col = column("verdict");
  const auto sc_col = column("sc");
  const bool is_verdict_file = box_col && verdict_col;
  require(is_verdict_file || sc_col.has_value(), ErrorKind::kField,
          "expected columns (screenshot_id, box_index, verdict) or (screenshot_id, sc)");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "line " + std::to_string(row.line);
    require(row.fields.size() >= header.size(), ErrorKind::kParse,
            where + ": too few fields");
    const std::string screenshot_id = trim(row.fields[*id_col]);
    const auto found = by_screenshot.find(screenshot_id);
    require(found != by_screenshot.end(), ErrorKind::kReference,
            where + ": unknown screenshot_id '" + screenshot_id + "'");
    ScreenshotLabeling& labeling = updated.trusted_labelings[found->second];
    if (is_verdict_file) {
      long index = -1;
      try {
        index = std::stol(trim(row.fields[*box_col]));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kValue, where + ": box_index is not an integer");
      }
      require(index >= 0 && static_cast<std::size_t>(index) < labeling.boxes.size(),
              ErrorKind::kIndex,
              where + ": box_index " + std::to_string(index) + " out of range for " +
                  std::to_string(labeling.boxes.size()) + " boxes");
      if (labeling.verdicts.empty()) labeling.verdicts.resize(labeling.boxes.size());
      auto& slot = labeling.verdicts[static_cast<std::size_t>(index)];
      require(!slot.has_value(), ErrorKind::kConflict,
              where + ": duplicate verdict for box " + std::to_string(index) + " of " +
                  screenshot_id);
      const std::string verdict = trim(row.fields[*verdict_col]);
      if (verdict == "correct") slot = Verdict::kCorrect;
      else if (verdict == "incorrect") slot = Verdict::kIncorrect;
      else throw Error(ErrorKind::kValue, where + ": unknown verdict '" + verdict + "'");
    } else {
      double sc = 0.0;
      try {
        sc = std::stod(trim(row.fields[*sc_col]));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kValue, where + ": sc is not a number");
      }
      require(sc >= 0.0 && sc <= 100.0, ErrorKind::kValue,
              where + ": sc " + std::to_string(sc) + " out of [0, 100]");
      require(!labeling.completeness.has_value(), ErrorKind::kConflict,
              where + ": duplicate completeness for " + screenshot_id);
      labeling.completeness = sc;
    }
  }
  return updated;
}

inline CorpusSummary corpus_summary(const Corpus& corpus) {
  CorpusSummary summary;
  std::set<std::string> screenshots;
  std::set<std::string> trusted_ids;
  std::set<std::string> labelers;
  std::set<std::string> workers;
  for (const auto& labeling : corpus.trusted_labelings) {
    screenshots.insert(labeling.screenshot_id);
    trusted_ids.insert(labeling.screenshot_id);
    labelers.insert(labeling.labeler_id);
    summary.trusted_elements += static_cast<long long>(labeling.boxes.size());
  }
  for (const auto& record : corpus.worker_records) {
    screenshots.insert(record.screenshot_id);
    workers.insert(record.worker_id);
    summary.worker_elements += static_cast<long long>(record.boxes.size());
    (record.status == HitStatus::kAccepted ? summary.accepted_hits
                                           : summary.rejected_hits) += 1;
  }
  summary.screenshots = screenshots.size();
  summary.trusted_uis = trusted_ids.size();
  summary.trusted_labelers = labelers.size();
  summary.workers = workers.size();
  return summary;
}

// One worker-log line (the snapshot's worker_hit records add a "record" key
// to this same object).
inline nlohmann::json worker_record_to_json(const WorkerTaskRecord& record) {
  nlohmann::json j{{"worker_id", record.worker_id},
                   {"screenshot_id", record.screenshot_id},
                   {"status", record.status == HitStatus::kAccepted ? "accepted" : "rejected"},
                   {"time_on_task_s", record.time_on_task_s}};
  auto& boxes = j["boxes"] = nlohmann::json::array();
  for (const auto& box : record.boxes) boxes.push_back(detail::box_to_json(box));
  return j;
}

// ---------------------------------------------------------------------------
// Snapshot: one line-delimited JSON file, header record first.

inline constexpr int kSnapshotSchemaVersion = 1;

inline void export_corpus(const Corpus& corpus, std::ostream& out) {
  nlohmann::json header{{"record", "header"},
                        {"schema_version", kSnapshotSchemaVersion},
                        {"trusted_vocabulary", corpus.trusted_vocabulary},
                        {"worker_vocabulary", corpus.worker_vocabulary}};
  out << header.dump() << '\n';
  for (const auto& labeling : corpus.trusted_labelings) {
    nlohmann::json j{{"record", "trusted_labeling"},
                     {"labeler_id", labeling.labeler_id},
                     {"screenshot_id", labeling.screenshot_id}};
    auto& boxes = j["boxes"] = nlohmann::json::array();
    for (const auto& box : labeling.boxes) boxes.push_back(detail::box_to_json(box));
    if (!labeling.verdicts.empty()) {
      auto& verdicts = j["verdicts"] = nlohmann::json::array();
      for (const auto& v : labeling.verdicts) {
        if (!v) verdicts.push_back(nullptr);
        else verdicts.push_back(*v == Verdict::kCorrect ? "correct" : "incorrect");
      }
    }
    if (labeling.completeness) j["completeness"] = *labeling.completeness;
    out << j.dump() << '\n';
  }
  for (const auto& record : corpus.worker_records) {
    nlohmann::json j = worker_record_to_json(record);
    j["record"] = "worker_hit";
    out << j.dump() << '\n';
  }
}

inline Corpus load_corpus_snapshot(std::istream& in) {
  Corpus corpus;
  corpus.trusted_vocabulary.clear();
  corpus.worker_vocabulary.clear();
  std::string line;
  std::size_t line_number = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string where = "line " + std::to_string(line_number);
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParse, where + ": " + e.what());
    }
    require(j.is_object() && j.contains("record"), ErrorKind::kField,
            where + ": missing record type");
    const std::string record = j["record"].get<std::string>();
    if (record == "header") {
      require(!saw_header, ErrorKind::kConflict, where + ": duplicate header record");
      require(j.value("schema_version", -1) == kSnapshotSchemaVersion, ErrorKind::kValue,
              where + ": unsupported schema_version");
      corpus.trusted_vocabulary = j["trusted_vocabulary"].get<std::vector<std::string>>();
      corpus.worker_vocabulary = j["worker_vocabulary"].get<std::vector<std::string>>();
      saw_header = true;
      continue;
    }
    require(saw_header, ErrorKind::kParse, where + ": header record must come first");
    if (record == "trusted_labeling") {
      ScreenshotLabeling labeling;
      labeling.labeler_id = j["labeler_id"].get<std::string>();
      labeling.screenshot_id = j["screenshot_id"].get<std::string>();
      for (const auto& jb : j["boxes"]) {
        labeling.boxes.push_back(detail::box_from_json(jb, where));
      }
      if (j.contains("verdicts")) {
        for (const auto& jv : j["verdicts"]) {
          if (jv.is_null()) {
            labeling.verdicts.emplace_back(std::nullopt);
          } else {
            const std::string v = jv.get<std::string>();
            require(v == "correct" || v == "incorrect", ErrorKind::kValue,
                    where + ": unknown verdict '" + v + "'");
            labeling.verdicts.emplace_back(v == "correct" ? Verdict::kCorrect
                                                          : Verdict::kIncorrect);
          }
        }
        require(labeling.verdicts.size() == labeling.boxes.size(), ErrorKind::kField,
                where + ": verdict count mismatch");
      }
      if (j.contains("completeness")) labeling.completeness = j["completeness"].get<double>();
      corpus.trusted_labelings.push_back(std::move(labeling));
    } else if (record == "worker_hit") {
      // Reuse the worker-log field handling by round-tripping the line.
      std::istringstream one(line);
      auto records = load_worker_log(one);
      require(records.size() == 1, ErrorKind::kParse, where + ": bad worker_hit record");
      corpus.worker_records.push_back(std::move(records.front()));
    } else {
      throw Error(ErrorKind::kValue, where + ": unknown record type '" + record + "'");
    }
  }
  require(saw_header, ErrorKind::kParse, "snapshot has no header record");
  corpus.validate();
  return corpus;
}

// ---------------------------------------------------------------------------
// Filesystem loaders

// Reads every <labeler_id>/<screenshot_id>.xml under `root`. Files that fail
// to parse are skipped with a warning so one broken screenshot cannot sink a
// whole ingest.
inline std::vector<ScreenshotLabeling> load_annotation_dir(
    const std::filesystem::path& root, std::vector<std::string>* warnings = nullptr) {
  require(std::filesystem::is_directory(root), ErrorKind::kIo,
          "annotation directory not found: " + root.string());
  std::vector<ScreenshotLabeling> labelings;
  std::vector<std::filesystem::path> labeler_dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) labeler_dirs.push_back(entry.path());
  }
  std::sort(labeler_dirs.begin(), labeler_dirs.end());
  for (const auto& dir : labeler_dirs) {
    const std::string labeler_id = dir.filename().string();
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".xml") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file);
      require(in.good(), ErrorKind::kIo, "cannot open " + file.string());
      std::stringstream buffer;
      buffer << in.rdbuf();
      try {
        labelings.push_back(
            parse_annotation(buffer.str(), labeler_id, file.stem().string()));
      } catch (const Error& e) {
        if (warnings) {
          warnings->push_back("skipped " + file.string() + ": " + e.what());
        }
      }
    }
  }
  return labelings;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace dgtqc

#endif  // DGTQC_CORPUS_HPP_
