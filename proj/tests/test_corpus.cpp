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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dgtqc/corpus.hpp"

using dgtqc::BoundingBox;
using dgtqc::Corpus;
using dgtqc::Error;
using dgtqc::ErrorKind;
using dgtqc::HitStatus;
using dgtqc::ScreenshotLabeling;
using dgtqc::Verdict;
using dgtqc::WorkerTaskRecord;

namespace {

const char* kTwoObjectXml = R"(<?xml version="1.0"?>
<annotation>
  <folder>shots</folder>
  <filename>u0001.png</filename>
  <object>
    <name>link</name>
    <pose>Unspecified</pose>
    <bndbox><xmin>10</xmin><ymin>20</ymin><xmax>30</xmax><ymax>40</ymax></bndbox>
  </object>
  <object>
    <name> button </name>
    <bndbox><xmin>5</xmin><ymin>5</ymin><xmax>6</xmax><ymax>9</ymax></bndbox>
  </object>
</annotation>
)";

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a dgtqc::Error");
  return ErrorKind::kIo;
}

Corpus small_corpus() {
  Corpus corpus;
  ScreenshotLabeling a;
  a.screenshot_id = "s1";
  a.labeler_id = "T1";
  a.boxes = {{0, 0, 10, 10, "link"}, {0, 0, 5, 5, "text"}, {1, 1, 2, 2, "image"}};
  ScreenshotLabeling b;
  b.screenshot_id = "s2";
  b.labeler_id = "T2";
  b.boxes = {{0, 0, 4, 4, "link"}, {0, 0, 4, 4, "button"}, {0, 0, 4, 4, "button"},
             {0, 0, 4, 4, "text"}, {2, 2, 9, 9, "panel"}};
  corpus.trusted_labelings = {a, b};
  WorkerTaskRecord w;
  w.worker_id = "W1";
  w.screenshot_id = "s1";
  w.status = HitStatus::kAccepted;
  w.time_on_task_s = 120;
  w.boxes = {{0, 0, 3, 3, "link"}};
  corpus.worker_records = {w};
  return corpus;
}

}  // namespace

TEST_CASE("parse_annotation reads objects in document order") {
  const auto labeling = dgtqc::parse_annotation(kTwoObjectXml, "T1", "u0001");
  REQUIRE(labeling.boxes.size() == 2);
  CHECK(labeling.boxes[0].class_label == "link");
  CHECK(labeling.boxes[1].class_label == "button");  // surrounding whitespace trimmed
  CHECK(labeling.boxes[0].xmin == 10);
  CHECK(labeling.boxes[0].ymax == 40);
  CHECK(labeling.labeler_id == "T1");
  CHECK(labeling.screenshot_id == "u0001");
  CHECK(labeling.verdicts.empty());
  CHECK_FALSE(labeling.completeness.has_value());
}

TEST_CASE("parse_annotation handles empty annotations") {
  const auto labeling = dgtqc::parse_annotation("<annotation></annotation>", "T1", "u");
  CHECK(labeling.boxes.empty());
}

TEST_CASE("parse_annotation error paths") {
  CHECK(kind_of([] {
          dgtqc::parse_annotation(
              "<annotation><object><name>x</name>"
              "<bndbox><xmin>100</xmin><ymin>1</ymin><xmax>50</xmax><ymax>2</ymax></bndbox>"
              "</object></annotation>",
              "T", "s");
        }) == ErrorKind::kGeometry);
  CHECK(kind_of([] {
          dgtqc::parse_annotation(
              "<annotation><object><name>x</name>"
              "<bndbox><xmin>1</xmin><ymin>1</ymin><ymax>2</ymax></bndbox>"
              "</object></annotation>",
              "T", "s");
        }) == ErrorKind::kField);
  CHECK(kind_of([] { dgtqc::parse_annotation("<annotation><object>", "T", "s"); }) ==
        ErrorKind::kParse);
  CHECK(kind_of([] { dgtqc::parse_annotation("<sizes></sizes>", "T", "s"); }) ==
        ErrorKind::kParse);
  // Missing corner error names the object index.
  try {
    dgtqc::parse_annotation(
        "<annotation>"
        "<object><name>a</name><bndbox><xmin>0</xmin><ymin>0</ymin><xmax>1</xmax>"
        "<ymax>1</ymax></bndbox></object>"
        "<object><name>b</name><bndbox><ymin>0</ymin><xmax>1</xmax><ymax>1</ymax>"
        "</bndbox></object>"
        "</annotation>",
        "T", "s");
    FAIL("expected field error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("object 1") != std::string::npos);
  }
  // Malformed XML reports the offending line.
  try {
    dgtqc::parse_annotation("<annotation>\n<object>\n</annotation>", "T", "s");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("annotation XML round-trips random labelings") {
  std::mt19937_64 gen(31);
  for (int iter = 0; iter < 25; ++iter) {
    ScreenshotLabeling original;
    original.screenshot_id = "shot" + std::to_string(iter);
    original.labeler_id = "L";
    const std::size_t count = gen() % 12;
    for (std::size_t b = 0; b < count; ++b) {
      BoundingBox box;
      box.xmin = static_cast<long>(gen() % 500);
      box.ymin = static_cast<long>(gen() % 500);
      box.xmax = box.xmin + 1 + static_cast<long>(gen() % 100);
      box.ymax = box.ymin + 1 + static_cast<long>(gen() % 100);
      box.class_label = (b % 2 == 0) ? "link" : "text & <symbol>";
      original.boxes.push_back(box);
    }
    const auto parsed = dgtqc::parse_annotation(dgtqc::annotation_to_xml(original),
                                                original.labeler_id,
                                                original.screenshot_id);
    REQUIRE(parsed.boxes == original.boxes);
    for (const auto& box : parsed.boxes) {
      CHECK(box.xmin < box.xmax);
      CHECK(box.ymin < box.ymax);
      CHECK_FALSE(box.class_label.empty());
    }
  }
}

TEST_CASE("load_worker_log parses records in file order") {
  const std::string log =
      R"({"worker_id":"W1","screenshot_id":"s1","status":"accepted","time_on_task_s":120,"boxes":[{"class":"link","xmin":0,"ymin":0,"xmax":5,"ymax":5}]})"
      "\n"
      R"({"worker_id":"W2","screenshot_id":"s2","status":"rejected","time_on_task_s":3.5,"boxes":[],"note":"ignored field"})"
      "\n"
      R"({"worker_id":"W1","screenshot_id":"s3","status":"accepted","time_on_task_s":0})"
      "\n";
  const auto records = dgtqc::load_worker_log(log);
  REQUIRE(records.size() == 3);
  CHECK(records[0].worker_id == "W1");
  CHECK(records[0].boxes.size() == 1);
  CHECK(records[1].status == HitStatus::kRejected);
  CHECK(records[1].boxes.empty());
  CHECK(records[2].time_on_task_s == 0.0);
}

TEST_CASE("load_worker_log error paths") {
  CHECK(dgtqc::load_worker_log(std::string{}).empty());
  CHECK(kind_of([] {
          dgtqc::load_worker_log(std::string{
              R"({"worker_id":"W","screenshot_id":"s","status":"pending","time_on_task_s":1})"});
        }) == ErrorKind::kValue);
  CHECK(kind_of([] {
          dgtqc::load_worker_log(std::string{
              R"({"worker_id":"W","screenshot_id":"s","status":"accepted","time_on_task_s":-2})"});
        }) == ErrorKind::kValue);
  try {
    dgtqc::load_worker_log(std::string{"{\"worker_id\":\"W\"}\nnot json\n"});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kField);  // first line is valid JSON, missing fields
  }
  try {
    dgtqc::load_worker_log(std::string{
        R"({"worker_id":"W","screenshot_id":"s","status":"accepted","time_on_task_s":1})"
        "\nnot json\n"});
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("load_verification applies verdicts and completeness") {
  const auto corpus = small_corpus();
  const std::string verdicts =
      "screenshot_id,box_index,verdict\n"
      "s1,0,correct\n"
      "s1,1,correct\n"
      "s1,2,incorrect\n";
  auto verified = dgtqc::load_verification(verdicts, corpus);
  const std::string completeness = "screenshot_id,sc\ns1,95\n";
  verified = dgtqc::load_verification(completeness, verified);

  const auto& s1 = verified.trusted_labelings[0];
  CHECK(s1.fully_verified());
  CHECK(s1.verdict_counts() == std::pair<long, long>{2, 1});
  CHECK(s1.completeness == 95.0);
  // s2 untouched
  CHECK_FALSE(verified.trusted_labelings[1].fully_verified());
  CHECK(corpus.trusted_labelings[0].verdicts.empty());  // input corpus unchanged
}

TEST_CASE("load_verification partial verification leaves labeling unverified") {
  const auto corpus = small_corpus();
  const auto updated =
      dgtqc::load_verification("screenshot_id,sc\ns2,80.5\n", corpus);
  CHECK(updated.trusted_labelings[1].completeness == 80.5);
  CHECK_FALSE(updated.trusted_labelings[1].fully_verified());
}

TEST_CASE("load_verification error paths") {
  const auto corpus = small_corpus();
  CHECK(kind_of([&] {
          dgtqc::load_verification("screenshot_id,box_index,verdict\ns1,7,correct\n", corpus);
        }) == ErrorKind::kIndex);
  CHECK(kind_of([&] {
          dgtqc::load_verification("screenshot_id,box_index,verdict\nzz,0,correct\n", corpus);
        }) == ErrorKind::kReference);
  CHECK(kind_of([&] {
          dgtqc::load_verification(
              "screenshot_id,box_index,verdict\ns1,0,correct\ns1,0,correct\n", corpus);
        }) == ErrorKind::kConflict);
  CHECK(kind_of([&] {
          dgtqc::load_verification("screenshot_id,box_index,verdict\ns1,0,maybe\n", corpus);
        }) == ErrorKind::kValue);
  CHECK(kind_of([&] { dgtqc::load_verification("screenshot_id,sc\ns1,101\n", corpus); }) ==
        ErrorKind::kValue);
  CHECK(kind_of([&] { dgtqc::load_verification("a,b\n1,2\n", corpus); }) == ErrorKind::kField);
}

TEST_CASE("corpus_summary counts") {
  const auto corpus = small_corpus();
  const auto summary = dgtqc::corpus_summary(corpus);
  CHECK(summary.trusted_uis == 2);
  CHECK(summary.trusted_elements == 8);
  CHECK(summary.trusted_labelers == 2);
  CHECK(summary.workers == 1);
  CHECK(summary.worker_elements == 1);
  CHECK(summary.accepted_hits == 1);
  CHECK(summary.rejected_hits == 0);

  const auto empty = dgtqc::corpus_summary(Corpus{});
  CHECK(empty.screenshots == 0);
  CHECK(empty.trusted_elements == 0);
  CHECK(empty.workers == 0);

  // Brute-force recount.
  long long total = 0;
  for (const auto& labeling : corpus.trusted_labelings) {
    total += static_cast<long long>(labeling.boxes.size());
  }
  CHECK(summary.trusted_elements == total);
}

TEST_CASE("snapshot export round-trips the corpus") {
  auto corpus = small_corpus();
  corpus = dgtqc::load_verification(
      "screenshot_id,box_index,verdict\ns1,0,correct\ns1,2,incorrect\n", corpus);
  corpus = dgtqc::load_verification("screenshot_id,sc\ns1,95\ns2,40\n", corpus);

  std::ostringstream out;
  dgtqc::export_corpus(corpus, out);
  std::istringstream in(out.str());
  const auto loaded = dgtqc::load_corpus_snapshot(in);
  CHECK(loaded == corpus);

  // Export is deterministic.
  std::ostringstream out2;
  dgtqc::export_corpus(corpus, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("snapshot loader rejects malformed input") {
  CHECK(kind_of([] {
          std::istringstream in("{\"record\":\"trusted_labeling\"}\n");
          dgtqc::load_corpus_snapshot(in);
        }) == ErrorKind::kParse);
  CHECK(kind_of([] {
          std::istringstream in("");
          dgtqc::load_corpus_snapshot(in);
        }) == ErrorKind::kParse);
}

TEST_CASE("corpus validation rejects duplicate trusted screenshots") {
  Corpus corpus = small_corpus();
  auto duplicate = corpus.trusted_labelings[0];
  duplicate.labeler_id = "T9";
  corpus.trusted_labelings.push_back(duplicate);
  CHECK(kind_of([&] { corpus.validate(); }) == ErrorKind::kConflict);
}

TEST_CASE("load_annotation_dir skips malformed files with a warning") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "dgtqc_test_annotations";
  fs::remove_all(root);
  fs::create_directories(root / "T1");
  fs::create_directories(root / "T2");
  {
    std::ofstream f(root / "T1" / "s1.xml");
    f << dgtqc::annotation_to_xml(small_corpus().trusted_labelings[0]);
  }
  {
    std::ofstream f(root / "T2" / "s2.xml");
    f << dgtqc::annotation_to_xml(small_corpus().trusted_labelings[1]);
  }
  {
    std::ofstream f(root / "T2" / "broken.xml");
    f << "<annotation><object></annotation>";
  }
  std::vector<std::string> warnings;
  const auto labelings = dgtqc::load_annotation_dir(root, &warnings);
  CHECK(labelings.size() == 2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("broken.xml") != std::string::npos);
  fs::remove_all(root);

  CHECK(kind_of([&] { dgtqc::load_annotation_dir(root / "missing"); }) == ErrorKind::kIo);
}
