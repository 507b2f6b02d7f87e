// vsv/eval/report.cpp

// Copyright 2026  The vsv authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "vsv/eval/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "vsv/core/common.hpp"

namespace vsv {
namespace eval {

namespace {

// Column order matches the non-target enum values 1..3.
constexpr std::array<corpus::TrialType, 3> kNonTargetTypes = {
    corpus::TrialType::kTargetWrong,
    corpus::TrialType::kImposterCorrect,
    corpus::TrialType::kImposterWrong,
};

std::string Fraction(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string Percent(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%6.2f", value * 100.0);
  return buf;
}

std::string Fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%6.3f", value);
  return buf;
}

}  // namespace

EvaluationReport EvaluateTrials(const ScoreSet &scores,
                                const DcfConfig &config) {
  config.Validate();
  std::vector<double> genuine;
  std::array<std::vector<double>, 3> non_target;
  for (const auto &e : scores.entries) {
    if (e.type == corpus::TrialType::kGenuine)
      genuine.push_back(e.score);
    else
      non_target[static_cast<int>(e.type) - 1].push_back(e.score);
  }
  if (genuine.empty())
    throw DataError("evaluate: system " + scores.system_id +
                    " has no genuine trials");

  EvaluationReport report;
  report.system_id = scores.system_id;
  report.num_genuine = static_cast<std::int64_t>(genuine.size());
  double eer_sum = 0.0, dcf_sum = 0.0;
  int num_present = 0;
  for (std::size_t i = 0; i < kNonTargetTypes.size(); ++i) {
    TrialColumn &column = report.columns[i];
    if (non_target[i].empty()) {
      logging::Warn("evaluate: no " +
                    std::string(corpus::TrialTypeName(kNonTargetTypes[i])) +
                    " trials for system " + scores.system_id +
                    "; column dropped from the averages");
      continue;
    }
    const EerResult eer = ComputeEer(genuine, non_target[i]);
    const MinDcfResult dcf = ComputeMinDcf(genuine, non_target[i], config);
    column.present = true;
    column.num_trials = static_cast<std::int64_t>(non_target[i].size());
    column.eer = eer.eer;
    column.eer_threshold = eer.threshold;
    column.min_dcf = dcf.min_dcf;
    column.dcf_threshold = dcf.threshold;
    eer_sum += column.eer;
    dcf_sum += column.min_dcf;
    ++num_present;
  }
  if (num_present == 0)
    throw DataError("evaluate: system " + scores.system_id +
                    " has no non-target trials");
  report.avg_eer = eer_sum / num_present;
  report.avg_min_dcf = dcf_sum / num_present;
  return report;
}

std::string FormatReport(const EvaluationReport &report) {
  std::ostringstream os;
  os << "system = " << report.system_id << "\n";
  os << "num_genuine = " << report.num_genuine << "\n";
  for (std::size_t i = 0; i < kNonTargetTypes.size(); ++i) {
    const TrialColumn &column = report.columns[i];
    const std::string key = corpus::TrialTypeName(kNonTargetTypes[i]);
    if (!column.present) {
      os << key << ".present = 0\n";
      continue;
    }
    os << key << ".present = 1\n";
    os << key << ".num_trials = " << column.num_trials << "\n";
    os << key << ".eer = " << Fraction(column.eer) << "\n";
    os << key << ".eer_threshold = " << Fraction(column.eer_threshold)
       << "\n";
    os << key << ".min_dcf = " << Fraction(column.min_dcf) << "\n";
    os << key << ".dcf_threshold = " << Fraction(column.dcf_threshold)
       << "\n";
  }
  os << "avg.eer = " << Fraction(report.avg_eer) << "\n";
  os << "avg.min_dcf = " << Fraction(report.avg_min_dcf) << "\n";

  // Human-readable companion: EER in percent, minDCF as-is.
  os << "\n";
  os << "non-target type    EER %    minDCF\n";
  for (std::size_t i = 0; i < kNonTargetTypes.size(); ++i) {
    const TrialColumn &column = report.columns[i];
    char row[96];
    if (column.present) {
      std::snprintf(row, sizeof(row), "%-17s %s    %s\n",
                    corpus::TrialTypeName(kNonTargetTypes[i]),
                    Percent(column.eer).c_str(),
                    Fixed(column.min_dcf).c_str());
    } else {
      std::snprintf(row, sizeof(row), "%-17s %6s    %6s\n",
                    corpus::TrialTypeName(kNonTargetTypes[i]), "-", "-");
    }
    os << row;
  }
  char avg_row[96];
  std::snprintf(avg_row, sizeof(avg_row), "%-17s %s    %s\n", "average",
                Percent(report.avg_eer).c_str(),
                Fixed(report.avg_min_dcf).c_str());
  os << avg_row;
  return os.str();
}

void WriteReportFile(const std::string &path,
                     const EvaluationReport &report) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << FormatReport(report);
  if (!os) throw DataError("failed writing report: " + path);
}

void WriteDetCsv(const std::string &path, const ScoreSet &scores) {
  std::vector<double> genuine, impostor;
  for (const auto &e : scores.entries) {
    if (e.type == corpus::TrialType::kGenuine)
      genuine.push_back(e.score);
    else
      impostor.push_back(e.score);
  }
  const std::vector<DetPoint> points = DetPoints(genuine, impostor);
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << "p_fa,p_miss\n";
  for (const DetPoint &point : points)
    os << Fraction(point.p_fa) << "," << Fraction(point.p_miss) << "\n";
  if (!os) throw DataError("failed writing DET points: " + path);
}

}  // namespace eval
}  // namespace vsv
