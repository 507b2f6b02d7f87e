// vsv/eval/report.hpp

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

#ifndef VSV_EVAL_REPORT_HPP_
#define VSV_EVAL_REPORT_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vsv/eval/metrics.hpp"
#include "vsv/eval/scores.hpp"

namespace vsv {
namespace eval {

// Detection metrics for genuine trials against one non-target trial type.
// A column with no trials of its type is marked absent and excluded from
// the report averages.
struct TrialColumn {
  bool present = false;
  std::int64_t num_trials = 0;
  double eer = 0.0;
  double eer_threshold = 0.0;
  double min_dcf = 0.0;
  double dcf_threshold = 0.0;
};

// Text-dependent verification is scored pair-wise: genuine trials against
// each of the three non-target types, plus the average over the present
// columns.  columns[i] holds the non-target type with enum value i + 1
// (target-wrong, imposter-correct, imposter-wrong).
struct EvaluationReport {
  std::string system_id;
  std::int64_t num_genuine = 0;
  std::array<TrialColumn, 3> columns;
  double avg_eer = 0.0;
  double avg_min_dcf = 0.0;
};

// Computes the report from a scored trial set.  No genuine trials is a data
// error; an absent non-target type drops its column with a warning and the
// averages run over the remaining columns.
EvaluationReport EvaluateTrials(const ScoreSet &scores,
                                const DcfConfig &config = DcfConfig());

// Machine-readable `key = value` lines (fractions) followed by an aligned
// human-readable table (percent).
std::string FormatReport(const EvaluationReport &report);
void WriteReportFile(const std::string &path, const EvaluationReport &report);

// DET operating points for genuine trials against all non-target trials
// pooled, as `p_fa,p_miss` CSV rows for external plotters.
void WriteDetCsv(const std::string &path, const ScoreSet &scores);

}  // namespace eval
}  // namespace vsv

#endif  // VSV_EVAL_REPORT_HPP_
