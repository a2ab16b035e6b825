#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ringloc/localizer.hpp"
#include "ringloc/synthetic.hpp"

namespace ringloc {

struct RankedMatch {
    int keyframe_id = 0;
    double score = 0.0;
    double dist_m = 0.0;  // keyframe position to query ground-truth position
};

/// Per-query evaluation record.
struct QueryOutcome {
    int query_id = 0;
    Pose2 gt_pose;
    int retrieved_id = 0;
    Pose2 est_pose;  // global
    double score = 0.0;
    double gt_nn_dist_m = 0.0;  // distance to the closest database keyframe
    std::vector<RankedMatch> ranking;
};

struct PrPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct MetricsReport {
    std::vector<double> recall_at_n;  // index 0 = Recall@1
    double max_f1 = 0.0;
    double auc = 0.0;
    std::vector<PrPoint> pr_curve;
    double re_p50 = 0.0, re_p75 = 0.0;  // degrees
    double te_p50 = 0.0, te_p75 = 0.0;  // meters
    std::optional<double> pe_succ;            // absent when no correct retrievals
    std::optional<double> gl_succ_two_stage;  // recall@1 * pe_succ
    double gl_succ_one_stage = 0.0;
};

double recall_at_n(const std::vector<QueryOutcome>& outcomes, double revisit_m, int n);

struct PrCurveResult {
    std::vector<PrPoint> curve;
    double auc = 0.0;
    double max_f1 = 0.0;
};

/// Threshold sweep over all distinct rank-1 scores. A query is an actual
/// positive when at least one database keyframe lies within revisit_m.
PrCurveResult pr_curve_and_auc(const std::vector<QueryOutcome>& outcomes, double revisit_m);

struct SuccessRates {
    std::optional<double> pe_succ;
    std::optional<double> gl_two_stage;
    double gl_one_stage = 0.0;
};

SuccessRates success_rates(const std::vector<QueryOutcome>& outcomes, double revisit_m,
                           double re_max_deg = 5.0, double te_max_m = 2.0);

MetricsReport compute_metrics(const std::vector<QueryOutcome>& outcomes, double revisit_m,
                              int max_n = 5, double re_max_deg = 5.0, double te_max_m = 2.0);

std::vector<std::pair<double, MetricsReport>> revisit_sweep(
    const std::vector<QueryOutcome>& outcomes,
    const std::vector<double>& thresholds = {5.0, 10.0, 20.0, 25.0});

struct EvalQuery {
    int id = 0;
    Pose2 gt_pose;
    PointCloud cloud;
};

struct EvalOptions {
    int n_threads = 1;
    bool refine = true;
    bool icp = false;
};

/// Runs the exhaustive PR-by-PE search plus refinement for every query.
/// `keyframe_clouds`, when given (indexed like db.keyframes), enables ICP polish.
std::vector<QueryOutcome> evaluate_queries(const KeyframeDatabase& db,
                                           const std::vector<EvalQuery>& queries,
                                           const EvalOptions& opt,
                                           const std::vector<PointCloud>* keyframe_clouds = nullptr);

// Report emission (JSON full report, CSV per-threshold table, per-query CSV,
// PR curve CSV of threshold/precision/recall rows).
void write_report_json(const std::vector<std::pair<double, MetricsReport>>& sweep,
                       double primary_revisit_m, const std::string& path);
void write_report_csv(const std::vector<std::pair<double, MetricsReport>>& sweep,
                      const std::string& path);
void write_outcomes_csv(const std::vector<QueryOutcome>& outcomes, const std::string& path);
void write_pr_curve_csv(const std::vector<PrPoint>& curve, const std::string& path);

}  // namespace ringloc
