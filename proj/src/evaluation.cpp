#include "ringloc/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace ringloc {

namespace {

bool rank1_correct(const QueryOutcome& o, double revisit_m) {
    return !o.ranking.empty() && o.ranking.front().dist_m <= revisit_m;
}

bool has_positive(const QueryOutcome& o, double revisit_m) {
    return o.gt_nn_dist_m <= revisit_m;
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = p * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

double recall_at_n(const std::vector<QueryOutcome>& outcomes, double revisit_m, int n) {
    if (n < 1) throw std::invalid_argument("recall_at_n: n must be >= 1");
    if (outcomes.empty()) return 0.0;
    int hits = 0;
    for (const QueryOutcome& o : outcomes) {
        const int top = std::min<int>(n, static_cast<int>(o.ranking.size()));
        for (int i = 0; i < top; ++i) {
            if (o.ranking[i].dist_m <= revisit_m) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

PrCurveResult pr_curve_and_auc(const std::vector<QueryOutcome>& outcomes, double revisit_m) {
    PrCurveResult result;
    int actual_positives = 0;
    for (const QueryOutcome& o : outcomes)
        if (has_positive(o, revisit_m)) ++actual_positives;

    std::vector<double> thresholds;
    thresholds.reserve(outcomes.size());
    for (const QueryOutcome& o : outcomes) thresholds.push_back(o.score);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    for (double thr : thresholds) {
        int tp = 0, fp = 0;
        for (const QueryOutcome& o : outcomes) {
            if (o.score < thr) continue;
            if (rank1_correct(o, revisit_m))
                ++tp;
            else
                ++fp;
        }
        if (tp + fp == 0 || actual_positives == 0) continue;
        PrPoint pt;
        pt.threshold = thr;
        pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        pt.recall = static_cast<double>(tp) / static_cast<double>(actual_positives);
        result.curve.push_back(pt);
        if (pt.precision + pt.recall > 0.0) {
            const double f1 = 2.0 * pt.precision * pt.recall / (pt.precision + pt.recall);
            result.max_f1 = std::max(result.max_f1, f1);
        }
    }

    // Trapezoid over the recall axis.
    std::vector<PrPoint> by_recall = result.curve;
    std::sort(by_recall.begin(), by_recall.end(),
              [](const PrPoint& a, const PrPoint& b) { return a.recall < b.recall; });
    double auc = 0.0;
    for (std::size_t i = 1; i < by_recall.size(); ++i)
        auc += (by_recall[i].recall - by_recall[i - 1].recall) *
               (by_recall[i].precision + by_recall[i - 1].precision) / 2.0;
    // Extend to recall = 0 at the first point's precision.
    if (!by_recall.empty()) auc += by_recall.front().recall * by_recall.front().precision;
    result.auc = auc;
    return result;
}

SuccessRates success_rates(const std::vector<QueryOutcome>& outcomes, double revisit_m,
                           double re_max_deg, double te_max_m) {
    if (re_max_deg <= 0.0 || te_max_m <= 0.0)
        throw std::invalid_argument("success_rates: thresholds must be positive");
    SuccessRates rates;
    if (outcomes.empty()) return rates;
    int correct = 0, pe_hits = 0, gl_hits = 0;
    for (const QueryOutcome& o : outcomes) {
        double re, te;
        pose_errors(o.est_pose, o.gt_pose, re, te);
        const bool localized = re < re_max_deg && te < te_max_m;
        if (localized) ++gl_hits;
        if (rank1_correct(o, revisit_m)) {
            ++correct;
            if (localized) ++pe_hits;
        }
    }
    rates.gl_one_stage = static_cast<double>(gl_hits) / static_cast<double>(outcomes.size());
    if (correct > 0) {
        rates.pe_succ = static_cast<double>(pe_hits) / static_cast<double>(correct);
        const double r1 = static_cast<double>(correct) / static_cast<double>(outcomes.size());
        rates.gl_two_stage = r1 * *rates.pe_succ;
    }
    return rates;
}

MetricsReport compute_metrics(const std::vector<QueryOutcome>& outcomes, double revisit_m,
                              int max_n, double re_max_deg, double te_max_m) {
    MetricsReport report;
    for (int n = 1; n <= max_n; ++n)
        report.recall_at_n.push_back(recall_at_n(outcomes, revisit_m, n));

    PrCurveResult pr = pr_curve_and_auc(outcomes, revisit_m);
    report.pr_curve = std::move(pr.curve);
    report.auc = pr.auc;
    report.max_f1 = pr.max_f1;

    // Pose-error percentiles over correctly retrieved queries (all queries when
    // nothing is retrieved correctly).
    std::vector<double> res, tes;
    for (const QueryOutcome& o : outcomes) {
        if (!rank1_correct(o, revisit_m)) continue;
        double re, te;
        pose_errors(o.est_pose, o.gt_pose, re, te);
        res.push_back(re);
        tes.push_back(te);
    }
    if (res.empty()) {
        for (const QueryOutcome& o : outcomes) {
            double re, te;
            pose_errors(o.est_pose, o.gt_pose, re, te);
            res.push_back(re);
            tes.push_back(te);
        }
    }
    report.re_p50 = percentile(res, 0.50);
    report.re_p75 = percentile(res, 0.75);
    report.te_p50 = percentile(tes, 0.50);
    report.te_p75 = percentile(tes, 0.75);

    const SuccessRates rates = success_rates(outcomes, revisit_m, re_max_deg, te_max_m);
    report.pe_succ = rates.pe_succ;
    report.gl_succ_two_stage = rates.gl_two_stage;
    report.gl_succ_one_stage = rates.gl_one_stage;
    return report;
}

std::vector<std::pair<double, MetricsReport>> revisit_sweep(
    const std::vector<QueryOutcome>& outcomes, const std::vector<double>& thresholds) {
    std::vector<std::pair<double, MetricsReport>> table;
    for (double r : thresholds) table.emplace_back(r, compute_metrics(outcomes, r));
    return table;
}

std::vector<QueryOutcome> evaluate_queries(const KeyframeDatabase& db,
                                           const std::vector<EvalQuery>& queries,
                                           const EvalOptions& opt,
                                           const std::vector<PointCloud>* keyframe_clouds) {
    if (db.empty()) throw std::invalid_argument("evaluate_queries: empty database");
    const FilterBank bank = FilterBank::seeded(db.config.grid.n_z_channels, db.config.bank_seed);

    std::vector<QueryOutcome> outcomes(queries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t qi; (qi = next.fetch_add(1)) < queries.size();) {
            const EvalQuery& q = queries[qi];
            const Keyframe query_kf =
                make_keyframe(q.id, Pose2::identity(), q.cloud, db.config, bank);
            RankedRetrieval ranked = pr_by_pe_search(query_kf, db, db.config.localizer, 1);

            QueryOutcome& out = outcomes[qi];
            out.query_id = q.id;
            out.gt_pose = q.gt_pose;
            out.gt_nn_dist_m = nearest_keyframe(db, q.gt_pose).second;
            for (const auto& [id, est] : ranked.entries) {
                RankedMatch m;
                m.keyframe_id = id;
                m.score = est.translation_score;
                for (const Keyframe& kf : db.keyframes) {
                    if (kf.id == id) {
                        m.dist_m = std::hypot(kf.pose.x - q.gt_pose.x, kf.pose.y - q.gt_pose.y);
                        break;
                    }
                }
                out.ranking.push_back(m);
            }

            const auto& [best_id, best_est] = ranked.entries.front();
            const Keyframe* best_kf = nullptr;
            std::size_t best_index = 0;
            for (std::size_t k = 0; k < db.size(); ++k) {
                if (db.keyframes[k].id == best_id) {
                    best_kf = &db.keyframes[k];
                    best_index = k;
                    break;
                }
            }
            PairEstimate refined = best_est;
            if (opt.refine)
                refined = refine_pose(query_kf, *best_kf, best_est, bank, db.config.localizer);

            Pose2 relative = refined.pose;
            if (opt.icp && keyframe_clouds != nullptr) {
                const PointCloud q_ng = remove_ground(q.cloud, db.config.ground_z_m);
                const PointCloud m_ng =
                    remove_ground((*keyframe_clouds)[best_index], db.config.ground_z_m);
                if (!q_ng.empty() && !m_ng.empty())
                    relative = icp_refine(q_ng, m_ng, relative, db.config.localizer).pose;
            }

            out.retrieved_id = best_id;
            out.score = refined.translation_score;
            out.est_pose = compose_global_pose(best_kf->pose, relative);
        }
    };
    if (opt.n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < opt.n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return outcomes;
}

namespace {

nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["recall_at_n"] = r.recall_at_n;
    j["max_f1"] = r.max_f1;
    j["auc"] = r.auc;
    j["re_p50_deg"] = r.re_p50;
    j["re_p75_deg"] = r.re_p75;
    j["te_p50_m"] = r.te_p50;
    j["te_p75_m"] = r.te_p75;
    if (r.pe_succ)
        j["pe_succ"] = *r.pe_succ;
    else
        j["pe_succ"] = nullptr;
    if (r.gl_succ_two_stage)
        j["gl_succ_two_stage"] = *r.gl_succ_two_stage;
    else
        j["gl_succ_two_stage"] = nullptr;
    j["gl_succ_one_stage"] = r.gl_succ_one_stage;
    return j;
}

}  // namespace

void write_report_json(const std::vector<std::pair<double, MetricsReport>>& sweep,
                       double primary_revisit_m, const std::string& path) {
    nlohmann::json j;
    j["primary_revisit_m"] = primary_revisit_m;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [r, report] : sweep) {
        nlohmann::json entry = report_to_json(report);
        entry["revisit_m"] = r;
        arr.push_back(entry);
    }
    j["sweep"] = arr;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_report_csv(const std::vector<std::pair<double, MetricsReport>>& sweep,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "revisit_m,recall_at_1,max_f1,auc,re_p50_deg,re_p75_deg,te_p50_m,te_p75_m,"
           "pe_succ,gl_succ_two_stage,gl_succ_one_stage\n";
    for (const auto& [r, rep] : sweep) {
        char buf[512];
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s,%s,%.9g\n", r,
                      rep.recall_at_n.empty() ? 0.0 : rep.recall_at_n[0], rep.max_f1, rep.auc,
                      rep.re_p50, rep.re_p75, rep.te_p50, rep.te_p75,
                      rep.pe_succ ? std::to_string(*rep.pe_succ).c_str() : "",
                      rep.gl_succ_two_stage ? std::to_string(*rep.gl_succ_two_stage).c_str() : "",
                      rep.gl_succ_one_stage);
        out << buf;
    }
}

void write_outcomes_csv(const std::vector<QueryOutcome>& outcomes, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "query_id,retrieved_id,score,gt_nn_dist_m,re_deg,te_m,"
           "gt_theta,gt_x,gt_y,est_theta,est_x,est_y\n";
    for (const QueryOutcome& o : outcomes) {
        double re, te;
        pose_errors(o.est_pose, o.gt_pose, re, te);
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", o.query_id,
                      o.retrieved_id, o.score, o.gt_nn_dist_m, re, te, o.gt_pose.theta, o.gt_pose.x,
                      o.gt_pose.y, o.est_pose.theta, o.est_pose.x, o.est_pose.y);
        out << buf;
    }
}

void write_pr_curve_csv(const std::vector<PrPoint>& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "threshold,precision,recall\n";
    for (const PrPoint& p : curve) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", p.threshold, p.precision, p.recall);
        out << buf;
    }
}

}  // namespace ringloc
