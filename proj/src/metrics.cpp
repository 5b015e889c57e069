// SPDX-License-Identifier: Apache-2.0

#include "isacspike/metrics.hpp"

#include <stdexcept>

namespace isacspike {

Json iteration_to_json(const IterationReport& r, const std::string& agent) {
    return Json{{"type", "iteration"},
                {"agent", agent},
                {"iteration", r.iteration},
                {"mean_reward", r.mean_reward},
                {"objective", r.objective},
                {"critic_loss", r.critic_loss},
                {"firing_rates", r.firing_rates},
                {"energy_train_j", r.energy_train_j},
                {"wall_s", r.wall_s},
                {"mean_sum_rate", r.mean_sum_rate},
                {"transitions", r.transitions},
                {"episodes", r.episodes},
                {"skipped_samples", r.skipped_samples}};
}

Json eval_summary_to_json(const EvalReport& r, const std::string& agent) {
    return Json{{"type", "eval"},
                {"agent", agent},
                {"episodes", r.episodes},
                {"total_steps", r.total_steps},
                {"mean_reward", r.mean_reward},
                {"mean_sum_rate", r.mean_sum_rate},
                {"rmse_theta", r.rmse_theta},
                {"rmse_d", r.rmse_d},
                {"mean_crlb_theta", r.mean_crlb_theta},
                {"mean_crlb_d", r.mean_crlb_d},
                {"mean_fairness", r.mean_fairness},
                {"energy_per_step_j", r.energy_per_step_j},
                {"mean_firing_rates", r.mean_firing_rates}};
}

MetricsWriter::MetricsWriter(const std::string& path) : out_(path, std::ios::app) {
    if (!out_) throw std::runtime_error("metrics: cannot open " + path);
}

void MetricsWriter::write_header(std::uint64_t config_hash, const std::string& agent,
                                 std::uint64_t seed) {
    write_json(Json{{"type", "run_header"},
                    {"config_hash", config_hash},
                    {"agent", agent},
                    {"seed", seed}});
}

void MetricsWriter::write_iteration(const IterationReport& report, const std::string& agent) {
    write_json(iteration_to_json(report, agent));
}

void MetricsWriter::write_json(const Json& record) {
    out_ << record.dump() << "\n";
    out_.flush();
}

std::string csv_quote(const std::string& field) {
    bool needs_quotes = false;
    for (char c : field)
        if (c == ',' || c == '"' || c == '\n' || c == '\r') needs_quotes = true;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

void write_eval_csv(const std::string& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("metrics: cannot open " + path);
    const std::size_t k =
        report.rows.empty() ? 0 : report.rows.front().rates.size();
    out << "episode,step,reward,sum_rate";
    for (std::size_t i = 0; i < k; ++i) out << ",rate_" << i;
    for (std::size_t i = 0; i < k; ++i) out << ",theta_err_" << i;
    for (std::size_t i = 0; i < k; ++i) out << ",d_err_" << i;
    out << ",mean_crlb_theta,mean_crlb_d,fairness\r\n";
    out.precision(17);
    for (const auto& row : report.rows) {
        out << row.episode << ',' << row.step << ',' << row.reward << ',' << row.sum_rate;
        for (double r : row.rates) out << ',' << r;
        for (double e : row.theta_err) out << ',' << e;
        for (double e : row.d_err) out << ',' << e;
        out << ',' << row.mean_crlb_theta << ',' << row.mean_crlb_d << ',' << row.fairness
            << "\r\n";
    }
}

}  // namespace isacspike
