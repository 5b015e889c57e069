// SPDX-License-Identifier: Apache-2.0
//
// JSON-lines metrics log and RFC-4180 CSV tables. Every reported number is
// recomputable from the raw log.

#ifndef ISACSPIKE_METRICS_HPP_
#define ISACSPIKE_METRICS_HPP_

#include <fstream>
#include <string>

#include <json.hpp>

#include "isacspike/rl.hpp"

namespace isacspike {

using Json = nlohmann::json;

Json iteration_to_json(const IterationReport& report, const std::string& agent);
Json eval_summary_to_json(const EvalReport& report, const std::string& agent);

class MetricsWriter {
  public:
    // Appends to an existing log so resumed runs keep one file.
    explicit MetricsWriter(const std::string& path);

    void write_header(std::uint64_t config_hash, const std::string& agent, std::uint64_t seed);
    void write_iteration(const IterationReport& report, const std::string& agent);
    void write_json(const Json& record);

  private:
    std::ofstream out_;
};

std::string csv_quote(const std::string& field);
void write_eval_csv(const std::string& path, const EvalReport& report);

}  // namespace isacspike

#endif  // ISACSPIKE_METRICS_HPP_
