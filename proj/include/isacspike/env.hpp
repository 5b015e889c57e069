// SPDX-License-Identifier: Apache-2.0

#ifndef ISACSPIKE_ENV_HPP_
#define ISACSPIKE_ENV_HPP_

#include <cstdint>
#include <functional>
#include <memory>

#include "isacspike/common.hpp"

namespace isacspike {

// Per-step diagnostics; empty for toy environments.
struct StepDiag {
    double sum_rate = 0.0;
    Vec rates;
    double mean_crlb_theta = 0.0;
    double mean_crlb_d = 0.0;
    bool constraint_ok = true;
    Vec theta_err;  // estimate minus truth after this step's measurement
    Vec d_err;
};

struct StepResult {
    Vec observation;
    double reward = 0.0;
    bool done = false;
    StepDiag diag;
};

class Environment {
  public:
    virtual ~Environment() = default;
    virtual int observation_dim() const = 0;
    virtual int action_dim() const = 0;
    virtual Vec reset() = 0;
    virtual StepResult step(const Vec& raw_action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<Environment>(std::uint64_t seed)>;

}  // namespace isacspike

#endif  // ISACSPIKE_ENV_HPP_
