#pragma once

#include "lapi/errors.hpp"

#include <cmath>
#include <string>

namespace lapi {

template <typename F>
void for_each_policy(std::size_t num_states, std::size_t num_actions, F&& f) {
    if (policy_count(num_states, num_actions) > kMaxEnumeratedPolicies)
        throw SizeLimitExceeded("policy enumeration: |A|^|S| = " + std::to_string(num_actions) + "^" +
                                std::to_string(num_states) +
                                " exceeds the 1e6 cap; use sample mode instead");
    Policy mu(num_states, 0);
    for (;;) {
        f(static_cast<const Policy&>(mu));
        // odometer increment, last state fastest
        std::size_t pos = num_states;
        while (pos > 0) {
            --pos;
            if (static_cast<std::size_t>(++mu[pos]) < num_actions) break;
            mu[pos] = 0;
            if (pos == 0) return;
        }
        if (num_states == 0) return;
    }
}

}  // namespace lapi
