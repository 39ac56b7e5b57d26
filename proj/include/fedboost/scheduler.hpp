#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>

// Adaptive communication-interval controller. The interval I is the number
// of local boosting rounds a client performs between synchronizations; the
// controller grows it while the global error keeps falling and shrinks it
// when the error regresses.
//
// Step-size naming: the growth/shrink steps are called step_up/step_down
// here to avoid colliding with the boosting weight alpha.

namespace fedboost {

struct SchedulerParams {
    double theta1 = 0.0;    // grow when (eps_t - eps_prev) < theta1
    double theta2 = 0.005;  // shrink when (eps_t - eps_prev) > theta2
    int step_up = 1;
    int step_down = 2;
    int i_min = 1;
    int i_max = 16;

    void validate() const {
        if (!(theta1 <= theta2))
            throw std::invalid_argument("scheduler: theta1 must be <= theta2");
        if (step_up < 1 || step_down < 1)
            throw std::invalid_argument("scheduler: steps must be positive integers");
        if (i_min < 1 || i_min > i_max)
            throw std::invalid_argument("scheduler: need 1 <= i_min <= i_max");
    }
};

struct SchedulerState {
    int interval = 1;
    std::optional<double> last_error;  // absent before the first evaluation
};

// Three-branch rule on the error delta, then the max(1, .) floor, then the
// [i_min, i_max] clamp. The first evaluation only records last_error.
inline SchedulerState next_interval(SchedulerState state, const SchedulerParams& params,
                                    double epsilon_t) {
    params.validate();
    if (!(epsilon_t >= 0.0 && epsilon_t <= 1.0))
        throw std::invalid_argument("next_interval: epsilon must be in [0, 1]");

    if (state.last_error) {
        const double delta = epsilon_t - *state.last_error;
        if (delta < params.theta1)
            state.interval += params.step_up;
        else if (delta > params.theta2)
            state.interval = std::max(1, state.interval - params.step_down);
        state.interval = std::clamp(state.interval, params.i_min, params.i_max);
    }
    state.last_error = epsilon_t;
    return state;
}

}  // namespace fedboost
