#pragma once

#include "dgasn/trainer.hpp"

namespace dgasn {

struct GradCheckReport {
    double worst_fd_error = 0.0;       // finite differences over theta_y, theta_z, theta_d
    double worst_encoder_fd = 0.0;     // finite differences over theta_h, domain loss excluded
    double worst_grl_identity = 0.0;   // |grad_rev + lambda*grad_plain| on theta_h, elementwise max
    double worst_disc_identity = 0.0;  // theta_d gradient difference between the two runs
    bool passed(double fd_tol = 1e-4, double grl_tol = 1e-9) const {
        return worst_fd_error <= fd_tol && worst_encoder_fd <= fd_tol &&
               worst_grl_identity <= grl_tol && worst_disc_identity <= grl_tol;
    }
};

// Builds the full objective on the given pair and verifies every gradient
// route: central differences where the forward scalar is the optimized
// quantity, and the two-run -lambda identity for the reversed domain path.
GradCheckReport run_gradcheck(const Graph& source, const Graph& target, const TrainConfig& cfg,
                              double eps = 1e-5);

}  // namespace dgasn
