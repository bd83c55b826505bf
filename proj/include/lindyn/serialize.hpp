#pragma once

#include <string>
#include <vector>

#include "lindyn/conservation.hpp"
#include "lindyn/types.hpp"

namespace lindyn {

// All numeric output goes through one fixed %.17g formatter so identical
// inputs produce byte-identical files on every platform.
std::string format_double(double v);

// Trajectory CSV, schema: t,loss,output,ntk,zeta,u_norm,w_norm
std::string trajectory_csv(const Trajectory& traj);

// Alignment CSV, schema: t,zeta,u_norm,w_norm
std::string alignment_csv(const Trajectory& traj);

// JSON array of {t, u: [...], W: [[...]]} records.
std::string weights_json(const Trajectory& traj);

// JSON array of {law, max_drift, t_at_max} records.
std::string audit_json(const std::vector<ConservationReport>& reports);

void write_file(const std::string& path, const std::string& content);

}  // namespace lindyn
