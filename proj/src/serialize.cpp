#include "lindyn/serialize.hpp"

#include <cstdio>
#include <fstream>

#include "lindyn/errors.hpp"

namespace lindyn {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,loss,output,ntk,zeta,u_norm,w_norm\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += format_double(traj.times[k]);
        out += ',';
        out += format_double(traj.loss[k]);
        out += ',';
        out += format_double(traj.output[k]);
        out += ',';
        out += format_double(traj.ntk[k]);
        out += ',';
        out += format_double(traj.zeta[k]);
        out += ',';
        out += format_double(traj.u_norm[k]);
        out += ',';
        out += format_double(traj.w_norm[k]);
        out += '\n';
    }
    return out;
}

std::string alignment_csv(const Trajectory& traj) {
    std::string out = "t,zeta,u_norm,w_norm\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += format_double(traj.times[k]);
        out += ',';
        out += format_double(traj.zeta[k]);
        out += ',';
        out += format_double(traj.u_norm[k]);
        out += ',';
        out += format_double(traj.w_norm[k]);
        out += '\n';
    }
    return out;
}

std::string weights_json(const Trajectory& traj) {
    std::string out = "[\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const WeightState& s = traj.states[k];
        out += "  {\"t\": ";
        out += format_double(s.t);
        out += ", \"u\": [";
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            if (i) out += ", ";
            out += format_double(s.u[i]);
        }
        out += "], \"W\": [";
        for (std::size_t i = 0; i < s.W.size(); ++i) {
            if (i) out += ", ";
            out += '[';
            for (std::size_t j = 0; j < s.W[i].size(); ++j) {
                if (j) out += ", ";
                out += format_double(s.W[i][j]);
            }
            out += ']';
        }
        out += "]}";
        if (k + 1 < traj.states.size()) out += ',';
        out += '\n';
    }
    out += "]\n";
    return out;
}

std::string audit_json(const std::vector<ConservationReport>& reports) {
    std::string out = "[\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
        out += "  {\"law\": \"" + reports[k].law + "\", \"max_drift\": ";
        out += format_double(reports[k].max_drift);
        out += ", \"t_at_max\": ";
        out += format_double(reports[k].t_at_max);
        out += '}';
        if (k + 1 < reports.size()) out += ',';
        out += '\n';
    }
    out += "]\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open output file: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw config_error("write failed: " + path);
}

}  // namespace lindyn
