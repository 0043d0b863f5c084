#include "flocksim/export.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace flocksim {

namespace {
constexpr int kSchemaVersion = 1;

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}
}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw ValidationError("double formatting failed");
    return std::string(buf, p);
}

void write_states_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    const Eigen::Index d = traj.dim();
    out << "t,agent";
    for (Eigen::Index k = 1; k <= d; ++k) out << ",x" << k;
    for (Eigen::Index k = 1; k <= d; ++k) out << ",v" << k;
    out << "\n";
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        const AgentEnsemble& st = traj.samples[s];
        for (Eigen::Index i = 0; i < st.n_agents(); ++i) {
            out << format_double(traj.times[s]) << ',' << i;
            for (Eigen::Index k = 0; k < d; ++k)
                out << ',' << format_double(st.positions(i, k));
            for (Eigen::Index k = 0; k < d; ++k)
                out << ',' << format_double(st.velocities(i, k));
            out << "\n";
        }
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

void write_diagnostics_csv(const Trajectory& traj, const DiagnosticSeries& diag,
                           const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    const Eigen::Index d = traj.dim();
    const Eigen::Index n = traj.n_agents();
    out << "t,vel_diameter_2,pos_diameter,psi_min";
    for (Eigen::Index k = 1; k <= d; ++k) out << ",vM_" << k;
    for (Eigen::Index k = 1; k <= d; ++k) out << ",vm_" << k;
    for (Eigen::Index i = 1; i <= n; ++i) out << ",speed_" << i;
    out << "\n";
    for (std::size_t s = 0; s < diag.times.size(); ++s) {
        out << format_double(diag.times[s]) << ',' << format_double(diag.vel_diameter_2[s])
            << ',' << format_double(diag.pos_diameter[s]) << ','
            << format_double(diag.psi_min[s]);
        for (Eigen::Index k = 0; k < d; ++k) out << ',' << format_double(diag.vM(s, k));
        for (Eigen::Index k = 0; k < d; ++k) out << ',' << format_double(diag.vm(s, k));
        for (Eigen::Index i = 0; i < n; ++i)
            out << ',' << format_double(diag.speed_norms(s, i));
        out << "\n";
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

void write_trajectory_json(const Trajectory& traj, const DiagnosticSeries& diag,
                           const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["n_agents"] = traj.n_agents();
    doc["dim"] = traj.dim();
    doc["times"] = traj.times;

    auto matrix_to_json = [](const Matrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
            rows.push_back(std::move(row));
        }
        return rows;
    };

    nlohmann::json states = nlohmann::json::array();
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        nlohmann::json st;
        st["t"] = traj.times[s];
        st["x"] = matrix_to_json(traj.samples[s].positions);
        st["v"] = matrix_to_json(traj.samples[s].velocities);
        states.push_back(std::move(st));
    }
    doc["states"] = std::move(states);

    nlohmann::json events = nlohmann::json::array();
    for (const Event& e : traj.events) {
        nlohmann::json ev;
        ev["t"] = e.time;
        switch (e.kind) {
            case EventKind::FlockingDetected: ev["kind"] = "flocking_detected"; break;
            case EventKind::CoordinateSignExit: ev["kind"] = "coordinate_sign_exit"; break;
            case EventKind::ClampApplied: ev["kind"] = "clamp_applied"; break;
        }
        if (e.coordinate >= 0) ev["coordinate"] = e.coordinate;
        events.push_back(std::move(ev));
    }
    doc["events"] = std::move(events);

    nlohmann::json dg;
    dg["vel_diameter_2"] = std::vector<double>(diag.vel_diameter_2.begin(),
                                               diag.vel_diameter_2.end());
    dg["pos_diameter"] =
        std::vector<double>(diag.pos_diameter.begin(), diag.pos_diameter.end());
    dg["psi_min"] = std::vector<double>(diag.psi_min.begin(), diag.psi_min.end());
    dg["vM"] = matrix_to_json(diag.vM);
    dg["vm"] = matrix_to_json(diag.vm);
    dg["speeds"] = matrix_to_json(diag.speed_norms);
    doc["diagnostics"] = std::move(dg);

    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
    if (!out) throw ValidationError("write failed: " + path.string());
}

namespace {

nlohmann::json condition_to_json(const ConditionReport& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["lhs"] = c.lhs;
    j["rhs"] = std::isinf(c.rhs) ? nlohmann::json() : nlohmann::json(c.rhs);
    if (std::isinf(c.lhs)) j["lhs"] = nlohmann::json();
    j["relation"] = c.relation == Relation::GreaterThan ? ">" : "<";
    j["satisfied"] = c.satisfied;
    j["horizon"] = std::isinf(c.horizon) ? nlohmann::json() : nlohmann::json(c.horizon);
    j["source"] = c.source;
    j["advisory"] = c.advisory;
    j["notes"] = c.notes;
    return j;
}

}  // namespace

void write_reports_json(const std::vector<ConditionReport>& conditions,
                        const std::vector<PropertyReport>& properties,
                        const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["conditions"] = nlohmann::json::array();
    for (const auto& c : conditions) doc["conditions"].push_back(condition_to_json(c));
    doc["properties"] = nlohmann::json::array();
    for (const auto& p : properties) {
        nlohmann::json j;
        j["name"] = p.name;
        j["passed"] = p.passed;
        j["worst"] = p.worst;
        j["detail"] = p.detail;
        doc["properties"].push_back(std::move(j));
    }
    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
    if (!out) throw ValidationError("write failed: " + path.string());
}

std::string render_reports_text(const std::vector<ConditionReport>& conditions,
                                const std::vector<PropertyReport>& properties) {
    std::ostringstream os;
    for (const auto& c : conditions) {
        os << (c.satisfied ? "[ ok ] " : "[FAIL] ") << c.name << ": lhs=" << c.lhs
           << (c.relation == Relation::GreaterThan ? " > " : " < ") << "rhs=" << c.rhs
           << "  horizon=" << c.horizon << "  source=" << c.source;
        if (c.advisory) os << "  (advisory)";
        os << "\n";
        for (const auto& note : c.notes) os << "         note: " << note << "\n";
    }
    for (const auto& p : properties) {
        os << (p.passed ? "[ ok ] " : "[FAIL] ") << p.name << ": worst=" << p.worst << "  "
           << p.detail << "\n";
    }
    return os.str();
}

Trajectory read_states_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw ValidationError("empty states file");

    std::size_t cols = 1;
    for (char c : header) cols += (c == ',');
    if (cols < 4 || (cols - 2) % 2 != 0)
        throw ValidationError("unexpected states header: " + header);
    const Eigen::Index d = static_cast<Eigen::Index>((cols - 2) / 2);

    Trajectory traj;
    std::vector<double> row(cols);
    std::string line;
    std::vector<Eigen::Index> agents_seen;
    Matrix x, v;
    double cur_t = 0.0;
    bool block_open = false;

    auto flush = [&]() {
        if (!block_open) return;
        traj.times.push_back(cur_t);
        AgentEnsemble st;
        st.positions = x;
        st.velocities = v;
        st.time = cur_t;
        st.validate();
        traj.samples.push_back(std::move(st));
        traj.pair_vel_integrals.emplace_back();
        block_open = false;
    };

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0, idx = 0;
        while (idx < cols) {
            const std::size_t next = line.find(',', pos);
            const std::string tok =
                line.substr(pos, next == std::string::npos ? next : next - pos);
            double val;
            const char* end = tok.data() + tok.size();
            auto [pp, ec] = std::from_chars(tok.data(), end, val);
            if (ec != std::errc() || pp != end)
                throw ValidationError("bad CSV field '" + tok + "'");
            row[idx++] = val;
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (idx != cols) throw ValidationError("short CSV row");

        const double t = row[0];
        const Eigen::Index agent = static_cast<Eigen::Index>(row[1]);
        if (!block_open || t != cur_t) {
            flush();
            cur_t = t;
            block_open = true;
            x.resize(0, d);
            v.resize(0, d);
        }
        if (agent != x.rows()) throw ValidationError("agent rows out of order");
        x.conservativeResize(agent + 1, d);
        v.conservativeResize(agent + 1, d);
        for (Eigen::Index k = 0; k < d; ++k) {
            x(agent, k) = row[2 + k];
            v(agent, k) = row[2 + d + k];
        }
    }
    flush();
    if (traj.samples.empty()) throw ValidationError("states file holds no samples");
    return traj;
}

}  // namespace flocksim
