#include "machlab/snapshot.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "machlab/errors.hpp"
#include "machlab/rsw.hpp"

namespace machlab {

const std::vector<double>* Snapshot::find(const std::string& name) const {
    for (const auto& [n, v] : fields)
        if (n == name) return &v;
    return nullptr;
}

void write_snapshot(const std::string& path, const Snapshot& snap, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_snapshot: cannot open " + path);
    const Grid& g = *snap.grid;
    char buf[64];
    out << "machlab-snapshot 1\n";
    out << "kind " << (g.kind == DomainKind::channel ? "channel" : "annulus") << "\n";
    out << "n_periodic " << g.nx << "\n";
    out << "n_wall " << g.ny << "\n";
    std::snprintf(buf, sizeof buf, "%.17g",
                  g.kind == DomainKind::channel ? g.length_x : g.wall_a);
    out << "extent_a " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", g.wall_b);
    out << "extent_b " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", g.dealias_fraction);
    out << "dealias_fraction " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", snap.time);
    out << "time " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", snap.epsilon);
    out << "epsilon " << buf << "\n";
    out << "payload " << (binary ? "binary" : "text") << "\n";
    out << "fields";
    for (const auto& [name, vals] : snap.fields) {
        if (static_cast<int>(vals.size()) != g.num_nodes())
            throw ConfigError("write_snapshot: field size mismatch for " + name);
        out << " " << name;
    }
    out << "\ndata\n";
    if (binary) {
        for (const auto& [name, vals] : snap.fields)
            out.write(reinterpret_cast<const char*>(vals.data()),
                      static_cast<std::streamsize>(vals.size() * sizeof(double)));
    } else {
        for (const auto& [name, vals] : snap.fields)
            for (double v : vals) {
                std::snprintf(buf, sizeof buf, "%.17g\n", v);
                out << buf;
            }
    }
    if (!out) throw NumericalError("write_snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_snapshot: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "machlab-snapshot 1")
        throw ConfigError("read_snapshot: bad magic in " + path);

    std::string kind_str, payload = "text";
    int nx = 0, ny = 0;
    double ea = kDefaultExtent, eb = kDefaultExtent, frac = 2.0 / 3.0;
    Snapshot snap;
    std::vector<std::string> names;
    while (std::getline(in, line)) {
        if (line == "data") break;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "kind") ss >> kind_str;
        else if (key == "n_periodic") ss >> nx;
        else if (key == "n_wall") ss >> ny;
        else if (key == "extent_a") ss >> ea;
        else if (key == "extent_b") ss >> eb;
        else if (key == "dealias_fraction") ss >> frac;
        else if (key == "time") ss >> snap.time;
        else if (key == "epsilon") ss >> snap.epsilon;
        else if (key == "payload") ss >> payload;
        else if (key == "fields") {
            std::string n;
            while (ss >> n) names.push_back(n);
        } else {
            throw ConfigError("read_snapshot: unknown header key '" + key + "'");
        }
    }
    DomainKind kind;
    if (kind_str == "channel") kind = DomainKind::channel;
    else if (kind_str == "annulus") kind = DomainKind::annulus;
    else throw ConfigError("read_snapshot: unknown kind '" + kind_str + "'");
    // channel stores (Lx, Ly) = (extent_a read back as length, wall_b)
    snap.grid = make_grid(kind, nx, ny, ea, eb, frac);

    const size_t count = static_cast<size_t>(nx) * ny;
    for (const std::string& name : names) {
        std::vector<double> vals(count);
        if (payload == "binary") {
            in.read(reinterpret_cast<char*>(vals.data()),
                    static_cast<std::streamsize>(count * sizeof(double)));
            if (!in) throw ConfigError("read_snapshot: truncated binary payload");
        } else {
            for (size_t i = 0; i < count; ++i)
                if (!(in >> vals[i])) throw ConfigError("read_snapshot: truncated text payload");
        }
        snap.fields.emplace_back(name, std::move(vals));
    }
    return snap;
}

Snapshot to_snapshot(const State& s) {
    Snapshot snap;
    snap.grid = s.grid();
    snap.time = s.time;
    snap.epsilon = s.epsilon;
    snap.fields.emplace_back("rho", s.rho.v);
    snap.fields.emplace_back("u1", s.u.c1);
    snap.fields.emplace_back("u2", s.u.c2);
    return snap;
}

State state_from_snapshot(const Snapshot& snap) {
    State s(snap.grid, snap.epsilon > 0.0 ? snap.epsilon : 1.0, snap.time);
    const std::vector<double>* rho = snap.find("rho");
    const std::vector<double>* u1 = snap.find("u1");
    const std::vector<double>* u2 = snap.find("u2");
    if (!rho || !u1 || !u2)
        throw ConfigError("state_from_snapshot: snapshot lacks rho/u1/u2 fields");
    s.rho.v = *rho;
    s.u.c1 = *u1;
    s.u.c2 = *u2;
    return s;
}

void write_timeseries_csv(const std::string& path, const Trajectory& traj,
                          const Projector& proj, bool with_k_integral) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_timeseries_csv: cannot open " + path);
    out << "time,l2_rho,l2_u,l2_uQ,l2_uP,mass,energy";
    if (with_k_integral) out << ",k_integral";
    out << "\n";
    char buf[512];
    for (const State& s : traj.states) {
        Decomposition d = proj.project_Q(s);
        const double energy = 0.5 * (inner(s.rho, s.rho) + inner(s.u, s.u));
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e", s.time,
                      l2_norm(s.rho), l2_norm(s.u), l2_norm(d.fast.u), l2_norm(d.slow.u),
                      integral(s.rho), energy);
        out << buf;
        if (with_k_integral) {
            std::snprintf(buf, sizeof buf, ",%.12e", integral(rsw::apply_K(s.as_pair())));
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace machlab
