#include "rtc/network.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rtc {

using nlohmann::json;

const char* to_string(LinkKind k) {
    switch (k) {
        case LinkKind::IncomingBoundary: return "incoming-boundary";
        case LinkKind::Interior: return "interior";
        case LinkKind::OnRamp: return "on-ramp";
        case LinkKind::OffRamp: return "off-ramp";
        case LinkKind::OutgoingBoundary: return "outgoing-boundary";
    }
    return "?";
}

static LinkKind kind_from_string(const std::string& s) {
    if (s == "incoming-boundary") return LinkKind::IncomingBoundary;
    if (s == "interior") return LinkKind::Interior;
    if (s == "on-ramp") return LinkKind::OnRamp;
    if (s == "off-ramp") return LinkKind::OffRamp;
    if (s == "outgoing-boundary") return LinkKind::OutgoingBoundary;
    throw std::runtime_error("unknown link kind: " + s);
}

const LinkSpec* Network::find_link(int id) const {
    for (const auto& l : links)
        if (l.id == id) return &l;
    return nullptr;
}

const NodeSpec* Network::find_node(int id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const NodeSpec* Network::node_feeding(int link_id) const {
    for (const auto& n : nodes)
        for (int out : n.outgoing)
            if (out == link_id) return &n;
    return nullptr;
}

std::vector<int> Network::entry_link_ids() const {
    std::vector<int> ids;
    for (const auto& l : links)
        if (l.is_entry()) ids.push_back(l.id);
    return ids;
}

namespace {

void add(ValidationReport& r, ValidationIssue::Severity sev, std::string code,
         std::string msg) {
    r.issues.push_back({sev, std::move(code), std::move(msg)});
}

std::string where(const char* what, int id) {
    std::ostringstream os;
    os << what << " " << id;
    return os.str();
}

}  // namespace

ValidationReport validate(const Network& net) {
    using Sev = ValidationIssue::Severity;
    ValidationReport rep;

    std::set<int> link_ids;
    for (const auto& l : net.links) {
        if (!link_ids.insert(l.id).second)
            add(rep, Sev::Error, "duplicate-link", where("link", l.id));
        if (l.is_sink()) continue;  // sinks carry no geometry constraints
        const auto& fd = l.fd;
        if (!fd.is_valid())
            add(rep, Sev::Error, "fd-invalid",
                where("link", l.id) + ": need v_f > 0, w < 0, 0 < rho_c < rho_m");
        else if (!fd.is_continuous())
            add(rep, Sev::Warning, "fd-discontinuous",
                where("link", l.id) + ": branches differ at rho_c (" +
                    std::to_string(fd.capacity()) + " vs " +
                    std::to_string(fd.congested_value_at_critical()) + ")");
        if (l.length <= 0.0)
            add(rep, Sev::Error, "bad-length", where("link", l.id));
        if (l.n_lanes < 1)
            add(rep, Sev::Error, "bad-lanes", where("link", l.id));
        if (l.n_segments < 1 ||
            static_cast<int>(l.initial_density.size()) != l.n_segments)
            add(rep, Sev::Error, "bad-segments",
                where("link", l.id) + ": density list must have one entry per segment");
        else {
            for (double rho : l.initial_density)
                if (!(rho >= 0.0 && rho <= l.fd.rho_m + 1e-12)) {
                    add(rep, Sev::Error, "density-out-of-range", where("link", l.id));
                    break;
                }
        }
    }

    std::set<int> fed_links;  // links appearing as a node's outgoing
    for (const auto& nd : net.nodes) {
        const int m = nd.n_out(), n = nd.n_in();
        if (m <= 1 && n <= 1)
            add(rep, Sev::Error, "degenerate-node",
                where("node", nd.id) + ": needs more than one incoming or outgoing link");
        if (nd.turning_mean.rows() != m || nd.turning_mean.cols() != n) {
            add(rep, Sev::Error, "turning-shape", where("node", nd.id));
            continue;
        }
        for (int j = 0; j < n; ++j) {
            double col = nd.turning_mean.col(j).sum();
            if (std::abs(col - 1.0) > 1e-9)
                add(rep, Sev::Error, "turning-not-conserved",
                    where("node", nd.id) + ": turning ratios not conserved (column " +
                        std::to_string(j) + " sums to " + std::to_string(col) + ")");
        }
        if ((nd.turning_mean.array() < -1e-12).any() ||
            (nd.turning_mean.array() > 1.0 + 1e-12).any())
            add(rep, Sev::Error, "turning-range",
                where("node", nd.id) + ": ratio outside [0, 1]");
        if (nd.turning_cov.rows() != n || nd.turning_cov.cols() != n)
            add(rep, Sev::Error, "cov-shape", where("node", nd.id));
        else {
            if (!nd.turning_cov.isApprox(nd.turning_cov.transpose(), 1e-9))
                add(rep, Sev::Error, "cov-not-symmetric", where("node", nd.id));
            else {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(nd.turning_cov);
                if (n > 0 && eig.eigenvalues().minCoeff() < -1e-10)
                    add(rep, Sev::Error, "cov-not-psd", where("node", nd.id));
            }
        }
        for (int in : nd.incoming)
            if (!net.find_link(in))
                add(rep, Sev::Error, "unknown-incoming",
                    where("node", nd.id) + " references link " + std::to_string(in));
        for (int out : nd.outgoing) {
            const LinkSpec* l = net.find_link(out);
            if (l && l->is_entry())
                add(rep, Sev::Error, "entry-fed-by-node",
                    where("link", out) + " is an entry but is fed by node " +
                        std::to_string(nd.id));
            if (!fed_links.insert(out).second)
                add(rep, Sev::Error, "link-fed-twice",
                    where("link", out) + " is outgoing of multiple nodes");
        }
    }

    // Non-entry real links must be fed by exactly one node.
    for (const auto& l : net.links) {
        if (l.is_sink() || l.is_entry()) continue;
        if (!fed_links.count(l.id))
            add(rep, Sev::Error, "orphan-link",
                where("link", l.id) + " (" + to_string(l.kind) +
                    ") has no upstream node");
    }

    if (net.horizon.steps < 1 || net.horizon.T <= 0.0)
        add(rep, Sev::Error, "bad-horizon", "need T > 0 and steps >= 1");

    return rep;
}

static json fd_to_json(const FundamentalDiagram& fd) {
    return json{{"vf", fd.v_f}, {"w", fd.w}, {"rho_c", fd.rho_c}, {"rho_m", fd.rho_m}};
}

std::string network_to_json(const Network& net) {
    json j;
    j["links"] = json::array();
    for (const auto& l : net.links) {
        json jl{{"id", l.id},
                {"length_m", l.length},
                {"lanes", l.n_lanes},
                {"segments", l.n_segments},
                {"init_density", l.initial_density},
                {"fd", fd_to_json(l.fd)},
                {"kind", to_string(l.kind)}};
        j["links"].push_back(jl);
    }
    j["nodes"] = json::array();
    for (const auto& nd : net.nodes) {
        std::vector<double> P, G;
        for (int r = 0; r < nd.turning_mean.rows(); ++r)
            for (int c = 0; c < nd.turning_mean.cols(); ++c)
                P.push_back(nd.turning_mean(r, c));
        for (int r = 0; r < nd.turning_cov.rows(); ++r)
            for (int c = 0; c < nd.turning_cov.cols(); ++c)
                G.push_back(nd.turning_cov(r, c));
        j["nodes"].push_back(json{{"id", nd.id},
                                  {"in", nd.incoming},
                                  {"out", nd.outgoing},
                                  {"P", P},
                                  {"Gamma", G}});
    }
    json bin = json::array();
    for (int id : net.entry_link_ids()) bin.push_back(id);
    j["boundary_in"] = bin;
    j["horizon"] = json{{"T_s", net.horizon.T}, {"steps", net.horizon.steps}};
    return j.dump(2);
}

Network network_from_json(const json& j) {
    Network net;
    std::set<int> boundary_in;
    if (j.contains("boundary_in"))
        for (const auto& v : j.at("boundary_in")) boundary_in.insert(v.get<int>());

    for (const auto& jl : j.at("links")) {
        LinkSpec l;
        l.id = jl.at("id").get<int>();
        l.length = jl.at("length_m").get<double>();
        l.n_lanes = jl.value("lanes", 1);
        l.n_segments = jl.value("segments", 1);
        if (jl.contains("init_density"))
            l.initial_density = jl.at("init_density").get<std::vector<double>>();
        else
            l.initial_density.assign(l.n_segments, 0.0);
        const auto& jfd = jl.at("fd");
        l.fd = FundamentalDiagram{jfd.at("vf").get<double>(), jfd.at("w").get<double>(),
                                  jfd.at("rho_c").get<double>(),
                                  jfd.at("rho_m").get<double>()};
        if (jl.contains("kind"))
            l.kind = kind_from_string(jl.at("kind").get<std::string>());
        else if (boundary_in.count(l.id))
            l.kind = LinkKind::IncomingBoundary;
        net.links.push_back(std::move(l));
    }

    for (const auto& jn : j.at("nodes")) {
        NodeSpec nd;
        nd.id = jn.at("id").get<int>();
        nd.incoming = jn.at("in").get<std::vector<int>>();
        nd.outgoing = jn.at("out").get<std::vector<int>>();
        const int m = nd.n_out(), n = nd.n_in();
        auto P = jn.at("P").get<std::vector<double>>();
        auto G = jn.at("Gamma").get<std::vector<double>>();
        if (static_cast<int>(P.size()) != m * n)
            throw std::runtime_error("node P has wrong size");
        if (static_cast<int>(G.size()) != n * n)
            throw std::runtime_error("node Gamma has wrong size");
        nd.turning_mean.resize(m, n);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) nd.turning_mean(r, c) = P[r * n + c];
        nd.turning_cov.resize(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) nd.turning_cov(r, c) = G[r * n + c];
        net.nodes.push_back(std::move(nd));
    }

    // Outgoing ids with no matching link entry are off-ramp sinks.
    for (auto& nd : net.nodes)
        for (int out : nd.outgoing)
            if (!net.find_link(out)) {
                LinkSpec sink;
                sink.id = out;
                sink.kind = LinkKind::OffRamp;
                net.links.push_back(sink);
            }

    if (j.contains("horizon")) {
        net.horizon.T = j.at("horizon").at("T_s").get<double>();
        net.horizon.steps = j.at("horizon").at("steps").get<int>();
    }
    return net;
}

Network load_network_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return network_from_json(j);
}

}  // namespace rtc
