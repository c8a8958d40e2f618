#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rtc/fundamental_diagram.hpp"

namespace rtc {

enum class LinkKind {
    IncomingBoundary,  ///< vehicles enter the network here; inflow is a control
    Interior,
    OnRamp,            ///< controllable entry merging at a node
    OffRamp,           ///< unconstrained sink attached to a node
    OutgoingBoundary,  ///< vehicles leave the network here
};

const char* to_string(LinkKind k);

struct LinkSpec {
    int id = 0;
    double length = 0.0;  ///< m
    int n_lanes = 1;
    int n_segments = 1;
    std::vector<double> initial_density;  ///< veh/m/lane, one per segment
    FundamentalDiagram fd;
    LinkKind kind = LinkKind::Interior;

    double segment_length() const { return length / n_segments; }
    bool is_sink() const { return kind == LinkKind::OffRamp; }
    /// Entry links: inflow is a direct decision variable.
    bool is_entry() const {
        return kind == LinkKind::IncomingBoundary || kind == LinkKind::OnRamp;
    }
};

/// Junction with turning ratios. Rows of `turning_mean` are outgoing links
/// (in the order of `outgoing`), columns are incoming links (order of
/// `incoming`); entry (i, j) is the share of link incoming[j]'s outflow that
/// enters outgoing[i]. `turning_cov` is the covariance of the ratio
/// coefficients across incoming links; one matrix per node, shared by every
/// outgoing row.
struct NodeSpec {
    int id = 0;
    std::vector<int> incoming;
    std::vector<int> outgoing;
    Eigen::MatrixXd turning_mean;  ///< m_z x n_z
    Eigen::MatrixXd turning_cov;   ///< n_z x n_z

    int n_in() const { return static_cast<int>(incoming.size()); }
    int n_out() const { return static_cast<int>(outgoing.size()); }
};

struct Horizon {
    double T = 1.0;  ///< control step (s)
    int steps = 1;
    double total() const { return T * steps; }
};

struct ValidationIssue {
    enum class Severity { Error, Warning };
    Severity severity;
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const {
        for (const auto& i : issues)
            if (i.severity == ValidationIssue::Severity::Error) return false;
        return true;
    }
    int warning_count() const {
        int n = 0;
        for (const auto& i : issues)
            if (i.severity == ValidationIssue::Severity::Warning) ++n;
        return n;
    }
};

struct Network {
    std::vector<LinkSpec> links;
    std::vector<NodeSpec> nodes;
    Horizon horizon;

    const LinkSpec* find_link(int id) const;
    const NodeSpec* find_node(int id) const;
    /// Node whose outgoing list contains `link_id`, or nullptr.
    const NodeSpec* node_feeding(int link_id) const;
    std::vector<int> entry_link_ids() const;
};

/// Checks every structural invariant and returns a report instead of
/// throwing; fundamental-diagram branch mismatch at rho_c is a warning
/// because common published parameter sets have it.
ValidationReport validate(const Network& net);

Network load_network_json(const std::string& path);
std::string network_to_json(const Network& net);

}  // namespace rtc
