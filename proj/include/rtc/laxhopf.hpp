#pragma once

#include <vector>

#include "rtc/extended_value.hpp"
#include "rtc/fundamental_diagram.hpp"

namespace rtc {

/// Spatial data of one road stretch in link-local coordinates: upstream end
/// at x = 0, downstream end at x = n_segments * X. Densities may be per-lane
/// or whole-link; all formulas are homogeneous in (density, flow).
struct LinkGeometry {
    double segment_length = 0.0;          ///< X (m)
    std::vector<double> initial_density;  ///< rho(k), one per segment
    FundamentalDiagram fd;

    int n_segments() const { return static_cast<int>(initial_density.size()); }
    double length() const { return segment_length * n_segments(); }
    double upstream_x() const { return 0.0; }
    double downstream_x() const { return length(); }
    /// -sum_{i<k} rho(i) X: cumulative label at the left edge of segment k
    /// (1-based). k = n_segments+1 gives minus the total initial count.
    double count_at_left_edge(int k) const;
    /// Total initial vehicle count sum_k rho(k) X.
    double total_initial_count() const;
};

/// Geometry plus numeric boundary-flow series; the domain of the boundary
/// value conditions and their closed-form solutions.
struct LinkState {
    LinkGeometry geometry;
    std::vector<double> q_in;   ///< veh/s per step, 1-based step n -> q_in[n-1]
    std::vector<double> q_out;  ///< veh/s per step
    double T = 1.0;             ///< step length (s)

    int n_steps() const { return static_cast<int>(q_in.size()); }
    double cumulative_in(int n) const;   ///< sum_{i<=n} q_in(i) T
    double cumulative_out(int n) const;  ///< sum_{i<=n} q_out(i) T
};

// --- Value conditions -------------------------------------------------------

/// Piecewise-affine initial condition of segment k at (t, x); +inf outside
/// {t = 0, x in segment k}.
ExtendedValue value_initial(const LinkGeometry& g, int k, double t, double x);

/// Upstream boundary condition for step n at (t, x); +inf unless x is the
/// upstream end and t lies in step n's window.
ExtendedValue value_upstream(const LinkState& s, int n, double t, double x);

/// Downstream boundary condition for step n, carrying the initial-count
/// offset; +inf unless x is the downstream end and t is in step n's window.
ExtendedValue value_downstream(const LinkState& s, int n, double t, double x);

// --- Closed-form solutions --------------------------------------------------

/// Solution generated by segment k's initial condition alone. Every branch
/// whose (closed) region contains the point is evaluated and the minimum is
/// returned; outside the characteristic cone the value is +inf.
ExtendedValue moskowitz_initial(const LinkGeometry& g, int k, double t, double x);

/// Solution generated by upstream boundary step n alone.
ExtendedValue moskowitz_upstream(const LinkState& s, int n, double t, double x);

/// Solution generated by downstream boundary step n alone.
ExtendedValue moskowitz_downstream(const LinkState& s, int n, double t, double x);

// --- Variational machinery --------------------------------------------------

/// sup_{p in [0, rho_m]} [p*u + psi(p)], evaluated over the branch vertices
/// (including the congested-side limit at rho_c) with a dense-grid guard.
/// Admissible |u| <= max(v_f, |w|) + slack.
double legendre_transform(const FundamentalDiagram& fd, double u);

/// One value condition of a link, for the brute-force minimization.
struct ValueConditionRef {
    enum class Kind { Initial, Upstream, Downstream };
    Kind kind;
    int index;  ///< segment k or step n, 1-based
};

/// Direct numeric minimization of the variational formula for a single value
/// condition: candidate characteristics are enumerated on a grid over the
/// condition's own domain, clipped to the admissible speed range [w, v_f],
/// and each candidate costs c(departure) + elapsed * transform(speed).
/// Returns +inf when the condition is unreachable from (t, x). grid_n >= 2.
ExtendedValue brute_force_lax_hopf(const LinkState& s, ValueConditionRef cond,
                                   double t, double x, int grid_n);

/// Grid-refined version: doubles grid_n (starting value `grid_n`) until the
/// result changes by less than `tol` or `max_doublings` is reached.
ExtendedValue brute_force_lax_hopf_refined(const LinkState& s, ValueConditionRef cond,
                                           double t, double x, int grid_n = 400,
                                           double tol = 1e-6, int max_doublings = 4);

}  // namespace rtc
