#include "rtc/laxhopf.hpp"

#include <algorithm>
#include <stdexcept>

namespace rtc {

double LinkGeometry::count_at_left_edge(int k) const {
    double acc = 0.0;
    for (int i = 1; i < k; ++i) acc -= initial_density[i - 1] * segment_length;
    return acc;
}

double LinkGeometry::total_initial_count() const {
    double acc = 0.0;
    for (double rho : initial_density) acc += rho * segment_length;
    return acc;
}

double LinkState::cumulative_in(int n) const {
    double acc = 0.0;
    for (int i = 1; i <= n; ++i) acc += q_in[i - 1] * T;
    return acc;
}

double LinkState::cumulative_out(int n) const {
    double acc = 0.0;
    for (int i = 1; i <= n; ++i) acc += q_out[i - 1] * T;
    return acc;
}

// --- Value conditions -------------------------------------------------------

ExtendedValue value_initial(const LinkGeometry& g, int k, double t, double x) {
    const double X = g.segment_length;
    const double xl = (k - 1) * X, xr = k * X;
    if (t != 0.0 || x < xl || x > xr) return ExtendedValue::infinity();
    return g.count_at_left_edge(k) - g.initial_density[k - 1] * (x - xl);
}

ExtendedValue value_upstream(const LinkState& s, int n, double t, double x) {
    if (x != s.geometry.upstream_x()) return ExtendedValue::infinity();
    const double t0 = (n - 1) * s.T, t1 = n * s.T;
    if (t < t0 || t > t1) return ExtendedValue::infinity();
    return s.cumulative_in(n - 1) + s.q_in[n - 1] * (t - t0);
}

ExtendedValue value_downstream(const LinkState& s, int n, double t, double x) {
    if (x != s.geometry.downstream_x()) return ExtendedValue::infinity();
    const double t0 = (n - 1) * s.T, t1 = n * s.T;
    if (t < t0 || t > t1) return ExtendedValue::infinity();
    return s.cumulative_out(n - 1) + s.q_out[n - 1] * (t - t0) -
           s.geometry.total_initial_count();
}

// --- Closed-form solutions --------------------------------------------------

ExtendedValue moskowitz_initial(const LinkGeometry& g, int k, double t, double x) {
    if (t < 0.0) return ExtendedValue::infinity();
    const auto& fd = g.fd;
    const double X = g.segment_length;
    const double xl = (k - 1) * X, xr = k * X;
    const double A = g.count_at_left_edge(k);
    const double rho = g.initial_density[k - 1];

    ExtendedValue m = ExtendedValue::infinity();
    if (rho <= fd.rho_c) {
        // forward advection of the segment profile at v_f
        if (x >= xl + fd.v_f * t && x <= xr + fd.v_f * t)
            m = min(m, ExtendedValue(A + rho * (t * fd.v_f + xl - x)));
        // fan behind the profile, released at capacity rate
        if (x <= xl + fd.v_f * t && x >= xl + fd.w * t)
            m = min(m, ExtendedValue(A + fd.rho_c * (t * fd.v_f + xl - x)));
    }
    if (rho >= fd.rho_c) {
        // backward wave carrying the congested profile at w
        if (x <= xr + fd.w * t && x >= xl + fd.w * t)
            m = min(m, ExtendedValue(A + rho * (t * fd.w + xl - x) - fd.rho_m * t * fd.w));
        // fan ahead of the congested profile
        if (x <= xr + fd.v_f * t && x >= xr + fd.w * t)
            m = min(m, ExtendedValue(A - rho * X + fd.rho_c * (t * fd.w + xr - x) -
                                     fd.rho_m * t * fd.w));
    }
    return m;
}

ExtendedValue moskowitz_upstream(const LinkState& s, int n, double t, double x) {
    const auto& fd = s.geometry.fd;
    const double tau = (x - s.geometry.upstream_x()) / fd.v_f;
    const double ta = (n - 1) * s.T + tau, tb = n * s.T + tau;
    if (t < ta) return ExtendedValue::infinity();
    ExtendedValue m = ExtendedValue::infinity();
    if (t <= tb)
        m = min(m, ExtendedValue(s.cumulative_in(n - 1) +
                                 s.q_in[n - 1] * (t - tau - (n - 1) * s.T)));
    if (t >= tb)
        m = min(m, ExtendedValue(s.cumulative_in(n) +
                                 fd.rho_c * fd.v_f * (t - tau - n * s.T)));
    return m;
}

ExtendedValue moskowitz_downstream(const LinkState& s, int n, double t, double x) {
    const auto& fd = s.geometry.fd;
    const double chi = s.geometry.downstream_x();
    const double D = s.geometry.total_initial_count();
    const double tau = (x - chi) / fd.w;  // >= 0 for x <= chi
    const double ta = (n - 1) * s.T + tau, tb = n * s.T + tau;
    if (t < ta) return ExtendedValue::infinity();
    ExtendedValue m = ExtendedValue::infinity();
    if (t <= tb)
        m = min(m, ExtendedValue(-D + s.cumulative_out(n - 1) +
                                 s.q_out[n - 1] * (t - tau - (n - 1) * s.T) -
                                 fd.rho_m * (x - chi)));
    if (t >= tb)
        m = min(m, ExtendedValue(-D + s.cumulative_out(n) +
                                 fd.rho_c * fd.v_f * (t - n * s.T - (x - chi) / fd.v_f)));
    return m;
}

// --- Variational machinery --------------------------------------------------

double legendre_transform(const FundamentalDiagram& fd, double u) {
    const double span = std::max(fd.v_f, -fd.w);
    if (std::abs(u) > span * (1.0 + 1e-9) + 1e-12)
        throw std::domain_error("legendre_transform: speed outside characteristic range");

    // Vertex candidates; the congested-side limit at rho_c matters when the
    // two branches do not meet there.
    double best = 0.0;  // p = 0
    best = std::max(best, fd.rho_c * u + fd.capacity());
    best = std::max(best, fd.rho_c * u + fd.congested_value_at_critical());
    best = std::max(best, fd.rho_m * u);

    constexpr int kGrid = 1024;
    for (int i = 1; i < kGrid; ++i) {
        const double p = fd.rho_m * i / kGrid;
        best = std::max(best, p * u + fd.flow(p));
    }
    return best;
}

namespace {

// Characteristic cost rate for a forward speed v in [w, v_f].
double speed_cost(const FundamentalDiagram& fd, double v) {
    return legendre_transform(fd, -v);
}

// Clipped-interval endpoints can put the required speed a few ulp outside
// [w, v_f]; admit with a tolerance and clamp so the exact minimizer survives.
bool admissible_speed(const FundamentalDiagram& fd, double& v) {
    const double span = fd.v_f - fd.w;
    const double tol = 1e-9 * span;
    if (v < fd.w - tol || v > fd.v_f + tol) return false;
    v = std::clamp(v, fd.w, fd.v_f);
    return true;
}

struct Best {
    bool any = false;
    double val = 0.0;
    void offer(double v) {
        if (!any || v < val) {
            val = v;
            any = true;
        }
    }
    ExtendedValue result() const {
        return any ? ExtendedValue(val) : ExtendedValue::infinity();
    }
};

// Candidates departing from a boundary (position `bx`, value b(s) affine per
// step window) and arriving at (t, x) along an admissible characteristic.
void boundary_candidates(const LinkState& s, bool downstream, int n, double t,
                         double x, int grid_n, Best& best) {
    const auto& fd = s.geometry.fd;
    const double bx = downstream ? s.geometry.downstream_x() : s.geometry.upstream_x();
    const auto value_at = [&](double tt) {
        return downstream ? value_downstream(s, n, tt, bx) : value_upstream(s, n, tt, bx);
    };
    const double w0 = (n - 1) * s.T, w1 = n * s.T;

    if (x == bx) {
        if (t >= w0 && t <= w1) {
            auto c = value_at(t);
            if (c.is_finite()) best.offer(c.value());  // zero elapsed time
        }
        const double s_hi = std::min(w1, t);
        if (w0 <= s_hi) {
            const double cost0 = speed_cost(fd, 0.0);
            for (int i = 0; i < grid_n; ++i) {
                const double dep =
                    grid_n == 1 ? w0 : w0 + (s_hi - w0) * i / (grid_n - 1);
                auto c = value_at(dep);
                if (c.is_finite()) best.offer(c.value() + (t - dep) * cost0);
            }
        }
        return;
    }

    // Required speed v = (x - bx) / (t - dep); clip departures so v stays in
    // [w, v_f]. Upstream reaches only x > bx (v > 0), downstream only x < bx.
    double s_hi;
    if (!downstream) {
        if (x < bx) return;
        s_hi = std::min(w1, t - (x - bx) / fd.v_f);
    } else {
        if (x > bx) return;
        s_hi = std::min(w1, t - (x - bx) / fd.w);
    }
    const double s_lo = w0;
    if (s_lo > s_hi) return;
    for (int i = 0; i < grid_n; ++i) {
        const double dep = grid_n == 1 ? s_lo : s_lo + (s_hi - s_lo) * i / (grid_n - 1);
        const double elapsed = t - dep;
        if (elapsed <= 0.0) continue;
        double v = (x - bx) / elapsed;
        if (!admissible_speed(fd, v)) continue;
        auto c = value_at(dep);
        if (c.is_finite()) best.offer(c.value() + elapsed * speed_cost(fd, v));
    }
}

}  // namespace

ExtendedValue brute_force_lax_hopf(const LinkState& s, ValueConditionRef cond,
                                   double t, double x, int grid_n) {
    if (grid_n < 2) throw std::invalid_argument("brute_force_lax_hopf: grid_n >= 2");
    const auto& g = s.geometry;
    const auto& fd = g.fd;
    Best best;

    switch (cond.kind) {
        case ValueConditionRef::Kind::Initial: {
            const int k = cond.index;
            const double xl = (k - 1) * g.segment_length, xr = k * g.segment_length;
            if (t == 0.0) {
                auto c = value_initial(g, k, 0.0, x);
                if (c.is_finite()) best.offer(c.value());
                break;
            }
            if (t < 0.0) break;
            const double y_lo = std::max(xl, x - t * fd.v_f);
            const double y_hi = std::min(xr, x - t * fd.w);
            if (y_lo > y_hi) break;
            for (int i = 0; i < grid_n; ++i) {
                const double y =
                    grid_n == 1 ? y_lo : y_lo + (y_hi - y_lo) * i / (grid_n - 1);
                double v = (x - y) / t;
                if (!admissible_speed(fd, v)) continue;
                auto c = value_initial(g, k, 0.0, y);
                if (c.is_finite()) best.offer(c.value() + t * speed_cost(fd, v));
            }
            break;
        }
        case ValueConditionRef::Kind::Upstream:
            boundary_candidates(s, false, cond.index, t, x, grid_n, best);
            break;
        case ValueConditionRef::Kind::Downstream:
            boundary_candidates(s, true, cond.index, t, x, grid_n, best);
            break;
    }
    return best.result();
}

ExtendedValue brute_force_lax_hopf_refined(const LinkState& s, ValueConditionRef cond,
                                           double t, double x, int grid_n, double tol,
                                           int max_doublings) {
    ExtendedValue prev = brute_force_lax_hopf(s, cond, t, x, grid_n);
    for (int d = 1; d <= max_doublings; ++d) {
        grid_n *= 2;
        ExtendedValue cur = brute_force_lax_hopf(s, cond, t, x, grid_n);
        if (!prev.is_finite() && !cur.is_finite()) return cur;
        if (prev.is_finite() && cur.is_finite() &&
            std::abs(prev.value() - cur.value()) < tol)
            return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace rtc
