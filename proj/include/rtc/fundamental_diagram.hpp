#pragma once

#include <cmath>
#include <stdexcept>

namespace rtc {

/// Triangular flow-density relation. Free-flow branch v_f*rho on [0, rho_c],
/// congested branch w*(rho - rho_m) on [rho_c, rho_m]. The two branches need
/// not meet at rho_c (several published parameter sets do not); is_continuous()
/// reports whether they do. At exactly rho_c the free-flow branch wins, so
/// flow(rho_c) == capacity.
struct FundamentalDiagram {
    double v_f = 0.0;    ///< free-flow speed (m/s), > 0
    double w = 0.0;      ///< congestion wave speed (m/s), < 0
    double rho_c = 0.0;  ///< critical density (veh/m/lane)
    double rho_m = 0.0;  ///< jam density (veh/m/lane)

    /// Capacity C = v_f * rho_c (veh/s/lane).
    double capacity() const { return v_f * rho_c; }

    /// Congested-branch value approaching rho_c from above.
    double congested_value_at_critical() const { return w * (rho_c - rho_m); }

    bool is_valid() const {
        return v_f > 0.0 && w < 0.0 && rho_c > 0.0 && rho_c < rho_m;
    }

    /// True when the two branches meet at rho_c (relative tolerance 1e-6).
    bool is_continuous(double rel_tol = 1e-6) const {
        const double a = capacity();
        const double b = congested_value_at_critical();
        const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
        return std::abs(a - b) <= rel_tol * scale;
    }

    /// Flow psi(rho) (veh/s/lane). rho must lie in [0, rho_m].
    double flow(double rho) const {
        check_density(rho);
        if (rho <= rho_c) return v_f * rho;
        return w * (rho - rho_m);
    }

    /// Supply psi'(rho): capacity on [0, rho_c], flow on the congested branch.
    double supply(double rho) const {
        check_density(rho);
        if (rho <= rho_c) return capacity();
        return w * (rho - rho_m);
    }

    /// Demand: flow on the free branch, capacity on the congested branch.
    double demand(double rho) const {
        check_density(rho);
        if (rho <= rho_c) return v_f * rho;
        return capacity();
    }

    /// Same diagram with densities and flows scaled by a lane count, turning
    /// per-lane quantities into whole-link quantities. Speeds are unchanged.
    FundamentalDiagram scaled(double lanes) const {
        return FundamentalDiagram{v_f, w, rho_c * lanes, rho_m * lanes};
    }

private:
    void check_density(double rho) const {
        if (!(rho >= -1e-12 && rho <= rho_m * (1.0 + 1e-12)))
            throw std::domain_error("density outside [0, rho_m]");
    }
};

}  // namespace rtc
