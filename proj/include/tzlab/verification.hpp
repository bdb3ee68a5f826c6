#ifndef TZLAB_VERIFICATION_HPP
#define TZLAB_VERIFICATION_HPP

#include <string>
#include <vector>

namespace tzlab {

// One named residual check: measured maximum against its tolerance.
struct Check {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    double masked_fraction = 0.0;
};

// Collection of checks; the report passes only if every check passes and no
// check exceeds the masked-node cap.
struct VerificationReport {
    std::vector<Check> checks;
    double masked_cap = 0.20;

    Check& add(const std::string& name, double residual, double tol,
               double masked_fraction = 0.0) {
        Check c;
        c.name = name;
        c.residual = residual;
        c.tol = tol;
        c.masked_fraction = masked_fraction;
        c.pass = (residual <= tol) && (masked_fraction <= masked_cap);
        checks.push_back(c);
        return checks.back();
    }

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    double max_residual(const std::string& name) const {
        double r = 0.0;
        for (const auto& c : checks)
            if (c.name == name && c.residual > r) r = c.residual;
        return r;
    }
};

} // namespace tzlab

#endif // TZLAB_VERIFICATION_HPP
