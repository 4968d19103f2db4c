#pragma once

#include <stdexcept>

namespace critmin {

/**
 * Parameters of the weighted quotient on the ball B(0,R) in dimension n:
 * weight p(x,u) = 1 + |x|^beta |u|^k, constraint in L^q with the critical
 * exponent q = 2n/(n-2). q is always derived from n, never stored.
 */
struct ProblemParams {
    int n = 3;
    double beta = 0.0;
    double k = 0.0;
    double R = 1.0;

    static ProblemParams make(int n, double beta, double k, double R = 1.0) {
        ProblemParams p{n, beta, k, R};
        p.validate();
        return p;
    }

    double q() const { return 2.0 * n / (n - 2.0); }

    /// Threshold exponent k*n/q = k(n-2)/2 separating the regimes.
    double critical_beta() const { return 0.5 * k * (n - 2); }

    /// (k+1)(n-2): where the weighted bubble energy saturates.
    double saturation_beta() const { return (k + 1.0) * (n - 2); }

    void validate() const {
        if (n < 3) throw std::invalid_argument("ProblemParams: n must be >= 3");
        if (!(beta >= 0.0)) throw std::invalid_argument("ProblemParams: beta must be >= 0");
        if (!(k >= 0.0)) throw std::invalid_argument("ProblemParams: k must be >= 0");
        if (!(k <= q())) throw std::invalid_argument("ProblemParams: k must be <= q = 2n/(n-2)");
        if (!(R > 0.0)) throw std::invalid_argument("ProblemParams: R must be > 0");
    }
};

}  // namespace critmin
