#pragma once

#include <stdexcept>
#include <string>

namespace resetopt {

// Market and contract constants of the GBM model
//   dX = (r - delta) X dt + sigma X dB,  strike K, maturity T.
struct ModelParams {
    double rate     = 0.03;  // r, per year
    double dividend = 0.04;  // delta, per year
    double vol      = 0.4;   // sigma, per sqrt(year)
    double maturity = 1.0;   // T, years
    double strike   = 1.0;   // K, currency

    void validate() const {
        if (!(rate > 0.0)) throw std::invalid_argument("ModelParams: rate must be > 0");
        if (!(dividend >= 0.0)) throw std::invalid_argument("ModelParams: dividend must be >= 0");
        if (!(vol > 0.0)) throw std::invalid_argument("ModelParams: vol must be > 0");
        if (!(maturity > 0.0)) throw std::invalid_argument("ModelParams: maturity must be > 0");
        if (!(strike > 0.0)) throw std::invalid_argument("ModelParams: strike must be > 0");
    }

    bool operator==(const ModelParams&) const = default;
};

}  // namespace resetopt
