#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lpp {

// A nonnegative-extended real: either a finite double or the symbolic
// value "infinite".  Divergent moment functionals must come back as
// Infinite, never as a large float, so callers are forced to branch.
class ExtReal {
  public:
    ExtReal() : value_(0.0), finite_(true) {}
    explicit ExtReal(double v) : value_(v), finite_(true) {}

    static ExtReal infinite() {
        ExtReal r;
        r.finite_ = false;
        r.value_ = 0.0;
        return r;
    }

    bool is_finite() const { return finite_; }
    bool is_infinite() const { return !finite_; }

    double value() const {
        if (!finite_) throw std::domain_error("ExtReal: value() on infinite");
        return value_;
    }

    // value() with a caller-chosen stand-in for infinity, for ordering only.
    double value_or(double inf_standin) const { return finite_ ? value_ : inf_standin; }

    friend std::ostream& operator<<(std::ostream& os, const ExtReal& r) {
        if (r.finite_) return os << r.value_;
        return os << "infinite";
    }

  private:
    double value_;
    bool finite_;
};

}  // namespace lpp
