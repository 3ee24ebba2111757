#pragma once
// Forward-mode dual numbers: exact first derivatives of analytic test
// functions written as generic lambdas `[](auto x, auto t) { ... }`.

#include <cmath>

namespace fvgoal {

struct Dual {
    double value = 0.0;
    double deriv = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double v, double d = 0.0) : value(v), deriv(d) {}  // NOLINT: implicit from double

    friend constexpr Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.deriv + b.deriv}; }
    friend constexpr Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.deriv - b.deriv}; }
    friend constexpr Dual operator-(Dual a) { return {-a.value, -a.deriv}; }
    friend constexpr Dual operator*(Dual a, Dual b) {
        return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
    }
    friend constexpr Dual operator/(Dual a, Dual b) {
        return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
    }
    friend constexpr bool operator<(Dual a, Dual b) { return a.value < b.value; }
    friend constexpr bool operator>(Dual a, Dual b) { return a.value > b.value; }
    friend constexpr bool operator<=(Dual a, Dual b) { return a.value <= b.value; }
    friend constexpr bool operator>=(Dual a, Dual b) { return a.value >= b.value; }
};

inline Dual sin(Dual a) { return {std::sin(a.value), std::cos(a.value) * a.deriv}; }
inline Dual cos(Dual a) { return {std::cos(a.value), -std::sin(a.value) * a.deriv}; }
inline Dual exp(Dual a) {
    double e = std::exp(a.value);
    return {e, e * a.deriv};
}
inline Dual pow(Dual a, int k) {
    if (k == 0) return {1.0, 0.0};
    double p = std::pow(a.value, k - 1);
    return {p * a.value, k * p * a.deriv};
}

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.value; }

/// (f, df/dx, df/dt) at (x, t) for a generic scalar function f(x, t).
struct Jet {
    double value, dx, dt;
};

template <class F>
Jet jet(const F& f, double x, double t) {
    Dual fx = f(Dual(x, 1.0), Dual(t, 0.0));
    Dual ft = f(Dual(x, 0.0), Dual(t, 1.0));
    return {fx.value, fx.deriv, ft.deriv};
}

}  // namespace fvgoal
