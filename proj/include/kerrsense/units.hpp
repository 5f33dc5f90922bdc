#pragma once

#include <cmath>
#include <compare>

namespace kerrsense::units {

// SI quantity tagged by integer exponents of (kg, m, s, A). Mixing
// incompatible dimensions in + or - does not compile.
template <int Mass, int Length, int Time, int Current>
class Quantity {
public:
    constexpr Quantity() = default;
    constexpr explicit Quantity(double v) : value_(v) {}

    constexpr double value() const { return value_; }

    constexpr Quantity operator-() const { return Quantity(-value_); }
    constexpr Quantity& operator+=(Quantity o) { value_ += o.value_; return *this; }
    constexpr Quantity& operator-=(Quantity o) { value_ -= o.value_; return *this; }
    constexpr Quantity& operator*=(double s) { value_ *= s; return *this; }
    constexpr Quantity& operator/=(double s) { value_ /= s; return *this; }

    friend constexpr Quantity operator+(Quantity a, Quantity b) { return Quantity(a.value_ + b.value_); }
    friend constexpr Quantity operator-(Quantity a, Quantity b) { return Quantity(a.value_ - b.value_); }
    friend constexpr Quantity operator*(Quantity a, double s) { return Quantity(a.value_ * s); }
    friend constexpr Quantity operator*(double s, Quantity a) { return Quantity(a.value_ * s); }
    friend constexpr Quantity operator/(Quantity a, double s) { return Quantity(a.value_ / s); }
    friend constexpr auto operator<=>(Quantity a, Quantity b) = default;

private:
    double value_ = 0.0;
};

template <int M1, int L1, int T1, int I1, int M2, int L2, int T2, int I2>
constexpr auto operator*(Quantity<M1, L1, T1, I1> a, Quantity<M2, L2, T2, I2> b) {
    return Quantity<M1 + M2, L1 + L2, T1 + T2, I1 + I2>(a.value() * b.value());
}

template <int M1, int L1, int T1, int I1, int M2, int L2, int T2, int I2>
constexpr auto operator/(Quantity<M1, L1, T1, I1> a, Quantity<M2, L2, T2, I2> b) {
    return Quantity<M1 - M2, L1 - L2, T1 - T2, I1 - I2>(a.value() / b.value());
}

template <int M, int L, int T, int I>
constexpr auto operator/(double s, Quantity<M, L, T, I> a) {
    return Quantity<-M, -L, -T, -I>(s / a.value());
}

template <int M, int L, int T, int I>
    requires(M % 2 == 0 && L % 2 == 0 && T % 2 == 0 && I % 2 == 0)
auto sqrt(Quantity<M, L, T, I> q) {
    return Quantity<M / 2, L / 2, T / 2, I / 2>(std::sqrt(q.value()));
}

template <int M, int L, int T, int I>
auto abs(Quantity<M, L, T, I> q) {
    return Quantity<M, L, T, I>(std::fabs(q.value()));
}

using Dimensionless = Quantity<0, 0, 0, 0>;
using Kilograms = Quantity<1, 0, 0, 0>;
using Meters = Quantity<0, 1, 0, 0>;
using Seconds = Quantity<0, 0, 1, 0>;
// rad/s; radians are dimensionless
using AngularFrequency = Quantity<0, 0, -1, 0>;
using Newtons = Quantity<1, 1, -2, 0>;
using NewtonsPerMeter = Quantity<1, 0, -2, 0>;
using Pascals = Quantity<1, -1, -2, 0>;
using KilogramsPerCubicMeter = Quantity<1, -3, 0, 0>;
using Farads = Quantity<-1, -2, 4, 2>;
using Coulombs = Quantity<0, 0, 1, 1>;
using FaradsPerMeter = Quantity<-1, -3, 4, 2>;
using JouleSeconds = Quantity<1, 2, -1, 0>;
using MetersPerSecondSquared = Quantity<0, 1, -2, 0>;
using GravitationalConstantUnit = Quantity<-1, 3, -2, 0>;
// δ(rt) is a length-time product, reported as m/Hz
using MeterSeconds = Quantity<0, 1, 1, 0>;
// δF = k·δ(rt), reported as N/Hz
using NewtonSeconds = Quantity<1, 1, -1, 0>;
using AngularFrequencyPerMeter = Quantity<0, -1, -1, 0>;

constexpr Meters micrometers(double v) { return Meters(v * 1e-6); }
constexpr Meters nanometers(double v) { return Meters(v * 1e-9); }
constexpr Farads femtofarads(double v) { return Farads(v * 1e-15); }
// "2π × f MHz" in the usual circuit-QED notation
constexpr AngularFrequency two_pi_mhz(double f) { return AngularFrequency(2.0 * 3.14159265358979323846 * f * 1e6); }
constexpr AngularFrequency two_pi_ghz(double f) { return AngularFrequency(2.0 * 3.14159265358979323846 * f * 1e9); }

} // namespace kerrsense::units
