#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace walsh {

// Exact rational number with 64-bit numerator and denominator. Every
// operation is overflow-checked and throws std::overflow_error rather than
// wrapping. Values are kept in lowest terms with a positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
    Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string to_string() const
    {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    Rational operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

    friend Rational operator+(const Rational& a, const Rational& b)
    {
        const auto g = std::gcd(a.den_, b.den_);
        const __int128 n = static_cast<__int128>(a.num_) * (b.den_ / g) +
                           static_cast<__int128>(b.num_) * (a.den_ / g);
        const __int128 d = static_cast<__int128>(a.den_) * (b.den_ / g);
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b)
    {
        const auto g1 = std::gcd(a.num_, b.den_);
        const auto g2 = std::gcd(b.num_, a.den_);
        const __int128 n = static_cast<__int128>(a.num_ / (g1 ? g1 : 1)) * (b.num_ / (g2 ? g2 : 1));
        const __int128 d = static_cast<__int128>(a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1));
        return from_wide(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b)
    {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return a * Rational(b.den_, b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend auto operator<=>(const Rational& a, const Rational& b)
    {
        return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
    static Rational from_wide(__int128 n, __int128 d)
    {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        constexpr __int128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim) throw std::overflow_error("Rational: 64-bit overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    void assign(std::int64_t n, std::int64_t d)
    {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        *this = from_wide(n, d);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational abs(const Rational& r) { return r < Rational(0) ? -r : r; }

// Scalar traits shared by the exact and floating step-function code paths.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static double abs(double x) { return std::abs(x); }
    static double to_double(double x) { return x; }
    static double pow2_inverse(unsigned k) { return 1.0 / static_cast<double>(std::uint64_t{1} << k); }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static Rational abs(const Rational& x) { return walsh::abs(x); }
    static double to_double(const Rational& x) { return x.to_double(); }
    static Rational pow2_inverse(unsigned k) { return Rational(1, std::int64_t{1} << k); }
};

template <>
struct ScalarTraits<std::int64_t> {
    static constexpr bool exact = true;
    static std::int64_t abs(std::int64_t x) { return x < 0 ? -x : x; }
    static double to_double(std::int64_t x) { return static_cast<double>(x); }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

}  // namespace walsh
