#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "walsh/dyadic.hpp"
#include "walsh/normed_space.hpp"
#include "walsh/rational.hpp"

namespace walsh {

// Scalar function on [0,1) that is constant on the cells of a dyadic grid.
// The arithmetic mode is the value type: double for norm computations,
// Rational or int64 for identities that must hold exactly.
template <Scalar T>
class StepFunction {
public:
    using value_type = T;

    StepFunction() = default;
    explicit StepFunction(DyadicGrid grid) : grid_(grid), values_(grid.cells(), T(0)) {}
    StepFunction(DyadicGrid grid, std::vector<T> values) : grid_(grid), values_(std::move(values))
    {
        if (values_.size() != grid_.cells()) throw std::invalid_argument("StepFunction: value count must be 2^q");
    }

    const DyadicGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    T& operator[](std::size_t cell) { return values_[cell]; }
    const T& operator[](std::size_t cell) const { return values_[cell]; }

    std::span<T> values() { return values_; }
    std::span<const T> values() const { return values_; }

    T mean() const
    {
        T acc(0);
        for (const auto& v : values_) acc += v;
        return scale_to_measure(acc);
    }

    // 2^-q * sum of squares.
    T norm_squared() const
    {
        T acc(0);
        for (const auto& v : values_) acc += v * v;
        return scale_to_measure(acc);
    }

    // 2^-q * sum |f|.
    T l1_norm() const
    {
        T acc(0);
        for (const auto& v : values_) acc += ScalarTraits<T>::abs(v);
        return scale_to_measure(acc);
    }

    StepFunction& operator*=(const StepFunction& o)
    {
        require_same_grid(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] *= o.values_[k];
        return *this;
    }
    StepFunction& operator+=(const StepFunction& o)
    {
        require_same_grid(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
        return *this;
    }
    StepFunction& operator-=(const StepFunction& o)
    {
        require_same_grid(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
        return *this;
    }

    friend StepFunction operator*(StepFunction a, const StepFunction& b) { return a *= b; }
    friend StepFunction operator+(StepFunction a, const StepFunction& b) { return a += b; }
    friend StepFunction operator-(StepFunction a, const StepFunction& b) { return a -= b; }

    friend bool operator==(const StepFunction&, const StepFunction&) = default;

    void require_same_grid(const StepFunction& o) const
    {
        if (!(grid_ == o.grid_)) throw std::invalid_argument("StepFunction: grid mismatch");
    }

private:
    T scale_to_measure(const T& sum) const
    {
        if constexpr (std::is_same_v<T, double>) {
            return std::ldexp(sum, -static_cast<int>(grid_.resolution()));
        } else {
            return sum * Rational(1, std::int64_t{1} << grid_.resolution());
        }
    }

    DyadicGrid grid_;
    std::vector<T> values_;
};

// Inner product <f,g> = integral of f g.
template <Scalar T>
T inner_product(const StepFunction<T>& f, const StepFunction<T>& g)
{
    return (f * g).mean();
}

// Function with values in a finite-dimensional normed space, constant on
// grid cells. Storage is row-major: one row of `dim` coordinates per cell.
template <Scalar T>
class VectorStepFunction {
public:
    using value_type = T;

    VectorStepFunction(DyadicGrid grid, NormedSpace space)
        : grid_(grid), space_(std::move(space)), data_(grid_.cells() * space_.dim(), T(0))
    {
    }
    VectorStepFunction(DyadicGrid grid, NormedSpace space, std::vector<T> data)
        : grid_(grid), space_(std::move(space)), data_(std::move(data))
    {
        if (data_.size() != grid_.cells() * space_.dim())
            throw std::invalid_argument("VectorStepFunction: data size must be 2^q * dim");
    }

    const DyadicGrid& grid() const { return grid_; }
    const NormedSpace& space() const { return space_; }
    std::size_t cells() const { return grid_.cells(); }
    std::size_t dim() const { return space_.dim(); }

    std::span<T> cell(std::size_t k) { return {data_.data() + k * dim(), dim()}; }
    std::span<const T> cell(std::size_t k) const { return {data_.data() + k * dim(), dim()}; }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    // Coordinate j as a scalar step function.
    StepFunction<T> coordinate(std::size_t j) const
    {
        StepFunction<T> f(grid_);
        for (std::size_t k = 0; k < cells(); ++k) f[k] = data_[k * dim() + j];
        return f;
    }
    void set_coordinate(std::size_t j, const StepFunction<T>& f)
    {
        for (std::size_t k = 0; k < cells(); ++k) data_[k * dim() + j] = f[k];
    }

    void scale(const T& c)
    {
        for (auto& v : data_) v *= c;
    }
    // Pointwise product with a scalar step function.
    void multiply(const StepFunction<T>& s)
    {
        if (!(s.grid() == grid_)) throw std::invalid_argument("VectorStepFunction: grid mismatch");
        for (std::size_t k = 0; k < cells(); ++k)
            for (auto& v : cell(k)) v *= s[k];
    }

    VectorStepFunction& operator+=(const VectorStepFunction& o)
    {
        require_compatible(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    VectorStepFunction& operator-=(const VectorStepFunction& o)
    {
        require_compatible(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    friend VectorStepFunction operator+(VectorStepFunction a, const VectorStepFunction& b) { return a += b; }
    friend VectorStepFunction operator-(VectorStepFunction a, const VectorStepFunction& b) { return a -= b; }

    friend bool operator==(const VectorStepFunction&, const VectorStepFunction&) = default;

    void require_compatible(const VectorStepFunction& o) const
    {
        if (!(grid_ == o.grid_) || !(space_ == o.space_))
            throw std::invalid_argument("VectorStepFunction: grid or space mismatch");
    }

private:
    DyadicGrid grid_;
    NormedSpace space_;
    std::vector<T> data_;
};

// ||f||_2 = (integral ||f(t)||^2 dt)^{1/2} on L_2^X.
double l2x_norm(const VectorStepFunction<double>& f);
// Exact squared L_2^X norm for rational-valued functions.
Rational l2x_norm_squared(const VectorStepFunction<Rational>& f);

VectorStepFunction<double> to_double(const VectorStepFunction<Rational>& f);
StepFunction<double> to_double(const StepFunction<Rational>& f);

// g(k) = f(k xor t).
template <Scalar T>
StepFunction<T> translate(const StepFunction<T>& f, std::size_t t)
{
    f.grid().require_cell(t);
    StepFunction<T> g(f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) g[k] = f[k ^ t];
    return g;
}

}  // namespace walsh
