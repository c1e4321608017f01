#pragma once

#include <complex>

namespace wavekin {

// Kahan compensated accumulator.  Used everywhere a large structured sum is
// reduced so that the result does not depend on how much cancellation the
// term ordering produces.
template <class T>
class KahanSum {
    T sum_{};
    T cor_{};

public:
    KahanSum() = default;
    explicit KahanSum(const T& init) : sum_(init) {}

    KahanSum& operator+=(const T& x) {
        const T y = x - cor_;
        const T t = sum_ + y;
        cor_ = (t - sum_) - y;
        sum_ = t;
        return *this;
    }
    // fold another compensated partial sum in (chunked reductions)
    KahanSum& operator+=(const KahanSum& o) {
        *this += o.sum_;
        *this += -o.cor_;
        return *this;
    }
    T value() const { return sum_; }
};

using KahanReal = KahanSum<double>;

// std::complex arithmetic would optimize the correction away less reliably;
// keep the two components separate.
class KahanComplex {
    KahanReal re_, im_;

public:
    KahanComplex& operator+=(const std::complex<double>& z) {
        re_ += z.real();
        im_ += z.imag();
        return *this;
    }
    KahanComplex& operator+=(const KahanComplex& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }
};

}  // namespace wavekin
