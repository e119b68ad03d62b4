#pragma once

#include <cstdint>
#include <vector>

#include "parlab/errors.hpp"

namespace parlab {

// Mixed-radix index space: flat index <-> digit vector, most significant digit first.
class Box {
  public:
    Box() = default;
    explicit Box(std::vector<int> radix) : radix_(std::move(radix)) {
        size_ = 1;
        for (int r : radix_) {
            if (r <= 0) throw input_error("Box: empty axis");
            if (size_ > (int64_t{1} << 62) / r) throw cap_exceeded("Box: index space overflow");
            size_ *= r;
        }
    }

    int axes() const { return static_cast<int>(radix_.size()); }
    int radix(int i) const { return radix_[i]; }
    const std::vector<int>& radixes() const { return radix_; }
    int64_t size() const { return size_; }

    int64_t flatten(const std::vector<int>& digits) const {
        int64_t f = 0;
        for (size_t i = 0; i < radix_.size(); ++i) f = f * radix_[i] + digits[i];
        return f;
    }

    std::vector<int> unflatten(int64_t flat) const {
        std::vector<int> d(radix_.size());
        unflatten_into(flat, d);
        return d;
    }

    void unflatten_into(int64_t flat, std::vector<int>& d) const {
        d.resize(radix_.size());
        for (size_t i = radix_.size(); i-- > 0;) {
            d[i] = static_cast<int>(flat % radix_[i]);
            flat /= radix_[i];
        }
    }

  private:
    std::vector<int> radix_;
    int64_t size_ = 1;
};

// Uniform-radix power box s^n without materializing the radix vector.
inline int64_t checked_ipow(int64_t base, int exp, int64_t cap) {
    int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > cap / base) throw cap_exceeded("index space exceeds cap");
        r *= base;
    }
    return r;
}

}  // namespace parlab
