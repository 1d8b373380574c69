#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qosaic {

/// Problem dimensions: flows (users), access points, resource blocks.
struct Dims {
    std::size_t flows = 0;
    std::size_t aps = 0;
    std::size_t rbs = 0;

    std::size_t size() const { return flows * aps * rbs; }
    bool operator==(const Dims&) const = default;
};

/// Dense flows x APs x RBs array of doubles.
///
/// Storage is RB-major, then AP, then flow, so that all links sharing one
/// resource block are contiguous.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(Dims dims, double fill = 0.0) : dims_(dims), data_(dims.size(), fill) {}

    const Dims& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }

    std::size_t index(std::size_t flow, std::size_t ap, std::size_t rb) const
    {
        return (rb * dims_.aps + ap) * dims_.flows + flow;
    }

    double& operator()(std::size_t flow, std::size_t ap, std::size_t rb) { return data_[index(flow, ap, rb)]; }
    double operator()(std::size_t flow, std::size_t ap, std::size_t rb) const { return data_[index(flow, ap, rb)]; }

    /// All flow x AP entries of one resource block.
    std::span<double> rb_slice(std::size_t rb)
    {
        return {data_.data() + rb * dims_.aps * dims_.flows, dims_.aps * dims_.flows};
    }
    std::span<const double> rb_slice(std::size_t rb) const
    {
        return {data_.data() + rb * dims_.aps * dims_.flows, dims_.aps * dims_.flows};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

    bool operator==(const Tensor3&) const = default;

private:
    Dims dims_{};
    std::vector<double> data_;
};

inline void require_same_dims(const Tensor3& a, const Tensor3& b, const char* what)
{
    if (a.dims() != b.dims()) {
        throw std::invalid_argument(std::string("dimension mismatch: ") + what);
    }
}

} // namespace qosaic
